#include "swing/lifter.hpp"

#include <cctype>

namespace swing::lifter {

using nlohmann::json;

namespace {

bool is_temporary(const std::string &v) {
  if (v.rfind("_var", 0) != 0 || v.size() == 4)
    return false;
  for (std::size_t i = 4; i < v.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(v[i])))
      return false;
  return true;
}

std::string at_offset(const std::string &block, std::int64_t off) {
  if (off == 0)
    return block;
  return "(" + block + " + " + std::to_string(off) + ")";
}

} // namespace

DisplayState lift_state(const json &snap) {
  DisplayState out;
  if (snap.is_null())
    return out;
  for (const auto &e : snap.value("store", json::array())) {
    Binding b{e.at("var").get<std::string>(), e.at("expr").get<std::string>()};
    (is_temporary(b.name) ? out.intermediate : out.store).push_back(std::move(b));
  }

  // Cells arrive sorted by block then offset; consecutive offsets of one
  // block print as a single points-to.
  std::string block, line;
  std::int64_t next = 0;
  auto flush = [&] {
    if (!line.empty())
      out.heap.push_back(line);
    line.clear();
  };
  for (const auto &c : snap.value("heap", json::array())) {
    std::string b = c.at("block");
    std::int64_t off = c.at("offset");
    std::string v = c.at("expr");
    if (line.empty() || b != block || off != next) {
      flush();
      block = b;
      line = at_offset(b, off) + " -> " + v;
    } else {
      line += ", " + v;
    }
    next = off + 1;
  }
  flush();

  for (const auto &p : snap.value("preds", json::array()))
    out.preds.push_back(p);
  for (const auto &f : snap.value("pc", json::array()))
    out.pc.push_back(f);
  return out;
}

json to_json(const DisplayState &s) {
  auto bindings = [](const std::vector<Binding> &bs) {
    json a = json::array();
    for (const auto &b : bs)
      a.push_back({{"name", b.name}, {"value", b.value}});
    return a;
  };
  return {{"store", bindings(s.store)},
          {"intermediate", bindings(s.intermediate)},
          {"heap", s.heap},
          {"preds", s.preds},
          {"pc", s.pc}};
}

} // namespace swing::lifter
