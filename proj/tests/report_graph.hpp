#pragma once

#include "swing/lifter.hpp"
#include "swing/reports.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace swing::test {

// Order-independent rendering of the report graph below a report.
inline std::string canon(const reports::ReportStore &s, reports::ReportId id) {
  auto r = s.get(id);
  std::vector<std::string> next, kids;
  for (auto n : s.next_of(id))
    next.push_back(canon(s, n));
  for (auto c : s.children_of(id))
    if (!s.get(c).previous) // nest roots; the rest hang off them
      kids.push_back(canon(s, c));
  std::sort(next.begin(), next.end());
  std::sort(kids.begin(), kids.end());
  std::string out = r.kind + r.payload.dump() + "{";
  for (const auto &k : kids)
    out += k + ",";
  out += "}[";
  for (const auto &n : next)
    out += n + ",";
  return out + "]";
}

inline std::vector<reports::ReportId> roots(const reports::ReportStore &s) {
  std::vector<reports::ReportId> out;
  for (reports::ReportId i = 0; i < static_cast<reports::ReportId>(s.size()); ++i) {
    auto r = s.get(i);
    if (!r.previous && !r.parent)
      out.push_back(i);
  }
  return out;
}

// Order-independent rendering of a lifted tree below a node.
inline std::string shape(const lifter::SourceTree &t, lifter::NodeId id) {
  const auto &n = t.node(id);
  std::vector<std::string> kids, nests;
  for (const auto &e : n.children)
    kids.push_back(e.label + ":" + (e.node ? shape(t, *e.node) : std::string("?")));
  for (const auto &e : n.nested)
    nests.push_back(e.tag + ":" + (e.root ? shape(t, *e.root) : std::string("?")));
  std::sort(kids.begin(), kids.end());
  std::sort(nests.begin(), nests.end());
  std::string out = n.text + "|" + lifter::to_string(n.status) + "{";
  for (const auto &x : nests)
    out += x + ",";
  out += "}[";
  for (const auto &x : kids)
    out += x + ",";
  return out + "]";
}

inline std::string shape(const lifter::SourceTree &t) { return shape(t, t.root().value()); }

// Explores every stub through jump + stepSpecific, lowest node first.
inline int explore_interactively(lifter::Explorer &ex) {
  using K = lifter::Command::Kind;
  int requests = 0;
  for (;;) {
    std::optional<std::pair<lifter::NodeId, std::string>> next;
    for (const auto &n : ex.tree().nodes()) {
      for (const auto &e : n.children)
        if (!e.explored()) {
          next = {n.id, e.label};
          break;
        }
      if (!next)
        for (const auto &e : n.nested)
          if (!e.explored()) {
            next = {n.id, e.tag};
            break;
          }
      if (next)
        break;
    }
    if (!next)
      return requests;
    ex.apply({K::Jump, "", next->first});
    ex.apply({K::StepSpecific, next->second, 0});
    requests += 2;
  }
}

} // namespace swing::test
