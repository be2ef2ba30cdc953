#include "swing/reports.hpp"

#include <mutex>

namespace swing::reports {

std::string to_line(const Report &r) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["previous"] = r.previous ? nlohmann::ordered_json(*r.previous) : nlohmann::ordered_json(nullptr);
  j["parent"] = r.parent ? nlohmann::ordered_json(*r.parent) : nlohmann::ordered_json(nullptr);
  j["kind"] = r.kind;
  j["payload"] = nlohmann::ordered_json::parse(r.payload.dump());
  return j.dump();
}

Report from_line(const std::string &line) {
  auto j = nlohmann::json::parse(line);
  Report r;
  r.id = j.at("id").get<ReportId>();
  if (!j.at("previous").is_null())
    r.previous = j["previous"].get<ReportId>();
  if (!j.at("parent").is_null())
    r.parent = j["parent"].get<ReportId>();
  r.kind = j.at("kind").get<std::string>();
  r.payload = j.at("payload");
  return r;
}

std::vector<Report> ReportStore::since(ReportId from) const {
  std::vector<Report> out;
  if (!retains())
    return out;
  for (auto id = from; id < static_cast<ReportId>(size()); ++id)
    out.push_back(get(id));
  return out;
}

namespace {

void check_ref(const char *what, std::optional<ReportId> ref, std::size_t n) {
  if (ref && (*ref < 0 || static_cast<std::size_t>(*ref) >= n))
    throw DanglingReference(std::string(what) + " report " + std::to_string(*ref) + " does not exist");
}

std::int64_t now_ns() {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

} // namespace

ReportId MemoryStore::append(std::optional<ReportId> previous, std::optional<ReportId> parent,
                             std::string kind, nlohmann::json payload) {
  std::unique_lock lock(mu_);
  check_ref("previous", previous, reports_.size());
  check_ref("parent", parent, reports_.size());
  Report r{static_cast<ReportId>(reports_.size()), previous, parent, std::move(kind), std::move(payload),
           now_ns()};
  persist(r);
  if (previous)
    next_[*previous].push_back(r.id);
  if (parent)
    children_[*parent].push_back(r.id);
  reports_.push_back(std::move(r));
  next_.emplace_back();
  children_.emplace_back();
  return reports_.back().id;
}

Report MemoryStore::get(ReportId id) const {
  std::shared_lock lock(mu_);
  if (id < 0 || static_cast<std::size_t>(id) >= reports_.size())
    throw NotFound(id);
  return reports_[id];
}

std::vector<ReportId> MemoryStore::next_of(ReportId id) const {
  std::shared_lock lock(mu_);
  if (id < 0 || static_cast<std::size_t>(id) >= reports_.size())
    throw NotFound(id);
  return next_[id];
}

std::vector<ReportId> MemoryStore::children_of(ReportId id) const {
  std::shared_lock lock(mu_);
  if (id < 0 || static_cast<std::size_t>(id) >= reports_.size())
    throw NotFound(id);
  return children_[id];
}

std::size_t MemoryStore::size() const {
  std::shared_lock lock(mu_);
  return reports_.size();
}

NdjsonStore::NdjsonStore(const std::filesystem::path &dir, const std::string &session) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  path_ = dir / (session + ".ndjson");
  out_.open(path_, std::ios::out | std::ios::trunc);
  if (!out_)
    throw StorageError("cannot open report file " + path_.string());
}

void NdjsonStore::persist(const Report &r) {
  out_ << to_line(r) << '\n';
  out_.flush();
  if (!out_)
    throw StorageError("write to " + path_.string() + " failed");
}

ReportId NullStore::append(std::optional<ReportId> previous, std::optional<ReportId> parent, std::string,
                           nlohmann::json) {
  check_ref("previous", previous, next_id_);
  check_ref("parent", parent, next_id_);
  return static_cast<ReportId>(next_id_++);
}

std::unique_ptr<MemoryStore> load_ndjson(const std::filesystem::path &file) {
  std::ifstream in(file);
  if (!in)
    throw StorageError("cannot read " + file.string());
  auto store = std::make_unique<MemoryStore>();
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty())
      continue;
    Report r = from_line(line);
    ReportId id = store->append(r.previous, r.parent, r.kind, r.payload);
    if (id != r.id)
      throw StorageError("non-dense report ids in " + file.string());
  }
  return store;
}

} // namespace swing::reports
