#pragma once

// Append-only storage for analysis reports. Each report links to the
// chronologically previous report on its path and to the report that
// encloses it (matching, spec calls, loop bodies).

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace swing::reports {

using ReportId = std::int64_t;

struct Report {
  ReportId id = 0;
  std::optional<ReportId> previous;
  std::optional<ReportId> parent;
  std::string kind;
  nlohmann::json payload;
  std::int64_t timestamp_ns = 0; // kept in memory only; files stay bit-stable
};

/// One NDJSON line, fields ordered {id, previous, parent, kind, payload}.
std::string to_line(const Report &r);
Report from_line(const std::string &line);

class DanglingReference : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};
class NotFound : public std::runtime_error {
public:
  explicit NotFound(ReportId id) : std::runtime_error("report " + std::to_string(id) + " not found") {}
};
class StorageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ReportStore {
public:
  virtual ~ReportStore() = default;

  /// Throws DanglingReference when previous/parent are not stored yet.
  virtual ReportId append(std::optional<ReportId> previous, std::optional<ReportId> parent,
                          std::string kind, nlohmann::json payload) = 0;
  virtual Report get(ReportId id) const = 0;
  virtual std::vector<ReportId> next_of(ReportId id) const = 0;
  virtual std::vector<ReportId> children_of(ReportId id) const = 0;
  /// Number of ids handed out.
  virtual std::size_t size() const = 0;
  virtual bool retains() const { return true; }
  /// Reports with ids in [from, size()).
  std::vector<Report> since(ReportId from) const;
};

class MemoryStore : public ReportStore {
public:
  ReportId append(std::optional<ReportId> previous, std::optional<ReportId> parent, std::string kind,
                  nlohmann::json payload) override;
  Report get(ReportId id) const override;
  std::vector<ReportId> next_of(ReportId id) const override;
  std::vector<ReportId> children_of(ReportId id) const override;
  std::size_t size() const override;

protected:
  virtual void persist(const Report &) {}

private:
  mutable std::shared_mutex mu_;
  std::vector<Report> reports_;
  std::vector<std::vector<ReportId>> next_, children_;
};

/// Memory store mirrored to `<dir>/<session>.ndjson`, flushed per append.
class NdjsonStore : public MemoryStore {
public:
  NdjsonStore(const std::filesystem::path &dir, const std::string &session);
  const std::filesystem::path &path() const { return path_; }

protected:
  void persist(const Report &r) override;

private:
  std::filesystem::path path_;
  std::ofstream out_;
};

/// Hands out ids and keeps nothing.
class NullStore : public ReportStore {
public:
  ReportId append(std::optional<ReportId> previous, std::optional<ReportId> parent, std::string kind,
                  nlohmann::json payload) override;
  Report get(ReportId id) const override { throw NotFound(id); }
  std::vector<ReportId> next_of(ReportId id) const override { throw NotFound(id); }
  std::vector<ReportId> children_of(ReportId id) const override { throw NotFound(id); }
  std::size_t size() const override { return next_id_; }
  bool retains() const override { return false; }

private:
  std::size_t next_id_ = 0;
};

/// Reads a session file back into a memory store.
std::unique_ptr<MemoryStore> load_ndjson(const std::filesystem::path &file);

} // namespace swing::reports
