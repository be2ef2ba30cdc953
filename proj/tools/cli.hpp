#pragma once

// The `swing` command line: verify, bench, adapter.

#include "swing/engine.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace swing::cli {

inline constexpr const char *kJsonSchema = "swing-verify/1";

struct Failure {
  std::string kind;    // VerifyFailure | RuntimeFail | EngineError
  std::string atom;    // empty unless VerifyFailure
  std::string message;
  std::optional<SourceLoc> loc;
};

struct ProcSummary {
  std::string proc;
  std::string verdict; // verified | failed | error
  std::size_t branches = 0;
  std::size_t verified = 0;
  std::vector<Failure> failures;
  double ms = 0;
  std::optional<nlohmann::json> tree;
};

ProcSummary summarize(const std::string &proc, const std::vector<engine::Outcome> &outcomes, double ms);
nlohmann::json to_json(const ProcSummary &s);

/// Runs the command line; returns the process exit code.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace swing::cli
