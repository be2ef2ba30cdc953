#pragma once

// Compositional symbolic execution over GIL. A session verifies one
// procedure against its spec; every executed command, match step and
// produced assertion becomes a report. Execution is driven one command at a
// time through single-use continuations.

#include "swing/gil.hpp"
#include "swing/reports.hpp"
#include "swing/sym/state.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace swing::engine {

enum class Mode { Auto, Manual };

using ContinuationId = std::uint64_t;
using reports::ReportId;

/// Why a path continues the way it does.
struct BranchCase {
  enum class Kind { Next, GuardTrue, GuardFalse, PredCase, SpecCase, MatchRecovery };
  Kind kind = Kind::Next;
  int index = 0;
  std::string text;

  friend bool operator==(const BranchCase &, const BranchCase &) = default;
};

const char *to_string(BranchCase::Kind k);
nlohmann::json to_json(const BranchCase &c);

struct Outcome {
  enum class Kind { VerifiedBranch, VerifyFailure, RuntimeFail, EngineError };
  Kind kind = Kind::VerifiedBranch;
  std::string proc;
  std::string message;
  std::string failed_atom;          // VerifyFailure: the atom that could not be matched
  std::optional<SourceLoc> atom_loc;
  sym::SymState state;
  ReportId report = 0;              // the Result report
};

const char *to_string(Outcome::Kind k);

/// A report as seen by in-process consumers; identical to what the store
/// receives.
using reports::Report;

struct Child {
  BranchCase label;
  ContinuationId k;
};

struct Nest {
  std::string tag; // "LoopBody"
  std::string proc;
  ContinuationId k;
};

struct StepResult {
  std::vector<Child> next;        // continuations of the stepped path
  std::vector<Nest> nested;       // sub-verifications opened by this step
  std::vector<Outcome> finished;  // paths that ended in this step
  std::vector<Report> reports;    // reports appended by this step, in id order
};

class NoSpec : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};
class ProduceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};
class StaleContinuation : public std::runtime_error {
public:
  explicit StaleContinuation(ContinuationId k)
      : std::runtime_error("continuation " + std::to_string(k) + " is not live") {}
};

struct Options {
  Mode mode = Mode::Auto;
  /// State snapshots in report payloads. Disabled when nothing reads them.
  bool snapshots = true;
  int max_inline_depth = 64;
};

struct Config;

class Session {
public:
  /// Produces the precondition and writes the root Produce report.
  Session(std::shared_ptr<const gil::Program> program, std::string proc, reports::ReportStore &store,
          Options opts = {});
  ~Session();
  Session(const Session &) = delete;
  Session &operator=(const Session &) = delete;

  const std::string &proc() const { return proc_; }
  const gil::Program &program() const { return *program_; }
  const Options &options() const { return opts_; }

  /// The root report and the initial continuations (one per produced state).
  ReportId root_report() const { return root_report_; }
  const StepResult &initial() const { return initial_; }

  /// Executes one command on path k; k is consumed.
  StepResult step(ContinuationId k);

  std::vector<ContinuationId> live() const;
  bool is_live(ContinuationId k) const;
  /// Proc and command index k will execute next.
  std::pair<std::string, std::size_t> position(ContinuationId k) const;
  const sym::SymState &state_of(ContinuationId k) const;
  /// Where k's next report attaches: its previous and parent report.
  std::pair<std::optional<ReportId>, std::optional<ReportId>> anchor(ContinuationId k) const;
  /// The branch case k was created with, if it came out of a fork.
  std::optional<BranchCase> label_of(ContinuationId k) const;

  /// Depth-first exhaustion of every live continuation, nested
  /// sub-verifications first.
  std::vector<Outcome> run_all();

  /// Outcomes of every path finished so far, in completion order.
  const std::vector<Outcome> &outcomes() const { return outcomes_; }

private:
  std::shared_ptr<const gil::Program> program_;
  std::string proc_;
  reports::ReportStore &store_;
  Options opts_;
  ReportId root_report_ = 0;
  StepResult initial_;
  std::map<ContinuationId, std::unique_ptr<Config>> live_;
  ContinuationId next_k_ = 0;
  std::vector<Outcome> outcomes_;
  std::map<std::string, std::vector<std::optional<TypeName>>> pred_types_;

  friend class Stepper;
};

/// Convenience: verify one proc, returning all outcomes.
std::vector<Outcome> verify(std::shared_ptr<const gil::Program> program, const std::string &proc,
                            reports::ReportStore &store, Options opts = {});

/// Procedures verified by default: user functions and proved lemmas with a
/// spec, in program order. Loop bodies are verified as nests of their
/// function.
std::vector<std::string> default_targets(const gil::Program &p);

} // namespace swing::engine
