#pragma once

// Matching machinery shared by the interpreter: an in-memory trace of
// reports for the current step, logical-variable bindings, and
// produce/consume/fold/unfold with unfold-based recovery.

#include "swing/engine.hpp"
#include "swing/wisl/ast.hpp"

#include <functional>
#include <set>

namespace swing::engine::detail {

/// A report reference inside a step: either already stored or local to the
/// trace being built.
struct Ref {
  bool local = false;
  std::int64_t id = 0;
  static Ref stored(ReportId id) { return {false, id}; }
  static Ref at(std::size_t i) { return {true, static_cast<std::int64_t>(i)}; }
};

class Trace {
public:
  std::size_t add(std::string kind, nlohmann::json payload, std::optional<Ref> prev, std::optional<Ref> parent);
  nlohmann::json &payload(std::size_t i) { return nodes_[i].payload; }
  /// Appends every node to the store in creation order.
  std::vector<Report> flush(reports::ReportStore &store);
  /// After flush: the stored id of a reference.
  ReportId resolve(const Ref &r) const;
  std::optional<ReportId> resolve(const std::optional<Ref> &r) const {
    return r ? std::optional<ReportId>(resolve(*r)) : std::nullopt;
  }
  bool empty() const { return nodes_.empty(); }

private:
  struct Node {
    std::string kind;
    nlohmann::json payload;
    std::optional<Ref> prev, parent;
  };
  std::vector<Node> nodes_;
  std::vector<ReportId> ids_;
};

/// Logical variables that matching may bind, and their bindings.
struct Bindings {
  std::map<std::string, Expr> bound;
  std::set<std::string> pattern;

  bool unbound(const std::string &lvar) const { return pattern.count(lvar) && !bound.count(lvar); }
};

/// Program-variable environment of an assertion.
using Env = std::map<std::string, Expr>;

/// Per predicate parameter, a type every instance's argument has.
using PredTypes = std::map<std::string, std::vector<std::optional<TypeName>>>;

/// Greatest set of per-parameter type facts preserved by every case,
/// assuming them for nested instances.
PredTypes infer_pred_types(const std::map<std::string, wisl::Predicate> &preds);

struct Failure {
  std::string atom;          // source text of the atom
  std::optional<SourceLoc> loc;
  std::string message;
  std::set<std::string> lvars; // logical variables of the instantiated atom
};

struct Leaf {
  sym::SymState state;
  Bindings b;
  std::optional<BranchCase> label; // set for leaves produced by recovery
};

struct MatchResult {
  std::vector<Leaf> ok;
  std::optional<Failure> failure; // set iff ok is empty
};

class Matcher {
public:
  Matcher(const gil::Program &prog, const PredTypes &types, Mode mode, bool snapshots, Trace &trace)
      : prog_(prog), types_(types), mode_(mode), snapshots_(snapshots), trace_(trace) {}

  nlohmann::json snap(const sym::SymState &s) const;

  /// Adds the assertion's resources. `definable` program variables missing
  /// from env are defined by `p == E` atoms or bound to fresh variables.
  /// Unbound pattern variables become fresh. Returns nullopt if infeasible.
  std::optional<sym::SymState> produce(sym::SymState s, const wisl::Assertion &a, Env &env,
                                       const std::set<std::string> &definable, Bindings &b) const;

  /// Consumes the assertion under a MatchStart report nested in `parent`.
  MatchResult consume(const sym::SymState &s, const wisl::Assertion &a, const Env &env, const Bindings &b,
                      const std::string &title, std::optional<Ref> parent, bool recovery, std::size_t &start_node);

  /// Folds pname(args) into an instance. Reports nest under `parent`.
  MatchResult fold(const sym::SymState &s, const std::string &pname, const std::vector<Expr> &args,
                   std::optional<Ref> parent);

  /// One state per feasible predicate case, instance removed.
  std::vector<std::pair<BranchCase, sym::SymState>> unfold(const sym::SymState &s, std::size_t instance) const;

  /// Index of an instance of pname whose arguments equal args under pc.
  std::optional<std::size_t> find_instance(const sym::SymState &s, const std::string &pname,
                                           const std::vector<Expr> &args) const;

  /// Folded instances sharing logical variables with `lvars`: direct sharing
  /// first, then through path-condition formulas.
  std::vector<std::size_t> candidates(const sym::SymState &s, const std::set<std::string> &lvars) const;

  Expr instantiate(const Expr &e, const Env &env, const Bindings &b) const;

  /// Adds the type facts implied by an instance.
  void assume_types(sym::SymState &s, const sym::PredInstance &p) const;

private:
  const gil::Program &prog_;
  const PredTypes &types_;
  Mode mode_;
  bool snapshots_;
  Trace &trace_;
  int fold_depth_ = 0;
  int renames_ = 0;

  struct AtomResult {
    bool ok = true;
    std::string message;
    std::set<std::string> lvars;
  };

  std::optional<Failure> consume_atoms(sym::SymState &s, const wisl::Assertion &a, const Env &env, Bindings &b,
                                       Ref prev, std::optional<Ref> parent,
                                       const std::optional<BranchCase> &label);
  AtomResult consume_atom(sym::SymState &s, const wisl::Atom &a, const Env &env, Bindings &b, std::size_t node);
  AtomResult consume_pred(sym::SymState &s, const wisl::Atom &a, const std::vector<Expr> &args, Bindings &b,
                          std::size_t node);
  std::optional<std::pair<sym::SymState, Bindings>> fold_body(const sym::SymState &s, const std::string &pname,
                                                              const std::vector<Expr> &args, const Bindings &b,
                                                              Ref parent);
};

bool has_unbound(const Expr &e, const Bindings &b);
std::set<std::string> lvars_of_assertion(const wisl::Assertion &a);
std::string describe_instance(const sym::PredInstance &p);

} // namespace swing::engine::detail
