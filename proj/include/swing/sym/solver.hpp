#pragma once

// Decision procedures over symbolic expressions.
//
// Values are two-sorted: scalars (null, naturals, booleans, pointers and an
// "undefined" value produced by ill-typed operations) and lists of values.
// Arithmetic is over naturals with truncating subtraction; `p + n` on a
// pointer moves its offset. A list with an undefined element is undefined.
// Equality is false when either side is undefined, comparisons are false
// unless both sides are naturals and type tests of undefined values are
// false. A formula holds iff it evaluates to `true`. Variables range over
// defined values.

#include "swing/expr.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace swing::sym {

enum class SatResult { Sat, Unsat, Unknown };
const char *to_string(SatResult r);

/// Canonical form: literal folding, `a::r` as `[a] @ r`, flattened `@`
/// without empty parts, `len` distributed over `@` and folded on literals.
/// Idempotent.
Expr normalize(const Expr &e);

/// A concrete value of the theory.
struct Val {
  enum class Kind { Undef, Null, Nat, Bool, Ptr, List };
  Kind kind = Kind::Undef;
  std::uint64_t n = 0; // nat payload or pointer offset
  bool b = false;
  std::string block;   // pointer block
  std::vector<Val> elems;

  static Val undef() { return {}; }
  static Val null() { return make(Kind::Null); }
  static Val nat(std::uint64_t v) {
    Val r = make(Kind::Nat);
    r.n = v;
    return r;
  }
  static Val boolean(bool v) {
    Val r = make(Kind::Bool);
    r.b = v;
    return r;
  }
  static Val ptr(std::string blk, std::uint64_t off) {
    Val r = make(Kind::Ptr);
    r.n = off;
    r.block = std::move(blk);
    return r;
  }
  static Val list(std::vector<Val> es) {
    Val r = make(Kind::List);
    r.elems = std::move(es);
    return r;
  }
  static Val make(Kind k) {
    Val r;
    r.kind = k;
    return r;
  }

  friend bool operator==(const Val &, const Val &) = default;
};

std::string to_string(const Val &v);

using Model = std::map<std::string, Val>; // keyed by variable name

/// Evaluates under a model; unassigned variables evaluate to Undef.
Val eval(const Expr &e, const Model &m);
bool holds(const Expr &f, const Model &m);

struct SatAnswer {
  SatResult result = SatResult::Unknown;
  std::optional<Model> model; // present iff result == Sat
};

struct SolverOptions {
  bool search_model = true;
  std::size_t dnf_limit = 256;
  std::size_t search_budget = 20000;
};

/// Satisfiability of a conjunction. Unsat answers are proofs; Sat answers
/// come with a model that was checked against the input.
SatAnswer check(const std::vector<Expr> &conj, const SolverOptions &opts = {});

/// Sat/Unsat/Unknown with a small model-search budget.
SatResult sat(const std::vector<Expr> &conj);

/// Fast refutation check used on hot paths; true only if provably Unsat.
/// Results are memoized.
bool unsat(const std::vector<Expr> &conj);

/// pc ⇒ f, decided as unsatisfiability of pc ∧ ¬f. Unknown counts as false.
bool entails(const std::vector<Expr> &pc, const Expr &f);

/// Theory check on a conjunction without disjunctions: Unsat or Unknown.
/// Exposed for tests.
SatResult theory_check(const std::vector<Expr> &literals);

} // namespace swing::sym
