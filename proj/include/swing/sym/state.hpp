#pragma once

// Symbolic state: store, block-offset heap, folded predicate instances and
// path condition. States are values; every operation returns a new state.

#include "swing/expr.hpp"
#include "swing/sym/solver.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace swing::sym {

enum class MemErrorKind { MissingCell, UseAfterFree, NotAnAddress, SymbolicOffset, PartialFree };
const char *to_string(MemErrorKind k);

class MemError : public std::runtime_error {
public:
  MemError(MemErrorKind kind, Expr addr, const std::string &msg)
      : std::runtime_error(msg), kind(kind), addr(std::move(addr)) {}
  MemErrorKind kind;
  Expr addr;
};

class DeadPath : public std::runtime_error {
public:
  DeadPath() : std::runtime_error("both branches are infeasible") {}
};

class UnboundVariable : public std::runtime_error {
public:
  explicit UnboundVariable(const std::string &name)
      : std::runtime_error("program variable '" + name + "' is not initialised"), name(name) {}
  std::string name;
};

/// An address split into block and concrete offset.
struct Loc {
  Expr block;
  std::uint64_t offset = 0;
};

struct SymHeap {
  std::map<Expr, std::map<std::uint64_t, Expr>> cells;
  std::map<Expr, std::optional<std::uint64_t>> bounds;
  std::set<Expr> freed;

  std::size_t cell_count() const;
  friend bool operator==(const SymHeap &, const SymHeap &) = default;
};

struct PredInstance {
  std::string name;
  std::vector<Expr> args;
  friend bool operator==(const PredInstance &, const PredInstance &) = default;
};

std::string to_string(const PredInstance &p);

struct SymState {
  std::map<std::string, Expr> store;
  SymHeap heap;
  std::vector<PredInstance> preds;
  std::vector<Expr> pc;       // normalized conjuncts, never `true`
  std::uint64_t fresh = 0;    // #lvar_N counter
  std::uint64_t blocks = 0;   // allocation counter

  /// Store lookup; throws UnboundVariable.
  const Expr &var(const std::string &name) const;
  /// Program variables replaced through the store, then normalized.
  Expr eval(const Expr &e) const;

  /// Adds a formula (split at top-level `and`) to the path condition.
  void assume(const Expr &f);
  bool feasible() const; // false only if provably Unsat
  bool entails(const Expr &f) const;

  std::string fresh_lvar();
  Expr fresh_lvar_expr() { return Expr::lvar(fresh_lvar()); }

  friend bool operator==(const SymState &, const SymState &) = default;
};

/// Normalized address to (block, offset). Throws NotAnAddress or
/// SymbolicOffset.
Loc resolve(const SymState &s, const Expr &addr);

/// The heap key denoting the same block under the path condition, if any.
std::optional<Expr> find_block(const SymState &s, const Expr &block);

Expr heap_load(const SymState &s, const Expr &addr);
SymState heap_store(const SymState &s, const Expr &addr, const Expr &value);
/// Returns the new state and the address of the block's first cell.
std::pair<SymState, Expr> heap_alloc(const SymState &s, std::uint64_t n);
SymState heap_free(const SymState &s, const Expr &addr);

/// Adds an owned cell; used when producing points-to assertions.
SymState add_cell(const SymState &s, const Loc &loc, const Expr &value);

enum class BranchCase { True, False };
std::vector<std::pair<BranchCase, SymState>> branch(const SymState &s, const Expr &cond);

nlohmann::json snapshot(const SymState &s);

} // namespace swing::sym
