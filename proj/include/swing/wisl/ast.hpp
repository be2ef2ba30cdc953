#pragma once

#include "swing/expr.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace swing {

/// Span in the source text. Lines and columns are 1-based; `end` is
/// inclusive of the last character. Byte offsets are half-open.
struct SourceLoc {
  int start_line = 0;
  int start_col = 0;
  int end_line = 0;
  int end_col = 0;
  std::size_t begin = 0;
  std::size_t end = 0;

  bool valid() const { return start_line > 0; }
  bool contains(const SourceLoc &o) const { return begin <= o.begin && o.end <= end; }
  friend bool operator==(const SourceLoc &, const SourceLoc &) = default;
};

std::string to_string(const SourceLoc &loc);

} // namespace swing

namespace swing::wisl {

/// One `*`-separated conjunct of an assertion.
struct Atom {
  enum class Kind { Pure, PointsTo, PredApp };
  Kind kind = Kind::Pure;
  Expr expr;              // the formula (Pure) or the base address (PointsTo)
  std::vector<Expr> args; // cell values (PointsTo) or arguments (PredApp)
  std::string pred;
  SourceLoc loc;
};

/// A separating conjunction, kept flat; the empty assertion is `emp`.
struct Assertion {
  std::vector<Atom> atoms;

  bool is_emp() const { return atoms.empty(); }
  Assertion star(const Assertion &other) const;
};

struct LogicCmd {
  enum class Kind { Fold, Unfold, AssertBind, ApplyLemma };
  Kind kind = Kind::Fold;
  std::string name; // predicate or lemma
  std::vector<Expr> args;
  Assertion assertion;
  std::vector<std::string> binders;
};

struct Stmt {
  enum class Kind {
    Skip,
    Assign,
    FunCall,
    Lookup,
    Mutate,
    Alloc,
    Dealloc,
    IfElse,
    While,
    Tactic
  };

  Kind kind = Kind::Skip;
  SourceLoc loc;
  std::string var;
  std::string fname;
  Expr e1; // value, address, condition or size
  Expr e2; // stored value for Mutate
  SourceLoc e1_loc;
  std::vector<Expr> args;
  std::vector<Stmt> then_block; // also the loop body
  std::vector<Stmt> else_block;
  std::optional<Assertion> invariant;
  std::vector<std::string> binders;
  LogicCmd tactic;
  SourceLoc header_loc; // `while (...)` / `if (...)` header
};

using Block = std::vector<Stmt>;

struct Spec {
  Assertion pre;
  Assertion post;
  SourceLoc pre_loc;
  SourceLoc post_loc;
};

struct Function {
  std::string name;
  std::vector<std::string> params;
  Block body;
  Expr ret;
  SourceLoc ret_loc;  // `return E`
  SourceLoc loc;
  std::optional<Spec> spec;
};

struct Predicate {
  std::string name;
  std::vector<std::string> params;
  std::vector<Assertion> cases;
  SourceLoc loc;
};

struct Lemma {
  std::string name;
  std::vector<std::string> params;
  Assertion hypothesis;
  Assertion conclusion;
  std::optional<Block> proof;
  SourceLoc loc;
};

struct Program {
  std::map<std::string, Predicate> predicates;
  std::map<std::string, Lemma> lemmas;
  std::map<std::string, Function> functions;
  std::vector<std::string> function_order;
  std::vector<std::string> lemma_order;
  std::string source;
  std::string path;
};

struct Diagnostic {
  enum class Severity { Error, Warning };
  Severity severity = Severity::Error;
  std::string message;
  SourceLoc loc;
};

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string &msg, SourceLoc loc)
      : std::runtime_error(msg), loc_(loc) {}
  const SourceLoc &loc() const { return loc_; }

private:
  SourceLoc loc_;
};

/// Raised by parse_program when the parsed program fails validation.
class ResolutionError : public std::runtime_error {
public:
  explicit ResolutionError(std::vector<Diagnostic> diags);
  const std::vector<Diagnostic> &diagnostics() const { return diags_; }

private:
  std::vector<Diagnostic> diags_;
};

} // namespace swing::wisl
