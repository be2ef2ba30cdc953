#pragma once

#include "swing/wisl/ast.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace swing::gil {

// ---- lifting annotations ----

struct StmtKind {
  enum class Tag { Normal, Return, Hidden, LoopPrefix };
  Tag tag = Tag::Hidden;
  bool is_final = false; // meaningful for Normal and Return only

  static StmtKind normal(bool f) { return {Tag::Normal, f}; }
  static StmtKind ret(bool f) { return {Tag::Return, f}; }
  static StmtKind hidden() { return {Tag::Hidden, false}; }
  static StmtKind loop_prefix() { return {Tag::LoopPrefix, false}; }

  friend bool operator==(const StmtKind &, const StmtKind &) = default;
};

enum class BranchKind { IfElse, WhileLoop };

struct NestKind {
  enum class Kind { LoopBody, FunCall };
  Kind kind = Kind::FunCall;
  std::string name;
  friend bool operator==(const NestKind &, const NestKind &) = default;
};

struct Annot {
  std::optional<SourceLoc> source_loc;
  StmtKind stmt_kind;
  std::optional<BranchKind> branch_kind;
  std::optional<NestKind> nest_kind;
};

std::string to_string(const StmtKind &k);
std::string to_string(BranchKind k);
std::string to_string(const NestKind &k);

// ---- commands ----

struct Cmd {
  enum class Kind {
    Assign,
    GuardedGoto,
    Goto,
    Call,
    Load,
    Store,
    Alloc,
    Free,
    Skip,
    Fail,
    Return,
    Logic
  };

  Kind kind = Kind::Skip;
  std::string var;          // Assign / Call / Load / Alloc target
  Expr e1;                  // value, condition, address, size
  Expr e2;                  // stored value
  std::string then_label;   // GuardedGoto then-target, Goto target
  std::string else_label;
  std::size_t then_index = 0; // resolved targets
  std::size_t else_index = 0;
  std::string fname;
  std::vector<Expr> args;
  std::string message;      // Fail
  wisl::LogicCmd logic;
  std::optional<std::string> label;
  Annot annot;
};

std::string to_string(const Cmd &c);

struct LoopInfo {
  std::string function;            // originating WISL function
  SourceLoc loc;                   // the while statement
  wisl::Assertion invariant;
  std::vector<std::string> binders;
  Expr guard;
  std::vector<std::string> modified;
};

struct ProcSpec {
  wisl::Assertion pre;
  wisl::Assertion post;
};

struct Proc {
  enum class Origin { UserFunction, LoopBody, Lemma, Builtin };

  std::string name;
  std::vector<std::string> params;
  std::vector<Cmd> body;
  std::optional<ProcSpec> spec;
  Origin origin = Origin::UserFunction;
  std::optional<LoopInfo> loop;
  SourceLoc loc;

  std::size_t label_index(const std::string &label) const;
};

struct Program {
  std::map<std::string, Proc> procs;
  std::vector<std::string> proc_order;
  std::map<std::string, wisl::Predicate> predicates;
  std::map<std::string, wisl::Lemma> lemmas;
  std::string source;
  std::string path;

  const Proc &proc(const std::string &name) const;
};

class CompileError : public std::runtime_error {
public:
  CompileError(const std::string &msg, SourceLoc loc = {})
      : std::runtime_error(msg), loc_(loc) {}
  const SourceLoc &loc() const { return loc_; }

private:
  SourceLoc loc_;
};

/// Lowers a validated WISL program to annotated GIL. Loops become separate
/// procedures; builtins are included.
Program compile(const wisl::Program &p);

/// The lowering helpers (`i_add`), executed by inlining.
std::vector<Proc> builtin_procs();
bool is_builtin(const std::string &name);

std::string listing(const Proc &p);
nlohmann::json cmd_record(const Proc &p, std::size_t index);
/// Textual listing of every non-builtin proc followed by one JSON record per
/// command, one per line.
std::string dump(const Program &p);

} // namespace swing::gil
