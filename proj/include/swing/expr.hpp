#pragma once

// Expressions shared by every layer: WISL program expressions, logic
// expressions inside assertions, GIL expressions and symbolic values.

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace swing {

struct Value {
  enum class Kind { Null, Nat, Bool, Addr };

  Kind kind = Kind::Null;
  std::uint64_t nat = 0; // Nat payload, or the offset of an Addr
  bool boolean = false;
  std::string block;     // Addr block identifier, compared by equality only

  static Value null() { return {}; }
  static Value of_nat(std::uint64_t n) { return {Kind::Nat, n, false, {}}; }
  static Value of_bool(bool b) { return {Kind::Bool, 0, b, {}}; }
  static Value addr(std::string block, std::uint64_t offset) {
    return {Kind::Addr, offset, false, std::move(block)};
  }

  friend bool operator==(const Value &, const Value &) = default;
};

int compare_values(const Value &a, const Value &b);

enum class UnOp { Not, Neg, Len };
enum class BinOp { Add, Sub, Mul, Eq, Lt, Le, And, Or, Cons, Concat };
enum class TypeName { Null, Nat, Bool, Ptr, List };

const char *to_string(UnOp op);
const char *to_string(BinOp op);
const char *to_string(TypeName t);
std::optional<TypeName> type_name_from_string(const std::string &s);

enum class ExprKind { Lit, PVar, LVar, Unary, Binary, List, TypeTest };

struct ExprNode;

/// Immutable, structurally compared expression handle.
class Expr {
public:
  Expr();

  static Expr lit(Value v);
  static Expr null() { return lit(Value::null()); }
  static Expr nat(std::uint64_t n) { return lit(Value::of_nat(n)); }
  static Expr boolean(bool b) { return lit(Value::of_bool(b)); }
  static Expr pvar(std::string name);
  static Expr lvar(std::string name);
  static Expr unary(UnOp op, Expr a);
  static Expr binary(BinOp op, Expr a, Expr b);
  static Expr list(std::vector<Expr> elems);
  static Expr nil() { return list({}); }
  static Expr type_test(Expr a, TypeName t);

  ExprKind kind() const;
  const Value &value() const;
  const std::string &name() const;
  UnOp unop() const;
  BinOp binop() const;
  TypeName type() const;
  const std::vector<Expr> &args() const;
  const Expr &arg(std::size_t i) const { return args()[i]; }
  std::size_t hash() const;

  bool is_lit() const { return kind() == ExprKind::Lit; }
  bool is_lvar() const { return kind() == ExprKind::LVar; }
  bool is_pvar() const { return kind() == ExprKind::PVar; }
  bool is_true() const;
  bool is_false() const;
  bool is_nat_lit() const;
  bool is_binary(BinOp op) const;
  bool is_unary(UnOp op) const;

  friend bool operator==(const Expr &a, const Expr &b);
  friend int compare_exprs(const Expr &a, const Expr &b);
  friend std::strong_ordering operator<=>(const Expr &a, const Expr &b);

private:
  explicit Expr(std::shared_ptr<const ExprNode> n) : node_(std::move(n)) {}
  static Expr from_node(ExprNode n);
  std::shared_ptr<const ExprNode> node_;
};

struct ExprNode {
  ExprKind kind = ExprKind::Lit;
  Value value;
  std::string name;
  UnOp unop = UnOp::Not;
  BinOp binop = BinOp::Add;
  TypeName type = TypeName::Null;
  std::vector<Expr> args;
  std::size_t hash = 0;
};

int compare_exprs(const Expr &a, const Expr &b);

// Convenience builders.
inline Expr operator+(Expr a, Expr b) { return Expr::binary(BinOp::Add, std::move(a), std::move(b)); }
Expr mk_eq(Expr a, Expr b);
Expr mk_not(Expr a);
Expr mk_and(Expr a, Expr b);
Expr mk_len(Expr a);

void collect_lvars(const Expr &e, std::set<std::string> &out);
void collect_pvars(const Expr &e, std::set<std::string> &out);
std::set<std::string> lvars_of(const Expr &e);
bool mentions_lvar(const Expr &e, const std::string &name);

/// Rewrites bottom-up; `f` returns a replacement or nullopt to keep the node.
Expr rewrite(const Expr &e, const std::function<std::optional<Expr>(const Expr &)> &f);

/// Substitutes logical variables by name.
Expr subst_lvars(const Expr &e, const std::function<std::optional<Expr>(const std::string &)> &f);

struct ExprHash {
  std::size_t operator()(const Expr &e) const { return e.hash(); }
};

} // namespace swing
