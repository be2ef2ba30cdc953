#include "swing/expr.hpp"

#include <stdexcept>

namespace swing {

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t hash_value(const Value &v) {
  std::size_t h = static_cast<std::size_t>(v.kind);
  h = mix(h, std::hash<std::uint64_t>{}(v.nat));
  h = mix(h, v.boolean ? 1 : 0);
  h = mix(h, std::hash<std::string>{}(v.block));
  return h;
}

const Expr &null_expr() {
  static const Expr e = Expr::null();
  return e;
}

} // namespace

int compare_values(const Value &a, const Value &b) {
  if (a.kind != b.kind)
    return a.kind < b.kind ? -1 : 1;
  switch (a.kind) {
  case Value::Kind::Null:
    return 0;
  case Value::Kind::Nat:
    return a.nat == b.nat ? 0 : (a.nat < b.nat ? -1 : 1);
  case Value::Kind::Bool:
    return a.boolean == b.boolean ? 0 : (a.boolean ? 1 : -1);
  case Value::Kind::Addr:
    if (a.block != b.block)
      return a.block < b.block ? -1 : 1;
    return a.nat == b.nat ? 0 : (a.nat < b.nat ? -1 : 1);
  }
  return 0;
}

const char *to_string(UnOp op) {
  switch (op) {
  case UnOp::Not: return "not";
  case UnOp::Neg: return "-";
  case UnOp::Len: return "len";
  }
  return "?";
}

const char *to_string(BinOp op) {
  switch (op) {
  case BinOp::Add: return "+";
  case BinOp::Sub: return "-";
  case BinOp::Mul: return "*";
  case BinOp::Eq: return "==";
  case BinOp::Lt: return "<";
  case BinOp::Le: return "<=";
  case BinOp::And: return "and";
  case BinOp::Or: return "or";
  case BinOp::Cons: return "::";
  case BinOp::Concat: return "@";
  }
  return "?";
}

const char *to_string(TypeName t) {
  switch (t) {
  case TypeName::Null: return "Null";
  case TypeName::Nat: return "Nat";
  case TypeName::Bool: return "Bool";
  case TypeName::Ptr: return "Ptr";
  case TypeName::List: return "List";
  }
  return "?";
}

std::optional<TypeName> type_name_from_string(const std::string &s) {
  if (s == "Null") return TypeName::Null;
  if (s == "Nat") return TypeName::Nat;
  if (s == "Bool") return TypeName::Bool;
  if (s == "Ptr") return TypeName::Ptr;
  if (s == "List") return TypeName::List;
  return std::nullopt;
}

Expr Expr::from_node(ExprNode n) {
  std::size_t h = static_cast<std::size_t>(n.kind) * 131 + 7;
  switch (n.kind) {
  case ExprKind::Lit:
    h = mix(h, hash_value(n.value));
    break;
  case ExprKind::PVar:
  case ExprKind::LVar:
    h = mix(h, std::hash<std::string>{}(n.name));
    break;
  case ExprKind::Unary:
    h = mix(h, static_cast<std::size_t>(n.unop));
    break;
  case ExprKind::Binary:
    h = mix(h, static_cast<std::size_t>(n.binop));
    break;
  case ExprKind::TypeTest:
    h = mix(h, static_cast<std::size_t>(n.type));
    break;
  case ExprKind::List:
    h = mix(h, n.args.size());
    break;
  }
  for (const auto &a : n.args)
    h = mix(h, a.hash());
  n.hash = h;
  return Expr(std::make_shared<const ExprNode>(std::move(n)));
}

Expr::Expr() : Expr(null_expr()) {}

Expr Expr::lit(Value v) {
  ExprNode n;
  n.kind = ExprKind::Lit;
  n.value = std::move(v);
  return from_node(std::move(n));
}

Expr Expr::pvar(std::string name) {
  ExprNode n;
  n.kind = ExprKind::PVar;
  n.name = std::move(name);
  return from_node(std::move(n));
}

Expr Expr::lvar(std::string name) {
  ExprNode n;
  n.kind = ExprKind::LVar;
  n.name = std::move(name);
  return from_node(std::move(n));
}

Expr Expr::unary(UnOp op, Expr a) {
  ExprNode n;
  n.kind = ExprKind::Unary;
  n.unop = op;
  n.args.push_back(std::move(a));
  return from_node(std::move(n));
}

Expr Expr::binary(BinOp op, Expr a, Expr b) {
  ExprNode n;
  n.kind = ExprKind::Binary;
  n.binop = op;
  n.args.push_back(std::move(a));
  n.args.push_back(std::move(b));
  return from_node(std::move(n));
}

Expr Expr::list(std::vector<Expr> elems) {
  ExprNode n;
  n.kind = ExprKind::List;
  n.args = std::move(elems);
  return from_node(std::move(n));
}

Expr Expr::type_test(Expr a, TypeName t) {
  ExprNode n;
  n.kind = ExprKind::TypeTest;
  n.type = t;
  n.args.push_back(std::move(a));
  return from_node(std::move(n));
}

ExprKind Expr::kind() const { return node_->kind; }
const Value &Expr::value() const { return node_->value; }
const std::string &Expr::name() const { return node_->name; }
UnOp Expr::unop() const { return node_->unop; }
BinOp Expr::binop() const { return node_->binop; }
TypeName Expr::type() const { return node_->type; }
const std::vector<Expr> &Expr::args() const { return node_->args; }
std::size_t Expr::hash() const { return node_->hash; }

bool Expr::is_true() const {
  return is_lit() && value().kind == Value::Kind::Bool && value().boolean;
}
bool Expr::is_false() const {
  return is_lit() && value().kind == Value::Kind::Bool && !value().boolean;
}
bool Expr::is_nat_lit() const { return is_lit() && value().kind == Value::Kind::Nat; }
bool Expr::is_binary(BinOp op) const { return kind() == ExprKind::Binary && binop() == op; }
bool Expr::is_unary(UnOp op) const { return kind() == ExprKind::Unary && unop() == op; }

int compare_exprs(const Expr &a, const Expr &b) {
  if (a.node_ == b.node_)
    return 0;
  if (a.kind() != b.kind())
    return a.kind() < b.kind() ? -1 : 1;
  switch (a.kind()) {
  case ExprKind::Lit:
    return compare_values(a.value(), b.value());
  case ExprKind::PVar:
  case ExprKind::LVar:
    return a.name().compare(b.name()) < 0 ? -1 : (a.name() == b.name() ? 0 : 1);
  case ExprKind::Unary:
    if (a.unop() != b.unop())
      return a.unop() < b.unop() ? -1 : 1;
    break;
  case ExprKind::Binary:
    if (a.binop() != b.binop())
      return a.binop() < b.binop() ? -1 : 1;
    break;
  case ExprKind::TypeTest:
    if (a.type() != b.type())
      return a.type() < b.type() ? -1 : 1;
    break;
  case ExprKind::List:
    if (a.args().size() != b.args().size())
      return a.args().size() < b.args().size() ? -1 : 1;
    break;
  }
  for (std::size_t i = 0; i < a.args().size(); ++i) {
    int c = compare_exprs(a.args()[i], b.args()[i]);
    if (c != 0)
      return c;
  }
  return 0;
}

bool operator==(const Expr &a, const Expr &b) {
  if (a.node_ == b.node_)
    return true;
  if (a.hash() != b.hash())
    return false;
  return compare_exprs(a, b) == 0;
}

std::strong_ordering operator<=>(const Expr &a, const Expr &b) {
  int c = compare_exprs(a, b);
  return c < 0 ? std::strong_ordering::less
               : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
}


Expr mk_eq(Expr a, Expr b) { return Expr::binary(BinOp::Eq, std::move(a), std::move(b)); }
Expr mk_not(Expr a) { return Expr::unary(UnOp::Not, std::move(a)); }
Expr mk_and(Expr a, Expr b) { return Expr::binary(BinOp::And, std::move(a), std::move(b)); }
Expr mk_len(Expr a) { return Expr::unary(UnOp::Len, std::move(a)); }

void collect_lvars(const Expr &e, std::set<std::string> &out) {
  if (e.is_lvar())
    out.insert(e.name());
  for (const auto &a : e.args())
    collect_lvars(a, out);
}

void collect_pvars(const Expr &e, std::set<std::string> &out) {
  if (e.is_pvar())
    out.insert(e.name());
  for (const auto &a : e.args())
    collect_pvars(a, out);
}

std::set<std::string> lvars_of(const Expr &e) {
  std::set<std::string> out;
  collect_lvars(e, out);
  return out;
}

bool mentions_lvar(const Expr &e, const std::string &name) {
  if (e.is_lvar() && e.name() == name)
    return true;
  for (const auto &a : e.args())
    if (mentions_lvar(a, name))
      return true;
  return false;
}

Expr rewrite(const Expr &e, const std::function<std::optional<Expr>(const Expr &)> &f) {
  Expr cur = e;
  if (!e.args().empty()) {
    std::vector<Expr> args;
    args.reserve(e.args().size());
    bool changed = false;
    for (const auto &a : e.args()) {
      args.push_back(rewrite(a, f));
      changed = changed || !(args.back() == a);
    }
    if (changed) {
      switch (e.kind()) {
      case ExprKind::Unary: cur = Expr::unary(e.unop(), args[0]); break;
      case ExprKind::Binary: cur = Expr::binary(e.binop(), args[0], args[1]); break;
      case ExprKind::List: cur = Expr::list(std::move(args)); break;
      case ExprKind::TypeTest: cur = Expr::type_test(args[0], e.type()); break;
      default: break;
      }
    }
  }
  if (auto r = f(cur))
    return *r;
  return cur;
}

Expr subst_lvars(const Expr &e, const std::function<std::optional<Expr>(const std::string &)> &f) {
  return rewrite(e, [&](const Expr &x) -> std::optional<Expr> {
    if (x.is_lvar())
      return f(x.name());
    return std::nullopt;
  });
}

} // namespace swing
