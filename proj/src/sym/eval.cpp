#include "swing/sym/solver.hpp"

#include "swing/wisl/pretty.hpp"

namespace swing::sym {

std::string to_string(const Val &v) {
  switch (v.kind) {
  case Val::Kind::Undef: return "undefined";
  case Val::Kind::Null: return "null";
  case Val::Kind::Nat: return std::to_string(v.n);
  case Val::Kind::Bool: return v.b ? "true" : "false";
  case Val::Kind::Ptr: return "loc(" + v.block + ", " + std::to_string(v.n) + ")";
  case Val::Kind::List: {
    if (v.elems.empty())
      return "nil";
    std::string out = "[";
    for (std::size_t i = 0; i < v.elems.size(); ++i)
      out += (i ? ", " : "") + to_string(v.elems[i]);
    return out + "]";
  }
  }
  return "?";
}

namespace {

bool truthy(const Val &v) { return v.kind == Val::Kind::Bool && v.b; }

Val from_value(const Value &v) {
  switch (v.kind) {
  case Value::Kind::Null: return Val::null();
  case Value::Kind::Nat: return Val::nat(v.nat);
  case Value::Kind::Bool: return Val::boolean(v.boolean);
  case Value::Kind::Addr: return Val::ptr(v.block, v.nat);
  }
  return Val::undef();
}

} // namespace

Val eval(const Expr &e, const Model &m) {
  switch (e.kind()) {
  case ExprKind::Lit: return from_value(e.value());
  case ExprKind::PVar:
  case ExprKind::LVar: {
    auto it = m.find(e.name());
    return it == m.end() ? Val::undef() : it->second;
  }
  case ExprKind::List: {
    std::vector<Val> es;
    for (const auto &a : e.args()) {
      es.push_back(eval(a, m));
      if (es.back().kind == Val::Kind::Undef)
        return Val::undef();
    }
    return Val::list(std::move(es));
  }
  case ExprKind::TypeTest: {
    Val a = eval(e.arg(0), m);
    switch (e.type()) {
    case TypeName::Null: return Val::boolean(a.kind == Val::Kind::Null);
    case TypeName::Nat: return Val::boolean(a.kind == Val::Kind::Nat);
    case TypeName::Bool: return Val::boolean(a.kind == Val::Kind::Bool);
    case TypeName::Ptr: return Val::boolean(a.kind == Val::Kind::Ptr);
    case TypeName::List: return Val::boolean(a.kind == Val::Kind::List);
    }
    return Val::boolean(false);
  }
  case ExprKind::Unary: {
    Val a = eval(e.arg(0), m);
    switch (e.unop()) {
    case UnOp::Not: return Val::boolean(!truthy(a));
    case UnOp::Neg: return a.kind == Val::Kind::Nat ? Val::nat(0) : Val::undef();
    case UnOp::Len:
      return a.kind == Val::Kind::List ? Val::nat(a.elems.size()) : Val::undef();
    }
    return Val::undef();
  }
  case ExprKind::Binary: {
    if (e.binop() == BinOp::And) {
      if (!truthy(eval(e.arg(0), m)))
        return Val::boolean(false);
      return Val::boolean(truthy(eval(e.arg(1), m)));
    }
    if (e.binop() == BinOp::Or) {
      if (truthy(eval(e.arg(0), m)))
        return Val::boolean(true);
      return Val::boolean(truthy(eval(e.arg(1), m)));
    }
    Val a = eval(e.arg(0), m);
    Val b = eval(e.arg(1), m);
    using K = Val::Kind;
    switch (e.binop()) {
    case BinOp::Add:
      if (a.kind == K::Nat && b.kind == K::Nat)
        return Val::nat(a.n + b.n);
      if (a.kind == K::Ptr && b.kind == K::Nat)
        return Val::ptr(a.block, a.n + b.n);
      return Val::undef();
    case BinOp::Sub:
      if (a.kind == K::Nat && b.kind == K::Nat)
        return Val::nat(a.n >= b.n ? a.n - b.n : 0);
      return Val::undef();
    case BinOp::Mul:
      if (a.kind == K::Nat && b.kind == K::Nat)
        return Val::nat(a.n * b.n);
      return Val::undef();
    case BinOp::Eq:
      return Val::boolean(a.kind != K::Undef && b.kind != K::Undef && a == b);
    case BinOp::Lt:
      return Val::boolean(a.kind == K::Nat && b.kind == K::Nat && a.n < b.n);
    case BinOp::Le:
      return Val::boolean(a.kind == K::Nat && b.kind == K::Nat && a.n <= b.n);
    case BinOp::Cons:
      if (a.kind == K::Undef || b.kind != K::List)
        return Val::undef();
      b.elems.insert(b.elems.begin(), a);
      return b;
    case BinOp::Concat:
      if (a.kind != K::List || b.kind != K::List)
        return Val::undef();
      a.elems.insert(a.elems.end(), b.elems.begin(), b.elems.end());
      return a;
    default: return Val::undef();
    }
  }
  }
  return Val::undef();
}

bool holds(const Expr &f, const Model &m) { return truthy(eval(f, m)); }

} // namespace swing::sym
