#include "swing/sym/solver.hpp"

namespace swing::sym {

namespace {

bool is_formula(const Expr &e) {
  switch (e.kind()) {
  case ExprKind::Lit: return e.value().kind == Value::Kind::Bool;
  case ExprKind::TypeTest: return true;
  case ExprKind::Unary: return e.unop() == UnOp::Not;
  case ExprKind::Binary:
    switch (e.binop()) {
    case BinOp::Eq:
    case BinOp::Lt:
    case BinOp::Le:
    case BinOp::And:
    case BinOp::Or: return true;
    default: return false;
    }
  default: return false;
  }
}

// Syntactically never undefined.
bool surely_defined(const Expr &e) {
  switch (e.kind()) {
  case ExprKind::Lit:
  case ExprKind::PVar:
  case ExprKind::LVar: return true;
  case ExprKind::List:
    for (const auto &a : e.args())
      if (!surely_defined(a))
        return false;
    return true;
  default: return is_formula(e);
  }
}

// Parts of a flattened concatenation; list literals stay as single parts.
void concat_parts(const Expr &e, std::vector<Expr> &out) {
  if (e.is_binary(BinOp::Concat)) {
    concat_parts(e.arg(0), out);
    concat_parts(e.arg(1), out);
  } else {
    out.push_back(e);
  }
}

Expr build_concat(const std::vector<Expr> &parts) {
  Expr acc = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i)
    acc = Expr::binary(BinOp::Concat, acc, parts[i]);
  return acc;
}

Expr norm_concat(const Expr &e) {
  std::vector<Expr> raw;
  concat_parts(e, raw);
  std::vector<Expr> parts;
  bool dropped_empty = false;
  for (const auto &p : raw) {
    if (p.kind() == ExprKind::List) {
      if (p.args().empty()) {
        dropped_empty = true;
        continue;
      }
      if (!parts.empty() && parts.back().kind() == ExprKind::List) {
        std::vector<Expr> merged = parts.back().args();
        merged.insert(merged.end(), p.args().begin(), p.args().end());
        parts.back() = Expr::list(std::move(merged));
        continue;
      }
    }
    parts.push_back(p);
  }
  if (parts.empty())
    return Expr::nil();
  if (parts.size() == 1 && parts[0].kind() != ExprKind::List && dropped_empty)
    // `nil @ x` is undefined unless x is a list; keep the witness.
    return Expr::binary(BinOp::Concat, Expr::nil(), parts[0]);
  return build_concat(parts);
}

bool has_nonempty_literal_part(const Expr &e) {
  std::vector<Expr> parts;
  concat_parts(e, parts);
  for (const auto &p : parts)
    if (p.kind() == ExprKind::List && !p.args().empty())
      return true;
  return false;
}

std::optional<std::uint64_t> nat_of(const Expr &e) {
  if (e.is_lit() && e.value().kind == Value::Kind::Nat)
    return e.value().nat;
  return std::nullopt;
}

Expr step(const Expr &e) {
  switch (e.kind()) {
  case ExprKind::Unary: {
    const Expr &a = e.arg(0);
    switch (e.unop()) {
    case UnOp::Not:
      if (a.is_lit() && a.value().kind == Value::Kind::Bool)
        return Expr::boolean(!a.value().boolean);
      if (a.is_unary(UnOp::Not) && is_formula(a.arg(0)))
        return a.arg(0);
      return e;
    case UnOp::Neg:
      if (nat_of(a))
        return Expr::nat(0);
      return e;
    case UnOp::Len:
      if (a.kind() == ExprKind::List && surely_defined(a))
        return Expr::nat(a.args().size());
      if (a.is_binary(BinOp::Concat)) {
        std::vector<Expr> parts;
        concat_parts(a, parts);
        std::uint64_t k = 0;
        std::vector<Expr> rest;
        for (const auto &p : parts)
          if (p.kind() == ExprKind::List && !surely_defined(p))
            return e;
        for (const auto &p : parts) {
          if (p.kind() == ExprKind::List)
            k += p.args().size();
          else
            rest.push_back(mk_len(p));
        }
        Expr acc = k > 0 || rest.empty() ? Expr::nat(k) : rest.front();
        for (std::size_t i = (k > 0 || rest.empty()) ? 0 : 1; i < rest.size(); ++i)
          acc = acc + rest[i];
        return acc;
      }
      return e;
    }
    return e;
  }
  case ExprKind::Binary: {
    const Expr &a = e.arg(0);
    const Expr &b = e.arg(1);
    auto na = nat_of(a), nb = nat_of(b);
    switch (e.binop()) {
    case BinOp::Add:
      if (na && nb)
        return Expr::nat(*na + *nb);
      if (nb && a.is_lit() && a.value().kind == Value::Kind::Addr)
        return Expr::lit(Value::addr(a.value().block, a.value().nat + *nb));
      if (nb && a.is_binary(BinOp::Add) && nat_of(a.arg(1)))
        return a.arg(0) + Expr::nat(*nat_of(a.arg(1)) + *nb);
      if (na && b.is_binary(BinOp::Add) && nat_of(b.arg(0)))
        return Expr::nat(*na + *nat_of(b.arg(0))) + b.arg(1);
      return e;
    case BinOp::Sub:
      if (na && nb)
        return Expr::nat(*na >= *nb ? *na - *nb : 0);
      return e;
    case BinOp::Mul:
      if (na && nb)
        return Expr::nat(*na * *nb);
      return e;
    case BinOp::Lt:
    case BinOp::Le: {
      bool lt = e.binop() == BinOp::Lt;
      if (na && nb)
        return Expr::boolean(lt ? *na < *nb : *na <= *nb);
      auto non_nat_lit = [](const Expr &x) {
        return (x.is_lit() && x.value().kind != Value::Kind::Nat) || x.kind() == ExprKind::List;
      };
      if (non_nat_lit(a) || non_nat_lit(b))
        return Expr::boolean(false);
      if (lt && a == b)
        return Expr::boolean(false);
      return e;
    }
    case BinOp::Eq: {
      if (a == b && surely_defined(a))
        return Expr::boolean(true);
      if (a.is_lit() && b.is_lit())
        return Expr::boolean(a.value() == b.value());
      if (a.kind() == ExprKind::List && b.kind() == ExprKind::List) {
        if (a.args().size() != b.args().size())
          return Expr::boolean(false);
        if (a.args().empty())
          return Expr::boolean(true);
        Expr acc = mk_eq(a.arg(0), b.arg(0));
        for (std::size_t i = 1; i < a.args().size(); ++i)
          acc = mk_and(acc, mk_eq(a.arg(i), b.arg(i)));
        return acc;
      }
      // A scalar literal never equals a list-producing term.
      auto listy = [](const Expr &x) {
        return x.kind() == ExprKind::List || x.is_binary(BinOp::Concat);
      };
      if ((a.is_lit() && listy(b)) || (b.is_lit() && listy(a)))
        return Expr::boolean(false);
      // nil never equals a concatenation with an element.
      if ((a.kind() == ExprKind::List && a.args().empty() && has_nonempty_literal_part(b) &&
           b.is_binary(BinOp::Concat)) ||
          (b.kind() == ExprKind::List && b.args().empty() && has_nonempty_literal_part(a) &&
           a.is_binary(BinOp::Concat)))
        return Expr::boolean(false);
      if (b.is_true() && is_formula(a))
        return a;
      if (a.is_true() && is_formula(b))
        return b;
      if (b.is_false() && is_formula(a))
        return mk_not(a);
      if (a.is_false() && is_formula(b))
        return mk_not(b);
      return e;
    }
    case BinOp::And:
      if (a.is_false() || b.is_false())
        return Expr::boolean(false);
      if (a.is_true() && is_formula(b))
        return b;
      if (b.is_true() && is_formula(a))
        return a;
      if (a.is_true() && b.is_true())
        return Expr::boolean(true);
      return e;
    case BinOp::Or:
      if (a.is_true() || b.is_true())
        return Expr::boolean(true);
      if (a.is_false() && is_formula(b))
        return b;
      if (b.is_false() && is_formula(a))
        return a;
      if (a.is_false() && b.is_false())
        return Expr::boolean(false);
      return e;
    case BinOp::Cons:
      return Expr::binary(BinOp::Concat, Expr::list({a}), b);
    case BinOp::Concat: {
      Expr n = norm_concat(e);
      return n;
    }
    }
    return e;
  }
  case ExprKind::TypeTest: {
    const Expr &a = e.arg(0);
    TypeName t = e.type();
    if (a.is_lit()) {
      switch (a.value().kind) {
      case Value::Kind::Null: return Expr::boolean(t == TypeName::Null);
      case Value::Kind::Nat: return Expr::boolean(t == TypeName::Nat);
      case Value::Kind::Bool: return Expr::boolean(t == TypeName::Bool);
      case Value::Kind::Addr: return Expr::boolean(t == TypeName::Ptr);
      }
    }
    if (a.kind() == ExprKind::List && surely_defined(a))
      return Expr::boolean(t == TypeName::List);
    if (is_formula(a))
      return Expr::boolean(t == TypeName::Bool);
    if (a.is_binary(BinOp::Add) && nat_of(a.arg(1))) {
      if (t == TypeName::Ptr || t == TypeName::Nat)
        return Expr::type_test(a.arg(0), t);
      return Expr::boolean(false);
    }
    if (a.is_binary(BinOp::Sub) || a.is_binary(BinOp::Mul) || a.is_unary(UnOp::Neg) ||
        a.is_unary(UnOp::Len)) {
      if (t != TypeName::Nat)
        return Expr::boolean(false);
    }
    if (a.is_binary(BinOp::Concat) && t != TypeName::List)
      return Expr::boolean(false);
    return e;
  }
  default:
    return e;
  }
}

Expr once(const Expr &e) { return rewrite(e, [](const Expr &x) -> std::optional<Expr> {
    Expr y = step(x);
    if (y == x)
      return std::nullopt;
    return y;
  });
}

} // namespace

Expr normalize(const Expr &e) {
  Expr cur = e;
  for (int i = 0; i < 64; ++i) {
    Expr next = once(cur);
    if (next == cur)
      return cur;
    cur = next;
  }
  return cur;
}

const char *to_string(SatResult r) {
  switch (r) {
  case SatResult::Sat: return "sat";
  case SatResult::Unsat: return "unsat";
  case SatResult::Unknown: return "unknown";
  }
  return "?";
}

} // namespace swing::sym
