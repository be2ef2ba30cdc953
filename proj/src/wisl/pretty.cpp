#include "swing/wisl/pretty.hpp"

#include <sstream>

namespace swing {

std::string to_string(const SourceLoc &loc) {
  std::ostringstream os;
  os << loc.start_line << ':' << loc.start_col << '-' << loc.end_line << ':' << loc.end_col;
  return os.str();
}

} // namespace swing

namespace swing::wisl {

namespace {

constexpr int kAtomPrec = 10;

int prec_of(const Expr &e) {
  switch (e.kind()) {
  case ExprKind::Binary:
    switch (e.binop()) {
    case BinOp::Or: return 1;
    case BinOp::And: return 2;
    case BinOp::Eq:
    case BinOp::Lt:
    case BinOp::Le: return 4;
    case BinOp::Concat: return 5;
    case BinOp::Cons: return 6;
    case BinOp::Add:
    case BinOp::Sub: return 7;
    case BinOp::Mul: return 8;
    }
    return 0;
  case ExprKind::Unary:
    switch (e.unop()) {
    case UnOp::Not: return 3;
    case UnOp::Neg: return 9;
    case UnOp::Len: return kAtomPrec;
    }
    return 0;
  case ExprKind::TypeTest: return 4;
  default: return kAtomPrec;
  }
}

void print(std::ostringstream &os, const Expr &e, int min_prec);

void print_wrapped(std::ostringstream &os, const Expr &e, int min_prec) {
  if (prec_of(e) < min_prec) {
    os << '(';
    print(os, e, 0);
    os << ')';
  } else {
    print(os, e, min_prec);
  }
}

void print(std::ostringstream &os, const Expr &e, int) {
  switch (e.kind()) {
  case ExprKind::Lit:
    os << pretty_value(e.value());
    return;
  case ExprKind::PVar:
    os << e.name();
    return;
  case ExprKind::LVar:
    os << e.name();
    return;
  case ExprKind::List:
    if (e.args().empty()) {
      os << "nil";
      return;
    }
    os << '[';
    for (std::size_t i = 0; i < e.args().size(); ++i) {
      if (i)
        os << ", ";
      print(os, e.args()[i], 0);
    }
    os << ']';
    return;
  case ExprKind::TypeTest:
    print_wrapped(os, e.arg(0), 5);
    os << " is " << to_string(e.type());
    return;
  case ExprKind::Unary:
    switch (e.unop()) {
    case UnOp::Not:
      os << "not ";
      print_wrapped(os, e.arg(0), kAtomPrec);
      return;
    case UnOp::Neg:
      os << '-';
      print_wrapped(os, e.arg(0), kAtomPrec);
      return;
    case UnOp::Len:
      os << "len(";
      print(os, e.arg(0), 0);
      os << ')';
      return;
    }
    return;
  case ExprKind::Binary: {
    int p = prec_of(e);
    int lp = p, rp = p + 1;
    if (e.binop() == BinOp::Cons) {
      lp = p + 1;
      rp = p;
    } else if (p == 4) {
      lp = rp = p + 1;
    }
    print_wrapped(os, e.arg(0), lp);
    if (e.binop() == BinOp::Cons)
      os << "::";
    else
      os << ' ' << to_string(e.binop()) << ' ';
    print_wrapped(os, e.arg(1), rp);
    return;
  }
  }
}

} // namespace

std::string pretty_value(const Value &v) {
  switch (v.kind) {
  case Value::Kind::Null: return "null";
  case Value::Kind::Nat: return std::to_string(v.nat);
  case Value::Kind::Bool: return v.boolean ? "true" : "false";
  case Value::Kind::Addr:
    return "loc(" + v.block + ", " + std::to_string(v.nat) + ")";
  }
  return "?";
}

std::string pretty_expr(const Expr &e) {
  std::ostringstream os;
  print(os, e, 0);
  return os.str();
}

std::string pretty_atom(const Atom &a) {
  std::ostringstream os;
  switch (a.kind) {
  case Atom::Kind::Pure:
    os << '(' << pretty_expr(a.expr) << ')';
    break;
  case Atom::Kind::PointsTo:
    os << '(' << pretty_expr(a.expr) << " -> ";
    for (std::size_t i = 0; i < a.args.size(); ++i)
      os << (i ? ", " : "") << pretty_expr(a.args[i]);
    os << ')';
    break;
  case Atom::Kind::PredApp:
    os << a.pred << '(';
    for (std::size_t i = 0; i < a.args.size(); ++i)
      os << (i ? ", " : "") << pretty_expr(a.args[i]);
    os << ')';
    break;
  }
  return os.str();
}

std::string atom_text(const Atom &a) {
  auto s = pretty_atom(a);
  if (a.kind != Atom::Kind::PredApp)
    s = s.substr(1, s.size() - 2);
  return s;
}

std::string pretty_assertion(const Assertion &a) {
  if (a.atoms.empty())
    return "emp";
  std::string out;
  for (std::size_t i = 0; i < a.atoms.size(); ++i) {
    if (i)
      out += " * ";
    out += pretty_atom(a.atoms[i]);
  }
  return out;
}

std::string pretty_logic_cmd(const LogicCmd &c) {
  std::ostringstream os;
  auto args = [&] {
    os << c.name << '(';
    for (std::size_t i = 0; i < c.args.size(); ++i)
      os << (i ? ", " : "") << pretty_expr(c.args[i]);
    os << ')';
  };
  switch (c.kind) {
  case LogicCmd::Kind::Fold:
    os << "fold ";
    args();
    break;
  case LogicCmd::Kind::Unfold:
    os << "unfold ";
    args();
    break;
  case LogicCmd::Kind::ApplyLemma:
    os << "apply ";
    args();
    break;
  case LogicCmd::Kind::AssertBind:
    os << "assert {" << pretty_assertion(c.assertion) << '}';
    if (!c.binders.empty()) {
      os << " [bind: ";
      for (std::size_t i = 0; i < c.binders.size(); ++i)
        os << (i ? ", " : "") << c.binders[i];
      os << ']';
    }
    break;
  }
  return os.str();
}

std::string display_text(const std::string &source, const SourceLoc &loc) {
  if (!loc.valid() || loc.end > source.size() || loc.begin >= loc.end)
    return {};
  std::string out;
  int depth = 0;
  bool pending_space = false;
  for (std::size_t i = loc.begin; i < loc.end; ++i) {
    char c = source[i];
    if (c == '{') {
      if (depth == 0) {
        if (!out.empty())
          out += ' ';
        out += "{ … }";
        pending_space = false;
      }
      ++depth;
      continue;
    }
    if (c == '}') {
      --depth;
      continue;
    }
    if (depth > 0)
      continue;
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space)
      out += ' ';
    pending_space = false;
    out += c;
  }
  return out;
}

} // namespace swing::wisl
