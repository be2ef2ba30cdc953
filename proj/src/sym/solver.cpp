#include "swing/sym/solver.hpp"

#include "theory.hpp"

#include <algorithm>
#include <mutex>
#include <set>

namespace swing::sym {

namespace {

using Clause = std::vector<Expr>;
using Dnf = std::vector<Clause>;

// Negation normal form under truthiness: holds(not not f) == holds(f) for
// any f, and not distributes over and/or as usual.
Expr nnf(const Expr &e, bool neg) {
  if (e.is_unary(UnOp::Not))
    return nnf(e.arg(0), !neg);
  if (e.is_binary(BinOp::And) || e.is_binary(BinOp::Or)) {
    bool conj = e.is_binary(BinOp::And) != neg;
    return Expr::binary(conj ? BinOp::And : BinOp::Or, nnf(e.arg(0), neg), nnf(e.arg(1), neg));
  }
  if (e.is_lit() && e.value().kind == Value::Kind::Bool)
    return Expr::boolean(e.value().boolean != neg);
  return neg ? mk_not(e) : e;
}

// nullopt when the expansion exceeds `limit`.
std::optional<Dnf> dnf(const Expr &e, std::size_t limit) {
  if (e.is_binary(BinOp::Or)) {
    auto a = dnf(e.arg(0), limit), b = dnf(e.arg(1), limit);
    if (!a || !b || a->size() + b->size() > limit)
      return std::nullopt;
    a->insert(a->end(), b->begin(), b->end());
    return a;
  }
  if (e.is_binary(BinOp::And)) {
    auto a = dnf(e.arg(0), limit), b = dnf(e.arg(1), limit);
    if (!a || !b || a->size() * b->size() > limit)
      return std::nullopt;
    Dnf out;
    for (const auto &x : *a)
      for (const auto &y : *b) {
        Clause c = x;
        c.insert(c.end(), y.begin(), y.end());
        out.push_back(std::move(c));
      }
    return out;
  }
  if (e.is_false())
    return Dnf{};
  if (e.is_true())
    return Dnf{Clause{}};
  return Dnf{Clause{e}};
}

void collect_vars(const Expr &e, std::set<Expr> &out) {
  if (e.is_lvar() || e.is_pvar()) {
    out.insert(e);
    return;
  }
  for (const auto &a : e.args())
    collect_vars(a, out);
}

bool all_assigned(const Expr &e, const Model &m) {
  if (e.is_lvar() || e.is_pvar())
    return m.count(e.name()) > 0;
  for (const auto &a : e.args())
    if (!all_assigned(a, m))
      return false;
  return true;
}

// ---- model search ----

class Search {
public:
  Search(const Clause &lits, std::size_t budget) : lits_(lits), budget_(budget) {
    std::set<Expr> vs;
    for (const auto &l : lits)
      collect_vars(l, vs);
    std::uint64_t maxlit = 0;
    for (const auto &l : lits)
      scan(l, maxlit);
    std::uint64_t top = std::min<std::uint64_t>(8, maxlit + 3);
    for (std::uint64_t i = 0; i <= top; ++i)
      nats_.push_back(Val::nat(i));
    // Variables with a defining equation go last so their definition can be
    // evaluated.
    std::vector<Expr> plain, defined;
    for (const auto &v : vs)
      (has_definition(v) ? defined : plain).push_back(v);
    order_ = plain;
    order_.insert(order_.end(), defined.begin(), defined.end());
  }

  std::optional<Model> run() {
    Model m;
    if (go(0, m))
      return m;
    return std::nullopt;
  }

private:
  const Clause &lits_;
  std::size_t budget_;
  std::vector<Expr> order_;
  std::vector<Val> nats_;

  void scan(const Expr &e, std::uint64_t &maxlit) {
    if (e.is_nat_lit())
      maxlit = std::max(maxlit, e.value().nat);
    for (const auto &a : e.args())
      scan(a, maxlit);
  }

  static bool is_var(const Expr &e, const Expr &v) { return e == v; }

  bool has_definition(const Expr &v) const {
    for (const auto &l : lits_)
      if (l.is_binary(BinOp::Eq) && (is_var(l.arg(0), v) || is_var(l.arg(1), v)))
        return true;
    return false;
  }

  // Kinds suggested by the contexts the variable occurs in.
  void hints(const Expr &e, const Expr &v, std::set<Val::Kind> &out) const {
    auto direct = [&](std::size_t i) { return i < e.args().size() && e.arg(i) == v; };
    switch (e.kind()) {
    case ExprKind::TypeTest:
      if (direct(0)) {
        switch (e.type()) {
        case TypeName::Null: out.insert(Val::Kind::Null); break;
        case TypeName::Nat: out.insert(Val::Kind::Nat); break;
        case TypeName::Bool: out.insert(Val::Kind::Bool); break;
        case TypeName::Ptr: out.insert(Val::Kind::Ptr); break;
        case TypeName::List: out.insert(Val::Kind::List); break;
        }
      }
      break;
    case ExprKind::Unary:
      if (direct(0) && e.unop() == UnOp::Len)
        out.insert(Val::Kind::List);
      if (direct(0) && e.unop() == UnOp::Neg)
        out.insert(Val::Kind::Nat);
      break;
    case ExprKind::Binary:
      switch (e.binop()) {
      case BinOp::Sub:
      case BinOp::Mul:
      case BinOp::Lt:
      case BinOp::Le:
        if (direct(0) || direct(1))
          out.insert(Val::Kind::Nat);
        break;
      case BinOp::Add:
        if (direct(1))
          out.insert(Val::Kind::Nat);
        if (direct(0)) {
          out.insert(Val::Kind::Nat);
          out.insert(Val::Kind::Ptr);
        }
        break;
      case BinOp::Concat:
        if (direct(0) || direct(1))
          out.insert(Val::Kind::List);
        break;
      case BinOp::Cons:
        if (direct(1))
          out.insert(Val::Kind::List);
        break;
      default: break;
      }
      break;
    default: break;
    }
    for (const auto &a : e.args())
      hints(a, v, out);
  }

  std::vector<Val> pool(Val::Kind k) const {
    switch (k) {
    case Val::Kind::Null: return {Val::null()};
    case Val::Kind::Nat: return nats_;
    case Val::Kind::Bool: return {Val::boolean(true), Val::boolean(false)};
    case Val::Kind::Ptr: return {Val::ptr("$0", 0), Val::ptr("$1", 0), Val::ptr("$0", 1)};
    case Val::Kind::List: {
      auto n = [](std::uint64_t x) { return Val::nat(x); };
      return {Val::list({}),
              Val::list({n(0)}),
              Val::list({n(1)}),
              Val::list({n(2)}),
              Val::list({Val::null()}),
              Val::list({n(0), n(0)}),
              Val::list({n(0), n(1)}),
              Val::list({n(1), n(0)}),
              Val::list({n(1), n(1)}),
              Val::list({n(0), n(0), n(0)}),
              Val::list({n(0), n(1), n(2)})};
    }
    case Val::Kind::Undef: return {};
    }
    return {};
  }

  std::vector<Val> candidates(const Expr &v, const Model &m) const {
    std::vector<Val> out;
    auto push = [&](const Val &x) {
      if (x.kind != Val::Kind::Undef && std::find(out.begin(), out.end(), x) == out.end())
        out.push_back(x);
    };
    for (const auto &l : lits_) {
      if (!l.is_binary(BinOp::Eq))
        continue;
      for (int side = 0; side < 2; ++side)
        if (l.arg(side) == v && all_assigned(l.arg(1 - side), m))
          push(eval(l.arg(1 - side), m));
    }
    std::set<Val::Kind> hs;
    for (const auto &l : lits_)
      hints(l, v, hs);
    for (auto k : hs)
      for (const auto &x : pool(k))
        push(x);
    for (auto k : {Val::Kind::Nat, Val::Kind::Null, Val::Kind::List, Val::Kind::Ptr,
                   Val::Kind::Bool})
      if (!hs.count(k))
        for (const auto &x : pool(k))
          push(x);
    return out;
  }

  bool consistent(const Model &m) const {
    for (const auto &l : lits_)
      if (all_assigned(l, m) && !holds(l, m))
        return false;
    return true;
  }

  bool go(std::size_t i, Model &m) {
    if (i == order_.size())
      return consistent(m);
    const std::string &name = order_[i].name();
    for (const auto &c : candidates(order_[i], m)) {
      if (budget_ == 0)
        return false;
      --budget_;
      m[name] = c;
      if (consistent(m) && go(i + 1, m))
        return true;
    }
    m.erase(name);
    return false;
  }
};

} // namespace

SatResult theory_check(const std::vector<Expr> &literals) { return detail::refute(literals); }

SatAnswer check(const std::vector<Expr> &conj, const SolverOptions &opts) {
  std::vector<Expr> formulas;
  for (const auto &c : conj) {
    Expr n = normalize(c);
    if (n.is_false())
      return {SatResult::Unsat, std::nullopt};
    if (!n.is_true())
      formulas.push_back(nnf(n, false));
  }
  // Cross product of per-conjunct expansions. Conjuncts whose expansion is
  // too large are dropped, which weakens the input: still sound for Unsat.
  Dnf acc{Clause{}};
  bool weakened = false;
  for (const auto &f : formulas) {
    auto d = dnf(f, opts.dnf_limit);
    if (!d || acc.size() * d->size() > opts.dnf_limit) {
      weakened = true;
      continue;
    }
    Dnf next;
    for (const auto &x : acc)
      for (const auto &y : *d) {
        Clause c = x;
        c.insert(c.end(), y.begin(), y.end());
        next.push_back(std::move(c));
      }
    acc = std::move(next);
  }
  std::vector<const Clause *> open;
  for (const auto &c : acc)
    if (detail::refute(c) != SatResult::Unsat)
      open.push_back(&c);
  if (open.empty())
    return {SatResult::Unsat, std::nullopt};
  if (!opts.search_model)
    return {SatResult::Unknown, std::nullopt};
  std::size_t per = std::max<std::size_t>(1, opts.search_budget / open.size());
  for (const Clause *c : open) {
    // A weakened clause still carries every variable when we search the
    // originals, so search against the formulas themselves in that case.
    Clause target = weakened ? formulas : *c;
    if (weakened)
      target.insert(target.end(), c->begin(), c->end());
    Search s(target, per);
    if (auto m = s.run()) {
      bool ok = std::all_of(conj.begin(), conj.end(), [&](const Expr &f) { return holds(f, *m); });
      if (ok)
        return {SatResult::Sat, std::move(m)};
    }
  }
  return {SatResult::Unknown, std::nullopt};
}

SatResult sat(const std::vector<Expr> &conj) {
  SolverOptions o;
  o.search_budget = 2000;
  return check(conj, o).result;
}

bool unsat(const std::vector<Expr> &conj) {
  static std::mutex mu;
  static std::map<std::vector<Expr>, bool> memo;
  std::vector<Expr> key = conj;
  std::sort(key.begin(), key.end());
  key.erase(std::unique(key.begin(), key.end()), key.end());
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = memo.find(key);
    if (it != memo.end())
      return it->second;
  }
  SolverOptions o;
  o.search_model = false;
  bool r = check(key, o).result == SatResult::Unsat;
  std::lock_guard<std::mutex> lock(mu);
  if (memo.size() > 50000)
    memo.clear();
  memo.emplace(std::move(key), r);
  return r;
}

bool entails(const std::vector<Expr> &pc, const Expr &f) {
  std::vector<Expr> q = pc;
  q.push_back(mk_not(f));
  return unsat(q);
}

} // namespace swing::sym
