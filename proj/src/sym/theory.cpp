// Refutation procedure for conjunctions of literals: congruence closure over
// interned terms, value-kind propagation, list spine unification and linear
// arithmetic over the naturals (Fourier-Motzkin).

#include "theory.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

namespace swing::sym::detail {

namespace {

constexpr std::uint8_t kUndef = 1, kNull = 2, kNat = 4, kBool = 8, kPtr = 16, kList = 32;
constexpr std::uint8_t kAll = 63;
constexpr std::uint8_t kDefined = kAll & ~kUndef;

std::uint8_t bit_of(TypeName t) {
  switch (t) {
  case TypeName::Null: return kNull;
  case TypeName::Nat: return kNat;
  case TypeName::Bool: return kBool;
  case TypeName::Ptr: return kPtr;
  case TypeName::List: return kList;
  }
  return 0;
}

// Kind-level result of the partial operations.
std::uint8_t apply_kind(BinOp op, std::uint8_t x, std::uint8_t y) {
  switch (op) {
  case BinOp::Add:
    if (x == kNat && y == kNat)
      return kNat;
    if (x == kPtr && y == kNat)
      return kPtr;
    return kUndef;
  case BinOp::Sub:
  case BinOp::Mul: return x == kNat && y == kNat ? kNat : kUndef;
  case BinOp::Concat: return x == kList && y == kList ? kList : kUndef;
  default: return kBool;
  }
}

std::uint8_t apply_kind(UnOp op, std::uint8_t x) {
  switch (op) {
  case UnOp::Neg: return x == kNat ? kNat : kUndef;
  case UnOp::Len: return x == kList ? kNat : kUndef;
  case UnOp::Not: return kBool;
  }
  return kUndef;
}

// ---- linear arithmetic ----

using i128 = __int128;

struct Lin {
  std::map<int, long long> c; // variable -> coefficient
  long long k = 0;            // constant; constraint is  sum + k >= 0
  friend bool operator<(const Lin &a, const Lin &b) {
    return std::tie(a.c, a.k) < std::tie(b.c, b.k);
  }
};

constexpr long long kCoefLimit = 1'000'000'000'000LL;

long long floor_div(long long a, long long b) {
  long long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0)))
    --q;
  return q;
}

// Divides by the gcd of the coefficients, tightening the constant for
// integer solutions. Returns false on overflow.
bool tighten(Lin &l) {
  long long g = 0;
  for (auto &[v, c] : l.c)
    g = std::gcd(g, c < 0 ? -c : c);
  if (g > 1) {
    for (auto &[v, c] : l.c)
      c /= g;
    l.k = floor_div(l.k, g);
  }
  for (auto &[v, c] : l.c)
    if (c > kCoefLimit || c < -kCoefLimit)
      return false;
  return l.k <= kCoefLimit && l.k >= -kCoefLimit;
}

enum class Fm { Infeasible, Feasible, GaveUp };

Fm fourier_motzkin(std::vector<Lin> ineqs, std::vector<Lin> eqs) {
  // Equalities with a unit coefficient are substituted away.
  for (std::size_t i = 0; i < eqs.size(); ++i) {
    Lin e = eqs[i];
    int var = -1;
    long long coef = 0;
    for (auto &[v, c] : e.c)
      if (c == 1 || c == -1) {
        var = v;
        coef = c;
        break;
      }
    if (var < 0) {
      if (e.c.empty()) {
        if (e.k != 0)
          return Fm::Infeasible;
        continue;
      }
      ineqs.push_back(e);
      Lin neg;
      for (auto &[v, c] : e.c)
        neg.c[v] = -c;
      neg.k = -e.k;
      ineqs.push_back(neg);
      continue;
    }
    // var = -(rest)/coef
    auto subst = [&](Lin &t) {
      auto it = t.c.find(var);
      if (it == t.c.end())
        return true;
      long long a = it->second;
      t.c.erase(it);
      // t + a*var, var = -coef*(e - coef*var) since coef = +-1
      for (auto &[v, c] : e.c) {
        if (v == var)
          continue;
        i128 nv = static_cast<i128>(t.c[v]) - static_cast<i128>(a) * coef * c;
        if (nv > kCoefLimit || nv < -kCoefLimit)
          return false;
        t.c[v] = static_cast<long long>(nv);
        if (t.c[v] == 0)
          t.c.erase(v);
      }
      i128 nk = static_cast<i128>(t.k) - static_cast<i128>(a) * coef * e.k;
      if (nk > kCoefLimit || nk < -kCoefLimit)
        return false;
      t.k = static_cast<long long>(nk);
      return true;
    };
    for (std::size_t j = i + 1; j < eqs.size(); ++j)
      if (!subst(eqs[j]))
        return Fm::GaveUp;
    for (auto &t : ineqs)
      if (!subst(t))
        return Fm::GaveUp;
  }

  std::set<Lin> cur;
  for (auto &l : ineqs) {
    if (!tighten(l))
      return Fm::GaveUp;
    if (l.c.empty()) {
      if (l.k < 0)
        return Fm::Infeasible;
      continue;
    }
    cur.insert(l);
  }
  while (!cur.empty()) {
    // Choose the variable with the fewest generated pairs.
    std::map<int, std::pair<int, int>> counts;
    for (const auto &l : cur)
      for (auto &[v, c] : l.c)
        (c > 0 ? counts[v].first : counts[v].second)++;
    int best = -1;
    long long best_cost = -1;
    for (auto &[v, pn] : counts) {
      long long cost = static_cast<long long>(pn.first) * pn.second;
      if (best < 0 || cost < best_cost) {
        best = v;
        best_cost = cost;
      }
    }
    std::vector<Lin> pos, neg;
    std::set<Lin> next;
    for (const auto &l : cur) {
      auto it = l.c.find(best);
      if (it == l.c.end())
        next.insert(l);
      else if (it->second > 0)
        pos.push_back(l);
      else
        neg.push_back(l);
    }
    for (const auto &p : pos) {
      for (const auto &n : neg) {
        long long a = p.c.at(best), b = -n.c.at(best);
        Lin r;
        for (auto &[v, c] : p.c)
          if (v != best) {
            i128 x = static_cast<i128>(c) * b;
            r.c[v] = static_cast<long long>(x);
          }
        for (auto &[v, c] : n.c)
          if (v != best) {
            i128 x = static_cast<i128>(r.c[v]) + static_cast<i128>(c) * a;
            if (x > kCoefLimit || x < -kCoefLimit)
              return Fm::GaveUp;
            r.c[v] = static_cast<long long>(x);
          }
        for (auto it = r.c.begin(); it != r.c.end();)
          it = it->second == 0 ? r.c.erase(it) : std::next(it);
        i128 k = static_cast<i128>(p.k) * b + static_cast<i128>(n.k) * a;
        if (k > kCoefLimit || k < -kCoefLimit)
          return Fm::GaveUp;
        r.k = static_cast<long long>(k);
        if (!tighten(r))
          return Fm::GaveUp;
        if (r.c.empty()) {
          if (r.k < 0)
            return Fm::Infeasible;
          continue;
        }
        next.insert(std::move(r));
        if (next.size() > 4000)
          return Fm::GaveUp;
      }
    }
    cur = std::move(next);
  }
  return Fm::Feasible;
}

class Closure {
public:
  bool conflict = false;

  int add(const Expr &e) {
    auto it = index_.find(e);
    if (it != index_.end())
      return it->second;
    std::vector<int> kids;
    for (const auto &a : e.args())
      kids.push_back(add(a));
    int id = static_cast<int>(nodes_.size());
    nodes_.push_back({e, kids});
    parent_.push_back(id);
    mask_.push_back(intrinsic(e));
    lit_.push_back(e.is_lit() ? id : -1);
    index_.emplace(e, id);
    if (mask_[id] == 0)
      conflict = true;
    return id;
  }

  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool merge(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b)
      return false;
    if (a > b)
      std::swap(a, b);
    parent_[b] = a;
    mask_[a] &= mask_[b];
    if (mask_[a] == 0)
      conflict = true;
    if (lit_[a] < 0) {
      lit_[a] = lit_[b];
    } else if (lit_[b] >= 0 && !(nodes_[lit_[a]].e == nodes_[lit_[b]].e)) {
      conflict = true;
    }
    changed_ = true;
    return true;
  }

  void restrict(int n, std::uint8_t m) {
    int r = find(n);
    std::uint8_t nm = mask_[r] & m;
    if (nm != mask_[r]) {
      mask_[r] = nm;
      changed_ = true;
      if (nm == 0)
        conflict = true;
    }
  }

  std::uint8_t mask(int n) { return mask_[find(n)]; }

  void literal(const Expr &lit) {
    bool neg = lit.is_unary(UnOp::Not);
    const Expr &a = neg ? lit.arg(0) : lit;
    if (a.is_lit() && a.value().kind == Value::Kind::Bool) {
      if (a.value().boolean == neg)
        conflict = true;
      return;
    }
    if (a.kind() == ExprKind::Binary) {
      switch (a.binop()) {
      case BinOp::Eq: {
        int x = add(a.arg(0)), y = add(a.arg(1));
        if (neg) {
          diseqs_.push_back({x, y});
        } else {
          restrict(x, kDefined);
          restrict(y, kDefined);
          merge(x, y);
        }
        return;
      }
      case BinOp::Lt:
      case BinOp::Le: {
        int x = add(a.arg(0)), y = add(a.arg(1));
        bool strict = a.binop() == BinOp::Lt;
        if (!neg) {
          restrict(x, kNat);
          restrict(y, kNat);
          order_.push_back({x, y, strict});
        } else {
          // not (x < y) gives y <= x when both are naturals
          neg_order_.push_back({y, x, !strict});
        }
        return;
      }
      default:
        break;
      }
    }
    if (a.kind() == ExprKind::TypeTest) {
      int x = add(a.arg(0));
      std::uint8_t b = bit_of(a.type());
      restrict(x, neg ? static_cast<std::uint8_t>(kAll & ~b) : b);
      return;
    }
    int x = add(a);
    int t = add(Expr::boolean(true));
    if (neg)
      diseqs_.push_back({x, t});
    else
      merge(x, t);
  }

  void saturate() {
    for (int round = 0; round < 200 && !conflict; ++round) {
      changed_ = false;
      congruence();
      if (conflict)
        return;
      propagate_kinds();
      if (conflict)
        return;
      spines();
      if (conflict)
        return;
      // Equal classes refute a disequality only when defined.
      for (auto [x, y] : diseqs_)
        if (find(x) == find(y) && !(mask(x) & kUndef)) {
          conflict = true;
          return;
        }
      if (!changed_)
        return;
    }
  }

  Fm arithmetic() {
    std::map<int, int> nat_var, len_var;
    int next = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      int r = find(static_cast<int>(i));
      if (mask_[r] == kNat && !nat_var.count(r))
        nat_var[r] = next++;
      if (mask_[r] == kList && !len_var.count(r))
        len_var[r] = next++;
    }
    auto nv = [&](int n) -> int {
      auto it = nat_var.find(find(n));
      return it == nat_var.end() ? -1 : it->second;
    };
    auto lv = [&](int n) -> int {
      auto it = len_var.find(find(n));
      return it == len_var.end() ? -1 : it->second;
    };
    std::vector<Lin> ineqs, eqs;
    auto ge0 = [&](int v) {
      Lin l;
      l.c[v] = 1;
      ineqs.push_back(l);
    };
    for (auto &[_, v] : nat_var)
      ge0(v);
    for (auto &[_, v] : len_var)
      ge0(v);
    // x - y + k (== or >=) 0 helpers
    auto lin = [](std::initializer_list<std::pair<int, long long>> terms, long long k) {
      Lin l;
      for (auto [v, c] : terms)
        if (v >= 0)
          l.c[v] += c;
      for (auto it = l.c.begin(); it != l.c.end();)
        it = it->second == 0 ? l.c.erase(it) : std::next(it);
      l.k = k;
      return l;
    };
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const Expr &e = nodes_[i].e;
      const auto &kids = nodes_[i].kids;
      int n = static_cast<int>(i);
      int v = nv(n);
      if (v >= 0) {
        if (e.is_lit() && e.value().kind == Value::Kind::Nat) {
          eqs.push_back(lin({{v, 1}}, -static_cast<long long>(e.value().nat)));
        } else if (e.is_binary(BinOp::Add) && nv(kids[0]) >= 0 && nv(kids[1]) >= 0) {
          eqs.push_back(lin({{v, 1}, {nv(kids[0]), -1}, {nv(kids[1]), -1}}, 0));
        } else if (e.is_binary(BinOp::Sub) && nv(kids[0]) >= 0 && nv(kids[1]) >= 0) {
          ineqs.push_back(lin({{nv(kids[0]), 1}, {v, -1}}, 0));
          ineqs.push_back(lin({{v, 1}, {nv(kids[0]), -1}, {nv(kids[1]), 1}}, 0));
        } else if (e.is_binary(BinOp::Mul)) {
          auto lit_of = [&](int k) -> std::optional<long long> {
            int l = lit_[find(k)];
            if (l >= 0 && nodes_[l].e.value().kind == Value::Kind::Nat)
              return static_cast<long long>(nodes_[l].e.value().nat);
            return std::nullopt;
          };
          if (auto k0 = lit_of(kids[0]); k0 && nv(kids[1]) >= 0)
            eqs.push_back(lin({{v, 1}, {nv(kids[1]), -*k0}}, 0));
          else if (auto k1 = lit_of(kids[1]); k1 && nv(kids[0]) >= 0)
            eqs.push_back(lin({{v, 1}, {nv(kids[0]), -*k1}}, 0));
        } else if (e.is_unary(UnOp::Neg)) {
          eqs.push_back(lin({{v, 1}}, 0));
        } else if (e.is_unary(UnOp::Len) && lv(kids[0]) >= 0) {
          eqs.push_back(lin({{v, 1}, {lv(kids[0]), -1}}, 0));
        }
      }
      int l = lv(n);
      if (l >= 0) {
        if (e.kind() == ExprKind::List)
          eqs.push_back(lin({{l, 1}}, -static_cast<long long>(e.args().size())));
        else if (e.is_binary(BinOp::Concat) && lv(kids[0]) >= 0 && lv(kids[1]) >= 0)
          eqs.push_back(lin({{l, 1}, {lv(kids[0]), -1}, {lv(kids[1]), -1}}, 0));
      }
    }
    for (const auto &o : order_) {
      int a = nv(o.lo), b = nv(o.hi);
      if (a < 0 || b < 0)
        continue;
      ineqs.push_back(lin({{b, 1}, {a, -1}}, o.strict ? -1 : 0));
    }
    for (const auto &o : neg_order_) {
      int a = nv(o.lo), b = nv(o.hi);
      if (a < 0 || b < 0)
        continue;
      ineqs.push_back(lin({{b, 1}, {a, -1}}, o.strict ? -1 : 0));
    }
    std::vector<std::pair<int, int>> splits;
    for (auto [x, y] : diseqs_) {
      int a = nv(x), b = nv(y);
      if (a >= 0 && b >= 0) {
        splits.push_back({a, b});
        continue;
      }
      int la = lv(x), lb = lv(y);
      if (la >= 0 && lb >= 0) {
        bool x_nil = is_nil_class(x), y_nil = is_nil_class(y);
        if (x_nil && !y_nil)
          ineqs.push_back(lin({{lb, 1}}, -1));
        else if (y_nil && !x_nil)
          ineqs.push_back(lin({{la, 1}}, -1));
      }
    }
    if (splits.size() > 8)
      splits.resize(8);
    Fm base = fourier_motzkin(ineqs, eqs);
    if (base != Fm::Feasible || splits.empty())
      return base;
    std::size_t combos = std::size_t{1} << splits.size();
    for (std::size_t mask = 0; mask < combos; ++mask) {
      std::vector<Lin> extra = ineqs;
      for (std::size_t i = 0; i < splits.size(); ++i) {
        auto [a, b] = splits[i];
        if (mask & (std::size_t{1} << i))
          extra.push_back(lin({{b, 1}, {a, -1}}, -1));
        else
          extra.push_back(lin({{a, 1}, {b, -1}}, -1));
      }
      Fm r = fourier_motzkin(extra, eqs);
      if (r != Fm::Infeasible)
        return r;
    }
    return Fm::Infeasible;
  }

private:
  struct Node {
    Expr e;
    std::vector<int> kids;
  };
  struct Order {
    int lo, hi;
    bool strict;
  };

  std::vector<Node> nodes_;
  std::unordered_map<Expr, int, ExprHash> index_;
  std::vector<int> parent_;
  std::vector<std::uint8_t> mask_;
  std::vector<int> lit_; // a literal node in the class, if any
  std::vector<std::pair<int, int>> diseqs_;
  std::vector<Order> order_, neg_order_;
  bool changed_ = false;

  static std::uint8_t intrinsic(const Expr &e) {
    switch (e.kind()) {
    case ExprKind::Lit:
      switch (e.value().kind) {
      case Value::Kind::Null: return kNull;
      case Value::Kind::Nat: return kNat;
      case Value::Kind::Bool: return kBool;
      case Value::Kind::Addr: return kPtr;
      }
      return kAll;
    case ExprKind::PVar:
    case ExprKind::LVar: return kDefined;
    case ExprKind::List: return e.args().empty() ? kList : kList | kUndef;
    case ExprKind::TypeTest: return kBool;
    case ExprKind::Unary:
      return e.unop() == UnOp::Not ? kBool : (e.unop() == UnOp::Len || e.unop() == UnOp::Neg)
                                                   ? static_cast<std::uint8_t>(kNat | kUndef)
                                                   : kAll;
    case ExprKind::Binary:
      switch (e.binop()) {
      case BinOp::Add: return kNat | kPtr | kUndef;
      case BinOp::Sub:
      case BinOp::Mul: return kNat | kUndef;
      case BinOp::Concat:
      case BinOp::Cons: return kList | kUndef;
      default: return kBool;
      }
    }
    return kAll;
  }

  bool is_nil_class(int n) {
    int l = -1;
    int r = find(n);
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (find(static_cast<int>(i)) == r && nodes_[i].e.kind() == ExprKind::List &&
          nodes_[i].e.args().empty())
        l = static_cast<int>(i);
    return l >= 0;
  }

  void congruence() {
    std::map<std::vector<long>, int> sig;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const Expr &e = nodes_[i].e;
      if (nodes_[i].kids.empty())
        continue;
      std::vector<long> key;
      key.push_back(static_cast<long>(e.kind()));
      switch (e.kind()) {
      case ExprKind::Unary: key.push_back(static_cast<long>(e.unop())); break;
      case ExprKind::Binary: key.push_back(static_cast<long>(e.binop())); break;
      case ExprKind::TypeTest: key.push_back(static_cast<long>(e.type())); break;
      default: key.push_back(-1);
      }
      for (int k : nodes_[i].kids)
        key.push_back(find(k));
      auto [it, fresh] = sig.emplace(std::move(key), static_cast<int>(i));
      if (!fresh)
        merge(it->second, static_cast<int>(i));
    }
  }

  void propagate_kinds() {
    static constexpr std::uint8_t kinds[] = {kUndef, kNull, kNat, kBool, kPtr, kList};
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const Expr &e = nodes_[i].e;
      const auto &kids = nodes_[i].kids;
      int n = static_cast<int>(i);
      if (e.kind() == ExprKind::Binary &&
          (e.binop() == BinOp::Add || e.binop() == BinOp::Sub || e.binop() == BinOp::Mul ||
           e.binop() == BinOp::Concat)) {
        std::uint8_t a = mask(kids[0]), b = mask(kids[1]), r = mask(n);
        std::uint8_t nr = 0, na = 0, nb = 0;
        for (auto x : kinds)
          for (auto y : kinds) {
            if (!(a & x) || !(b & y))
              continue;
            std::uint8_t z = apply_kind(e.binop(), x, y);
            if (r & z) {
              nr |= z;
              na |= x;
              nb |= y;
            }
          }
        restrict(n, nr);
        restrict(kids[0], na);
        restrict(kids[1], nb);
      } else if (e.kind() == ExprKind::List) {
        bool defined = true;
        for (int k : kids) {
          if (mask(k) == kUndef)
            restrict(n, kUndef);
          defined = defined && !(mask(k) & kUndef);
        }
        if (defined)
          restrict(n, kList);
        if (!(mask(n) & kUndef))
          for (int k : kids)
            restrict(k, kDefined);
      } else if (e.kind() == ExprKind::Unary &&
                 (e.unop() == UnOp::Neg || e.unop() == UnOp::Len)) {
        std::uint8_t a = mask(kids[0]), r = mask(n);
        std::uint8_t nr = 0, na = 0;
        for (auto x : kinds) {
          if (!(a & x))
            continue;
          std::uint8_t z = apply_kind(e.unop(), x);
          if (r & z) {
            nr |= z;
            na |= x;
          }
        }
        restrict(n, nr);
        restrict(kids[0], na);
      }
      if (conflict)
        return;
    }
  }

  struct Part {
    bool elem;
    int cls; // element node class, or opaque list class
  };

  // List-valued members of each defined list class, literals first.
  std::map<int, std::vector<int>> defs_;

  void spine_of(int n, std::vector<Part> &out, std::set<int> &open) {
    const Expr &e = nodes_[n].e;
    if (e.kind() == ExprKind::List) {
      for (int k : nodes_[n].kids)
        out.push_back({true, find(k)});
    } else if (e.is_binary(BinOp::Concat)) {
      spine_of(nodes_[n].kids[0], out, open);
      spine_of(nodes_[n].kids[1], out, open);
    } else if (e.is_binary(BinOp::Cons)) {
      out.push_back({true, find(nodes_[n].kids[0])});
      spine_of(nodes_[n].kids[1], out, open);
    } else {
      int r = find(n);
      auto it = defs_.find(r);
      if (it != defs_.end() && !open.count(r)) {
        open.insert(r);
        spine_of(it->second.front(), out, open);
        open.erase(r);
      } else {
        out.push_back({false, r});
      }
    }
  }

  std::vector<Part> spine(int n, int cls) {
    std::vector<Part> out;
    std::set<int> open{cls};
    spine_of(n, out, open);
    return out;
  }

  void unify_spines(std::vector<Part> s1, std::vector<Part> s2) {
    std::size_t i = 0, j = 0, e1 = s1.size(), e2 = s2.size();
    auto same = [&](const Part &p, const Part &q) {
      if (p.elem && q.elem) {
        merge(p.cls, q.cls);
        return true;
      }
      return !p.elem && !q.elem && find(p.cls) == find(q.cls);
    };
    while (i < e1 && j < e2 && same(s1[i], s2[j])) {
      ++i;
      ++j;
    }
    while (e1 > i && e2 > j && same(s1[e1 - 1], s2[e2 - 1])) {
      --e1;
      --e2;
    }
    auto all_empty = [&](std::vector<Part> &s, std::size_t from, std::size_t to) {
      int nil = add(Expr::nil());
      for (std::size_t k = from; k < to; ++k) {
        if (s[k].elem) {
          conflict = true;
          return;
        }
        merge(s[k].cls, nil);
      }
    };
    if (i == e1)
      all_empty(s2, j, e2);
    else if (j == e2)
      all_empty(s1, i, e1);
    else if (e1 - i == 1 && e2 - j == 1 && !s1[i].elem && !s2[j].elem)
      merge(s1[i].cls, s2[j].cls);
  }

  void spines() {
    defs_.clear();
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const Expr &e = nodes_[i].e;
      if (e.kind() == ExprKind::List || e.is_binary(BinOp::Concat) || e.is_binary(BinOp::Cons)) {
        int r = find(static_cast<int>(i));
        if (mask_[r] == kList)
          defs_[r].push_back(static_cast<int>(i));
      }
    }
    for (auto &[r, members] : defs_)
      std::stable_partition(members.begin(), members.end(),
                            [&](int m) { return nodes_[m].e.kind() == ExprKind::List; });
    std::map<std::vector<std::pair<bool, int>>, int> seen;
    for (auto &[r, members] : defs_) {
      std::vector<Part> first = spine(members[0], r);
      for (std::size_t m = 1; m < members.size() && !conflict; ++m)
        unify_spines(first, spine(members[m], r));
      if (conflict)
        return;
      // Classes with the same expanded spine hold the same list.
      std::vector<std::pair<bool, int>> key;
      for (const auto &p : spine(members[0], r))
        key.push_back({p.elem, find(p.cls)});
      auto [it, fresh] = seen.emplace(key, r);
      if (!fresh)
        merge(it->second, r);
    }
  }
};

} // namespace

SatResult refute(const std::vector<Expr> &literals) {
  Closure c;
  for (const auto &l : literals) {
    c.literal(l);
    if (c.conflict)
      return SatResult::Unsat;
  }
  c.saturate();
  if (c.conflict)
    return SatResult::Unsat;
  return c.arithmetic() == Fm::Infeasible ? SatResult::Unsat : SatResult::Unknown;
}

} // namespace swing::sym::detail
