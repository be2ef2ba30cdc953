#include "swing/sym/state.hpp"

#include "swing/wisl/pretty.hpp"

#include <algorithm>

namespace swing::sym {

const char *to_string(MemErrorKind k) {
  switch (k) {
  case MemErrorKind::MissingCell: return "MissingCell";
  case MemErrorKind::UseAfterFree: return "UseAfterFree";
  case MemErrorKind::NotAnAddress: return "NotAnAddress";
  case MemErrorKind::SymbolicOffset: return "SymbolicOffset";
  case MemErrorKind::PartialFree: return "PartialFree";
  }
  return "?";
}

std::size_t SymHeap::cell_count() const {
  std::size_t n = 0;
  for (const auto &[_, cs] : cells)
    n += cs.size();
  return n;
}

std::string to_string(const PredInstance &p) {
  std::string out = p.name + "(";
  for (std::size_t i = 0; i < p.args.size(); ++i)
    out += (i ? ", " : "") + wisl::pretty_expr(p.args[i]);
  return out + ")";
}

const Expr &SymState::var(const std::string &name) const {
  auto it = store.find(name);
  if (it == store.end())
    throw UnboundVariable(name);
  return it->second;
}

Expr SymState::eval(const Expr &e) const {
  Expr r = rewrite(e, [&](const Expr &x) -> std::optional<Expr> {
    if (x.is_pvar())
      return var(x.name());
    return std::nullopt;
  });
  return normalize(r);
}

void SymState::assume(const Expr &f) {
  Expr n = normalize(f);
  if (n.is_binary(BinOp::And)) {
    assume(n.arg(0));
    assume(n.arg(1));
    return;
  }
  if (n.is_true())
    return;
  if (std::find(pc.begin(), pc.end(), n) == pc.end())
    pc.push_back(n);
}

bool SymState::feasible() const { return !unsat(pc); }

bool SymState::entails(const Expr &f) const {
  Expr n = normalize(f);
  if (n.is_true())
    return true;
  if (std::find(pc.begin(), pc.end(), n) != pc.end())
    return true;
  return sym::entails(pc, n);
}

std::string SymState::fresh_lvar() { return "#lvar_" + std::to_string(fresh++); }

namespace {

bool is_addr_lit(const Expr &e) { return e.is_lit() && e.value().kind == Value::Kind::Addr; }

std::string describe(const Expr &addr) { return wisl::pretty_expr(addr); }

} // namespace

Loc resolve(const SymState &s, const Expr &addr) {
  (void)s;
  Expr a = normalize(addr);
  if (is_addr_lit(a))
    return {Expr::lit(Value::addr(a.value().block, 0)), a.value().nat};
  if (a.is_lit() || a.kind() == ExprKind::List || a.is_binary(BinOp::Concat) ||
      a.kind() == ExprKind::TypeTest || a.is_unary(UnOp::Not) || a.is_unary(UnOp::Len))
    throw MemError(MemErrorKind::NotAnAddress, a, describe(a) + " is not an address");
  if (a.is_binary(BinOp::Add)) {
    if (!a.arg(1).is_nat_lit())
      throw MemError(MemErrorKind::SymbolicOffset, a,
                     "symbolic offset in address " + describe(a) + " is not supported");
    Loc base = resolve(s, a.arg(0));
    base.offset += a.arg(1).value().nat;
    return base;
  }
  return {a, 0};
}

std::optional<Expr> find_block(const SymState &s, const Expr &block) {
  auto known = [&](const Expr &b) { return s.heap.cells.count(b) || s.heap.freed.count(b) || s.heap.bounds.count(b); };
  if (known(block))
    return block;
  std::set<Expr> all;
  for (const auto &[b, _] : s.heap.cells)
    all.insert(b);
  for (const auto &b : s.heap.freed)
    all.insert(b);
  for (const auto &b : all) {
    // Distinct allocation literals never alias.
    if (is_addr_lit(b) && is_addr_lit(block))
      continue;
    if (s.entails(mk_eq(b, block)))
      return b;
  }
  return std::nullopt;
}

namespace {

// Block key for an address that must be live.
std::pair<Loc, Expr> live_cell(const SymState &s, const Expr &addr) {
  Loc l = resolve(s, addr);
  auto b = find_block(s, l.block);
  if (b && s.heap.freed.count(*b))
    throw MemError(MemErrorKind::UseAfterFree, addr, "use after free of " + describe(normalize(addr)));
  if (!b)
    throw MemError(MemErrorKind::MissingCell, addr, "no cell owned at " + describe(normalize(addr)));
  auto it = s.heap.cells.find(*b);
  if (it == s.heap.cells.end() || !it->second.count(l.offset))
    throw MemError(MemErrorKind::MissingCell, addr, "no cell owned at " + describe(normalize(addr)));
  return {Loc{*b, l.offset}, it->second.at(l.offset)};
}

} // namespace

Expr heap_load(const SymState &s, const Expr &addr) { return live_cell(s, addr).second; }

SymState heap_store(const SymState &s, const Expr &addr, const Expr &value) {
  auto [loc, _] = live_cell(s, addr);
  SymState r = s;
  r.heap.cells[loc.block][loc.offset] = normalize(value);
  return r;
}

std::pair<SymState, Expr> heap_alloc(const SymState &s, std::uint64_t n) {
  SymState r = s;
  Expr block = Expr::lit(Value::addr("$l" + std::to_string(r.blocks++), 0));
  auto &cs = r.heap.cells[block];
  for (std::uint64_t i = 0; i < n; ++i)
    cs[i] = Expr::null();
  r.heap.bounds[block] = n;
  return {r, block};
}

SymState heap_free(const SymState &s, const Expr &addr) {
  Loc l = resolve(s, addr);
  auto b = find_block(s, l.block);
  if (b && s.heap.freed.count(*b))
    throw MemError(MemErrorKind::UseAfterFree, addr, "double free of " + describe(normalize(addr)));
  if (!b || !s.heap.cells.count(*b) || s.heap.cells.at(*b).empty())
    throw MemError(MemErrorKind::MissingCell, addr, "no cell owned at " + describe(normalize(addr)));
  if (l.offset != 0)
    throw MemError(MemErrorKind::PartialFree, addr,
                   "free of " + describe(normalize(addr)) + " does not start at the block base");
  const auto &cs = s.heap.cells.at(*b);
  auto bound = s.heap.bounds.count(*b) ? s.heap.bounds.at(*b) : std::nullopt;
  if (bound) {
    for (std::uint64_t i = 0; i < *bound; ++i)
      if (!cs.count(i))
        throw MemError(MemErrorKind::PartialFree, addr,
                       "free of " + describe(normalize(addr)) + " without owning offset " + std::to_string(i));
  }
  SymState r = s;
  r.heap.cells.erase(*b);
  r.heap.freed.insert(*b);
  return r;
}

SymState add_cell(const SymState &s, const Loc &loc, const Expr &value) {
  SymState r = s;
  Expr block = find_block(s, loc.block).value_or(loc.block);
  r.heap.cells[block][loc.offset] = normalize(value);
  return r;
}

std::vector<std::pair<BranchCase, SymState>> branch(const SymState &s, const Expr &cond) {
  Expr c = normalize(cond);
  std::vector<std::pair<BranchCase, SymState>> out;
  SymState t = s, f = s;
  t.assume(c);
  f.assume(mk_not(c));
  bool t_ok = !c.is_false() && t.feasible();
  bool f_ok = !c.is_true() && f.feasible();
  if (t_ok)
    out.emplace_back(BranchCase::True, std::move(t));
  if (f_ok)
    out.emplace_back(BranchCase::False, std::move(f));
  if (out.empty())
    throw DeadPath();
  return out;
}

nlohmann::json snapshot(const SymState &s) {
  nlohmann::json store = nlohmann::json::array();
  for (const auto &[v, e] : s.store)
    store.push_back({{"var", v}, {"expr", wisl::pretty_expr(e)}});
  nlohmann::json heap = nlohmann::json::array();
  for (const auto &[b, cs] : s.heap.cells)
    for (const auto &[off, e] : cs)
      heap.push_back({{"block", wisl::pretty_expr(b)}, {"offset", off}, {"expr", wisl::pretty_expr(e)}});
  nlohmann::json preds = nlohmann::json::array();
  for (const auto &p : s.preds)
    preds.push_back(to_string(p));
  nlohmann::json pc = nlohmann::json::array();
  for (const auto &f : s.pc)
    pc.push_back(wisl::pretty_expr(f));
  return {{"store", store}, {"heap", heap}, {"preds", preds}, {"pc", pc}};
}

} // namespace swing::sym
