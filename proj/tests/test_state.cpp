#include <doctest.h>

#include "swing/sym/state.hpp"
#include "swing/wisl/parser.hpp"

#include <random>
#include <set>

using namespace swing;
using namespace swing::sym;

namespace {

Expr lv(const char *n) { return Expr::lvar(n); }
Expr nat(std::uint64_t n) { return Expr::nat(n); }

MemErrorKind mem_error_of(const std::function<void()> &f) {
  try {
    f();
  } catch (const MemError &e) {
    return e.kind;
  }
  FAIL("no MemError thrown");
  return MemErrorKind::MissingCell;
}

} // namespace

TEST_CASE("load from an owned cell") {
  SymState s;
  s.assume(Expr::type_test(lv("#l"), TypeName::Ptr));
  s = add_cell(s, {lv("#l"), 0}, lv("#v"));
  s = add_cell(s, {lv("#l"), 1}, lv("#z"));
  CHECK(heap_load(s, lv("#l") + nat(1)) == lv("#z"));
  CHECK(heap_load(s, lv("#l")) == lv("#v"));
  // Aliasing through the path condition.
  SymState t = s;
  t.assume(mk_eq(lv("#m"), lv("#l")));
  CHECK(heap_load(t, lv("#m") + nat(1)) == lv("#z"));
}

TEST_CASE("memory errors") {
  SymState empty;
  CHECK(mem_error_of([&] { heap_load(empty, lv("#l")); }) == MemErrorKind::MissingCell);
  CHECK(mem_error_of([&] { heap_load(empty, Expr::null()); }) == MemErrorKind::NotAnAddress);
  CHECK(mem_error_of([&] { heap_load(empty, lv("#l") + lv("#n")); }) == MemErrorKind::SymbolicOffset);

  auto [s, b] = heap_alloc(empty, 2);
  SymState freed = heap_free(s, b);
  CHECK(mem_error_of([&] { heap_load(freed, b); }) == MemErrorKind::UseAfterFree);
  CHECK(mem_error_of([&] { heap_free(freed, b); }) == MemErrorKind::UseAfterFree);
  CHECK(mem_error_of([&] { heap_free(s, b + nat(1)); }) == MemErrorKind::PartialFree);
  SymState partial = s;
  partial.heap.cells[b].erase(1);
  CHECK(mem_error_of([&] { heap_free(partial, b); }) == MemErrorKind::PartialFree);
}

TEST_CASE("alloc, store and load") {
  SymState s0;
  auto [s, b] = heap_alloc(s0, 2);
  CHECK(heap_load(s, b) == Expr::null());
  CHECK(heap_load(s, b + nat(1)) == Expr::null());
  SymState t = heap_store(s, b + nat(1), nat(7));
  CHECK(heap_load(t, b + nat(1)) == nat(7));
  // Two allocations never alias.
  auto [u, b2] = heap_alloc(t, 1);
  CHECK(!(b2 == b));
  CHECK(heap_load(u, b + nat(1)) == nat(7));
  CHECK(heap_load(u, b2) == Expr::null());
}

TEST_CASE("heap frame") {
  SymState s0;
  auto [s1, b1] = heap_alloc(s0, 2);
  auto [s, b2] = heap_alloc(s1, 3);
  SymState before = s;
  (void)heap_load(s, b2 + nat(2));
  CHECK(s == before);

  SymState t = heap_store(s, b2 + nat(2), nat(9));
  std::size_t changed = 0;
  for (const auto &[blk, cs] : s.heap.cells)
    for (const auto &[off, v] : cs)
      changed += !(t.heap.cells.at(blk).at(off) == v);
  CHECK(changed == 1);
  CHECK(t.heap.cell_count() == s.heap.cell_count());

  SymState f = heap_free(s, b1);
  CHECK(f.heap.cells.count(b1) == 0);
  CHECK(f.heap.cells.at(b2) == s.heap.cells.at(b2));
  CHECK(f.heap.cell_count() == s.heap.cell_count() - 2);
}

TEST_CASE("fresh logical variables") {
  SymState s;
  CHECK(s.fresh_lvar() == "#lvar_0");
  CHECK(s.fresh_lvar() == "#lvar_1");
  std::set<std::string> names;
  for (int i = 0; i < 1000; ++i)
    names.insert(s.fresh_lvar());
  CHECK(names.size() == 1000);
}

TEST_CASE("branching") {
  SymState s;
  s.store["x"] = lv("#x");
  s.preds.push_back({"list", {lv("#x"), lv("#alpha")}});
  auto two = branch(s, s.eval(wisl::parse_expr("x == null")));
  REQUIRE(two.size() == 2);
  CHECK(two[0].first == BranchCase::True);
  CHECK(two[1].first == BranchCase::False);

  auto one = branch(s, Expr::boolean(true));
  REQUIRE(one.size() == 1);
  CHECK(one[0].first == BranchCase::True);

  SymState known = s;
  known.assume(mk_eq(lv("#x"), Expr::null()));
  auto only = branch(known, mk_eq(lv("#x"), Expr::null()));
  REQUIRE(only.size() == 1);
  CHECK(only[0].first == BranchCase::True);

  SymState dead = s;
  dead.pc.push_back(Expr::boolean(false));
  CHECK_THROWS_AS(branch(dead, mk_eq(lv("#x"), nat(0))), DeadPath);
}

TEST_CASE("branch partition on a finite domain") {
  // Each concrete assignment satisfying the parent pc satisfies exactly one
  // child's pc, and vice versa.
  std::mt19937 rng(11);
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  std::vector<Val> dom{Val::null(), Val::nat(0), Val::nat(1), Val::nat(2), Val::list({}),
                       Val::list({Val::nat(0)})};
  const char *vars[] = {"#a", "#b"};
  auto atom = [&]() -> Expr {
    Expr a = lv(vars[pick(2)]), b = pick(2) ? lv(vars[pick(2)]) : nat(pick(3));
    switch (pick(3)) {
    case 0: return mk_eq(a, b);
    case 1: return Expr::binary(BinOp::Lt, a, b);
    default: return mk_eq(mk_len(a), nat(pick(2)));
    }
  };
  for (int iter = 0; iter < 100; ++iter) {
    SymState s;
    s.assume(atom());
    Expr cond = atom();
    std::vector<std::pair<BranchCase, SymState>> kids;
    try {
      kids = branch(s, cond);
    } catch (const DeadPath &) {
    }
    for (const auto &x : dom)
      for (const auto &y : dom) {
        Model m{{"#a", x}, {"#b", y}};
        bool parent = std::all_of(s.pc.begin(), s.pc.end(), [&](const Expr &f) { return holds(f, m); });
        int in_kids = 0;
        for (const auto &[_, k] : kids)
          in_kids += std::all_of(k.pc.begin(), k.pc.end(), [&](const Expr &f) { return holds(f, m); });
        CHECK(in_kids == (parent ? 1 : 0));
      }
  }
}

TEST_CASE("snapshot format") {
  SymState s;
  s.store["x"] = lv("#x");
  s.assume(Expr::type_test(lv("#x"), TypeName::Ptr));
  s = add_cell(s, {lv("#x"), 0}, lv("#v"));
  s.preds.push_back({"list", {lv("#z"), lv("#beta")}});
  s.assume(mk_eq(lv("#alpha"), Expr::binary(BinOp::Cons, lv("#v"), lv("#beta"))));
  auto j = snapshot(s);
  CHECK(j["store"][0]["var"] == "x");
  CHECK(j["store"][0]["expr"] == "#x");
  CHECK(j["heap"][0]["block"] == "#x");
  CHECK(j["heap"][0]["offset"] == 0);
  CHECK(j["heap"][0]["expr"] == "#v");
  CHECK(j["preds"][0] == "list(#z, #beta)");
  CHECK(j["pc"][1] == "#alpha == [#v] @ #beta");
}
