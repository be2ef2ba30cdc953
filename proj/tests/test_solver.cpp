#include <doctest.h>

#include "swing/sym/solver.hpp"
#include "swing/wisl/parser.hpp"
#include "swing/wisl/pretty.hpp"
#include "solver_oracle.hpp"

#include <functional>

#include <map>
#include <random>
#include <variant>

using namespace swing;
using namespace swing::sym;

namespace {

Expr lv(const char *n) { return Expr::lvar(n); }
Expr nat(std::uint64_t n) { return Expr::nat(n); }
Expr f(const std::string &src) { return wisl::parse_expr(src); }

} // namespace

using namespace swing::test;

TEST_CASE("basic satisfiability") {
  Expr x = lv("#x");
  CHECK(sat({mk_eq(x, Expr::null()), mk_not(mk_eq(x, Expr::null()))}) == SatResult::Unsat);
  CHECK(sat({mk_eq(x, Expr::null())}) == SatResult::Sat);
  CHECK(sat({}) == SatResult::Sat);
  CHECK(sat({Expr::boolean(false)}) == SatResult::Unsat);
}

TEST_CASE("entailment") {
  Expr a = lv("#a"), v = lv("#v"), b = lv("#b");
  CHECK(entails({mk_eq(a, Expr::binary(BinOp::Cons, v, b))}, mk_eq(mk_len(a), nat(1) + mk_len(b))));
  CHECK(entails({}, mk_eq(mk_len(Expr::nil()), nat(0))));
  CHECK_FALSE(entails({}, mk_eq(lv("#x"), nat(0))));
  // Lists built from the same head and tail are equal.
  CHECK(entails({mk_eq(a, Expr::binary(BinOp::Cons, v, b)), mk_eq(lv("#c"), Expr::binary(BinOp::Cons, v, b))},
                mk_eq(a, lv("#c"))));
  // Cons cells are injective.
  CHECK(entails({mk_eq(Expr::binary(BinOp::Cons, v, b), Expr::binary(BinOp::Cons, lv("#w"), lv("#d")))},
                mk_eq(b, lv("#d"))));
  // Equality is strict: an undefined side makes it false.
  CHECK(sat({mk_eq(mk_len(Expr::null()), mk_len(Expr::null()))}) == SatResult::Unsat);
  CHECK(entails({mk_eq(mk_len(a), mk_len(b))}, Expr::type_test(a, TypeName::List)));
}

TEST_CASE("arithmetic reasoning") {
  Expr n = lv("#n"), r = lv("#r"), alpha = lv("#alpha");
  // n + len(r) == len(alpha), r == nil  |-  n == len(alpha)
  CHECK(entails({mk_eq(n + mk_len(r), mk_len(alpha)), mk_eq(r, Expr::nil())}, mk_eq(n, mk_len(alpha))));
  CHECK(sat({Expr::binary(BinOp::Lt, n, nat(0))}) == SatResult::Unsat);
  CHECK(sat({Expr::binary(BinOp::Lt, n, r), Expr::binary(BinOp::Lt, r, n)}) == SatResult::Unsat);
  CHECK(sat({Expr::binary(BinOp::Le, n, nat(2)), Expr::binary(BinOp::Le, nat(2), n)}) == SatResult::Sat);
  CHECK(sat({mk_not(mk_eq(n, nat(0))), mk_not(mk_eq(n, nat(1))), Expr::binary(BinOp::Le, n, nat(1))}) ==
        SatResult::Unsat);
  // 2n == 1 has no natural solution
  CHECK(sat({mk_eq(Expr::binary(BinOp::Mul, nat(2), n), nat(1))}) == SatResult::Unsat);
}

TEST_CASE("models are verified against the input") {
  Expr a = lv("#a"), b = lv("#b");
  auto ans = check({mk_eq(a, Expr::binary(BinOp::Cons, nat(1), b)), mk_eq(mk_len(a), nat(2))});
  REQUIRE(ans.result == SatResult::Sat);
  REQUIRE(ans.model);
  CHECK(holds(mk_eq(a, Expr::binary(BinOp::Cons, nat(1), b)), *ans.model));
  CHECK(to_string(ans.model->at("#a")).rfind("[1, ", 0) == 0);
}

TEST_CASE("parsed formulas") {
  CHECK(sat({f("#x == null"), f("!(#x == null)")}) == SatResult::Unsat);
  CHECK(sat({f("(#x is Nat) and (#x is List)")}) == SatResult::Unsat);
  CHECK(sat({f("#x + 1 == null")}) == SatResult::Unsat);
}

TEST_CASE("normalization is idempotent and meaning-preserving") {
  Gen g(7);
  std::vector<std::string> vars{"#a", "#b", "#c"};
  for (int i = 0; i < 300; ++i) {
    Expr e = g.formula(2);
    Expr n = normalize(e);
    CHECK(normalize(n) == n);
    // Same truth value on a sample of oracle assignments.
    static const auto dom = domain();
    for (int k = 0; k < 5; ++k) {
      std::map<std::string, OV> env;
      for (const auto &v : vars)
        env[v] = dom[g.pick(static_cast<int>(dom.size()))];
      CHECK(otrue(oeval(e, env)) == otrue(oeval(n, env)));
    }
  }
}

TEST_CASE("solver agrees with finite-model oracle") {
  Gen g(20240611);
  std::vector<std::string> vars{"#a", "#b", "#c"};
  int violations = 0, unsat_n = 0, sat_n = 0, cases = 0;
  for (; cases < 400; ++cases) {
    std::vector<Expr> fs;
    int k = 1 + g.pick(3);
    for (int i = 0; i < k; ++i)
      fs.push_back(g.formula(2));
    auto ans = check(fs);
    if (ans.result == SatResult::Unsat) {
      ++unsat_n;
      if (oracle_model_exists(fs, vars)) {
        ++violations;
        std::string s;
        for (const auto &x : fs)
          s += wisl::pretty_expr(x) + " ; ";
        INFO("unsound unsat: " << s);
        CHECK(false);
      }
    } else if (ans.result == SatResult::Sat) {
      ++sat_n;
      std::map<std::string, OV> env;
      for (const auto &v : vars)
        env[v] = ans.model->count(v) ? to_oracle(ans.model->at(v)) : OV{ONull{}};
      for (const auto &x : fs)
        if (!otrue(oeval(x, env)))
          ++violations;
    }
  }
  CHECK(violations == 0);
  // The generator should exercise both outcomes.
  CHECK(unsat_n > 20);
  CHECK(sat_n > 20);
  MESSAGE("cases " << cases << " sat " << sat_n << " unsat " << unsat_n);
}
