#include <doctest.h>

#include "swing/gil.hpp"
#include "swing/wisl/parser.hpp"
#include "test_util.hpp"

#include <set>

using namespace swing;
using namespace swing::gil;

namespace {

Program compile_corpus(const std::string &name) {
  return compile(wisl::parse_program(test::read_corpus(name)));
}

struct Row {
  std::string text;
  std::string stmt_kind;
  std::string branch_kind;
};

} // namespace

TEST_CASE("llen compiles to the annotation table row for row") {
  // Lines 2..12 of the annotation table for llen.
  const std::vector<Row> table = {
      {"goto? (x == null) then else", "Normal true", "IfElse"},
      {"n := 0", "Normal true", ""},
      {"goto end", "Hidden", ""},
      {"_var0 := i_add(x, 1)", "Normal true", ""},
      {"goto? (_var0 is Ptr) cont fail", "Normal false", ""},
      {"fail \"Invalid pointer\"", "Normal true", ""},
      {"t := load<_var0>", "Normal true", ""},
      {"n := llen(t)", "Normal true", ""},
      {"skip", "Hidden", ""},
      {"ret := n", "Return false", ""},
      {"return", "Return true", ""},
  };
  Program g = compile_corpus("llen_buggy.wisl");
  const Proc &p = g.proc("llen");
  REQUIRE(p.body.size() == table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    INFO("line " << i + 2);
    CHECK(to_string(p.body[i]) == table[i].text);
    CHECK(to_string(p.body[i].annot.stmt_kind) == table[i].stmt_kind);
    std::string bk = p.body[i].annot.branch_kind ? to_string(*p.body[i].annot.branch_kind) : "";
    CHECK(bk == table[i].branch_kind);
  }
  CHECK(p.body[1].label == "then");
  CHECK(p.body[3].label == "else");
  CHECK(p.body[5].label == "fail");
  CHECK(p.body[6].label == "cont");
  CHECK(p.body[8].label == "end");
  // The recursive call is compositional.
  CHECK_FALSE(p.body[7].annot.nest_kind.has_value());
}

TEST_CASE("a lookup through a compound address is four commands") {
  Program g = compile(wisl::parse_program("function f(x) { t := [x+1]; return t }"));
  const Proc &p = g.proc("f");
  REQUIRE(p.body.size() == 6);
  CHECK(p.body[0].kind == Cmd::Kind::Call);
  CHECK(p.body[1].kind == Cmd::Kind::GuardedGoto);
  CHECK(p.body[1].annot.stmt_kind == StmtKind::normal(false));
  CHECK(p.body[2].kind == Cmd::Kind::Fail);
  CHECK(p.body[3].kind == Cmd::Kind::Load);
  // The evaluation step points at the address sub-expression.
  REQUIRE(p.body[0].annot.source_loc);
  CHECK(p.body[0].annot.source_loc->start_col == 23);
  CHECK(p.body[0].annot.source_loc->end_col == 25);
}

TEST_CASE("skip then return") {
  Program g = compile_corpus("skip_return.wisl");
  const Proc &p = g.proc("f");
  REQUIRE(p.body.size() == 3);
  CHECK(p.body[0].kind == Cmd::Kind::Skip);
  CHECK(p.body[0].annot.stmt_kind == StmtKind::normal(true));
  CHECK(to_string(p.body[1]) == "ret := 0");
  CHECK(p.body[1].annot.stmt_kind == StmtKind::ret(false));
  CHECK(p.body[2].kind == Cmd::Kind::Return);
  CHECK(p.body[2].annot.stmt_kind == StmtKind::ret(true));

  std::string golden = test::read_file(std::string(SWING_GOLDEN_DIR) + "/skip_return.gil");
  CHECK(dump(g) == golden);
}

TEST_CASE("builtin i_add is hidden") {
  auto bs = builtin_procs();
  REQUIRE(bs.size() == 1);
  CHECK(bs[0].name == "i_add");
  for (const auto &c : bs[0].body)
    CHECK(c.annot.stmt_kind == StmtKind::hidden());
  CHECK(is_builtin("i_add"));
  CHECK_FALSE(is_builtin("llen"));
}

TEST_CASE("loops are extracted into their own procedure") {
  Program g = compile_corpus("length_iter.wisl");
  const Proc &caller = g.proc("length");
  std::size_t loop_calls = 0;
  std::string loop_name;
  for (const auto &c : caller.body) {
    if (c.annot.nest_kind && c.annot.nest_kind->kind == NestKind::Kind::LoopBody) {
      ++loop_calls;
      loop_name = c.annot.nest_kind->name;
      CHECK(c.kind == Cmd::Kind::Call);
      CHECK(c.annot.stmt_kind == StmtKind::normal(true));
    }
  }
  CHECK(loop_calls == 1);
  const Proc &lp = g.proc(loop_name);
  CHECK(lp.origin == Proc::Origin::LoopBody);
  REQUIRE(lp.loop);
  CHECK(lp.body.front().annot.stmt_kind == StmtKind::loop_prefix());
  CHECK(lp.body.back().kind == Cmd::Kind::Return);
  REQUIRE(lp.spec);
  // pre = invariant * guard, post = invariant
  CHECK(lp.spec->pre.atoms.size() == lp.loop->invariant.atoms.size() + 1);
  CHECK(lp.spec->post.atoms.size() == lp.loop->invariant.atoms.size());
  std::set<std::string> mod(lp.loop->modified.begin(), lp.loop->modified.end());
  CHECK(mod == std::set<std::string>{"n", "t", "x"});
  CHECK(lp.loop->binders == std::vector<std::string>{"#r"});
}

TEST_CASE("trivial loop") {
  Program g = compile(wisl::parse_program(
      "function f(x) { while (false) invariant { true } { skip }; return x }"));
  CHECK(g.procs.count("f_loop0") == 1);
  CHECK(g.proc("f").body.size() == 3);
}

TEST_CASE("loops without invariants are rejected") {
  auto p = wisl::parse_program_unchecked("function f(x) { while (x < 3) { x := x + 1 }; return x }");
  CHECK_THROWS_AS(compile(p), CompileError);
  try {
    compile(p);
  } catch (const CompileError &e) {
    CHECK(std::string(e.what()).find("invariant") != std::string::npos);
  }
}

TEST_CASE("calls to unspecified functions are nested") {
  Program g = compile_corpus("inline_helper.wisl");
  const Cmd &c = g.proc("g").body[0];
  REQUIRE(c.annot.nest_kind);
  CHECK(c.annot.nest_kind->kind == NestKind::Kind::FunCall);
  CHECK(c.annot.nest_kind->name == "add2");
}

namespace {

// Walks every control-flow path; before each unconditional jump, return or
// failure the last Normal/Return command seen must be final. Conditional
// guards inside a statement (the Ptr check) may be non-final.
void check_paths(const Proc &p) {
  struct Item {
    std::size_t pc;
    std::optional<StmtKind> last;
    std::set<std::size_t> seen;
  };
  std::vector<Item> work{{0, std::nullopt, {}}};
  while (!work.empty()) {
    Item it = work.back();
    work.pop_back();
    REQUIRE(it.pc < p.body.size());
    if (!it.seen.insert(it.pc).second)
      continue;
    const Cmd &c = p.body[it.pc];
    auto tag = c.annot.stmt_kind.tag;
    if (tag == StmtKind::Tag::Normal || tag == StmtKind::Tag::Return)
      it.last = c.annot.stmt_kind;
    switch (c.kind) {
    case Cmd::Kind::Return:
    case Cmd::Kind::Fail:
      if (it.last) {
        INFO(p.name << " index " << it.pc);
        CHECK(it.last->is_final);
      }
      break;
    case Cmd::Kind::Goto:
      if (it.last) {
        INFO(p.name << " goto at " << it.pc);
        CHECK(it.last->is_final);
      }
      work.push_back({c.then_index, it.last, it.seen});
      break;
    case Cmd::Kind::GuardedGoto:
      work.push_back({c.then_index, it.last, it.seen});
      work.push_back({c.else_index, it.last, it.seen});
      break;
    default:
      work.push_back({it.pc + 1, it.last, it.seen});
    }
  }
}

} // namespace

TEST_CASE("annotation totality and terminator coverage over the corpus") {
  for (const auto &name : test::corpus_files()) {
    INFO(name);
    Program g = compile_corpus(name);
    for (const auto &pname : g.proc_order) {
      const Proc &p = g.procs.at(pname);
      if (p.origin == Proc::Origin::Builtin)
        continue;
      for (const auto &c : p.body) {
        if (c.annot.stmt_kind.tag == StmtKind::Tag::Hidden)
          continue;
        REQUIRE(c.annot.source_loc.has_value());
        if (p.loc.valid() && p.origin != Proc::Origin::Lemma) {
          CHECK(p.loc.contains(*c.annot.source_loc));
        }
        if (c.annot.branch_kind)
          CHECK(c.kind == Cmd::Kind::GuardedGoto);
      }
      check_paths(p);
    }
  }
}

TEST_CASE("dump records are one json object per command") {
  Program g = compile_corpus("llen_buggy.wisl");
  std::string d = dump(g);
  std::size_t records = 0;
  std::istringstream in(d);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] != '{')
      continue;
    auto j = nlohmann::json::parse(line);
    CHECK(j.contains("index"));
    CHECK(j.contains("text"));
    CHECK(j.contains("stmt_kind"));
    ++records;
  }
  CHECK(records == 11);
  CHECK(d.find("proc llen(x) {") == 0);
}
