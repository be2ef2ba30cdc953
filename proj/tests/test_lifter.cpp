#include <doctest.h>

#include "report_graph.hpp"
#include "swing/lifter.hpp"
#include "swing/wisl/parser.hpp"
#include "test_util.hpp"

#include <regex>

using namespace swing;
using namespace swing::lifter;
using K = Command::Kind;

namespace {

std::shared_ptr<const gil::Program> load(const std::string &name) {
  return std::make_shared<const gil::Program>(gil::compile(wisl::parse_program(test::read_corpus(name))));
}

std::shared_ptr<const gil::Program> load_text(const std::string &text) {
  return std::make_shared<const gil::Program>(gil::compile(wisl::parse_program(text)));
}

std::unique_ptr<Explorer> explore_all(const std::string &file, const std::string &proc) {
  auto ex = std::make_unique<Explorer>(load(file), proc);
  ex->run_all();
  return ex;
}

bool is_cmd_node(const SourceTree &t, const LiftedNode &n) {
  return !n.is_match && n.id != t.root() && !n.text.starts_with("produce ");
}

std::vector<NodeId> find(const SourceTree &t, const std::string &text) {
  std::vector<NodeId> out;
  for (const auto &n : t.nodes())
    if (n.text == text)
      out.push_back(n.id);
  return out;
}

const Edge &edge(const LiftedNode &n, const std::string &label) {
  for (const auto &e : n.children)
    if (e.label == label)
      return e;
  throw std::runtime_error("no edge " + label + " at node " + std::to_string(n.id));
}

std::set<std::string> labels(const LiftedNode &n) {
  std::set<std::string> out;
  for (const auto &e : n.children)
    out.insert(e.label);
  return out;
}

// Leaves of the tree rooted at id, not descending into nests.
void leaves(const SourceTree &t, NodeId id, std::vector<NodeId> &out) {
  const auto &n = t.node(id);
  if (n.children.empty())
    out.push_back(id);
  for (const auto &e : n.children)
    if (e.node)
      leaves(t, *e.node, out);
}

// The texts of command nodes along the single-child chain from id.
std::vector<std::string> chain(const SourceTree &t, NodeId id) {
  std::vector<std::string> out;
  for (std::optional<NodeId> n = id; n;) {
    const auto &node = t.node(*n);
    out.push_back(node.text);
    n = node.children.size() == 1 ? node.children[0].node : std::nullopt;
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> corpus_targets() {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto &f : test::corpus_files())
    for (const auto &p : engine::default_targets(*load(f)))
      out.push_back({f, p});
  return out;
}

NodeId failing_return(const SourceTree &t) {
  for (auto id : find(t, "return n"))
    if (t.node(id).status == Status::Failure)
      return id;
  throw std::runtime_error("no failing return node");
}

} // namespace

TEST_CASE("an expression evaluation and its lookup are two nodes") {
  auto ex = explore_all("llen_buggy.wisl", "llen");
  const auto &t = ex->tree();

  // The statement `t := [x+1]` spans line 12, columns 5 to 14.
  std::vector<std::string> texts;
  int gil_cmds = 0;
  for (const auto &n : t.nodes())
    if (n.loc && n.loc->start_line == 12 && n.loc->start_col >= 5 && n.loc->end_col <= 14)
      texts.push_back(n.text);
  for (const auto &c : ex->session().program().procs.at("llen").body)
    if (c.annot.source_loc && c.annot.source_loc->start_line == 12 && c.annot.source_loc->end_col <= 14)
      ++gil_cmds;
  CHECK(gil_cmds == 4);
  CHECK(texts == std::vector<std::string>{"x+1", "t := [x+1]"});

  // i_add's body folds into the evaluation node without nesting.
  auto eval = find(t, "x+1");
  REQUIRE(eval.size() == 1);
  const auto &e = t.node(eval[0]);
  CHECK(e.nested.empty());
  CHECK(e.hidden.size() == 2);
  for (auto r : e.hidden)
    CHECK(ex->store().get(r).payload["proc"] == "i_add");
  CHECK(e.reports.size() == 1);
}

TEST_CASE("hidden commands produce no node") {
  auto ex = explore_all("llen_buggy.wisl", "llen");
  const auto &t = ex->tree();
  int gotos = 0;
  for (ReportId i = 0; i < static_cast<ReportId>(ex->store().size()); ++i) {
    auto r = ex->store().get(i);
    if (r.kind == "CmdStep" && r.payload["text"] == "goto end") {
      ++gotos;
      CHECK_FALSE(t.node_of(i));
    }
  }
  CHECK(gotos == 1);
}

TEST_CASE("buggy llen: fork, verified then-branch, failing else-branch") {
  auto ex = explore_all("llen_buggy.wisl", "llen");
  const auto &t = ex->tree();
  auto ifs = find(t, "if (x = null) { … } else { … }");
  REQUIRE(ifs.size() == 1);
  const auto &fork = t.node(ifs[0]);
  CHECK(labels(fork) == std::set<std::string>{"then", "else"});

  auto then_chain = chain(t, *edge(fork, "then").node);
  CHECK(then_chain == std::vector<std::string>{"n := 0", "return n"});
  auto else_chain = chain(t, *edge(fork, "else").node);
  CHECK(else_chain == std::vector<std::string>{"x+1", "t := [x+1]", "n := llen(t)", "return n"});

  std::vector<NodeId> ends;
  leaves(t, *t.root(), ends);
  REQUIRE(ends.size() == 2);
  auto ok = t.node(ends[0]).status == Status::Success ? ends[0] : ends[1];
  auto bad = ok == ends[0] ? ends[1] : ends[0];
  CHECK(t.node(ok).status == Status::Success);
  CHECK(t.node(ok).parent == edge(fork, "then").node);
  CHECK(t.node(bad).status == Status::Failure);
  CHECK(t.node(bad).failed_atom == "ret == len(#alpha)");

  // The failing return's match tree: one direct attempt and one unfold
  // recovery with two cases, each ending on the same atom.
  const auto &ret = t.node(bad);
  REQUIRE(ret.nested.size() == 1);
  CHECK(ret.nested[0].tag == "Match");
  const auto &match = t.node(*ret.nested[0].root);
  REQUIRE(match.children.size() == 2);
  CHECK(match.children[0].label == "direct");
  const auto &recovery = t.node(*match.children[1].node);
  CHECK(recovery.text.starts_with("unfold list("));
  CHECK(recovery.children.size() == 2);

  std::vector<NodeId> fails;
  leaves(t, match.id, fails);
  REQUIRE(fails.size() == 3);
  for (auto f : fails) {
    CHECK(t.node(f).status == Status::Failure);
    CHECK(t.node(f).failed_atom == "ret == len(#alpha)");
  }
  std::vector<NodeId> under_recovery;
  leaves(t, recovery.id, under_recovery);
  CHECK(under_recovery.size() == 2);
}

TEST_CASE("corrected llen: both branches end in verified returns") {
  auto ex = explore_all("llen_fixed.wisl", "llen");
  const auto &t = ex->tree();
  auto fork = t.node(find(t, "if (x = null) { … } else { … }").at(0));
  CHECK(labels(fork) == std::set<std::string>{"then", "else"});
  CHECK(chain(t, *edge(fork, "else").node) ==
        std::vector<std::string>{"x+1", "t := [x+1]", "n := llen(t)", "n := n + 1", "return n"});
  std::vector<NodeId> ends;
  leaves(t, *t.root(), ends);
  REQUIRE(ends.size() == 2);
  CHECK(ends[0] != ends[1]);
  for (auto e : ends) {
    CHECK(t.node(e).text == "return n");
    CHECK(t.node(e).status == Status::Success);
  }
}

TEST_CASE("a skip then return proc lifts to a linear tree of two commands") {
  auto prog = load("skip_return.wisl");
  auto proc = engine::default_targets(*prog).at(0);
  Explorer ex(prog, proc);
  ex.run_all();
  const auto &t = ex.tree();
  std::vector<std::string> cmds;
  for (const auto &n : t.nodes())
    if (is_cmd_node(t, n))
      cmds.push_back(n.text);
  CHECK(cmds == std::vector<std::string>{"skip", "return 0"});
  CHECK(chain(t, *t.root()).size() == 3);
  CHECK(t.node(find(t, "return 0").at(0)).status == Status::Success);
}

TEST_CASE("unexplored stubs track the live continuations") {
  Explorer ex(load("llen_buggy.wisl"), "llen");
  const auto &t = ex.tree();
  REQUIRE(t.nodes().size() == 1);
  const auto &root = t.node(*t.root());
  REQUIRE(root.children.size() == 1);
  CHECK_FALSE(root.children[0].explored());
  CHECK(ex.session().is_live(*root.children[0].k));

  ex.apply({K::StepOver});
  CHECK(t.nodes().size() == 2);
  const auto &fork = t.node(ex.cursor());
  CHECK(fork.text == "if (x = null) { … } else { … }");
  CHECK(labels(fork) == std::set<std::string>{"then", "else"});
  std::set<engine::ContinuationId> stubbed;
  for (const auto &n : t.nodes())
    for (const auto &e : n.children)
      if (!e.explored())
        stubbed.insert(*e.k);
  auto live = ex.session().live();
  CHECK(stubbed == std::set<engine::ContinuationId>(live.begin(), live.end()));

  auto doc = t.to_json();
  CHECK(doc["root"] == 0);
  CHECK(doc["nodes"][1]["children"][0]["id"] == "unexplored");
  CHECK(doc["nodes"][1]["status"] == "InProgress");
}

TEST_CASE("report conservation and label correctness over the corpus") {
  for (const auto &[file, proc] : corpus_targets()) {
    CAPTURE(file);
    CAPTURE(proc);
    auto ex = explore_all(file, proc);
    const auto &t = ex->tree();
    std::map<ReportId, int> seen;
    for (const auto &n : t.nodes()) {
      for (auto r : n.reports)
        ++seen[r];
      std::set<std::string> ls;
      for (const auto &e : n.children)
        CHECK(ls.insert(e.label).second);
      CHECK(n.status != Status::Unexplored);
    }
    for (ReportId i = 0; i < static_cast<ReportId>(ex->store().size()); ++i) {
      auto r = ex->store().get(i);
      bool hidden = r.kind == "CmdStep" && r.payload["stmt_kind"] == "Hidden";
      CHECK(seen[i] == (hidden ? 0 : 1));
      if (r.kind == "CmdStep" && r.payload.value("branch_kind", "") == "IfElse" && r.payload.contains("branches")) {
        CHECK(labels(t.node(*t.node_of(i))) == std::set<std::string>{"then", "else"});
      }
    }
    // Every command node closes with at least one final command, so a path
    // has no more nodes than statements and evaluation steps.
    for (const auto &n : t.nodes()) {
      if (!is_cmd_node(t, n))
        continue;
      int finals = 0;
      for (auto r : n.reports) {
        auto p = ex->store().get(r).payload;
        auto k = p.value("stmt_kind", "");
        finals += k == "Normal true" || k == "Return true";
      }
      CHECK(finals >= 1);
    }
  }
}

TEST_CASE("lifting from stored reports matches the live tree") {
  for (const auto &[file, proc] : corpus_targets()) {
    CAPTURE(file);
    auto ex = explore_all(file, proc);
    auto again = SourceTree::from_reports(ex->store().since(0));
    CHECK(again.to_json() == ex->tree().to_json());
  }
}

TEST_CASE("stepping: forks need a branch choice") {
  Explorer ex(load("llen_buggy.wisl"), "llen");
  CHECK_THROWS_WITH_AS(ex.apply({K::StepBack}), "nothing to undo", NothingToStep);
  ex.apply({K::StepOver});
  auto fork = ex.cursor();
  CHECK_THROWS_WITH_AS(ex.apply({K::StepOver}), "branch choice required", AmbiguousStep);
  CHECK_THROWS_AS(ex.apply({K::Continue}), AmbiguousStep);
  CHECK_THROWS_AS(ex.apply({K::StepSpecific, "banana"}), NoSuchBranch);

  ex.apply({K::StepSpecific, "else"});
  CHECK(ex.tree().node(ex.cursor()).text == "x+1");
  CHECK(ex.tree().node(ex.cursor()).parent == fork);
  ex.apply({K::Jump, "", fork});
  CHECK_THROWS_WITH_AS(ex.apply({K::StepSpecific, "else"}), "already explored; use jump", AlreadyExplored);

  ex.apply({K::StepSpecific, "then"});
  CHECK(ex.tree().node(ex.cursor()).text == "n := 0");
  ex.apply({K::Continue});
  const auto &end = ex.tree().node(ex.cursor());
  CHECK(end.text == "return n");
  CHECK(end.status == Status::Success);
  CHECK_THROWS_AS(ex.apply({K::StepOver}), NothingToStep);

  ex.apply({K::StepBack});
  CHECK(ex.tree().node(ex.cursor()).text == "n := 0");
  ex.apply({K::ReverseContinue});
  CHECK(ex.cursor() == fork);
  CHECK_THROWS_AS(ex.apply({K::Jump, "", 999}), UnknownNode);
}

TEST_CASE("stepping: the else path one source step at a time") {
  Explorer ex(load("llen_buggy.wisl"), "llen");
  ex.apply({K::StepOver});
  ex.apply({K::StepSpecific, "else"});
  std::vector<std::string> seen{ex.tree().node(ex.cursor()).text};
  for (int i = 0; i < 3; ++i) {
    ex.apply({K::StepOver});
    seen.push_back(ex.tree().node(ex.cursor()).text);
  }
  CHECK(seen == std::vector<std::string>{"x+1", "t := [x+1]", "n := llen(t)", "return n"});
  CHECK(ex.tree().node(ex.cursor()).status == Status::Failure);

  // The spec call's precondition match is a nest; stepping in enters it.
  auto call = find(ex.tree(), "n := llen(t)").at(0);
  ex.apply({K::Jump, "", call});
  ex.apply({K::StepIn});
  CHECK(ex.tree().node(ex.cursor()).text.starts_with("match precondition of llen"));
  ex.apply({K::StepOut});
  CHECK(ex.cursor() == call);
}

TEST_CASE("failing return node shows the off-by-one state") {
  auto ex = explore_all("llen_buggy.wisl", "llen");
  auto s = ex->state(failing_return(ex->tree()));
  std::string ret, tail;
  for (const auto &b : s.store)
    if (b.name == "ret")
      ret = b.value;
  std::smatch m;
  REQUIRE(std::regex_match(ret, m, std::regex(R"(len\((#lvar_\d+)\))")));
  tail = m[1];
  bool found = false;
  for (const auto &f : s.pc)
    found |= std::regex_match(f, std::regex(R"(#alpha == \[#lvar_\d+\] @ )" + tail));
  CHECK(found);
  CHECK(s.preds == std::vector<std::string>{"list(" + std::string("#lvar_1") + ", " + tail + ")"});
}

TEST_CASE("entry state shows the precondition store") {
  Explorer ex(load("llen_buggy.wisl"), "llen");
  auto s = ex.state();
  REQUIRE(s.store.size() == 1);
  CHECK(s.store[0].name == "x");
  CHECK(s.store[0].value == "#x");
  CHECK(s.heap.empty());
  CHECK(s.intermediate.empty());
}

TEST_CASE("lift_state sections") {
  auto empty = lift_state(nlohmann::json::parse(R"({"store":[],"heap":[],"preds":[],"pc":[]})"));
  CHECK(empty.store.empty());
  CHECK(empty.heap.empty());
  CHECK(empty.preds.empty());
  CHECK(empty.pc.empty());

  auto s = lift_state(nlohmann::json::parse(R"j({
    "store":[{"var":"_var0","expr":"#x + 1"},{"var":"_var12","expr":"2"},{"var":"_varx","expr":"3"},{"var":"x","expr":"#x"}],
    "heap":[{"block":"#x","offset":0,"expr":"#a"},{"block":"#x","offset":1,"expr":"#b"},
            {"block":"#y","offset":1,"expr":"#c"},{"block":"#y","offset":3,"expr":"#d"},{"block":"#y","offset":4,"expr":"null"}],
    "preds":["list(#b, #l)"],"pc":["#l is List"]})j"));
  CHECK(s.heap == std::vector<std::string>{"#x -> #a, #b", "(#y + 1) -> #c", "(#y + 3) -> #d, null"});
  REQUIRE(s.intermediate.size() == 2);
  CHECK(s.intermediate[0].name == "_var0");
  CHECK(s.intermediate[1].name == "_var12");
  REQUIRE(s.store.size() == 2);
  CHECK(s.store[0].name == "_varx");
  CHECK(s.preds == std::vector<std::string>{"list(#b, #l)"});
  CHECK(to_json(s)["intermediate"][0]["value"] == "#x + 1");
}

TEST_CASE("loop calls nest the loop body") {
  auto ex = explore_all("length_iter.wisl", "length");
  const auto &t = ex->tree();
  int loops = 0;
  for (const auto &n : t.nodes()) {
    for (const auto &e : n.nested)
      if (e.tag == "LoopBody") {
        ++loops;
        CHECK(n.text.starts_with("while (x != null)"));
        REQUIRE(e.root);
        std::vector<NodeId> ends;
        leaves(t, *e.root, ends);
        CHECK_FALSE(ends.empty());
        for (auto x : ends)
          CHECK(t.node(x).status == Status::Success);
        CHECK(t.node(*e.root).depth == n.depth + 1);
      }
  }
  CHECK(loops == 1);
}

TEST_CASE("stepping over and into a loop call") {
  {
    Explorer ex(load("length_iter.wisl"), "length");
    ex.apply({K::StepOver});
    ex.apply({K::StepOver});
    const auto &loop = ex.tree().node(ex.cursor());
    REQUIRE(loop.text.starts_with("while"));
    ex.apply({K::StepOver});
    CHECK(ex.tree().node(ex.cursor()).text == "return n");
    // The nest ran to completion.
    for (const auto &n : ex.tree().nodes())
      if (ex.tree().nested_in(n.id, loop.id))
        for (const auto &e : n.children)
          CHECK(e.explored());
  }
  {
    Explorer ex(load("length_iter.wisl"), "length");
    ex.apply({K::StepOver});
    ex.apply({K::StepOver});
    auto loop = ex.cursor();
    ex.apply({K::StepIn});
    const auto &body = ex.tree().node(ex.cursor());
    CHECK(body.text.starts_with("produce "));
    CHECK(body.owner == loop);
    ex.apply({K::StepOver});
    CHECK(ex.tree().node(ex.cursor()).text == "x+1");
    ex.apply({K::StepOut});
    CHECK(ex.cursor() == loop);
    ex.apply({K::StepOver});
    CHECK(ex.tree().node(ex.cursor()).text == "return n");
  }
}

TEST_CASE("inlined calls without a spec") {
  auto prog = load("inline_helper.wisl");
  {
    Explorer ex(prog, "g");
    ex.apply({K::StepOver});
    auto call = ex.cursor();
    CHECK(ex.tree().node(call).text == "y := add2(x)");
    ex.apply({K::StepOver});
    CHECK(ex.tree().node(ex.cursor()).text == "return y");
    CHECK(ex.tree().node(ex.cursor()).parent == call);
    const auto &c = ex.tree().node(call);
    REQUIRE(c.nested.size() == 1);
    CHECK(c.nested[0].tag == "FunCall");
    CHECK(c.nested[0].explored());
  }
  {
    Explorer ex(prog, "g");
    ex.apply({K::StepOver});
    auto call = ex.cursor();
    ex.apply({K::StepIn});
    CHECK(ex.tree().node(ex.cursor()).text == "r := a + 2");
    CHECK(ex.tree().node(ex.cursor()).owner == call);
    ex.apply({K::StepOut});
    CHECK(ex.cursor() == call);
    ex.apply({K::StepOver});
    CHECK(ex.tree().node(ex.cursor()).text == "return y");
  }
}

TEST_CASE("runtime failure inside a statement marks its node") {
  Explorer ex(load("null_deref.wisl"), "second");
  ex.apply({K::StepOver});
  ex.apply({K::StepOver});
  const auto &n = ex.tree().node(ex.cursor());
  CHECK(n.text == "y := [x+1]");
  CHECK(n.status == Status::Failure);
  CHECK(n.children.empty());
}

TEST_CASE("interactive exploration reproduces run_all") {
  for (const auto &[file, proc] : corpus_targets()) {
    CAPTURE(file);
    CAPTURE(proc);
    auto batch = explore_all(file, proc);
    Explorer ex(load(file), proc);
    test::explore_interactively(ex);
    CHECK(ex.session().live().empty());
    CHECK(test::canon(ex.store(), 0) == test::canon(batch->store(), 0));
    CHECK(test::shape(ex.tree()) == test::shape(batch->tree()));
  }
}

TEST_CASE("tree shapes do not depend on logging") {
  for (const auto &[file, proc] : corpus_targets()) {
    CAPTURE(file);
    auto logged = explore_all(file, proc);
    engine::Options quiet;
    quiet.snapshots = false;
    Explorer ex(load(file), proc, std::make_unique<reports::NullStore>(), quiet);
    ex.run_all();
    CHECK(test::shape(ex.tree()) == test::shape(logged->tree()));
  }
}

TEST_CASE("jump then step reproduces the original exploration") {
  auto prog = load("llen_fixed.wisl");
  Explorer a(prog, "llen");
  a.apply({K::StepOver});
  auto fork = a.cursor();
  a.apply({K::StepSpecific, "then"});
  a.apply({K::Jump, "", fork});
  a.apply({K::StepSpecific, "else"});
  a.apply({K::StepOver});

  Explorer b(prog, "llen");
  b.apply({K::StepOver});
  b.apply({K::StepSpecific, "else"});
  b.apply({K::StepOver});
  b.apply({K::Jump, "", fork});
  b.apply({K::StepSpecific, "then"});
  CHECK(test::canon(a.store(), 0) == test::canon(b.store(), 0));
  CHECK(test::shape(a.tree()) == test::shape(b.tree()));
}

TEST_CASE("lift errors on malformed streams") {
  SourceTree t;
  reports::Report r;
  r.id = 0;
  r.kind = "CmdStep";
  r.payload = {{"stmt_kind", "Normal true"}};
  CHECK_THROWS_AS(t.ingest({r}), LiftError);

  SourceTree u;
  reports::Report root{0, std::nullopt, std::nullopt, "Produce", {{"assertion", "emp"}}, 0};
  reports::Report bad{1, 0, std::nullopt, "CmdStep", {{"display", "x := 1"}}, 0};
  u.ingest({root});
  CHECK_THROWS_AS(u.ingest({bad}), LiftError);
  reports::Report odd{2, 0, std::nullopt, "Mystery", {}, 0};
  CHECK_THROWS_AS(u.ingest({odd}), LiftError);
}
