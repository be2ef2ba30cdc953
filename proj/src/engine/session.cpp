#include "match.hpp"

#include "swing/wisl/pretty.hpp"

#include <algorithm>

namespace swing::engine {

using detail::Bindings;
using detail::Env;
using detail::Matcher;
using detail::Ref;
using detail::Trace;
using sym::SymState;

const char *to_string(BranchCase::Kind k) {
  switch (k) {
  case BranchCase::Kind::Next: return "Next";
  case BranchCase::Kind::GuardTrue: return "GuardTrue";
  case BranchCase::Kind::GuardFalse: return "GuardFalse";
  case BranchCase::Kind::PredCase: return "PredCase";
  case BranchCase::Kind::SpecCase: return "SpecCase";
  case BranchCase::Kind::MatchRecovery: return "MatchRecovery";
  }
  return "?";
}

nlohmann::json to_json(const BranchCase &c) {
  return {{"kind", to_string(c.kind)}, {"index", c.index}, {"text", c.text}};
}

const char *to_string(Outcome::Kind k) {
  switch (k) {
  case Outcome::Kind::VerifiedBranch: return "VerifiedBranch";
  case Outcome::Kind::VerifyFailure: return "VerifyFailure";
  case Outcome::Kind::RuntimeFail: return "RuntimeFail";
  case Outcome::Kind::EngineError: return "EngineError";
  }
  return "?";
}

struct Frame {
  std::string caller;
  std::size_t ret_index = 0;
  std::string ret_var;
  std::map<std::string, Expr> saved_store;
  bool nested = false;
  ReportId call_report = 0;
  std::optional<ReportId> saved_parent;
};

struct Config {
  std::string root; // the proc whose spec this path checks
  std::string proc;
  std::size_t index = 0;
  SymState state;
  std::vector<Frame> frames;
  std::optional<ReportId> prev, parent;
  std::optional<BranchCase> label;
  std::map<std::string, Expr> initial_store;
  std::map<std::string, Expr> lenv; // binders of assert tactics
};

namespace {

std::set<std::string> lvars_minus(const wisl::Assertion &a, const wisl::Assertion &minus) {
  auto out = detail::lvars_of_assertion(a);
  for (const auto &x : detail::lvars_of_assertion(minus))
    out.erase(x);
  return out;
}

std::string failure_text(const detail::Failure &f) { return f.message; }

} // namespace

class Stepper {
public:
  Stepper(Session &sess, Config cfg)
      : sess_(sess), cfg_(std::move(cfg)), prog_(*sess.program_),
        m_(prog_, sess.pred_types_, sess.opts_.mode, sess.opts_.snapshots, trace_) {}

  StepResult run();

private:
  struct Pending {
    BranchCase label;
    Config cfg;
    std::optional<Ref> prev, parent;
    bool fix_call = false; // frames.back().call_report is this step's CmdStep
    std::string nest_proc;
  };
  struct Fin {
    Outcome o;
    std::size_t node;
  };

  Session &sess_;
  Config cfg_;
  const gil::Program &prog_;
  Trace trace_;
  Matcher m_;
  std::size_t cmd_node_ = 0;
  std::vector<Pending> children_, nests_;
  std::vector<Fin> fins_;

  const gil::Proc &proc() const { return prog_.proc(cfg_.proc); }
  const gil::Cmd &cmd() const { return proc().body.at(cfg_.index); }
  const SymState &st() const { return cfg_.state; }
  bool auto_mode() const { return sess_.opts_.mode == Mode::Auto; }

  std::optional<Ref> stored(std::optional<ReportId> id) const {
    return id ? std::optional<Ref>(Ref::stored(*id)) : std::nullopt;
  }
  Ref here() const { return Ref::at(cmd_node_); }

  Expr ev(const SymState &s, const Expr &e) const {
    Expr x = e;
    if (!cfg_.lenv.empty())
      x = subst_lvars(x, [&](const std::string &n) -> std::optional<Expr> {
        auto it = cfg_.lenv.find(n);
        if (it == cfg_.lenv.end())
          return std::nullopt;
        return it->second;
      });
    return s.eval(x);
  }

  Config next(SymState s) const {
    Config c = cfg_;
    c.state = std::move(s);
    c.index = cfg_.index + 1;
    c.label.reset();
    return c;
  }

  void go(Config c, BranchCase label = {}) {
    children_.push_back({std::move(label), std::move(c), here(), stored(cfg_.parent), false, {}});
  }

  void finish(Outcome::Kind kind, const std::string &msg, const SymState &s,
              const std::optional<detail::Failure> &f = std::nullopt,
              std::optional<BranchCase> label = std::nullopt) {
    Outcome o;
    o.kind = kind;
    o.proc = cfg_.root;
    o.message = msg;
    o.state = s;
    nlohmann::json p = {{"outcome", to_string(kind)}, {"proc", cfg_.root}, {"message", msg}};
    if (f) {
      o.failed_atom = f->atom;
      o.atom_loc = f->loc;
      p["failed_atom"] = f->atom;
      if (f->loc)
        p["atom_loc"] = {{"start", {f->loc->start_line, f->loc->start_col}},
                         {"end", {f->loc->end_line, f->loc->end_col}}};
    }
    if (label)
      p["case"] = to_json(*label);
    if (sess_.opts_.snapshots)
      p["state"] = sym::snapshot(s);
    std::size_t n = trace_.add("Result", std::move(p), here(), stored(cfg_.parent));
    fins_.push_back({std::move(o), n});
  }

  void verify_failure(const std::string &what, const detail::Failure &f, const SymState &s) {
    finish(Outcome::Kind::VerifyFailure, what + ": " + failure_text(f), s, f);
  }

  void dispatch();
  void guarded_goto();
  void memory_op();
  void call();
  void inline_call(const std::string &callee, const std::vector<Expr> &args, bool nested);
  void spec_call(const gil::Proc &callee, const std::vector<Expr> &args);
  void loop_call(const gil::Proc &callee);
  void ret();
  void final_return();
  void logic();
};

StepResult Stepper::run() {
  const gil::Proc &p = proc();
  if (cfg_.index >= p.body.size())
    throw std::logic_error("command index out of range in " + p.name);
  nlohmann::json payload = gil::cmd_record(p, cfg_.index);
  const auto &c = cmd();
  if (c.annot.source_loc && c.annot.source_loc->valid())
    payload["display"] = wisl::display_text(prog_.source, *c.annot.source_loc);
  if (sess_.opts_.snapshots)
    payload["state"] = sym::snapshot(st());
  if (cfg_.label)
    payload["case"] = to_json(*cfg_.label);
  cmd_node_ = trace_.add("CmdStep", std::move(payload), stored(cfg_.prev), stored(cfg_.parent));

  try {
    dispatch();
  } catch (const sym::UnboundVariable &e) {
    children_.clear();
    nests_.clear();
    finish(Outcome::Kind::RuntimeFail, e.what(), st());
  } catch (const sym::MemError &e) {
    children_.clear();
    nests_.clear();
    finish(Outcome::Kind::RuntimeFail, e.what(), st());
  } catch (const std::exception &e) {
    children_.clear();
    nests_.clear();
    finish(Outcome::Kind::EngineError, e.what(), st());
  }

  if (children_.size() > 1) {
    nlohmann::json branches = nlohmann::json::array();
    for (auto &ch : children_) {
      ch.cfg.label = ch.label;
      branches.push_back(to_json(ch.label));
    }
    trace_.payload(cmd_node_)["branches"] = branches;
  }

  StepResult out;
  out.reports = trace_.flush(sess_.store_);
  ReportId cmd_id = trace_.resolve(here());
  auto admit = [&](Pending &pd) {
    pd.cfg.prev = trace_.resolve(pd.prev);
    pd.cfg.parent = trace_.resolve(pd.parent);
    if (pd.fix_call)
      pd.cfg.frames.back().call_report = cmd_id;
    ContinuationId k = sess_.next_k_++;
    sess_.live_[k] = std::make_unique<Config>(std::move(pd.cfg));
    return k;
  };
  for (auto &pd : nests_)
    out.nested.push_back({"LoopBody", pd.nest_proc, admit(pd)});
  for (auto &pd : children_) {
    BranchCase label = pd.label;
    out.next.push_back({label, admit(pd)});
  }
  for (auto &f : fins_) {
    f.o.report = trace_.resolve(Ref::at(f.node));
    out.finished.push_back(std::move(f.o));
  }
  return out;
}

void Stepper::dispatch() {
  const auto &c = cmd();
  switch (c.kind) {
  case gil::Cmd::Kind::Assign: {
    Config n = next(st());
    n.state.store[c.var] = ev(st(), c.e1);
    go(std::move(n));
    return;
  }
  case gil::Cmd::Kind::Skip:
    go(next(st()));
    return;
  case gil::Cmd::Kind::Goto: {
    Config n = next(st());
    n.index = c.then_index;
    go(std::move(n));
    return;
  }
  case gil::Cmd::Kind::GuardedGoto:
    guarded_goto();
    return;
  case gil::Cmd::Kind::Load:
  case gil::Cmd::Kind::Store:
  case gil::Cmd::Kind::Free:
    memory_op();
    return;
  case gil::Cmd::Kind::Alloc: {
    Expr size = ev(st(), c.e1);
    if (!size.is_nat_lit())
      throw sym::MemError(sym::MemErrorKind::NotAnAddress, size,
                          "allocation size " + wisl::pretty_expr(size) + " is not a concrete natural");
    auto [s, addr] = sym::heap_alloc(st(), size.value().nat);
    Config n = next(std::move(s));
    n.state.store[c.var] = addr;
    go(std::move(n));
    return;
  }
  case gil::Cmd::Kind::Fail:
    finish(Outcome::Kind::RuntimeFail, c.message, st());
    return;
  case gil::Cmd::Kind::Call:
    call();
    return;
  case gil::Cmd::Kind::Return:
    ret();
    return;
  case gil::Cmd::Kind::Logic:
    logic();
    return;
  }
}

void Stepper::guarded_goto() {
  const auto &c = cmd();
  Expr g = ev(st(), c.e1);
  std::string text = wisl::pretty_expr(c.e1);
  std::vector<std::pair<sym::BranchCase, SymState>> sides;
  try {
    sides = sym::branch(st(), g);
  } catch (const sym::DeadPath &) {
    return;
  }
  auto emit = [&](const std::vector<std::pair<sym::BranchCase, SymState>> &ss, int index, const std::string &suffix) {
    for (const auto &[side, s] : ss) {
      Config n = next(s);
      bool t = side == sym::BranchCase::True;
      n.index = t ? c.then_index : c.else_index;
      BranchCase label{t ? BranchCase::Kind::GuardTrue : BranchCase::Kind::GuardFalse, index,
                       (t ? text : "not (" + text + ")") + suffix};
      go(std::move(n), std::move(label));
    }
  };

  // A pointer test that the state cannot decide usually means a folded
  // predicate hides the cells.
  if (auto_mode() && sides.size() == 2 && g.kind() == ExprKind::TypeTest && g.type() == TypeName::Ptr) {
    auto cands = m_.candidates(st(), lvars_of(g));
    if (!cands.empty()) {
      auto cases = m_.unfold(st(), cands.front());
      trace_.payload(cmd_node_)["unfolded"] = detail::describe_instance(st().preds[cands.front()]);
      for (const auto &[pc, s] : cases) {
        try {
          emit(sym::branch(s, g), pc.index, cases.size() > 1 ? " [" + pc.text + "]" : "");
        } catch (const sym::DeadPath &) {
        }
      }
      return;
    }
  }
  emit(sides, 0, "");
}

void Stepper::memory_op() {
  const auto &c = cmd();
  Expr addr = ev(st(), c.e1);
  auto apply = [&](const SymState &s) {
    Config n = next(s);
    switch (c.kind) {
    case gil::Cmd::Kind::Load:
      n.state.store[c.var] = sym::heap_load(s, addr);
      break;
    case gil::Cmd::Kind::Store:
      n.state = sym::heap_store(s, addr, ev(s, c.e2));
      break;
    default:
      n.state = sym::heap_free(s, addr);
      break;
    }
    return n;
  };
  try {
    go(apply(st()));
    return;
  } catch (const sym::MemError &e) {
    if (!auto_mode() || e.kind != sym::MemErrorKind::MissingCell)
      throw;
    auto cands = m_.candidates(st(), lvars_of(addr));
    if (cands.empty())
      throw;
    trace_.payload(cmd_node_)["unfolded"] = detail::describe_instance(st().preds[cands.front()]);
    for (const auto &[pc, s] : m_.unfold(st(), cands.front())) {
      try {
        go(apply(s), pc);
      } catch (const sym::MemError &e2) {
        finish(Outcome::Kind::RuntimeFail, e2.what(), s, std::nullopt, pc);
      }
    }
  }
}

void Stepper::call() {
  const auto &c = cmd();
  if (!gil::is_builtin(c.fname) && prog_.proc(c.fname).origin == gil::Proc::Origin::LoopBody) {
    // Loop state travels through the invariant, not the arguments.
    loop_call(prog_.proc(c.fname));
    return;
  }
  std::vector<Expr> args;
  for (const auto &a : c.args)
    args.push_back(ev(st(), a));
  if (gil::is_builtin(c.fname)) {
    inline_call(c.fname, args, false);
    return;
  }
  const gil::Proc &callee = prog_.proc(c.fname);
  if (callee.spec)
    spec_call(callee, args);
  else
    inline_call(c.fname, args, true);
}

void Stepper::inline_call(const std::string &name, const std::vector<Expr> &args, bool nested) {
  if (static_cast<int>(cfg_.frames.size()) >= sess_.opts_.max_inline_depth)
    throw std::runtime_error("inlining depth limit reached at call to " + name);
  const gil::Proc &callee = prog_.proc(name);
  if (callee.params.size() != args.size())
    throw std::runtime_error(name + " expects " + std::to_string(callee.params.size()) + " arguments");
  Config n = cfg_;
  n.label.reset();
  Frame f;
  f.caller = cfg_.proc;
  f.ret_index = cfg_.index + 1;
  f.ret_var = cmd().var;
  f.saved_store = cfg_.state.store;
  f.nested = nested;
  f.saved_parent = cfg_.parent;
  n.frames.push_back(std::move(f));
  n.proc = name;
  n.index = 0;
  n.state.store.clear();
  for (std::size_t i = 0; i < args.size(); ++i)
    n.state.store[callee.params[i]] = args[i];
  Pending pd{{}, std::move(n), here(), stored(cfg_.parent), true, {}};
  if (nested) {
    pd.prev.reset();
    pd.parent = here();
  }
  children_.push_back(std::move(pd));
}

void Stepper::spec_call(const gil::Proc &callee, const std::vector<Expr> &args) {
  const auto &spec = *callee.spec;
  if (callee.params.size() != args.size())
    throw std::runtime_error(callee.name + " expects " + std::to_string(callee.params.size()) + " arguments");
  Env env;
  for (std::size_t i = 0; i < args.size(); ++i)
    env[callee.params[i]] = args[i];
  Bindings b;
  b.pattern = detail::lvars_of_assertion(spec.pre);
  for (const auto &x : detail::lvars_of_assertion(spec.post))
    b.pattern.insert(x);
  std::size_t start = 0;
  auto r = m_.consume(st(), spec.pre, env, b, "precondition of " + callee.name, here(), true, start);
  if (r.ok.empty()) {
    verify_failure("precondition of " + callee.name, *r.failure, st());
    return;
  }
  for (auto &leaf : r.ok) {
    Env e2 = env;
    Bindings b2 = leaf.b;
    auto s = m_.produce(leaf.state, spec.post, e2, {"ret"}, b2);
    if (!s)
      continue;
    Config n = next(std::move(*s));
    if (!cmd().var.empty())
      n.state.store[cmd().var] = e2.at("ret");
    go(std::move(n), leaf.label.value_or(BranchCase{}));
  }
}

void Stepper::loop_call(const gil::Proc &callee) {
  const auto &info = *callee.loop;

  // The body is verified once per arrival, against the invariant alone.
  {
    SymState ns;
    ns.fresh = st().fresh;
    ns.blocks = st().blocks;
    Env env;
    Bindings none;
    std::set<std::string> params(callee.params.begin(), callee.params.end());
    auto s = m_.produce(ns, callee.spec->pre, env, params, none);
    nlohmann::json p = {{"proc", callee.name}, {"assertion", wisl::pretty_assertion(callee.spec->pre)}};
    if (s && sess_.opts_.snapshots) {
      SymState shown = *s;
      shown.store = env;
      p["state"] = sym::snapshot(shown);
    }
    if (!s)
      p["infeasible"] = true;
    std::size_t root = trace_.add("Produce", std::move(p), std::nullopt, here());
    if (s) {
      Config n;
      n.root = callee.name;
      n.proc = callee.name;
      n.state = std::move(*s);
      n.state.store = env;
      n.initial_store = env;
      nests_.push_back({{}, std::move(n), Ref::at(root), here(), false, callee.name});
    }
  }

  Env env = st().store;
  Bindings b;
  b.pattern.insert(info.binders.begin(), info.binders.end());
  std::size_t start = 0;
  auto r = m_.consume(st(), info.invariant, env, b, "loop invariant", here(), true, start);
  if (r.ok.empty()) {
    verify_failure("loop invariant on entry", *r.failure, st());
    return;
  }
  for (auto &leaf : r.ok) {
    SymState s = leaf.state;
    for (const auto &v : info.modified)
      s.store[v] = s.fresh_lvar_expr();
    Env e2 = s.store;
    Bindings b2;
    b2.pattern.insert(info.binders.begin(), info.binders.end());
    auto p = m_.produce(s, info.invariant, e2, {}, b2);
    if (!p)
      continue;
    p->assume(mk_not(p->eval(info.guard)));
    if (!p->feasible())
      continue;
    go(next(std::move(*p)), leaf.label.value_or(BranchCase{}));
  }
}

void Stepper::ret() {
  if (cfg_.frames.empty()) {
    final_return();
    return;
  }
  Config n = cfg_;
  n.label.reset();
  Frame f = n.frames.back();
  n.frames.pop_back();
  Expr r = st().var("ret");
  n.state.store = f.saved_store;
  if (!f.ret_var.empty())
    n.state.store[f.ret_var] = r;
  n.proc = f.caller;
  n.index = f.ret_index;
  Pending pd{{}, std::move(n), here(), stored(f.saved_parent), false, {}};
  if (f.nested)
    pd.prev = Ref::stored(f.call_report);
  children_.push_back(std::move(pd));
}

void Stepper::final_return() {
  const gil::Proc &p = proc();
  const auto &spec = *p.spec;
  Env env;
  Bindings b;
  switch (p.origin) {
  case gil::Proc::Origin::LoopBody:
    env = st().store;
    b.pattern.insert(p.loop->binders.begin(), p.loop->binders.end());
    break;
  case gil::Proc::Origin::Lemma:
    env = cfg_.initial_store;
    b.pattern = lvars_minus(spec.post, spec.pre);
    break;
  default:
    env = cfg_.initial_store;
    env["ret"] = st().var("ret");
    b.pattern = lvars_minus(spec.post, spec.pre);
    break;
  }
  std::size_t start = 0;
  auto r = m_.consume(st(), spec.post, env, b, "postcondition of " + p.name, here(), true, start);
  if (r.ok.empty())
    verify_failure("postcondition of " + p.name, *r.failure, st());
  else
    finish(Outcome::Kind::VerifiedBranch, "", r.ok.front().state);
}

void Stepper::logic() {
  const auto &lc = cmd().logic;
  std::vector<Expr> args;
  for (const auto &a : lc.args)
    args.push_back(ev(st(), a));
  std::string text = wisl::pretty_logic_cmd(lc);
  switch (lc.kind) {
  case wisl::LogicCmd::Kind::Fold: {
    auto r = m_.fold(st(), lc.name, args, here());
    if (r.ok.empty())
      verify_failure("cannot " + text, *r.failure, st());
    else
      go(next(std::move(r.ok.front().state)));
    return;
  }
  case wisl::LogicCmd::Kind::Unfold: {
    auto idx = m_.find_instance(st(), lc.name, args);
    if (!idx) {
      finish(Outcome::Kind::RuntimeFail, "no instance of " + detail::describe_instance({lc.name, args}), st());
      return;
    }
    for (auto &[label, s] : m_.unfold(st(), *idx))
      go(next(std::move(s)), label);
    return;
  }
  case wisl::LogicCmd::Kind::AssertBind: {
    Env env = st().store;
    Bindings b;
    b.pattern.insert(lc.binders.begin(), lc.binders.end());
    std::size_t start = 0;
    auto r = m_.consume(st(), lc.assertion, env, b, "assertion", here(), true, start);
    if (r.ok.empty()) {
      verify_failure("assertion", *r.failure, st());
      return;
    }
    for (auto &leaf : r.ok) {
      Env e2 = env;
      Bindings b2 = leaf.b;
      auto s = m_.produce(leaf.state, lc.assertion, e2, {}, b2);
      if (!s)
        continue;
      Config n = next(std::move(*s));
      for (const auto &v : lc.binders)
        if (b2.bound.count(v))
          n.lenv[v] = b2.bound.at(v);
      go(std::move(n), leaf.label.value_or(BranchCase{}));
    }
    return;
  }
  case wisl::LogicCmd::Kind::ApplyLemma: {
    const auto &lemma = prog_.lemmas.at(lc.name);
    if (lemma.params.size() != args.size())
      throw std::runtime_error(lc.name + " expects " + std::to_string(lemma.params.size()) + " arguments");
    Env env;
    for (std::size_t i = 0; i < args.size(); ++i)
      env[lemma.params[i]] = args[i];
    Bindings b;
    b.pattern = detail::lvars_of_assertion(lemma.hypothesis);
    for (const auto &x : detail::lvars_of_assertion(lemma.conclusion))
      b.pattern.insert(x);
    std::size_t start = 0;
    auto r = m_.consume(st(), lemma.hypothesis, env, b, "hypothesis of " + lc.name, here(), true, start);
    if (r.ok.empty()) {
      verify_failure("hypothesis of " + lc.name, *r.failure, st());
      return;
    }
    for (auto &leaf : r.ok) {
      Env e2 = env;
      Bindings b2 = leaf.b;
      auto s = m_.produce(leaf.state, lemma.conclusion, e2, {}, b2);
      if (s)
        go(next(std::move(*s)), leaf.label.value_or(BranchCase{}));
    }
    return;
  }
  }
}

// ---- session ----

Session::Session(std::shared_ptr<const gil::Program> program, std::string proc, reports::ReportStore &store,
                 Options opts)
    : program_(std::move(program)), proc_(std::move(proc)), store_(store), opts_(opts) {
  const gil::Proc &p = program_->proc(proc_);
  if (!p.spec)
    throw NoSpec(proc_ + " has no specification");
  pred_types_ = detail::infer_pred_types(program_->predicates);
  Trace t;
  Matcher m(*program_, pred_types_, opts_.mode, opts_.snapshots, t);
  Env env;
  Bindings none;
  std::set<std::string> params(p.params.begin(), p.params.end());
  auto s = m.produce(SymState{}, p.spec->pre, env, params, none);
  if (!s)
    throw ProduceError("precondition of " + proc_ + " is unsatisfiable");
  s->store = env;
  nlohmann::json payload = {{"proc", proc_}, {"assertion", wisl::pretty_assertion(p.spec->pre)}};
  if (opts_.snapshots)
    payload["state"] = sym::snapshot(*s);
  t.add("Produce", std::move(payload), std::nullopt, std::nullopt);
  initial_.reports = t.flush(store_);
  root_report_ = initial_.reports.front().id;

  auto c = std::make_unique<Config>();
  c->root = proc_;
  c->proc = proc_;
  c->state = std::move(*s);
  c->initial_store = env;
  c->prev = root_report_;
  ContinuationId k = next_k_++;
  live_[k] = std::move(c);
  initial_.next.push_back({BranchCase{}, k});
}

Session::~Session() = default;

StepResult Session::step(ContinuationId k) {
  auto it = live_.find(k);
  if (it == live_.end())
    throw StaleContinuation(k);
  Config cfg = std::move(*it->second);
  live_.erase(it);
  Stepper stepper(*this, std::move(cfg));
  StepResult r = stepper.run();
  for (const auto &o : r.finished)
    outcomes_.push_back(o);
  return r;
}

std::vector<ContinuationId> Session::live() const {
  std::vector<ContinuationId> out;
  for (const auto &[k, _] : live_)
    out.push_back(k);
  return out;
}

bool Session::is_live(ContinuationId k) const { return live_.count(k) > 0; }

std::pair<std::string, std::size_t> Session::position(ContinuationId k) const {
  auto it = live_.find(k);
  if (it == live_.end())
    throw StaleContinuation(k);
  return {it->second->proc, it->second->index};
}

const SymState &Session::state_of(ContinuationId k) const {
  auto it = live_.find(k);
  if (it == live_.end())
    throw StaleContinuation(k);
  return it->second->state;
}

std::pair<std::optional<ReportId>, std::optional<ReportId>> Session::anchor(ContinuationId k) const {
  auto it = live_.find(k);
  if (it == live_.end())
    throw StaleContinuation(k);
  return {it->second->prev, it->second->parent};
}

std::optional<BranchCase> Session::label_of(ContinuationId k) const {
  auto it = live_.find(k);
  if (it == live_.end())
    throw StaleContinuation(k);
  return it->second->label;
}

std::vector<Outcome> Session::run_all() {
  std::size_t before = outcomes_.size();
  std::vector<ContinuationId> stack;
  auto pending = live();
  stack.assign(pending.rbegin(), pending.rend());
  while (!stack.empty()) {
    ContinuationId k = stack.back();
    stack.pop_back();
    StepResult r = step(k);
    for (auto it = r.next.rbegin(); it != r.next.rend(); ++it)
      stack.push_back(it->k);
    for (auto it = r.nested.rbegin(); it != r.nested.rend(); ++it)
      stack.push_back(it->k);
  }
  return {outcomes_.begin() + static_cast<std::ptrdiff_t>(before), outcomes_.end()};
}

std::vector<Outcome> verify(std::shared_ptr<const gil::Program> program, const std::string &proc,
                            reports::ReportStore &store, Options opts) {
  Session s(std::move(program), proc, store, opts);
  return s.run_all();
}

std::vector<std::string> default_targets(const gil::Program &p) {
  std::vector<std::string> out;
  for (const auto &name : p.proc_order) {
    const auto &pr = p.procs.at(name);
    if (pr.spec && (pr.origin == gil::Proc::Origin::UserFunction || pr.origin == gil::Proc::Origin::Lemma))
      out.push_back(name);
  }
  return out;
}

} // namespace swing::engine
