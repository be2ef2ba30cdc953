#include "swing/lifter.hpp"

#include <algorithm>

namespace swing::lifter {

namespace {

std::vector<NodeId> route_to(const SourceTree &t, NodeId target) {
  std::vector<NodeId> r;
  for (std::optional<NodeId> n = target; n;) {
    r.push_back(*n);
    const auto &node = t.node(*n);
    n = node.parent ? node.parent : node.owner;
  }
  std::reverse(r.begin(), r.end());
  return r;
}

EnginePlan move(const SourceTree &t, NodeId from, NodeId target) {
  EnginePlan p;
  p.kind = EnginePlan::Kind::Move;
  p.from = from;
  p.target = target;
  p.route = route_to(t, target);
  return p;
}

EnginePlan drive(const LiftedNode &n, ContinuationId k, std::optional<int> max_depth) {
  EnginePlan p;
  p.kind = EnginePlan::Kind::Drive;
  p.from = n.id;
  p.target = n.id;
  p.k = k;
  p.max_depth = max_depth;
  return p;
}

bool has_loop_nest(const LiftedNode &n) {
  return std::any_of(n.nested.begin(), n.nested.end(), [](const NestEdge &e) { return e.tag == "LoopBody"; });
}

const NestEdge *call_stub(const LiftedNode &n) {
  for (const auto &e : n.nested)
    if (!e.explored())
      return &e;
  return nullptr;
}

EnginePlan over(const SourceTree &t, const LiftedNode &n) {
  if (n.children.size() > 1)
    throw AmbiguousStep();
  if (n.children.size() == 1) {
    const auto &e = n.children.front();
    if (e.explored())
      return move(t, n.id, *e.node);
    auto p = drive(n, *e.k, n.depth);
    if (has_loop_nest(n))
      p.exhaust.push_back(n.id);
    return p;
  }
  if (const auto *s = call_stub(n))
    return drive(n, *s->k, n.depth);
  throw NothingToStep("nothing to step");
}

std::optional<NodeId> up(const LiftedNode &n) { return n.parent ? n.parent : n.owner; }

} // namespace

EnginePlan plan_step(const SourceTree &t, NodeId at, const Command &cmd) {
  const auto &n = t.node(at);
  using K = Command::Kind;
  switch (cmd.kind) {
  case K::StepOver:
    return over(t, n);

  case K::StepIn: {
    if (n.nested.empty())
      return over(t, n);
    const auto &e = n.nested.front();
    if (e.explored())
      return move(t, at, *e.root);
    return drive(n, *e.k, std::nullopt);
  }

  case K::StepOut: {
    if (!n.owner) {
      over(t, n);
      EnginePlan p;
      p.kind = EnginePlan::Kind::Continue;
      p.from = p.target = at;
      return p;
    }
    const auto &o = t.node(*n.owner);
    bool inlined = std::any_of(o.nested.begin(), o.nested.end(), [](const NestEdge &e) { return e.tag == "FunCall"; });
    if (inlined)
      for (const auto &x : t.nodes()) {
        if (!t.nested_in(x.id, o.id))
          continue;
        for (const auto &e : x.children)
          if (!e.explored()) {
            auto p = drive(o, *e.k, o.depth);
            p.to_target = true;
            return p;
          }
        if (const auto *e = call_stub(x)) {
          auto p = drive(o, *e->k, o.depth);
          p.to_target = true;
          return p;
        }
      }
    EnginePlan p = move(t, at, o.id);
    if (has_loop_nest(o)) {
      p.kind = EnginePlan::Kind::Drive;
      p.exhaust.push_back(o.id);
    }
    return p;
  }

  case K::Continue: {
    over(t, n);
    EnginePlan p;
    p.kind = EnginePlan::Kind::Continue;
    p.from = p.target = at;
    return p;
  }

  case K::StepBack: {
    auto u = up(n);
    if (!u)
      throw NothingToStep("nothing to undo");
    return move(t, at, *u);
  }

  case K::ReverseContinue: {
    auto u = up(n);
    if (!u)
      throw NothingToStep("nothing to undo");
    while (t.node(*u).children.size() < 2 && up(t.node(*u)))
      u = up(t.node(*u));
    return move(t, at, *u);
  }

  case K::StepSpecific: {
    for (const auto &e : n.children)
      if (e.label == cmd.label) {
        if (e.explored())
          throw AlreadyExplored();
        auto p = drive(n, *e.k, n.depth);
        if (has_loop_nest(n))
          p.exhaust.push_back(n.id);
        return p;
      }
    for (const auto &e : n.nested)
      if (e.tag == cmd.label) {
        if (e.explored())
          throw AlreadyExplored();
        return drive(n, *e.k, std::nullopt);
      }
    throw NoSuchBranch("no branch '" + cmd.label + "' at node " + std::to_string(at));
  }

  case K::Jump:
    if (!t.contains(cmd.target))
      throw UnknownNode(cmd.target);
    return move(t, at, cmd.target);
  }
  throw NothingToStep("nothing to step");
}

// ---- Explorer ----

Explorer::Explorer(std::shared_ptr<const gil::Program> program, std::string proc,
                   std::unique_ptr<reports::ReportStore> store, engine::Options opts)
    : store_(store ? std::move(store) : std::make_unique<reports::MemoryStore>()) {
  session_ = std::make_unique<engine::Session>(std::move(program), std::move(proc), *store_, opts);
  remember(session_->initial().reports);
  tree_.ingest(session_->initial().reports);
  tree_.set_frontier(frontier_of(*session_));
  cursor_ = tree_.root().value_or(0);
}

void Explorer::remember(const std::vector<Report> &rs) {
  if (store_->retains())
    return;
  for (const auto &r : rs)
    if (r.payload.contains("state"))
      payloads_[r.id] = r.payload["state"];
}

std::optional<nlohmann::json> Explorer::snapshot(NodeId at) const {
  auto r = tree_.state_report(at);
  if (!r)
    return std::nullopt;
  if (!store_->retains()) {
    auto it = payloads_.find(*r);
    if (it == payloads_.end())
      return std::nullopt;
    return std::optional<nlohmann::json>(it->second);
  }
  auto p = store_->get(*r).payload;
  if (!p.contains("state"))
    return std::nullopt;
  return std::optional<nlohmann::json>(p["state"]);
}

DisplayState Explorer::state(std::optional<NodeId> at) const {
  auto s = snapshot(at.value_or(cursor_));
  return s ? lift_state(*s) : DisplayState{};
}

engine::StepResult Explorer::step(ContinuationId k, std::vector<Report> &out, TreeDelta &d) {
  auto res = session_->step(k);
  remember(res.reports);
  out.insert(out.end(), res.reports.begin(), res.reports.end());
  d.merge(tree_.ingest(res.reports));
  return res;
}

bool Explorer::settled(ContinuationId k, NodeId from, std::optional<int> max_depth) const {
  auto [prev, parent] = session_->anchor(k);
  Position p = tree_.position({k, prev, parent, std::nullopt});
  if (p.open)
    return false;
  NodeId at = p.node ? *p.node : *p.owner;
  if (at == from)
    return false;
  return !max_depth || tree_.node(at).depth <= *max_depth;
}

TreeDelta Explorer::drive(ContinuationId k, NodeId from, std::optional<int> max_depth, NodeId &landing) {
  TreeDelta d;
  std::vector<ContinuationId> todo{k};
  bool landed = false;
  while (!todo.empty()) {
    auto c = todo.back();
    todo.pop_back();
    std::vector<Report> rs;
    auto res = step(c, rs, d);
    std::vector<ContinuationId> more;
    for (const auto &ch : res.next) {
      if (!settled(ch.k, from, max_depth)) {
        more.push_back(ch.k);
      } else if (!landed) {
        auto [prev, parent] = session_->anchor(ch.k);
        auto p = tree_.position({ch.k, prev, parent, std::nullopt});
        landing = p.node ? *p.node : *p.owner;
        landed = true;
      }
    }
    if (res.next.empty() && !landed)
      for (const auto &o : res.finished)
        if (auto n = tree_.node_of(o.report)) {
          landing = *n;
          landed = true;
          break;
        }
    todo.insert(todo.end(), more.rbegin(), more.rend());
  }
  return d;
}

TreeDelta Explorer::exhaust(NodeId n) {
  TreeDelta d;
  for (;;) {
    std::optional<ContinuationId> pick;
    for (auto k : session_->live()) {
      auto [prev, parent] = session_->anchor(k);
      auto p = tree_.position({k, prev, parent, std::nullopt});
      NodeId at = p.node ? *p.node : *p.owner;
      if (at != n && tree_.nested_in(at, n))
        pick = k;
    }
    if (!pick)
      break;
    std::vector<Report> rs;
    step(*pick, rs, d);
  }
  return d;
}

TreeDelta Explorer::execute(const EnginePlan &plan) {
  TreeDelta d;
  switch (plan.kind) {
  case EnginePlan::Kind::Move:
    cursor_ = plan.target;
    return d;
  case EnginePlan::Kind::Drive: {
    for (auto n : plan.exhaust)
      d.merge(exhaust(n));
    NodeId landing = plan.target;
    if (plan.k && session_->is_live(*plan.k))
      d.merge(drive(*plan.k, plan.from, plan.max_depth, landing));
    d.merge(tree_.set_frontier(frontier_of(*session_)));
    cursor_ = plan.to_target ? plan.target : landing;
    return d;
  }
  case EnginePlan::Kind::Continue: {
    bool first = true;
    for (;;) {
      EnginePlan p;
      try {
        p = plan_step(tree_, cursor_, {Command::Kind::StepOver, "", 0});
      } catch (const NothingToStep &) {
        if (first)
          throw;
        break;
      } catch (const AmbiguousStep &) {
        if (first)
          throw;
        break;
      }
      d.merge(execute(p));
      first = false;
      const auto &n = tree_.node(cursor_);
      if (n.status != Status::InProgress)
        break;
      if (n.loc && breakpoints_.count(n.loc->start_line))
        break;
    }
    return d;
  }
  }
  return d;
}

TreeDelta Explorer::apply(const Command &cmd) { return execute(plan_step(tree_, cursor_, cmd)); }

TreeDelta Explorer::run_all() {
  TreeDelta d;
  for (auto live = session_->live(); !live.empty(); live = session_->live()) {
    std::vector<Report> rs;
    step(live.back(), rs, d);
  }
  d.merge(tree_.set_frontier(frontier_of(*session_)));
  return d;
}

} // namespace swing::lifter
