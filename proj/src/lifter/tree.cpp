#include "swing/lifter.hpp"

#include <algorithm>

namespace swing::lifter {

using nlohmann::json;

const char *to_string(Status s) {
  switch (s) {
  case Status::InProgress: return "InProgress";
  case Status::Success: return "Finished-Success";
  case Status::Failure: return "Finished-Failure";
  case Status::Unexplored: return "Unexplored";
  }
  return "?";
}

void TreeDelta::merge(const TreeDelta &o) {
  created.insert(o.created.begin(), o.created.end());
  for (auto n : o.updated)
    if (!created.count(n))
      updated.insert(n);
}

std::vector<Frontier> frontier_of(const engine::Session &s) {
  std::vector<Frontier> out;
  for (auto k : s.live()) {
    auto [prev, parent] = s.anchor(k);
    out.push_back({k, prev, parent, s.label_of(k)});
  }
  return out;
}

namespace {

std::optional<SourceLoc> loc_of(const json &p, const char *key = "source_loc") {
  auto it = p.find(key);
  if (it == p.end() || it->is_null())
    return std::nullopt;
  SourceLoc l;
  l.start_line = (*it)["start"][0];
  l.start_col = (*it)["start"][1];
  l.end_line = (*it)["end"][0];
  l.end_col = (*it)["end"][1];
  return l;
}

json loc_json(const std::optional<SourceLoc> &l) {
  if (!l)
    return nullptr;
  return {{"start", {l->start_line, l->start_col}}, {"end", {l->end_line, l->end_col}}};
}

std::string str(const json &p, const char *key) {
  auto it = p.find(key);
  return it != p.end() && it->is_string() ? it->get<std::string>() : std::string();
}

} // namespace

const LiftedNode &SourceTree::node(NodeId id) const {
  if (!contains(id))
    throw UnknownNode(id);
  return nodes_[id];
}

std::optional<NodeId> SourceTree::node_of(ReportId r) const {
  auto it = node_of_.find(r);
  if (it == node_of_.end())
    return std::nullopt;
  return it->second;
}

std::optional<NodeId> SourceTree::stub_owner(ContinuationId k) const {
  auto it = stubs_.find(k);
  if (it == stubs_.end())
    return std::nullopt;
  return it->second;
}

void SourceTree::touch(NodeId n, TreeDelta &d) {
  if (!d.created.count(n))
    d.updated.insert(n);
}

std::string SourceTree::unique_label(const LiftedNode &n, std::string label) const {
  auto taken = [&](const std::string &l) {
    return std::any_of(n.children.begin(), n.children.end(), [&](const Edge &e) { return e.label == l; });
  };
  if (!taken(label))
    return label;
  for (int i = 2;; ++i) {
    auto l = label + " #" + std::to_string(i);
    if (!taken(l))
      return l;
  }
}

NodeId SourceTree::make(std::string text, std::optional<SourceLoc> loc, std::optional<NodeId> parent,
                        std::optional<NodeId> owner, std::string label, std::string tag, TreeDelta &d) {
  LiftedNode n;
  n.id = static_cast<NodeId>(nodes_.size());
  n.text = std::move(text);
  n.loc = loc;
  n.parent = parent;
  if (parent) {
    n.owner = nodes_[*parent].owner;
    n.depth = nodes_[*parent].depth;
  } else if (owner) {
    n.owner = owner;
    n.depth = nodes_[*owner].depth + 1;
  }
  NodeId id = n.id;
  nodes_.push_back(std::move(n));
  d.created.insert(id);

  if (parent) {
    auto &p = nodes_[*parent];
    auto stub = std::find_if(p.children.begin(), p.children.end(),
                             [&](const Edge &e) { return !e.explored() && e.label == label; });
    if (stub != p.children.end()) {
      stubs_.erase(*stub->k);
      *stub = Edge{label, id, std::nullopt};
    } else {
      p.children.push_back({unique_label(p, label), id, std::nullopt});
    }
    if (p.is_match && p.status == Status::Success)
      p.status = Status::InProgress;
    touch(*parent, d);
  } else if (owner) {
    auto &o = nodes_[*owner];
    auto stub = std::find_if(o.nested.begin(), o.nested.end(),
                             [&](const NestEdge &e) { return !e.explored() && e.tag == tag; });
    if (stub != o.nested.end()) {
      stubs_.erase(*stub->k);
      *stub = NestEdge{tag, id, std::nullopt};
    } else {
      o.nested.push_back({tag, id, std::nullopt});
    }
    touch(*owner, d);
  }
  return id;
}

std::string SourceTree::label_for(const std::optional<ReportId> &fork, const json &c) const {
  std::string kind = str(c, "kind");
  std::optional<std::string> bk;
  if (fork) {
    auto it = branch_kind_.find(*fork);
    if (it != branch_kind_.end())
      bk = it->second;
  }
  if (bk && (kind == "GuardTrue" || kind == "GuardFalse")) {
    if (*bk == "IfElse")
      return kind == "GuardTrue" ? "then" : "else";
    if (*bk == "WhileLoop")
      return kind == "GuardTrue" ? "loop" : "exit";
  }
  std::string text = str(c, "text");
  if (!text.empty())
    return text;
  return kind + " " + std::to_string(c.value("index", 0));
}

Position SourceTree::position(const Frontier &f) const {
  Position p;
  if (f.prev) {
    auto it = pos_.find(*f.prev);
    if (it == pos_.end())
      throw LiftError("continuation " + std::to_string(f.k) + " follows report " + std::to_string(*f.prev) +
                      ", which is not a lifted command");
    p = it->second;
  } else if (f.parent) {
    auto o = node_of(*f.parent);
    if (!o)
      throw LiftError("continuation " + std::to_string(f.k) + " nests in an unknown report");
    p.owner = o;
  } else {
    throw LiftError("continuation " + std::to_string(f.k) + " has no anchor");
  }
  if (f.label)
    p.label = label_for(f.prev, engine::to_json(*f.label));
  return p;
}

TreeDelta SourceTree::ingest(const std::vector<Report> &batch) {
  TreeDelta d;
  for (const auto &r : batch)
    ingest_one(r, d);
  return d;
}

void SourceTree::ingest_one(const Report &r, TreeDelta &d) {
  const json &p = r.payload;
  auto owner_of = [&]() -> NodeId {
    if (!r.parent)
      throw LiftError(r.kind + " report " + std::to_string(r.id) + " has no parent");
    auto o = node_of(*r.parent);
    if (!o)
      throw LiftError(r.kind + " report " + std::to_string(r.id) + " nests in an unlifted report");
    return *o;
  };
  auto prev_node = [&]() -> NodeId {
    if (!r.previous)
      throw LiftError(r.kind + " report " + std::to_string(r.id) + " has no previous report");
    if (auto it = pos_.find(*r.previous); it != pos_.end() && it->second.node)
      return *it->second.node;
    if (auto n = node_of(*r.previous))
      return *n;
    throw LiftError(r.kind + " report " + std::to_string(r.id) + " follows an unlifted report");
  };
  auto attach = [&](NodeId n) {
    nodes_[n].reports.push_back(r.id);
    node_of_[r.id] = n;
  };

  if (r.kind == "Produce") {
    std::string text = "produce " + str(p, "assertion");
    NodeId n;
    if (r.parent) {
      n = make(text, std::nullopt, std::nullopt, owner_of(), "", "LoopBody", d);
    } else {
      if (root_)
        throw LiftError("a second root report " + std::to_string(r.id));
      n = make(text, std::nullopt, std::nullopt, std::nullopt, "", "", d);
      root_ = n;
    }
    attach(n);
    state_of_[n] = r.id;
    if (p.value("infeasible", false))
      nodes_[n].status = Status::Success;
    pos_[r.id] = Position{n, false, std::nullopt, ""};
    return;
  }

  if (r.kind == "CmdStep") {
    Position base;
    if (r.previous) {
      auto it = pos_.find(*r.previous);
      if (it == pos_.end())
        throw LiftError("command report " + std::to_string(r.id) + " follows an unlifted report");
      base = it->second;
    } else {
      base.owner = owner_of();
    }
    base.open = base.open && base.node.has_value();
    if (p.contains("case"))
      base.label = label_for(r.previous, p["case"]);
    if (p.contains("branches"))
      branch_kind_[r.id] = p.contains("branch_kind") ? std::optional<std::string>(str(p, "branch_kind"))
                                                     : std::nullopt;

    std::string kind = str(p, "stmt_kind");
    if (kind.empty())
      throw LiftError("command report " + std::to_string(r.id) + " has no stmt_kind");
    if (kind == "Hidden" || (kind == "LoopPrefix" && !r.parent)) {
      if (base.node) {
        nodes_[*base.node].hidden.push_back(r.id);
        touch(*base.node, d);
      }
      pos_[r.id] = base;
      return;
    }
    if (kind == "LoopPrefix") {
      NodeId n = owner_of();
      attach(n);
      touch(n, d);
      pos_[r.id] = base;
      return;
    }
    bool final = kind.size() > 5 && kind.compare(kind.size() - 4, 4, "true") == 0;
    if (kind.rfind("Normal", 0) != 0 && kind.rfind("Return", 0) != 0)
      throw LiftError("command report " + std::to_string(r.id) + " has unknown stmt_kind " + kind);

    NodeId n;
    if (base.node && base.open) {
      n = *base.node;
      touch(n, d);
    } else {
      std::string text = str(p, "display");
      if (text.empty())
        text = str(p, "text");
      n = make(text, loc_of(p), base.node, base.node ? std::nullopt : base.owner, base.label, "FunCall", d);
      state_of_[n] = r.id;
    }
    attach(n);
    nodes_[n].open = !final;
    pos_[r.id] = Position{n, !final, std::nullopt, ""};
    return;
  }

  if (r.kind == "MatchStart") {
    std::string text = "match " + str(p, "target") + ": " + str(p, "assertion");
    NodeId n = r.previous ? make(text, std::nullopt, prev_node(), std::nullopt, "", "", d)
                          : make(text, std::nullopt, std::nullopt, owner_of(), "", "Match", d);
    nodes_[n].is_match = true;
    attach(n);
    state_of_[n] = r.id;
    return;
  }

  if (r.kind == "MatchAtom" || r.kind == "MatchRecoveryStep") {
    bool atom = r.kind == "MatchAtom";
    std::string label = p.contains("case") ? str(p["case"], "text") : std::string();
    std::string text = atom ? (str(p, "action") == "fold" ? "fold " : "") + str(p, "atom") : str(p, "tactic");
    if (!atom)
      label = text;
    NodeId n = make(text, loc_of(p), prev_node(), std::nullopt, label, "", d);
    auto &node = nodes_[n];
    node.is_match = true;
    if (atom) {
      if (p.value("success", false)) {
        node.status = Status::Success;
      } else {
        node.status = Status::Failure;
        node.failed_atom = str(p, "atom");
      }
    }
    attach(n);
    if (p.contains("state"))
      state_of_[n] = r.id;
    return;
  }

  if (r.kind == "Result") {
    NodeId n = prev_node();
    auto &node = nodes_[n];
    if (str(p, "outcome") == "VerifiedBranch") {
      if (node.status != Status::Failure)
        node.status = Status::Success;
    } else {
      node.status = Status::Failure;
      node.failed_atom = str(p, "failed_atom");
    }
    attach(n);
    if (p.contains("state"))
      state_of_[n] = r.id;
    touch(n, d);
    return;
  }

  throw LiftError("unknown report kind " + r.kind);
}

TreeDelta SourceTree::set_frontier(const std::vector<Frontier> &live) {
  TreeDelta d;
  std::set<ContinuationId> keep;
  for (const auto &f : live)
    keep.insert(f.k);
  for (auto it = stubs_.begin(); it != stubs_.end();) {
    if (keep.count(it->first)) {
      ++it;
      continue;
    }
    auto &n = nodes_[it->second];
    ContinuationId k = it->first;
    std::erase_if(n.children, [&](const Edge &e) { return e.k == k; });
    std::erase_if(n.nested, [&](const NestEdge &e) { return e.k == k; });
    touch(n.id, d);
    it = stubs_.erase(it);
  }
  for (const auto &f : live) {
    if (stubs_.count(f.k))
      continue;
    Position p = position(f);
    if (p.node) {
      auto &n = nodes_[*p.node];
      n.children.push_back({unique_label(n, p.label), std::nullopt, f.k});
      stubs_[f.k] = n.id;
      touch(n.id, d);
    } else {
      auto &o = nodes_[*p.owner];
      o.nested.push_back({"FunCall", std::nullopt, f.k});
      stubs_[f.k] = o.id;
      touch(o.id, d);
    }
  }
  return d;
}

SourceTree SourceTree::from_reports(const std::vector<Report> &all, const std::vector<Frontier> &live) {
  SourceTree t;
  t.ingest(all);
  t.set_frontier(live);
  return t;
}

std::optional<ReportId> SourceTree::state_report(NodeId id) const {
  std::optional<NodeId> n = id;
  while (n) {
    if (auto it = state_of_.find(*n); it != state_of_.end())
      return it->second;
    const auto &node = nodes_[*n];
    n = node.parent ? node.parent : node.owner;
  }
  return std::nullopt;
}

bool SourceTree::nested_in(NodeId inner, NodeId outer) const {
  for (auto o = node(inner).owner; o; o = nodes_[*o].owner)
    if (*o == outer)
      return true;
  return false;
}

namespace {

json node_json(const LiftedNode &n) {
  json children = json::array();
  for (const auto &e : n.children) {
    json c = {{"label", e.label}};
    if (e.node) {
      c["id"] = *e.node;
    } else {
      c["id"] = "unexplored";
      c["continuation"] = *e.k;
    }
    children.push_back(std::move(c));
  }
  json nested = json::array();
  for (const auto &e : n.nested) {
    json c = {{"tag", e.tag}};
    if (e.root) {
      c["root"] = *e.root;
    } else {
      c["root"] = "unexplored";
      c["continuation"] = *e.k;
    }
    nested.push_back(std::move(c));
  }
  json j = {{"id", n.id},           {"text", n.text},     {"loc", loc_json(n.loc)},
            {"status", to_string(n.status)}, {"children", children}, {"nested", nested},
            {"reports", n.reports}};
  if (!n.failed_atom.empty())
    j["failed_atom"] = n.failed_atom;
  return j;
}

} // namespace

json SourceTree::to_json() const {
  json nodes = json::array();
  for (const auto &n : nodes_)
    nodes.push_back(node_json(n));
  return {{"root", root_ ? json(*root_) : json(nullptr)}, {"nodes", nodes}};
}

json SourceTree::to_json(const std::set<NodeId> &only) const {
  json nodes = json::array();
  for (auto id : only)
    nodes.push_back(node_json(node(id)));
  return {{"root", root_ ? json(*root_) : json(nullptr)}, {"nodes", nodes}};
}

} // namespace swing::lifter
