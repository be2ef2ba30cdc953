#pragma once

// Lifts the GIL-level report stream of a session into a WISL-level
// tree-of-trees, and turns source-level stepping commands into engine steps.

#include "swing/engine.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace swing::lifter {

using engine::ContinuationId;
using reports::Report;
using reports::ReportId;
using NodeId = std::int64_t;

enum class Status { InProgress, Success, Failure, Unexplored };
const char *to_string(Status s); // "InProgress", "Finished-Success", ...

/// A child edge: an explored node or an unexplored continuation.
struct Edge {
  std::string label;
  std::optional<NodeId> node;
  std::optional<ContinuationId> k;
  bool explored() const { return node.has_value(); }
};

/// A nested tree hanging off a node. Tags: Match, LoopBody, FunCall.
struct NestEdge {
  std::string tag;
  std::optional<NodeId> root;
  std::optional<ContinuationId> k;
  bool explored() const { return root.has_value(); }
};

struct LiftedNode {
  NodeId id = 0;
  std::string text;
  std::optional<SourceLoc> loc;
  Status status = Status::InProgress;
  std::vector<Edge> children;
  std::vector<NestEdge> nested;
  std::vector<ReportId> reports; // backing reports, Hidden steps excluded
  std::vector<ReportId> hidden;  // Hidden steps folded into this node
  std::string failed_atom;
  std::optional<NodeId> parent;  // tree parent; unset for roots
  std::optional<NodeId> owner;   // the node this node's tree is nested in
  int depth = 0;                 // nesting depth of this node's tree
  bool open = false;             // a partial command still being extended
  bool is_match = false;
};

class LiftError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct TreeDelta {
  std::set<NodeId> created, updated;
  bool empty() const { return created.empty() && updated.empty(); }
  void merge(const TreeDelta &o);
};

/// Where the next report of a path lands.
struct Position {
  std::optional<NodeId> node; // unset at the start of a nest
  bool open = false;
  std::optional<NodeId> owner; // nest start: the owning node
  std::string label;           // branch label carried over Hidden steps
};

/// A live continuation as the lifter sees it.
struct Frontier {
  ContinuationId k = 0;
  std::optional<ReportId> prev, parent;
  std::optional<engine::BranchCase> label;
};

std::vector<Frontier> frontier_of(const engine::Session &s);

class SourceTree {
public:
  /// Ingests reports in append order.
  TreeDelta ingest(const std::vector<Report> &batch);
  /// Replaces the Unexplored stubs by one per live continuation.
  TreeDelta set_frontier(const std::vector<Frontier> &live);

  static SourceTree from_reports(const std::vector<Report> &all, const std::vector<Frontier> &live = {});

  std::optional<NodeId> root() const { return root_; }
  const LiftedNode &node(NodeId id) const;
  bool contains(NodeId id) const { return id >= 0 && static_cast<std::size_t>(id) < nodes_.size(); }
  const std::vector<LiftedNode> &nodes() const { return nodes_; }
  /// Node a report is part of, if any.
  std::optional<NodeId> node_of(ReportId r) const;
  Position position(const Frontier &f) const;
  /// The node a stub for k hangs on, if k is a stub of this tree.
  std::optional<NodeId> stub_owner(ContinuationId k) const;

  /// Report whose state snapshot is shown at a node: its result, else its
  /// first state-carrying report, else the nearest ancestor's.
  std::optional<ReportId> state_report(NodeId id) const;

  /// True if `inner` lies in a tree nested (transitively) in `outer`.
  bool nested_in(NodeId inner, NodeId outer) const;

  /// Export document: the whole tree, or only the given nodes.
  nlohmann::json to_json() const;
  nlohmann::json to_json(const std::set<NodeId> &only) const;

private:
  std::vector<LiftedNode> nodes_;
  std::optional<NodeId> root_;
  std::map<ReportId, NodeId> node_of_;
  std::map<ReportId, Position> pos_;                  // after each CmdStep / Produce
  std::map<ReportId, std::optional<std::string>> branch_kind_; // CmdSteps that forked
  std::map<NodeId, ReportId> state_of_;
  std::map<ContinuationId, NodeId> stubs_;

  NodeId make(std::string text, std::optional<SourceLoc> loc, std::optional<NodeId> parent,
              std::optional<NodeId> owner, std::string label, std::string tag, TreeDelta &d);
  void touch(NodeId n, TreeDelta &d);
  void ingest_one(const Report &r, TreeDelta &d);
  std::string label_for(const std::optional<ReportId> &fork, const nlohmann::json &c) const;
  std::string unique_label(const LiftedNode &n, std::string label) const;
};

// ---- state display ----

struct Binding {
  std::string name, value;
};

struct DisplayState {
  std::vector<Binding> store;
  std::vector<Binding> intermediate; // compiler temporaries _varN
  std::vector<std::string> heap;     // one entry per run of cells: `x -> a, b`
  std::vector<std::string> preds;
  std::vector<std::string> pc;
};

DisplayState lift_state(const nlohmann::json &snapshot);
nlohmann::json to_json(const DisplayState &s);

// ---- stepping ----

struct Command {
  enum class Kind { StepIn, StepOver, StepOut, Continue, StepBack, ReverseContinue, StepSpecific, Jump };
  Kind kind = Kind::StepOver;
  std::string label;  // StepSpecific
  NodeId target = 0;  // Jump
};

class NothingToStep : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};
class AmbiguousStep : public std::runtime_error {
public:
  AmbiguousStep() : std::runtime_error("branch choice required") {}
};
class NoSuchBranch : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};
class AlreadyExplored : public std::runtime_error {
public:
  AlreadyExplored() : std::runtime_error("already explored; use jump") {}
};
class UnknownNode : public std::runtime_error {
public:
  explicit UnknownNode(NodeId id) : std::runtime_error("unknown node " + std::to_string(id)) {}
};

struct EnginePlan {
  enum class Kind {
    Move,     // cursor to an explored node, no engine work
    Drive,    // advance path k one source step
    Continue, // repeat StepOver until a fork, a finished node or a breakpoint
  };
  Kind kind = Kind::Move;
  NodeId from = 0;
  NodeId target = 0;                        // Move
  std::vector<NodeId> route;                // Move: root to target, for replays
  std::vector<NodeId> exhaust;              // Drive: nests of these nodes run to completion first
  std::optional<ContinuationId> k;          // Drive
  std::optional<int> max_depth;             // Drive: stop once a node closes at this depth or above
  bool to_target = false;                   // Drive: leave the cursor on target rather than where the path stopped
};

/// Plans a stepping command from `at`. Throws the errors above.
EnginePlan plan_step(const SourceTree &tree, NodeId at, const Command &cmd);

/// An interactive session: engine session, lifted tree and cursor.
class Explorer {
public:
  Explorer(std::shared_ptr<const gil::Program> program, std::string proc,
           std::unique_ptr<reports::ReportStore> store = nullptr, engine::Options opts = {});

  const SourceTree &tree() const { return tree_; }
  NodeId cursor() const { return cursor_; }
  engine::Session &session() { return *session_; }
  const reports::ReportStore &store() const { return *store_; }

  /// Plans and executes a command; returns the tree changes.
  TreeDelta apply(const Command &cmd);
  TreeDelta execute(const EnginePlan &plan);

  /// Explores every remaining continuation.
  TreeDelta run_all();

  void set_breakpoints(std::set<int> lines) { breakpoints_ = std::move(lines); }
  /// Display state at a node (default: cursor).
  DisplayState state(std::optional<NodeId> at = std::nullopt) const;
  std::optional<nlohmann::json> snapshot(NodeId at) const;

private:
  std::unique_ptr<reports::ReportStore> store_;
  std::unique_ptr<engine::Session> session_;
  SourceTree tree_;
  NodeId cursor_ = 0;
  std::set<int> breakpoints_;
  std::map<ReportId, nlohmann::json> payloads_; // reports whose state may be displayed

  engine::StepResult step(ContinuationId k, std::vector<Report> &out, TreeDelta &d);
  bool settled(ContinuationId k, NodeId from, std::optional<int> max_depth) const;
  TreeDelta drive(ContinuationId k, NodeId from, std::optional<int> max_depth, NodeId &landing);
  TreeDelta exhaust(NodeId n);
  void remember(const std::vector<Report> &rs);
};

} // namespace swing::lifter
