#include "swing/dap.hpp"

#include "swing/load.hpp"

#include <filesystem>

namespace swing::dap {

namespace {

enum Ref { StoreRef = 1, HeapRef, PredsRef, PcRef, TempRef };

json entries(const std::vector<std::string> &xs) {
  json out = json::array();
  for (std::size_t i = 0; i < xs.size(); ++i)
    out.push_back({{"name", "[" + std::to_string(i) + "]"}, {"value", xs[i]}, {"variablesReference", 0}});
  return out;
}

json bindings(const std::vector<lifter::Binding> &bs) {
  json out = json::array();
  for (const auto &b : bs)
    out.push_back({{"name", b.name}, {"value", b.value}, {"variablesReference", 0}});
  return out;
}

std::optional<lifter::Command::Kind> run_control(const std::string &cmd) {
  using K = lifter::Command::Kind;
  if (cmd == "next")
    return K::StepOver;
  if (cmd == "stepIn")
    return K::StepIn;
  if (cmd == "stepOut")
    return K::StepOut;
  if (cmd == "continue")
    return K::Continue;
  if (cmd == "stepBack")
    return K::StepBack;
  if (cmd == "reverseContinue")
    return K::ReverseContinue;
  return std::nullopt;
}

} // namespace

void Adapter::respond(const json &req, bool ok, json body, const std::string &message) {
  json r = {{"seq", ++seq_},
            {"type", "response"},
            {"request_seq", req.value("seq", 0)},
            {"command", req.value("command", "")},
            {"success", ok}};
  if (!ok)
    r["message"] = message;
  if (!body.empty())
    r["body"] = std::move(body);
  sink_(r);
}

void Adapter::event(const std::string &name, json body) {
  json e = {{"seq", ++seq_}, {"type", "event"}, {"event", name}};
  if (!body.empty())
    e["body"] = std::move(body);
  sink_(e);
}

void Adapter::stopped(const std::string &reason) {
  event("stopped", {{"reason", reason}, {"threadId", 1}, {"allThreadsStopped", true},
                    {"nodeId", ex_->cursor()}});
}

void Adapter::map_update(const lifter::TreeDelta &d, bool full) {
  if (full) {
    event("mapUpdate", {{"kind", "full"}, {"tree", ex_->tree().to_json()}});
    return;
  }
  if (d.empty())
    return;
  std::set<lifter::NodeId> all = d.created;
  all.insert(d.updated.begin(), d.updated.end());
  event("mapUpdate", {{"kind", "delta"}, {"tree", ex_->tree().to_json(all)}});
}

void Adapter::launch(const json &args) {
  std::string program = args.at("program");
  std::string proc = args.at("procedure");
  auto prog = load_program(program);
  engine::Options opts;
  std::string mode = args.value("mode", "auto");
  if (mode == "manual")
    opts.mode = engine::Mode::Manual;
  else if (mode != "auto")
    throw std::runtime_error("unknown mode '" + mode + "'");
  std::unique_ptr<reports::ReportStore> store;
  if (args.contains("logPath"))
    store = std::make_unique<reports::NdjsonStore>(
        args["logPath"].get<std::string>(), std::filesystem::path(program).stem().string() + "." + proc);
  ex_ = std::make_unique<lifter::Explorer>(prog, proc, std::move(store), opts);
  ex_->set_breakpoints(breakpoints_);
  launch_args_ = args;
}

json Adapter::variables(int ref) const {
  auto s = ex_->state();
  switch (ref) {
  case StoreRef: {
    auto out = bindings(s.store);
    if (!s.intermediate.empty())
      out.push_back({{"name", "intermediate"},
                     {"value", std::to_string(s.intermediate.size()) + " temporaries"},
                     {"variablesReference", TempRef}});
    return out;
  }
  case HeapRef: return entries(s.heap);
  case PredsRef: return entries(s.preds);
  case PcRef: return entries(s.pc);
  case TempRef: return bindings(s.intermediate);
  }
  throw std::runtime_error("unknown variables reference " + std::to_string(ref));
}

void Adapter::handle(const json &req) {
  if (!req.is_object() || req.value("type", "") != "request" || !req.contains("command") ||
      !req["command"].is_string()) {
    respond(req.is_object() ? req : json::object(), false, {}, "malformed request");
    return;
  }
  const std::string cmd = req["command"];
  const json args = req.value("arguments", json::object());

  try {
    if (cmd == "initialize") {
      respond(req, true,
              {{"supportsStepBack", true},
               {"supportsRestartRequest", true},
               {"supportsConfigurationDoneRequest", true},
               {"supportsGotoTargetsRequest", false}});
      return;
    }
    if (cmd == "disconnect") {
      respond(req, true);
      done_ = true;
      return;
    }
    if (cmd == "configurationDone" || cmd == "setExceptionBreakpoints") {
      respond(req, true);
      return;
    }
    if (cmd == "setBreakpoints") {
      breakpoints_.clear();
      json out = json::array();
      for (const auto &b : args.value("breakpoints", json::array())) {
        int line = b.at("line");
        breakpoints_.insert(line);
        out.push_back({{"verified", true}, {"line", line}});
      }
      if (ex_)
        ex_->set_breakpoints(breakpoints_);
      respond(req, true, {{"breakpoints", out}});
      return;
    }
    if (cmd == "launch") {
      launch(args);
      respond(req, true);
      event("initialized");
      map_update({}, true);
      stopped("entry");
      return;
    }

    // Everything below needs a session.
    bool known = cmd == "restart" || cmd == "jump" || cmd == "stepSpecific" || cmd == "fullMap" ||
                 cmd == "threads" || cmd == "stackTrace" || cmd == "scopes" || cmd == "variables" ||
                 run_control(cmd).has_value();
    if (!known) {
      respond(req, false, {}, "unknown command '" + cmd + "'");
      return;
    }
    if (!ex_) {
      respond(req, false, {}, "no session; launch first");
      return;
    }

    if (auto kind = run_control(cmd)) {
      auto d = ex_->apply({*kind, "", 0});
      respond(req, true, cmd == "continue" ? json{{"allThreadsContinued", true}} : json::object());
      map_update(d, false);
      const auto &n = ex_->tree().node(ex_->cursor());
      bool at_break = *kind == lifter::Command::Kind::Continue && n.loc && breakpoints_.count(n.loc->start_line);
      stopped(at_break ? "breakpoint" : "step");
      return;
    }
    if (cmd == "restart") {
      launch(launch_args_);
      respond(req, true);
      map_update({}, true);
      stopped("entry");
      return;
    }
    if (cmd == "jump") {
      ex_->apply({lifter::Command::Kind::Jump, "", args.at("nodeId").get<lifter::NodeId>()});
      respond(req, true);
      stopped("goto");
      return;
    }
    if (cmd == "stepSpecific") {
      lifter::NodeId at = args.at("nodeId");
      auto plan = lifter::plan_step(ex_->tree(), at,
                                    {lifter::Command::Kind::StepSpecific, args.at("branchLabel"), 0});
      auto d = ex_->execute(plan);
      respond(req, true);
      map_update(d, false);
      stopped("step");
      return;
    }
    if (cmd == "fullMap") {
      respond(req, true, {{"kind", "full"}, {"tree", ex_->tree().to_json()}});
      return;
    }
    if (cmd == "threads") {
      respond(req, true, {{"threads", json::array({{{"id", 1}, {"name", ex_->session().proc()}}})}});
      return;
    }
    if (cmd == "stackTrace") {
      const auto &t = ex_->tree();
      std::optional<SourceLoc> loc;
      for (std::optional<lifter::NodeId> n = ex_->cursor(); n && !loc;) {
        loc = t.node(*n).loc;
        n = t.node(*n).parent ? t.node(*n).parent : t.node(*n).owner;
      }
      std::string program = launch_args_.at("program");
      json frame = {{"id", 0},
                    {"name", t.node(ex_->cursor()).text},
                    {"source", {{"name", std::filesystem::path(program).filename().string()}, {"path", program}}},
                    {"line", loc ? loc->start_line : 0},
                    {"column", loc ? loc->start_col : 0}};
      if (loc) {
        frame["endLine"] = loc->end_line;
        frame["endColumn"] = loc->end_col;
      }
      respond(req, true, {{"stackFrames", json::array({frame})}, {"totalFrames", 1}});
      return;
    }
    if (cmd == "scopes") {
      json scopes = json::array();
      int ref = StoreRef;
      for (const char *name : {"Store", "Heap", "Predicates", "Path Conditions"})
        scopes.push_back({{"name", name}, {"variablesReference", ref++}, {"expensive", false}});
      respond(req, true, {{"scopes", scopes}});
      return;
    }
    if (cmd == "variables") {
      respond(req, true, {{"variables", variables(args.at("variablesReference"))}});
      return;
    }
  } catch (const std::exception &e) {
    respond(req, false, {}, e.what());
    return;
  }
}

} // namespace swing::dap
