#include "swing/gil.hpp"

#include "swing/wisl/pretty.hpp"

#include <set>

namespace swing::gil {

namespace {

using wisl::Stmt;

std::set<std::string> assigned_vars(const wisl::Block &b) {
  std::set<std::string> out;
  for (const auto &s : b) {
    if (!s.var.empty())
      out.insert(s.var);
    for (const auto &v : assigned_vars(s.then_block))
      out.insert(v);
    for (const auto &v : assigned_vars(s.else_block))
      out.insert(v);
  }
  return out;
}

// Every variable the function can mention, in a stable order: parameters
// first, then assigned variables sorted by name.
std::vector<std::string> function_vars(const std::vector<std::string> &params,
                                       const wisl::Block &body) {
  std::vector<std::string> out = params;
  std::set<std::string> seen(params.begin(), params.end());
  for (const auto &v : assigned_vars(body))
    if (seen.insert(v).second)
      out.push_back(v);
  return out;
}

class ProcBuilder;

struct FunctionContext {
  const wisl::Program &src;
  std::string function;
  std::vector<std::string> vars;
  int loop_counter = 0;
  std::vector<Proc> extracted;
};

class ProcBuilder {
public:
  ProcBuilder(FunctionContext &fn) : fn_(fn) {}

  std::vector<Cmd> take() {
    if (pending_label_)
      emit_hidden_skip();
    return std::move(cmds_);
  }

  void block(const wisl::Block &b) {
    for (const auto &s : b)
      stmt(s);
  }

  void emit(Cmd c) {
    if (pending_label_) {
      c.label = std::move(*pending_label_);
      pending_label_.reset();
    }
    cmds_.push_back(std::move(c));
  }

  void place_label(const std::string &l) {
    if (pending_label_)
      emit_hidden_skip();
    pending_label_ = l;
  }

  std::string fresh_label(const std::string &base) {
    int n = label_counts_[base]++;
    return n == 0 ? base : base + "_" + std::to_string(n);
  }

  std::string fresh_temp() { return "_var" + std::to_string(temp_counter_++); }

  void stmt(const Stmt &s) {
    switch (s.kind) {
    case Stmt::Kind::Skip: {
      Cmd c;
      c.kind = Cmd::Kind::Skip;
      c.annot = normal(s.loc, true);
      emit(std::move(c));
      break;
    }
    case Stmt::Kind::Assign: {
      Cmd c;
      c.kind = Cmd::Kind::Assign;
      c.var = s.var;
      c.e1 = s.e1;
      c.annot = normal(s.loc, true);
      emit(std::move(c));
      break;
    }
    case Stmt::Kind::FunCall: {
      Cmd c;
      c.kind = Cmd::Kind::Call;
      c.var = s.var;
      c.fname = s.fname;
      c.args = s.args;
      c.annot = normal(s.loc, true);
      auto it = fn_.src.functions.find(s.fname);
      if (it != fn_.src.functions.end() && !it->second.spec)
        c.annot.nest_kind = NestKind{NestKind::Kind::FunCall, s.fname};
      emit(std::move(c));
      break;
    }
    case Stmt::Kind::Alloc: {
      Cmd c;
      c.kind = Cmd::Kind::Alloc;
      c.var = s.var;
      c.e1 = s.e1;
      c.annot = normal(s.loc, true);
      emit(std::move(c));
      break;
    }
    case Stmt::Kind::Lookup:
    case Stmt::Kind::Mutate:
    case Stmt::Kind::Dealloc:
      memory(s);
      break;
    case Stmt::Kind::IfElse:
      if_else(s);
      break;
    case Stmt::Kind::While:
      loop(s);
      break;
    case Stmt::Kind::Tactic: {
      Cmd c;
      c.kind = Cmd::Kind::Logic;
      c.logic = s.tactic;
      c.annot = normal(s.loc, true);
      emit(std::move(c));
      break;
    }
    }
  }

  void ret(const Expr &e, const SourceLoc &loc) {
    Cmd a;
    a.kind = Cmd::Kind::Assign;
    a.var = "ret";
    a.e1 = e;
    a.annot = {loc, StmtKind::ret(false), {}, {}};
    emit(std::move(a));
    Cmd r;
    r.kind = Cmd::Kind::Return;
    r.annot = {loc, StmtKind::ret(true), {}, {}};
    emit(std::move(r));
  }

  void bare_return(Annot annot) {
    Cmd r;
    r.kind = Cmd::Kind::Return;
    r.annot = std::move(annot);
    emit(std::move(r));
  }

  static Annot normal(const SourceLoc &loc, bool fin) {
    return {loc, StmtKind::normal(fin), {}, {}};
  }

private:
  FunctionContext &fn_;
  std::vector<Cmd> cmds_;
  std::optional<std::string> pending_label_;
  std::map<std::string, int> label_counts_;
  int temp_counter_ = 0;

  void emit_hidden_skip() {
    Cmd c;
    c.kind = Cmd::Kind::Skip;
    c.annot.stmt_kind = StmtKind::hidden();
    emit(std::move(c));
  }

  void memory(const Stmt &s) {
    Expr addr = s.e1;
    if (!s.e1.is_pvar()) {
      // Compound addresses are evaluated as a step of their own.
      std::string tmp = fresh_temp();
      Cmd ev;
      if (s.e1.is_binary(BinOp::Add)) {
        ev.kind = Cmd::Kind::Call;
        ev.fname = "i_add";
        ev.args = {s.e1.arg(0), s.e1.arg(1)};
      } else {
        ev.kind = Cmd::Kind::Assign;
        ev.e1 = s.e1;
      }
      ev.var = tmp;
      ev.annot = normal(s.e1_loc.valid() ? s.e1_loc : s.loc, true);
      emit(std::move(ev));
      addr = Expr::pvar(tmp);
    }
    std::string cont = fresh_label("cont");
    std::string fail = fresh_label("fail");
    Cmd guard;
    guard.kind = Cmd::Kind::GuardedGoto;
    guard.e1 = Expr::type_test(addr, TypeName::Ptr);
    guard.then_label = cont;
    guard.else_label = fail;
    guard.annot = normal(s.loc, false);
    emit(std::move(guard));

    place_label(fail);
    Cmd f;
    f.kind = Cmd::Kind::Fail;
    f.message = "Invalid pointer";
    f.annot = normal(s.loc, true);
    emit(std::move(f));

    place_label(cont);
    Cmd op;
    op.annot = normal(s.loc, true);
    op.e1 = addr;
    switch (s.kind) {
    case Stmt::Kind::Lookup:
      op.kind = Cmd::Kind::Load;
      op.var = s.var;
      break;
    case Stmt::Kind::Mutate:
      op.kind = Cmd::Kind::Store;
      op.e2 = s.e2;
      break;
    default:
      op.kind = Cmd::Kind::Free;
      break;
    }
    emit(std::move(op));
  }

  void if_else(const Stmt &s) {
    std::string then_l = fresh_label("then");
    std::string else_l = fresh_label("else");
    std::string end_l = fresh_label("end");
    Cmd g;
    g.kind = Cmd::Kind::GuardedGoto;
    g.e1 = s.e1;
    g.then_label = then_l;
    g.else_label = else_l;
    g.annot = normal(s.loc, true);
    g.annot.branch_kind = BranchKind::IfElse;
    emit(std::move(g));

    place_label(then_l);
    block(s.then_block);
    Cmd jump;
    jump.kind = Cmd::Kind::Goto;
    jump.then_label = end_l;
    jump.annot.stmt_kind = StmtKind::hidden();
    emit(std::move(jump));

    place_label(else_l);
    if (s.else_block.empty())
      emit_hidden_skip();
    else
      block(s.else_block);

    place_label(end_l);
    emit_hidden_skip();
  }

  void loop(const Stmt &s) {
    if (!s.invariant)
      throw CompileError("loop in '" + fn_.function +
                             "' has no invariant; add `invariant {...}` before the body",
                         s.loc);
    std::string name = fn_.function + "_loop" + std::to_string(fn_.loop_counter++);

    std::set<std::string> inv_pvars;
    for (const auto &a : s.invariant->atoms) {
      if (a.kind != wisl::Atom::Kind::PredApp)
        collect_pvars(a.expr, inv_pvars);
      for (const auto &e : a.args)
        collect_pvars(e, inv_pvars);
    }
    std::set<std::string> known(fn_.vars.begin(), fn_.vars.end());
    for (const auto &v : inv_pvars)
      if (!known.count(v))
        throw CompileError("loop invariant mentions unbound variable '" + v + "'", s.loc);

    LoopInfo info;
    info.function = fn_.function;
    info.loc = s.loc;
    info.invariant = *s.invariant;
    info.binders = s.binders;
    info.guard = s.e1;
    for (const auto &v : assigned_vars(s.then_block))
      info.modified.push_back(v);

    Proc lp;
    lp.name = name;
    lp.params = fn_.vars;
    lp.origin = Proc::Origin::LoopBody;
    lp.loc = s.loc;
    wisl::Assertion pre = *s.invariant;
    wisl::Atom g;
    g.kind = wisl::Atom::Kind::Pure;
    g.expr = s.e1;
    g.loc = s.e1_loc;
    pre.atoms.push_back(g);
    lp.spec = ProcSpec{pre, *s.invariant};
    lp.loop = info;

    ProcBuilder body(fn_);
    Cmd prefix;
    prefix.kind = Cmd::Kind::Skip;
    prefix.annot = {s.loc, StmtKind::loop_prefix(), {}, {}};
    body.emit(std::move(prefix));
    body.block(s.then_block);
    body.bare_return({s.header_loc.valid() ? s.header_loc : s.loc, StmtKind::ret(true), {}, {}});
    lp.body = body.take();
    fn_.extracted.push_back(std::move(lp));

    Cmd call;
    call.kind = Cmd::Kind::Call;
    call.fname = name;
    for (const auto &v : fn_.vars)
      call.args.push_back(Expr::pvar(v));
    call.annot = normal(s.loc, true);
    call.annot.nest_kind = NestKind{NestKind::Kind::LoopBody, name};
    emit(std::move(call));
  }
};

void resolve_labels(Proc &p) {
  std::map<std::string, std::size_t> idx;
  for (std::size_t i = 0; i < p.body.size(); ++i) {
    if (!p.body[i].label)
      continue;
    if (!idx.emplace(*p.body[i].label, i).second)
      throw CompileError("duplicate label '" + *p.body[i].label + "' in " + p.name);
  }
  auto find = [&](const std::string &l) {
    auto it = idx.find(l);
    if (it == idx.end())
      throw CompileError("undefined label '" + l + "' in " + p.name);
    return it->second;
  };
  for (auto &c : p.body) {
    if (c.kind == Cmd::Kind::GuardedGoto) {
      c.then_index = find(c.then_label);
      c.else_index = find(c.else_label);
    } else if (c.kind == Cmd::Kind::Goto) {
      c.then_index = find(c.then_label);
    }
  }
  if (p.body.empty())
    throw CompileError("empty procedure " + p.name);
}

} // namespace

std::size_t Proc::label_index(const std::string &label) const {
  for (std::size_t i = 0; i < body.size(); ++i)
    if (body[i].label == label)
      return i;
  throw CompileError("undefined label '" + label + "' in " + name);
}

const Proc &Program::proc(const std::string &name) const {
  auto it = procs.find(name);
  if (it == procs.end())
    throw CompileError("unknown procedure '" + name + "'");
  return it->second;
}

bool is_builtin(const std::string &name) { return name == "i_add"; }

std::vector<Proc> builtin_procs() {
  Proc p;
  p.name = "i_add";
  p.params = {"a", "b"};
  p.origin = Proc::Origin::Builtin;
  Cmd a;
  a.kind = Cmd::Kind::Assign;
  a.var = "ret";
  a.e1 = Expr::pvar("a") + Expr::pvar("b");
  a.annot.stmt_kind = StmtKind::hidden();
  Cmd r;
  r.kind = Cmd::Kind::Return;
  r.annot.stmt_kind = StmtKind::hidden();
  p.body = {a, r};
  return {p};
}

Program compile(const wisl::Program &src) {
  Program out;
  out.predicates = src.predicates;
  out.lemmas = src.lemmas;
  out.source = src.source;
  out.path = src.path;

  auto add = [&](Proc p) {
    resolve_labels(p);
    std::string name = p.name;
    if (!out.procs.emplace(name, std::move(p)).second)
      throw CompileError("duplicate procedure '" + name + "'");
    out.proc_order.push_back(name);
  };

  for (const auto &name : src.function_order) {
    const wisl::Function &f = src.functions.at(name);
    FunctionContext ctx{src, f.name, function_vars(f.params, f.body), 0, {}};
    ProcBuilder b(ctx);
    b.block(f.body);
    b.ret(f.ret, f.ret_loc);
    Proc p;
    p.name = f.name;
    p.params = f.params;
    p.body = b.take();
    p.origin = Proc::Origin::UserFunction;
    p.loc = f.loc;
    if (f.spec)
      p.spec = ProcSpec{f.spec->pre, f.spec->post};
    add(std::move(p));
    for (auto &lp : ctx.extracted)
      add(std::move(lp));
  }

  for (const auto &name : src.lemma_order) {
    const wisl::Lemma &l = src.lemmas.at(name);
    if (!l.proof)
      continue;
    FunctionContext ctx{src, l.name, function_vars(l.params, *l.proof), 0, {}};
    ProcBuilder b(ctx);
    b.block(*l.proof);
    b.bare_return({l.loc, StmtKind::ret(true), {}, {}});
    Proc p;
    p.name = l.name;
    p.params = l.params;
    p.body = b.take();
    p.origin = Proc::Origin::Lemma;
    p.loc = l.loc;
    p.spec = ProcSpec{l.hypothesis, l.conclusion};
    add(std::move(p));
    for (auto &lp : ctx.extracted)
      add(std::move(lp));
  }

  for (auto &b : builtin_procs()) {
    if (out.procs.count(b.name))
      throw CompileError("function name '" + b.name + "' is reserved");
    add(std::move(b));
  }
  return out;
}

} // namespace swing::gil
