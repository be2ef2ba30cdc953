#include "match.hpp"

#include "swing/wisl/pretty.hpp"

#include <algorithm>

namespace swing::engine::detail {

using sym::SymState;

// ---- trace ----

std::size_t Trace::add(std::string kind, nlohmann::json payload, std::optional<Ref> prev,
                       std::optional<Ref> parent) {
  nodes_.push_back({std::move(kind), std::move(payload), prev, parent});
  return nodes_.size() - 1;
}

ReportId Trace::resolve(const Ref &r) const { return r.local ? ids_.at(r.id) : r.id; }

std::vector<Report> Trace::flush(reports::ReportStore &store) {
  std::vector<Report> out;
  for (auto &n : nodes_) {
    auto prev = resolve(n.prev);
    auto parent = resolve(n.parent);
    ReportId id = store.append(prev, parent, n.kind, n.payload);
    ids_.push_back(id);
    Report r;
    r.id = id;
    r.previous = prev;
    r.parent = parent;
    r.kind = n.kind;
    r.payload = std::move(n.payload);
    out.push_back(std::move(r));
  }
  return out;
}

// ---- helpers ----

namespace {

// Logical variables in order of first appearance.
void ordered_lvars(const Expr &e, std::vector<std::string> &out) {
  if (e.is_lvar()) {
    if (std::find(out.begin(), out.end(), e.name()) == out.end())
      out.push_back(e.name());
    return;
  }
  for (const auto &a : e.args())
    ordered_lvars(a, out);
}

std::vector<Expr> atom_exprs(const wisl::Atom &a) {
  std::vector<Expr> es;
  if (a.kind != wisl::Atom::Kind::PredApp)
    es.push_back(a.expr);
  es.insert(es.end(), a.args.begin(), a.args.end());
  return es;
}

Expr subst_pvars(const Expr &e, const Env &env) {
  return rewrite(e, [&](const Expr &x) -> std::optional<Expr> {
    if (!x.is_pvar())
      return std::nullopt;
    auto it = env.find(x.name());
    if (it == env.end())
      throw sym::UnboundVariable(x.name());
    return it->second;
  });
}

bool intersects(const std::set<std::string> &a, const std::set<std::string> &b) {
  for (const auto &x : a)
    if (b.count(x))
      return true;
  return false;
}

wisl::Assertion rename_lvars(const wisl::Assertion &a, const std::map<std::string, std::string> &m) {
  auto f = [&](const std::string &n) -> std::optional<Expr> {
    auto it = m.find(n);
    if (it == m.end())
      return std::nullopt;
    return Expr::lvar(it->second);
  };
  wisl::Assertion out = a;
  for (auto &atom : out.atoms) {
    if (atom.kind != wisl::Atom::Kind::PredApp)
      atom.expr = subst_lvars(atom.expr, f);
    for (auto &x : atom.args)
      x = subst_lvars(x, f);
  }
  return out;
}

} // namespace

bool has_unbound(const Expr &e, const Bindings &b) {
  if (e.is_lvar())
    return b.unbound(e.name());
  for (const auto &a : e.args())
    if (has_unbound(a, b))
      return true;
  return false;
}

std::set<std::string> lvars_of_assertion(const wisl::Assertion &a) {
  std::set<std::string> out;
  for (const auto &atom : a.atoms)
    for (const auto &e : atom_exprs(atom))
      collect_lvars(e, out);
  return out;
}

std::string describe_instance(const sym::PredInstance &p) { return sym::to_string(p); }

PredTypes infer_pred_types(const std::map<std::string, wisl::Predicate> &preds) {
  const std::vector<TypeName> all = {TypeName::Null, TypeName::Nat, TypeName::Bool, TypeName::Ptr, TypeName::List};
  std::map<std::string, std::vector<std::set<TypeName>>> live;
  for (const auto &[name, p] : preds)
    live[name].assign(p.params.size(), std::set<TypeName>(all.begin(), all.end()));
  auto as_lvar = [](const Expr &e) {
    return rewrite(e, [](const Expr &x) -> std::optional<Expr> {
      if (x.is_pvar())
        return Expr::lvar("#" + x.name() + "%");
      return std::nullopt;
    });
  };
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto &[name, p] : preds) {
      std::vector<std::vector<Expr>> facts; // per case
      for (const auto &c : p.cases) {
        std::vector<Expr> pc;
        for (const auto &a : c.atoms) {
          if (a.kind == wisl::Atom::Kind::Pure) {
            pc.push_back(as_lvar(a.expr));
          } else if (a.kind == wisl::Atom::Kind::PointsTo) {
            pc.push_back(Expr::type_test(as_lvar(a.expr), TypeName::Ptr));
          } else if (live.count(a.pred)) {
            for (std::size_t j = 0; j < a.args.size() && j < live[a.pred].size(); ++j)
              for (auto t : live[a.pred][j])
                pc.push_back(Expr::type_test(as_lvar(a.args[j]), t));
          }
        }
        facts.push_back(std::move(pc));
      }
      for (std::size_t i = 0; i < p.params.size(); ++i) {
        Expr param = Expr::lvar("#" + p.params[i] + "%");
        for (auto it = live[name][i].begin(); it != live[name][i].end();) {
          bool kept = std::all_of(facts.begin(), facts.end(), [&](const std::vector<Expr> &pc) {
            return sym::entails(pc, Expr::type_test(param, *it));
          });
          if (kept) {
            ++it;
          } else {
            it = live[name][i].erase(it);
            changed = true;
          }
        }
      }
    }
  }
  PredTypes out;
  for (const auto &[name, sets] : live)
    for (const auto &ts : sets)
      out[name].push_back(ts.size() == 1 ? std::optional<TypeName>(*ts.begin()) : std::nullopt);
  return out;
}

void Matcher::assume_types(SymState &s, const sym::PredInstance &p) const {
  auto it = types_.find(p.name);
  if (it == types_.end())
    return;
  for (std::size_t i = 0; i < p.args.size() && i < it->second.size(); ++i)
    if (it->second[i])
      s.assume(Expr::type_test(p.args[i], *it->second[i]));
}

nlohmann::json Matcher::snap(const SymState &s) const {
  return snapshots_ ? sym::snapshot(s) : nlohmann::json();
}

Expr Matcher::instantiate(const Expr &e, const Env &env, const Bindings &b) const {
  Expr x = subst_pvars(e, env);
  x = subst_lvars(x, [&](const std::string &n) -> std::optional<Expr> {
    auto it = b.bound.find(n);
    if (it == b.bound.end())
      return std::nullopt;
    return it->second;
  });
  return sym::normalize(x);
}

// ---- produce ----

std::optional<SymState> Matcher::produce(SymState s, const wisl::Assertion &a, Env &env,
                                         const std::set<std::string> &definable, Bindings &b) const {
  auto define_missing = [&](const Expr &e) {
    std::set<std::string> pv;
    collect_pvars(e, pv);
    for (const auto &p : pv)
      if (!env.count(p)) {
        if (!definable.count(p))
          throw sym::UnboundVariable(p);
        env[p] = s.fresh_lvar_expr();
      }
  };
  auto freshen = [&](const Expr &e) {
    std::vector<std::string> names;
    ordered_lvars(e, names);
    for (const auto &n : names)
      if (b.unbound(n))
        b.bound[n] = s.fresh_lvar_expr();
  };
  auto all_env = [&](const Expr &e) {
    std::set<std::string> pv;
    collect_pvars(e, pv);
    return std::all_of(pv.begin(), pv.end(), [&](const std::string &p) { return env.count(p) > 0; });
  };

  for (const auto &atom : a.atoms) {
    switch (atom.kind) {
    case wisl::Atom::Kind::Pure: {
      const Expr &f = atom.expr;
      bool defined = false;
      if (f.is_binary(BinOp::Eq)) {
        for (int side = 0; side < 2 && !defined; ++side) {
          const Expr &lhs = f.arg(side), &rhs = f.arg(1 - side);
          if (lhs.is_pvar() && definable.count(lhs.name()) && !env.count(lhs.name()) && all_env(rhs)) {
            freshen(rhs);
            env[lhs.name()] = instantiate(rhs, env, b);
            defined = true;
          }
        }
      }
      if (defined)
        break;
      define_missing(f);
      freshen(f);
      s.assume(instantiate(f, env, b));
      break;
    }
    case wisl::Atom::Kind::PointsTo: {
      for (const auto &e : atom_exprs(atom)) {
        define_missing(e);
        freshen(e);
      }
      Expr base = instantiate(atom.expr, env, b);
      sym::Loc l;
      try {
        l = sym::resolve(s, base);
      } catch (const sym::MemError &) {
        return std::nullopt;
      }
      auto existing = sym::find_block(s, l.block);
      Expr block = existing.value_or(l.block);
      if (existing && s.heap.freed.count(block))
        return std::nullopt;
      if (!existing) {
        bool lit = block.is_lit();
        if (!lit)
          s.assume(Expr::type_test(block, TypeName::Ptr));
        for (const auto &[other, _] : s.heap.cells)
          if (!(lit && other.is_lit()))
            s.assume(mk_not(mk_eq(other, block)));
      }
      for (std::size_t i = 0; i < atom.args.size(); ++i) {
        auto &cells = s.heap.cells[block];
        std::uint64_t off = l.offset + i;
        if (cells.count(off))
          return std::nullopt; // the same cell twice
        cells[off] = instantiate(atom.args[i], env, b);
      }
      break;
    }
    case wisl::Atom::Kind::PredApp: {
      sym::PredInstance p{atom.pred, {}};
      for (const auto &e : atom.args) {
        define_missing(e);
        freshen(e);
        p.args.push_back(instantiate(e, env, b));
      }
      assume_types(s, p);
      s.preds.push_back(std::move(p));
      break;
    }
    }
  }
  for (const auto &p : definable)
    if (!env.count(p))
      env[p] = s.fresh_lvar_expr();
  if (!s.feasible())
    return std::nullopt;
  return s;
}

// ---- consume ----

MatchResult Matcher::consume(const SymState &s, const wisl::Assertion &a, const Env &env, const Bindings &b,
                             const std::string &title, std::optional<Ref> parent, bool recovery,
                             std::size_t &start_node) {
  nlohmann::json p = {{"target", title}, {"assertion", wisl::pretty_assertion(a)}};
  if (snapshots_)
    p["state"] = snap(s);
  std::size_t start = trace_.add("MatchStart", std::move(p), std::nullopt, parent);
  start_node = start;

  MatchResult r;
  SymState s1 = s;
  Bindings b1 = b;
  auto fail = consume_atoms(s1, a, env, b1, Ref::at(start), parent, std::nullopt);
  if (!fail) {
    r.ok.push_back({std::move(s1), std::move(b1), std::nullopt});
    return r;
  }
  if (recovery) {
    bool labelled_direct = false;
    auto cands = candidates(s, fail->lvars);
    for (std::size_t ci = 0; ci < cands.size(); ++ci) {
      std::size_t idx = cands[ci];
      if (!labelled_direct) {
        // The first atom node follows the MatchStart node directly.
        trace_.payload(start + 1)["case"] = to_json(BranchCase{BranchCase::Kind::Next, 0, "direct"});
        labelled_direct = true;
      }
      std::string tactic = "unfold " + describe_instance(s.preds[idx]);
      auto cases = unfold(s, idx);
      nlohmann::json cases_json = nlohmann::json::array();
      for (const auto &[label, _] : cases)
        cases_json.push_back(to_json(label));
      BranchCase rec_label{BranchCase::Kind::MatchRecovery, static_cast<int>(ci), tactic};
      std::size_t rec = trace_.add("MatchRecoveryStep",
                                   {{"tactic", tactic}, {"case", to_json(rec_label)}, {"cases", cases_json}},
                                   Ref::at(start), parent);
      std::vector<Leaf> leaves;
      bool all_ok = !cases.empty();
      for (auto &[label, cs] : cases) {
        SymState s2 = cs;
        Bindings b2 = b;
        auto f2 = consume_atoms(s2, a, env, b2, Ref::at(rec), parent, label);
        if (f2) {
          all_ok = false;
        } else {
          BranchCase leaf_label{BranchCase::Kind::MatchRecovery, label.index, tactic + ": " + label.text};
          leaves.push_back({std::move(s2), std::move(b2), leaf_label});
        }
      }
      trace_.payload(rec)["success"] = all_ok;
      if (all_ok) {
        r.ok = std::move(leaves);
        return r;
      }
    }
  }
  r.failure = std::move(fail);
  return r;
}

std::optional<Failure> Matcher::consume_atoms(SymState &s, const wisl::Assertion &a, const Env &env, Bindings &b,
                                              Ref prev, std::optional<Ref> parent,
                                              const std::optional<BranchCase> &label) {
  Ref cur = prev;
  bool first = true;
  for (const auto &atom : a.atoms) {
    nlohmann::json p = {{"atom", wisl::atom_text(atom)}};
    if (first && label)
      p["case"] = to_json(*label);
    if (atom.loc.valid())
      p["source_loc"] = {{"start", {atom.loc.start_line, atom.loc.start_col}},
                         {"end", {atom.loc.end_line, atom.loc.end_col}}};
    std::size_t node = trace_.add("MatchAtom", std::move(p), cur, parent);
    first = false;
    cur = Ref::at(node);
    AtomResult r;
    try {
      r = consume_atom(s, atom, env, b, node);
    } catch (const sym::UnboundVariable &e) {
      r = {false, e.what(), {}};
    } catch (const sym::MemError &e) {
      r = {false, e.what(), {}};
    }
    auto &pl = trace_.payload(node);
    pl["success"] = r.ok;
    if (!r.ok) {
      pl["message"] = r.message;
      if (snapshots_)
        pl["state"] = snap(s);
      Failure f{wisl::atom_text(atom), std::nullopt, r.message, r.lvars};
      if (atom.loc.valid())
        f.loc = atom.loc;
      return f;
    }
  }
  return std::nullopt;
}

Matcher::AtomResult Matcher::consume_atom(SymState &s, const wisl::Atom &a, const Env &env, Bindings &b,
                                          std::size_t node) {
  AtomResult r;
  switch (a.kind) {
  case wisl::Atom::Kind::Pure: {
    Expr f = instantiate(a.expr, env, b);
    r.lvars = lvars_of(f);
    if (has_unbound(f, b)) {
      if (f.is_binary(BinOp::Eq)) {
        for (int side = 0; side < 2; ++side) {
          const Expr &x = f.arg(side), &y = f.arg(1 - side);
          if (x.is_lvar() && b.unbound(x.name()) && !has_unbound(y, b)) {
            b.bound[x.name()] = y;
            trace_.payload(node)["binds"] = {{x.name(), wisl::pretty_expr(y)}};
            return r;
          }
        }
      }
      std::vector<std::string> names;
      ordered_lvars(f, names);
      std::string which;
      for (const auto &n : names)
        if (b.unbound(n)) {
          which = n;
          break;
        }
      return {false, "cannot determine " + which + " in " + wisl::pretty_expr(f), r.lvars};
    }
    if (s.entails(f))
      return r;
    return {false, "cannot prove " + wisl::pretty_expr(f), r.lvars};
  }
  case wisl::Atom::Kind::PointsTo: {
    Expr base = instantiate(a.expr, env, b);
    r.lvars = lvars_of(base);
    if (has_unbound(base, b))
      return {false, "address " + wisl::pretty_expr(base) + " is not determined", r.lvars};
    sym::Loc l = sym::resolve(s, base);
    auto blk = sym::find_block(s, l.block);
    if (!blk || s.heap.freed.count(*blk) || !s.heap.cells.count(*blk))
      return {false, "no cell owned at " + wisl::pretty_expr(base), r.lvars};
    auto &cells = s.heap.cells.at(*blk);
    nlohmann::json binds = nlohmann::json::object();
    for (std::size_t i = 0; i < a.args.size(); ++i) {
      std::uint64_t off = l.offset + i;
      Expr c = instantiate(a.args[i], env, b);
      collect_lvars(c, r.lvars);
      if (!cells.count(off))
        return {false, "no cell owned at " + wisl::pretty_expr(sym::normalize(base + Expr::nat(i))), r.lvars};
      const Expr &v = cells.at(off);
      collect_lvars(v, r.lvars);
      if (c.is_lvar() && b.unbound(c.name())) {
        b.bound[c.name()] = v;
        binds[c.name()] = wisl::pretty_expr(v);
      } else if (has_unbound(c, b)) {
        return {false, "cannot determine " + wisl::pretty_expr(c), r.lvars};
      } else if (!(c == v) && !s.entails(mk_eq(c, v))) {
        return {false, "cell value " + wisl::pretty_expr(v) + " does not match " + wisl::pretty_expr(c), r.lvars};
      }
    }
    for (std::size_t i = 0; i < a.args.size(); ++i)
      cells.erase(l.offset + i);
    if (cells.empty())
      s.heap.cells.erase(*blk);
    if (!binds.empty())
      trace_.payload(node)["binds"] = binds;
    return r;
  }
  case wisl::Atom::Kind::PredApp: {
    std::vector<Expr> args;
    for (const auto &e : a.args)
      args.push_back(instantiate(e, env, b));
    return consume_pred(s, a, args, b, node);
  }
  }
  return r;
}

Matcher::AtomResult Matcher::consume_pred(SymState &s, const wisl::Atom &a, const std::vector<Expr> &args,
                                          Bindings &b, std::size_t node) {
  AtomResult r;
  for (const auto &x : args)
    collect_lvars(x, r.lvars);
  for (std::size_t j = 0; j < s.preds.size(); ++j) {
    const auto &inst = s.preds[j];
    if (inst.name != a.pred || inst.args.size() != args.size())
      continue;
    bool ok = true;
    for (std::size_t k = 0; k < args.size() && ok; ++k) {
      const Expr &x = args[k];
      if (x.is_lvar() && b.unbound(x.name()))
        continue;
      if (has_unbound(x, b))
        ok = false;
      else if (!(x == inst.args[k]) && !s.entails(mk_eq(x, inst.args[k])))
        ok = false;
    }
    if (!ok)
      continue;
    nlohmann::json binds = nlohmann::json::object();
    for (std::size_t k = 0; k < args.size(); ++k)
      if (args[k].is_lvar() && b.unbound(args[k].name())) {
        b.bound[args[k].name()] = inst.args[k];
        binds[args[k].name()] = wisl::pretty_expr(inst.args[k]);
      }
    for (const auto &x : inst.args)
      collect_lvars(x, r.lvars);
    s.preds.erase(s.preds.begin() + static_cast<std::ptrdiff_t>(j));
    if (!binds.empty())
      trace_.payload(node)["binds"] = binds;
    return r;
  }
  sym::PredInstance want{a.pred, args};
  if (mode_ == Mode::Auto && fold_depth_ < 8) {
    trace_.payload(node)["action"] = "fold";
    auto folded = fold_body(s, a.pred, args, b, Ref::at(node));
    if (folded) {
      s = std::move(folded->first);
      b = std::move(folded->second);
      return r;
    }
    return {false, "no instance of " + describe_instance(want) + " and folding failed", r.lvars};
  }
  return {false, "no instance of " + describe_instance(want), r.lvars};
}

std::optional<std::pair<SymState, Bindings>> Matcher::fold_body(const SymState &s, const std::string &pname,
                                                                const std::vector<Expr> &args, const Bindings &b,
                                                                Ref parent) {
  const auto &pred = prog_.predicates.at(pname);
  ++fold_depth_;
  for (std::size_t i = 0; i < pred.cases.size(); ++i) {
    std::map<std::string, std::string> ren;
    for (const auto &n : lvars_of_assertion(pred.cases[i]))
      ren[n] = n + "'" + std::to_string(renames_++);
    wisl::Assertion body = rename_lvars(pred.cases[i], ren);
    Env env;
    for (std::size_t k = 0; k < pred.params.size(); ++k)
      env[pred.params[k]] = args[k];
    Bindings b2 = b;
    for (const auto &[_, n] : ren)
      b2.pattern.insert(n);
    std::size_t start = 0;
    auto r = consume(s, body, env, b2, "fold " + pname + " case " + std::to_string(i + 1), parent, false, start);
    if (!r.ok.empty()) {
      Bindings out = b;
      for (const auto &[k, v] : r.ok[0].b.bound)
        if (b.pattern.count(k))
          out.bound[k] = v;
      --fold_depth_;
      return std::make_pair(std::move(r.ok[0].state), std::move(out));
    }
  }
  --fold_depth_;
  return std::nullopt;
}

MatchResult Matcher::fold(const SymState &s, const std::string &pname, const std::vector<Expr> &args,
                          std::optional<Ref> parent) {
  const auto &pred = prog_.predicates.at(pname);
  MatchResult out;
  Failure last;
  ++fold_depth_;
  for (std::size_t i = 0; i < pred.cases.size(); ++i) {
    std::map<std::string, std::string> ren;
    for (const auto &n : lvars_of_assertion(pred.cases[i]))
      ren[n] = n + "'" + std::to_string(renames_++);
    wisl::Assertion body = rename_lvars(pred.cases[i], ren);
    Env env;
    for (std::size_t k = 0; k < pred.params.size(); ++k)
      env[pred.params[k]] = args[k];
    Bindings b;
    for (const auto &[_, n] : ren)
      b.pattern.insert(n);
    std::size_t start = 0;
    auto r = consume(s, body, env, b, "fold " + pname + " case " + std::to_string(i + 1), parent, false, start);
    if (!r.ok.empty()) {
      SymState st = std::move(r.ok[0].state);
      sym::PredInstance inst{pname, args};
      assume_types(st, inst);
      st.preds.push_back(std::move(inst));
      out.ok.push_back({std::move(st), Bindings{}, std::nullopt});
      --fold_depth_;
      return out;
    }
    last = *r.failure;
  }
  --fold_depth_;
  out.failure = last;
  return out;
}

std::vector<std::pair<BranchCase, SymState>> Matcher::unfold(const SymState &s, std::size_t instance) const {
  const auto inst = s.preds.at(instance);
  const auto &pred = prog_.predicates.at(inst.name);
  SymState base = s;
  base.preds.erase(base.preds.begin() + static_cast<std::ptrdiff_t>(instance));
  std::vector<std::pair<BranchCase, SymState>> out;
  for (std::size_t i = 0; i < pred.cases.size(); ++i) {
    Env env;
    for (std::size_t k = 0; k < pred.params.size(); ++k)
      env[pred.params[k]] = inst.args[k];
    Bindings b;
    b.pattern = lvars_of_assertion(pred.cases[i]);
    auto r = produce(base, pred.cases[i], env, {}, b);
    if (r)
      out.emplace_back(BranchCase{BranchCase::Kind::PredCase, static_cast<int>(i),
                                  wisl::pretty_assertion(pred.cases[i])},
                       std::move(*r));
  }
  return out;
}

std::optional<std::size_t> Matcher::find_instance(const SymState &s, const std::string &pname,
                                                  const std::vector<Expr> &args) const {
  for (std::size_t j = 0; j < s.preds.size(); ++j) {
    const auto &p = s.preds[j];
    if (p.name != pname || p.args.size() != args.size())
      continue;
    bool ok = true;
    for (std::size_t k = 0; k < args.size() && ok; ++k)
      ok = args[k] == p.args[k] || s.entails(mk_eq(args[k], p.args[k]));
    if (ok)
      return j;
  }
  return std::nullopt;
}

std::vector<std::size_t> Matcher::candidates(const SymState &s, const std::set<std::string> &lvars) const {
  std::set<std::string> reach = lvars;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto &f : s.pc) {
      auto l = lvars_of(f);
      if (intersects(l, reach))
        for (const auto &x : l)
          changed |= reach.insert(x).second;
    }
  }
  std::vector<std::size_t> direct, linked;
  for (std::size_t j = 0; j < s.preds.size(); ++j) {
    std::set<std::string> a;
    for (const auto &x : s.preds[j].args)
      collect_lvars(x, a);
    if (intersects(a, lvars))
      direct.push_back(j);
    else if (intersects(a, reach))
      linked.push_back(j);
  }
  direct.insert(direct.end(), linked.begin(), linked.end());
  return direct;
}

} // namespace swing::engine::detail
