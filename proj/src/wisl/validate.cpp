#include "swing/wisl/parser.hpp"

#include <set>

namespace swing::wisl {

namespace {

using LVarSet = std::set<std::string>;

class Validator {
public:
  explicit Validator(const Program &p) : p_(p) {}

  std::vector<Diagnostic> run() {
    for (const auto &[name, pred] : p_.predicates) {
      std::set<std::string> params(pred.params.begin(), pred.params.end());
      for (const auto &c : pred.cases)
        assertion(c, params, pred.loc);
    }
    for (const auto &name : p_.lemma_order) {
      const Lemma &l = p_.lemmas.at(name);
      std::set<std::string> params(l.params.begin(), l.params.end());
      assertion(l.hypothesis, params, l.loc);
      assertion(l.conclusion, params, l.loc);
      if (l.proof) {
        fvars_ = params;
        assigned_vars(*l.proof, fvars_);
        LVarSet scope = lvars_of_assertion(l.hypothesis);
        block(*l.proof, scope, l.loc);
      }
    }
    for (const auto &name : p_.function_order)
      function(p_.functions.at(name));
    return std::move(diags_);
  }

private:
  const Program &p_;
  std::vector<Diagnostic> diags_;

  void error(std::string msg, const SourceLoc &loc) {
    diags_.push_back({Diagnostic::Severity::Error, std::move(msg), loc});
  }

  static LVarSet lvars_of_assertion(const Assertion &a) {
    LVarSet out;
    for (const auto &at : a.atoms) {
      if (at.kind != Atom::Kind::PredApp)
        collect_lvars(at.expr, out);
      for (const auto &e : at.args)
        collect_lvars(e, out);
    }
    return out;
  }

  void pvars_in_scope(const Expr &e, const std::set<std::string> &allowed, const SourceLoc &loc) {
    std::set<std::string> pv;
    collect_pvars(e, pv);
    for (const auto &v : pv)
      if (!allowed.count(v))
        error("unbound program variable '" + v + "'", loc);
  }

  void assertion(const Assertion &a, const std::set<std::string> &pvars, const SourceLoc &ctx) {
    for (const auto &at : a.atoms) {
      const SourceLoc &loc = at.loc.valid() ? at.loc : ctx;
      if (at.kind == Atom::Kind::PredApp) {
        auto it = p_.predicates.find(at.pred);
        if (it == p_.predicates.end())
          error("unknown predicate '" + at.pred + "'", loc);
        else if (it->second.params.size() != at.args.size())
          error("predicate '" + at.pred + "' expects " +
                    std::to_string(it->second.params.size()) + " arguments, got " +
                    std::to_string(at.args.size()),
                loc);
      } else {
        pvars_in_scope(at.expr, pvars, loc);
      }
      if (at.kind == Atom::Kind::PointsTo && at.args.empty())
        error("points-to assertion without cells", loc);
      for (const auto &e : at.args)
        pvars_in_scope(e, pvars, loc);
    }
  }

  void function(const Function &f) {
    std::set<std::string> params(f.params.begin(), f.params.end());
    if (params.size() != f.params.size())
      error("duplicate parameter in function '" + f.name + "'", f.loc);
    LVarSet scope;
    if (f.spec) {
      assertion(f.spec->pre, params, f.spec->pre_loc);
      auto post_vars = params;
      post_vars.insert("ret");
      assertion(f.spec->post, post_vars, f.spec->post_loc);
      scope = lvars_of_assertion(f.spec->pre);
    }
    fvars_ = params;
    assigned_vars(f.body, fvars_);
    block(f.body, scope, f.loc);
    executable(f.ret, f.ret_loc);
  }

  void executable(const Expr &e, const SourceLoc &loc) {
    LVarSet lv;
    collect_lvars(e, lv);
    for (const auto &v : lv)
      error("logical variable '" + v + "' in executable code", loc);
  }

  void tactic_lvars(const LVarSet &used, const LVarSet &scope, const SourceLoc &loc) {
    for (const auto &v : used)
      if (!scope.count(v))
        error("logical variable '" + v + "' is not in scope", loc);
  }

  void block(const Block &b, LVarSet &scope, const SourceLoc &ctx) {
    for (const auto &s : b)
      stmt(s, scope, ctx);
  }

  void stmt(const Stmt &s, LVarSet &scope, const SourceLoc &ctx) {
    const SourceLoc &loc = s.loc.valid() ? s.loc : ctx;
    switch (s.kind) {
    case Stmt::Kind::Skip:
      break;
    case Stmt::Kind::Assign:
    case Stmt::Kind::Lookup:
    case Stmt::Kind::Alloc:
    case Stmt::Kind::Dealloc:
      executable(s.e1, loc);
      break;
    case Stmt::Kind::Mutate:
      executable(s.e1, loc);
      executable(s.e2, loc);
      break;
    case Stmt::Kind::FunCall: {
      for (const auto &a : s.args)
        executable(a, loc);
      auto it = p_.functions.find(s.fname);
      if (it == p_.functions.end())
        error("call to undefined function '" + s.fname + "'", loc);
      else if (it->second.params.size() != s.args.size())
        error("function '" + s.fname + "' expects " +
                  std::to_string(it->second.params.size()) + " arguments, got " +
                  std::to_string(s.args.size()),
              loc);
      break;
    }
    case Stmt::Kind::IfElse: {
      executable(s.e1, loc);
      LVarSet t = scope, e = scope;
      block(s.then_block, t, ctx);
      block(s.else_block, e, ctx);
      break;
    }
    case Stmt::Kind::While: {
      executable(s.e1, loc);
      if (!s.invariant) {
        error("loop without invariant", loc);
      } else {
        assertion(*s.invariant, fvars_, loc);
        for (const auto &b : s.binders)
          scope.insert(b);
        LVarSet inv = lvars_of_assertion(*s.invariant);
        for (const auto &v : inv)
          if (!scope.count(v))
            error("logical variable '" + v + "' in invariant must be bound", loc);
      }
      LVarSet body = scope;
      block(s.then_block, body, ctx);
      break;
    }
    case Stmt::Kind::Tactic:
      tactic(s.tactic, scope, loc);
      break;
    }
  }

  std::set<std::string> fvars_; // every variable of the current function

  static void assigned_vars(const Block &b, std::set<std::string> &out) {
    for (const auto &s : b) {
      if (!s.var.empty())
        out.insert(s.var);
      assigned_vars(s.then_block, out);
      assigned_vars(s.else_block, out);
    }
  }

  void tactic(const LogicCmd &c, LVarSet &scope, const SourceLoc &loc) {
    switch (c.kind) {
    case LogicCmd::Kind::Fold:
    case LogicCmd::Kind::Unfold: {
      auto it = p_.predicates.find(c.name);
      if (it == p_.predicates.end())
        error("unknown predicate '" + c.name + "'", loc);
      else if (it->second.params.size() != c.args.size())
        error("predicate '" + c.name + "' expects " + std::to_string(it->second.params.size()) +
                  " arguments, got " + std::to_string(c.args.size()),
              loc);
      LVarSet used;
      for (const auto &a : c.args)
        collect_lvars(a, used);
      tactic_lvars(used, scope, loc);
      break;
    }
    case LogicCmd::Kind::ApplyLemma: {
      auto it = p_.lemmas.find(c.name);
      if (it == p_.lemmas.end())
        error("unknown lemma '" + c.name + "'", loc);
      else if (it->second.params.size() != c.args.size())
        error("lemma '" + c.name + "' expects " + std::to_string(it->second.params.size()) +
                  " arguments, got " + std::to_string(c.args.size()),
              loc);
      LVarSet used;
      for (const auto &a : c.args)
        collect_lvars(a, used);
      tactic_lvars(used, scope, loc);
      break;
    }
    case LogicCmd::Kind::AssertBind: {
      for (const auto &at : c.assertion.atoms) {
        if (at.kind != Atom::Kind::PredApp)
          continue;
        auto it = p_.predicates.find(at.pred);
        if (it == p_.predicates.end())
          error("unknown predicate '" + at.pred + "'", loc);
        else if (it->second.params.size() != at.args.size())
          error("predicate '" + at.pred + "' expects " +
                    std::to_string(it->second.params.size()) + " arguments, got " +
                    std::to_string(at.args.size()),
                loc);
      }
      for (const auto &b : c.binders) {
        if (scope.count(b))
          error("binder '" + b + "' is already bound", loc);
        scope.insert(b);
      }
      LVarSet used = lvars_of_assertion(c.assertion);
      tactic_lvars(used, scope, loc);
      break;
    }
    }
  }
};

} // namespace

std::vector<Diagnostic> validate(const Program &p) { return Validator(p).run(); }

} // namespace swing::wisl
