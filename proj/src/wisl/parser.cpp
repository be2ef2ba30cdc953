#include "swing/wisl/parser.hpp"

#include "lexer.hpp"

#include <set>

namespace swing::wisl {

using detail::Tok;
using detail::Token;

namespace {

bool is_keyword(const std::string &s) {
  static const std::set<std::string> kw = {
      "skip",  "if",       "else",  "while",  "return", "function", "predicate",
      "lemma", "new",      "free",  "null",   "true",   "false",    "nil",
      "len",   "not",      "and",   "or",     "is",     "invariant", "fold",
      "unfold", "assert",  "apply", "emp",    "bind",   "hypothesis", "conclusion",
      "proof"};
  return kw.count(s) > 0;
}

class Parser {
public:
  Parser(std::string_view text, std::vector<Token> toks) : text_(text), toks_(std::move(toks)) {}

  Program program() {
    Program p;
    p.source = std::string(text_);
    while (!at_end()) {
      if (is_ident("predicate")) {
        auto pred = predicate();
        if (p.predicates.count(pred.name))
          duplicates_.push_back({Diagnostic::Severity::Error,
                                 "duplicate predicate '" + pred.name + "'", pred.loc});
        p.predicates.emplace(pred.name, std::move(pred));
      } else if (is_ident("lemma")) {
        auto lem = lemma();
        if (p.lemmas.count(lem.name))
          duplicates_.push_back(
              {Diagnostic::Severity::Error, "duplicate lemma '" + lem.name + "'", lem.loc});
        else
          p.lemma_order.push_back(lem.name);
        p.lemmas.emplace(lem.name, std::move(lem));
      } else if (is_punct("{") || is_ident("function")) {
        auto fn = function();
        if (p.functions.count(fn.name))
          duplicates_.push_back(
              {Diagnostic::Severity::Error, "duplicate function '" + fn.name + "'", fn.loc});
        else
          p.function_order.push_back(fn.name);
        p.functions.emplace(fn.name, std::move(fn));
      } else {
        fail("expected 'function', 'predicate' or 'lemma'");
      }
    }
    return p;
  }

  Expr standalone_expr() {
    Expr e = expr(true);
    if (!at_end())
      fail("unexpected trailing input");
    return e;
  }

  Assertion standalone_assertion() {
    Assertion a = assertion();
    if (!at_end())
      fail("unexpected trailing input");
    return a;
  }

  std::vector<Diagnostic> duplicates_;

private:
  std::string_view text_;
  std::vector<Token> toks_;
  std::size_t i_ = 0;

  const Token &peek(std::size_t k = 0) const {
    return toks_[std::min(i_ + k, toks_.size() - 1)];
  }
  bool at_end() const { return peek().kind == Tok::End; }
  bool is_punct(std::string_view s, std::size_t k = 0) const {
    return peek(k).kind == Tok::Punct && peek(k).text == s;
  }
  bool is_ident(std::string_view s, std::size_t k = 0) const {
    return peek(k).kind == Tok::Ident && peek(k).text == s;
  }
  [[noreturn]] void fail(const std::string &msg) const {
    const Token &t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(msg + ", found " + found, t.loc);
  }
  const Token &next() { return toks_[std::min(i_++, toks_.size() - 1)]; }
  void expect_punct(std::string_view s) {
    if (!is_punct(s))
      fail("expected '" + std::string(s) + "'");
    ++i_;
  }
  void expect_ident(std::string_view s) {
    if (!is_ident(s))
      fail("expected '" + std::string(s) + "'");
    ++i_;
  }
  std::string name() {
    if (peek().kind != Tok::Ident || is_keyword(peek().text))
      fail("expected identifier");
    return next().text;
  }
  std::string lvar_name() {
    if (peek().kind != Tok::LVar)
      fail("expected logical variable");
    return next().text;
  }

  SourceLoc span(const SourceLoc &from, const SourceLoc &to) const {
    SourceLoc l = from;
    l.end_line = to.end_line;
    l.end_col = to.end_col;
    l.end = to.end;
    return l;
  }
  const SourceLoc &prev_loc() const { return toks_[i_ == 0 ? 0 : i_ - 1].loc; }

  std::vector<std::string> params() {
    std::vector<std::string> ps;
    expect_punct("(");
    if (!is_punct(")")) {
      do {
        if (is_punct("+"))
          ++i_; // in-parameter marker
        ps.push_back(name());
      } while (is_punct(",") && (++i_, true));
    }
    expect_punct(")");
    return ps;
  }

  std::vector<Expr> args() {
    std::vector<Expr> as;
    expect_punct("(");
    if (!is_punct(")")) {
      do {
        as.push_back(expr(true));
      } while (is_punct(",") && (++i_, true));
    }
    expect_punct(")");
    return as;
  }

  std::vector<std::string> binders() {
    std::vector<std::string> bs;
    if (!(is_punct("[") && is_ident("bind", 1)))
      return bs;
    i_ += 2;
    expect_punct(":");
    do {
      bs.push_back(lvar_name());
    } while (is_punct(",") && (++i_, true));
    expect_punct("]");
    return bs;
  }

  Predicate predicate() {
    SourceLoc start = peek().loc;
    expect_ident("predicate");
    Predicate p;
    p.name = name();
    p.params = params();
    expect_punct("{");
    do {
      if (is_punct("}"))
        break;
      p.cases.push_back(assertion());
    } while (is_punct(";") && (++i_, true));
    expect_punct("}");
    p.loc = span(start, prev_loc());
    if (p.cases.empty())
      throw ParseError("predicate '" + p.name + "' has no cases", p.loc);
    return p;
  }

  Lemma lemma() {
    SourceLoc start = peek().loc;
    expect_ident("lemma");
    Lemma l;
    l.name = name();
    l.params = params();
    expect_punct("{");
    expect_ident("hypothesis");
    expect_punct(":");
    l.hypothesis = assertion();
    if (is_punct(";"))
      ++i_;
    expect_ident("conclusion");
    expect_punct(":");
    l.conclusion = assertion();
    if (is_punct(";"))
      ++i_;
    if (is_ident("proof")) {
      ++i_;
      expect_punct(":");
      l.proof = block();
      if (is_punct(";"))
        ++i_;
    }
    expect_punct("}");
    l.loc = span(start, prev_loc());
    return l;
  }

  Function function() {
    Function f;
    std::optional<Assertion> pre;
    SourceLoc pre_loc;
    SourceLoc start = peek().loc;
    if (is_punct("{")) {
      pre_loc = peek().loc;
      ++i_;
      pre = assertion();
      expect_punct("}");
      pre_loc = span(pre_loc, prev_loc());
    }
    SourceLoc fstart = peek().loc;
    expect_ident("function");
    f.name = name();
    f.params = params();
    expect_punct("{");
    while (!is_ident("return")) {
      f.body.push_back(stmt());
      if (is_punct(";")) {
        ++i_;
      } else if (prev_loc().end > 0 && text_[prev_loc().end - 1] == '}') {
        // block statements may omit the separator
      } else {
        fail("expected ';'");
      }
    }
    SourceLoc rstart = peek().loc;
    expect_ident("return");
    f.ret = expr(true);
    f.ret_loc = span(rstart, prev_loc());
    if (is_punct(";"))
      ++i_;
    expect_punct("}");
    f.loc = span(fstart, prev_loc());
    if (pre) {
      if (!is_punct("{"))
        fail("expected post-condition after function with a pre-condition");
      SourceLoc post_loc = peek().loc;
      ++i_;
      Assertion post = assertion();
      expect_punct("}");
      f.spec = Spec{*pre, std::move(post), pre_loc, span(post_loc, prev_loc())};
    }
    (void)start;
    return f;
  }

  Block block() {
    Block b;
    expect_punct("{");
    while (!is_punct("}")) {
      b.push_back(stmt());
      if (is_punct(";"))
        ++i_;
      else if (!is_punct("}") && text_[prev_loc().end - 1] != '}')
        fail("expected ';' or '}'");
    }
    expect_punct("}");
    if (b.empty())
      throw ParseError("empty block", prev_loc());
    return b;
  }

  Stmt stmt() {
    SourceLoc start = peek().loc;
    Stmt s;
    if (is_ident("skip")) {
      ++i_;
      s.kind = Stmt::Kind::Skip;
    } else if (is_ident("if")) {
      ++i_;
      s.kind = Stmt::Kind::IfElse;
      expect_punct("(");
      s.e1_loc = peek().loc;
      s.e1 = expr(true);
      s.e1_loc = span(s.e1_loc, prev_loc());
      expect_punct(")");
      s.header_loc = span(start, prev_loc());
      s.then_block = block();
      if (is_ident("else")) {
        ++i_;
        s.else_block = block();
      }
    } else if (is_ident("while")) {
      ++i_;
      s.kind = Stmt::Kind::While;
      expect_punct("(");
      s.e1_loc = peek().loc;
      s.e1 = expr(true);
      s.e1_loc = span(s.e1_loc, prev_loc());
      expect_punct(")");
      s.header_loc = span(start, prev_loc());
      if (is_ident("invariant")) {
        ++i_;
        expect_punct("{");
        s.invariant = assertion();
        expect_punct("}");
        s.binders = binders();
      }
      s.then_block = block();
    } else if (is_punct("[") && is_punct("[", 1)) {
      i_ += 2;
      s.kind = Stmt::Kind::Tactic;
      s.tactic = logic_cmd();
      expect_punct("]");
      expect_punct("]");
    } else if (is_punct("[")) {
      ++i_;
      s.kind = Stmt::Kind::Mutate;
      s.e1_loc = peek().loc;
      s.e1 = expr(true);
      s.e1_loc = span(s.e1_loc, prev_loc());
      expect_punct("]");
      expect_punct(":=");
      s.e2 = expr(true);
    } else if (is_ident("free")) {
      ++i_;
      s.kind = Stmt::Kind::Dealloc;
      expect_punct("(");
      s.e1_loc = peek().loc;
      s.e1 = expr(true);
      s.e1_loc = span(s.e1_loc, prev_loc());
      expect_punct(")");
    } else {
      s.var = name();
      expect_punct(":=");
      if (is_punct("[")) {
        ++i_;
        s.kind = Stmt::Kind::Lookup;
        s.e1_loc = peek().loc;
        s.e1 = expr(true);
        s.e1_loc = span(s.e1_loc, prev_loc());
        expect_punct("]");
      } else if (is_ident("new") && is_punct("(", 1)) {
        ++i_;
        s.kind = Stmt::Kind::Alloc;
        expect_punct("(");
        s.e1 = expr(true);
        expect_punct(")");
      } else if (peek().kind == Tok::Ident && !is_keyword(peek().text) && is_punct("(", 1)) {
        s.kind = Stmt::Kind::FunCall;
        s.fname = next().text;
        s.args = args();
      } else {
        s.kind = Stmt::Kind::Assign;
        s.e1_loc = peek().loc;
        s.e1 = expr(true);
        s.e1_loc = span(s.e1_loc, prev_loc());
      }
    }
    s.loc = span(start, prev_loc());
    return s;
  }

  LogicCmd logic_cmd() {
    LogicCmd c;
    if (is_ident("fold") || is_ident("unfold") || is_ident("apply")) {
      std::string kw = next().text;
      c.kind = kw == "fold" ? LogicCmd::Kind::Fold
                            : (kw == "unfold" ? LogicCmd::Kind::Unfold : LogicCmd::Kind::ApplyLemma);
      c.name = name();
      c.args = args();
    } else if (is_ident("assert")) {
      ++i_;
      c.kind = LogicCmd::Kind::AssertBind;
      expect_punct("{");
      c.assertion = assertion();
      expect_punct("}");
      c.binders = binders();
    } else {
      fail("expected 'fold', 'unfold', 'assert' or 'apply'");
    }
    return c;
  }

  // ---- assertions ----

  Assertion assertion() {
    Assertion a;
    atom_into(a);
    while (is_punct("*")) {
      ++i_;
      atom_into(a);
    }
    return a;
  }

  void atom_into(Assertion &out) {
    SourceLoc start = peek().loc;
    if (is_ident("emp")) {
      ++i_;
      return;
    }
    if (peek().kind == Tok::Ident && !is_keyword(peek().text) && is_punct("(", 1)) {
      Atom at;
      at.kind = Atom::Kind::PredApp;
      at.pred = next().text;
      at.args = args();
      at.loc = span(start, prev_loc());
      out.atoms.push_back(std::move(at));
      return;
    }
    std::size_t save = i_;
    try {
      Expr e = expr(false);
      if (is_punct("->")) {
        ++i_;
        Atom at;
        at.kind = Atom::Kind::PointsTo;
        at.expr = e;
        do {
          at.args.push_back(expr(false));
        } while (is_punct(",") && (++i_, true));
        at.loc = span(start, prev_loc());
        out.atoms.push_back(std::move(at));
        return;
      }
      if (!(is_punct("*") || is_punct(")") || is_punct("}") || is_punct(";") ||
            is_punct("]") || at_end() || is_ident("conclusion") || is_ident("proof")))
        fail("unexpected token in assertion");
      Atom at;
      at.kind = Atom::Kind::Pure;
      at.expr = e;
      at.loc = span(start, prev_loc());
      out.atoms.push_back(std::move(at));
      return;
    } catch (const ParseError &) {
      i_ = save;
      if (!is_punct("("))
        throw;
    }
    ++i_;
    Assertion inner = assertion();
    expect_punct(")");
    for (auto &a : inner.atoms)
      out.atoms.push_back(std::move(a));
  }

  // ---- expressions ----

  Expr expr(bool allow_star) { return or_expr(allow_star); }

  Expr or_expr(bool st) {
    Expr e = and_expr(st);
    while (is_ident("or") || is_punct("||")) {
      ++i_;
      e = Expr::binary(BinOp::Or, e, and_expr(st));
    }
    return e;
  }

  Expr and_expr(bool st) {
    Expr e = not_expr(st);
    while (is_ident("and") || is_punct("&&")) {
      ++i_;
      e = Expr::binary(BinOp::And, e, not_expr(st));
    }
    return e;
  }

  Expr not_expr(bool st) {
    if (is_ident("not") || is_punct("!")) {
      ++i_;
      return mk_not(not_expr(st));
    }
    return cmp_expr(st);
  }

  Expr cmp_expr(bool st) {
    Expr l = concat_expr(st);
    if (is_ident("is")) {
      ++i_;
      auto t = type_name_from_string(peek().kind == Tok::Ident ? peek().text : "");
      if (!t)
        fail("expected type name");
      ++i_;
      return Expr::type_test(l, *t);
    }
    if (peek().kind != Tok::Punct)
      return l;
    const std::string op = peek().text;
    if (op == "==" || op == "=") {
      ++i_;
      return mk_eq(l, concat_expr(st));
    }
    if (op == "!=") {
      ++i_;
      return mk_not(mk_eq(l, concat_expr(st)));
    }
    if (op == "<") {
      ++i_;
      return Expr::binary(BinOp::Lt, l, concat_expr(st));
    }
    if (op == "<=") {
      ++i_;
      return Expr::binary(BinOp::Le, l, concat_expr(st));
    }
    if (op == ">") {
      ++i_;
      return Expr::binary(BinOp::Lt, concat_expr(st), l);
    }
    if (op == ">=") {
      ++i_;
      return Expr::binary(BinOp::Le, concat_expr(st), l);
    }
    return l;
  }

  Expr concat_expr(bool st) {
    Expr e = cons_expr(st);
    while (is_punct("@")) {
      ++i_;
      e = Expr::binary(BinOp::Concat, e, cons_expr(st));
    }
    return e;
  }

  Expr cons_expr(bool st) {
    Expr e = add_expr(st);
    if (is_punct("::")) {
      ++i_;
      return Expr::binary(BinOp::Cons, e, cons_expr(st));
    }
    return e;
  }

  Expr add_expr(bool st) {
    Expr e = mul_expr(st);
    while (is_punct("+") || is_punct("-")) {
      BinOp op = next().text == "+" ? BinOp::Add : BinOp::Sub;
      e = Expr::binary(op, e, mul_expr(st));
    }
    return e;
  }

  Expr mul_expr(bool st) {
    Expr e = unary_expr(st);
    while (st && is_punct("*")) {
      ++i_;
      e = Expr::binary(BinOp::Mul, e, unary_expr(st));
    }
    return e;
  }

  Expr unary_expr(bool st) {
    if (is_punct("-")) {
      ++i_;
      return Expr::unary(UnOp::Neg, unary_expr(st));
    }
    return primary();
  }

  Expr primary() {
    const Token &t = peek();
    switch (t.kind) {
    case Tok::Number:
      ++i_;
      try {
        return Expr::nat(std::stoull(t.text));
      } catch (const std::exception &) {
        throw ParseError("numeric literal out of range", t.loc);
      }
    case Tok::LVar:
      ++i_;
      return Expr::lvar(t.text);
    case Tok::Ident:
      if (t.text == "null") {
        ++i_;
        return Expr::null();
      }
      if (t.text == "true" || t.text == "false") {
        ++i_;
        return Expr::boolean(t.text == "true");
      }
      if (t.text == "nil") {
        ++i_;
        return Expr::nil();
      }
      if (t.text == "len") {
        ++i_;
        expect_punct("(");
        Expr e = expr(true);
        expect_punct(")");
        return mk_len(e);
      }
      if (is_keyword(t.text))
        fail("unexpected keyword");
      ++i_;
      return Expr::pvar(t.text);
    case Tok::Punct:
      if (t.text == "(") {
        ++i_;
        Expr e = expr(true);
        expect_punct(")");
        return e;
      }
      if (t.text == "[") {
        ++i_;
        std::vector<Expr> elems;
        if (!is_punct("]")) {
          do {
            elems.push_back(expr(true));
          } while (is_punct(",") && (++i_, true));
        }
        expect_punct("]");
        return Expr::list(std::move(elems));
      }
      break;
    default:
      break;
    }
    fail("expected expression");
  }
};

} // namespace

ResolutionError::ResolutionError(std::vector<Diagnostic> diags)
    : std::runtime_error(diags.empty() ? std::string("resolution error")
                                       : to_string(diags.front().loc) + ": " +
                                             diags.front().message),
      diags_(std::move(diags)) {}

Assertion Assertion::star(const Assertion &other) const {
  Assertion r = *this;
  r.atoms.insert(r.atoms.end(), other.atoms.begin(), other.atoms.end());
  return r;
}

Program parse_program_unchecked(std::string_view text, std::string path) {
  Parser p(text, detail::lex(text));
  Program prog = p.program();
  prog.path = std::move(path);
  if (!p.duplicates_.empty())
    throw ResolutionError(p.duplicates_);
  return prog;
}

Program parse_program(std::string_view text, std::string path) {
  Program prog = parse_program_unchecked(text, std::move(path));
  auto diags = validate(prog);
  if (!diags.empty())
    throw ResolutionError(std::move(diags));
  return prog;
}

Expr parse_expr(std::string_view text) {
  Parser p(text, detail::lex(text));
  return p.standalone_expr();
}

Assertion parse_assertion(std::string_view text) {
  Parser p(text, detail::lex(text));
  return p.standalone_assertion();
}

nlohmann::json to_json(const Diagnostic &d) {
  return {{"severity", d.severity == Diagnostic::Severity::Error ? "error" : "warning"},
          {"message", d.message},
          {"start", {d.loc.start_line, d.loc.start_col}},
          {"end", {d.loc.end_line, d.loc.end_col}}};
}

} // namespace swing::wisl
