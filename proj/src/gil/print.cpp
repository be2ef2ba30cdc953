#include "swing/gil.hpp"

#include "swing/wisl/pretty.hpp"

#include <sstream>

namespace swing::gil {

std::string to_string(const StmtKind &k) {
  switch (k.tag) {
  case StmtKind::Tag::Normal: return k.is_final ? "Normal true" : "Normal false";
  case StmtKind::Tag::Return: return k.is_final ? "Return true" : "Return false";
  case StmtKind::Tag::Hidden: return "Hidden";
  case StmtKind::Tag::LoopPrefix: return "LoopPrefix";
  }
  return "?";
}

std::string to_string(BranchKind k) { return k == BranchKind::IfElse ? "IfElse" : "WhileLoop"; }

std::string to_string(const NestKind &k) {
  return (k.kind == NestKind::Kind::LoopBody ? "LoopBody " : "FunCall ") + k.name;
}

namespace {

std::string join_args(const std::vector<Expr> &args) {
  std::string out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i)
      out += ", ";
    out += wisl::pretty_expr(args[i]);
  }
  return out;
}

nlohmann::json loc_json(const SourceLoc &l) {
  return {{"start", {l.start_line, l.start_col}}, {"end", {l.end_line, l.end_col}}};
}

} // namespace

std::string to_string(const Cmd &c) {
  using wisl::pretty_expr;
  switch (c.kind) {
  case Cmd::Kind::Assign: return c.var + " := " + pretty_expr(c.e1);
  case Cmd::Kind::GuardedGoto:
    return "goto? (" + pretty_expr(c.e1) + ") " + c.then_label + " " + c.else_label;
  case Cmd::Kind::Goto: return "goto " + c.then_label;
  case Cmd::Kind::Call:
    return (c.var.empty() ? "" : c.var + " := ") + c.fname + "(" + join_args(c.args) + ")";
  case Cmd::Kind::Load: return c.var + " := load<" + pretty_expr(c.e1) + ">";
  case Cmd::Kind::Store: return "store<" + pretty_expr(c.e1) + ">(" + pretty_expr(c.e2) + ")";
  case Cmd::Kind::Alloc: return c.var + " := alloc(" + pretty_expr(c.e1) + ")";
  case Cmd::Kind::Free: return "free<" + pretty_expr(c.e1) + ">";
  case Cmd::Kind::Skip: return "skip";
  case Cmd::Kind::Fail: return "fail \"" + c.message + "\"";
  case Cmd::Kind::Return: return "return";
  case Cmd::Kind::Logic: return "[[ " + wisl::pretty_logic_cmd(c.logic) + " ]]";
  }
  return "?";
}

std::string listing(const Proc &p) {
  std::size_t width = 0;
  for (const auto &c : p.body)
    if (c.label)
      width = std::max(width, c.label->size() + 1);
  std::ostringstream os;
  os << "proc " << p.name << "(";
  for (std::size_t i = 0; i < p.params.size(); ++i)
    os << (i ? ", " : "") << p.params[i];
  os << ") {\n";
  for (const auto &c : p.body) {
    std::string lab = c.label ? *c.label + ":" : "";
    os << "  " << lab << std::string(width - lab.size() + 1, ' ') << to_string(c) << ";\n";
  }
  os << "};\n";
  return os.str();
}

nlohmann::json cmd_record(const Proc &p, std::size_t index) {
  const Cmd &c = p.body.at(index);
  nlohmann::json j;
  j["proc"] = p.name;
  j["index"] = index;
  if (c.label)
    j["label"] = *c.label;
  j["text"] = to_string(c);
  j["stmt_kind"] = to_string(c.annot.stmt_kind);
  if (c.annot.branch_kind)
    j["branch_kind"] = to_string(*c.annot.branch_kind);
  if (c.annot.nest_kind)
    j["nest_kind"] = to_string(*c.annot.nest_kind);
  if (c.annot.source_loc)
    j["source_loc"] = loc_json(*c.annot.source_loc);
  return j;
}

std::string dump(const Program &prog) {
  std::ostringstream os;
  for (const auto &name : prog.proc_order) {
    const Proc &p = prog.procs.at(name);
    if (p.origin == Proc::Origin::Builtin)
      continue;
    os << listing(p);
  }
  for (const auto &name : prog.proc_order) {
    const Proc &p = prog.procs.at(name);
    if (p.origin == Proc::Origin::Builtin)
      continue;
    for (std::size_t i = 0; i < p.body.size(); ++i)
      os << cmd_record(p, i).dump() << '\n';
  }
  return os.str();
}

} // namespace swing::gil
