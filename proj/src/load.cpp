#include "swing/load.hpp"

#include "swing/wisl/parser.hpp"

#include <fstream>
#include <sstream>

namespace swing {

namespace {

std::string where(const std::string &path, const SourceLoc &l) {
  return (path.empty() ? std::string("<input>") : path) + ":" + std::to_string(l.start_line) + ":" +
         std::to_string(l.start_col);
}

} // namespace

std::shared_ptr<const gil::Program> load_source(std::string_view text, const std::string &path) {
  try {
    return std::make_shared<const gil::Program>(gil::compile(wisl::parse_program(text, path)));
  } catch (const wisl::ParseError &e) {
    throw LoadError(where(path, e.loc()) + ": " + e.what());
  } catch (const wisl::ResolutionError &e) {
    std::string msg;
    for (const auto &d : e.diagnostics())
      if (d.severity == wisl::Diagnostic::Severity::Error)
        msg += (msg.empty() ? "" : "\n") + where(path, d.loc) + ": " + d.message;
    throw LoadError(msg.empty() ? e.what() : msg);
  } catch (const gil::CompileError &e) {
    throw LoadError(path + ": " + e.what());
  }
}

std::shared_ptr<const gil::Program> load_program(const std::filesystem::path &file) {
  std::ifstream in(file, std::ios::binary);
  if (!in)
    throw LoadError("cannot read " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_source(ss.str(), file.string());
}

} // namespace swing
