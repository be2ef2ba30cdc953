#pragma once

// Reading, parsing and compiling a WISL file in one go, with diagnostics
// formatted as `path:line:col: message`.

#include "swing/gil.hpp"

#include <filesystem>
#include <memory>
#include <stdexcept>

namespace swing {

class LoadError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

std::shared_ptr<const gil::Program> load_program(const std::filesystem::path &file);
std::shared_ptr<const gil::Program> load_source(std::string_view text, const std::string &path);

} // namespace swing
