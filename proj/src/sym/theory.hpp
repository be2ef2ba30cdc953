#pragma once

#include "swing/sym/solver.hpp"

namespace swing::sym::detail {

/// Unsat if the conjunction of literals (atoms or negated atoms) is
/// refuted, Unknown otherwise.
SatResult refute(const std::vector<Expr> &literals);

} // namespace swing::sym::detail
