#pragma once

// Compilation of a closed strategy against a fixed term into a
// position-based strategy with the same effect on that term.

#include <vector>

#include "ces/pos_strategy.hpp"
#include "ces/strategy.hpp"

namespace ces {

// Throws OpenStrategy on free fixed-point variables.
PosCE psi(const Strategy& s, const Term& t);

// Drops failing conjuncts and concatenates the rest; all failing gives fail.
PosCE theta(const std::vector<PosCE>& conjuncts);

}  // namespace ces
