#pragma once

#include "pivchol/pivoted_cholesky.hpp"

namespace pivchol::detail {

// Swaps pivoted positions a and b in every per-position vector of the state.
void swap_positions(StrategyState& state, Index a, Index b);

// Strategy update after the column for position `pos` has been appended.
void update_strategy(StrategyState& state, const PartialCholesky& pc, const GramOperator& op,
                     Index pos, double tolerance);

}  // namespace pivchol::detail
