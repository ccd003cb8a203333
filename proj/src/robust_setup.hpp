#pragma once

#include "stochy/checker.hpp"

namespace stochy::detail {

/// Boundary conditions of a value iteration: states marked `fixed` keep their
/// initial value; the others are backed up.
struct Boundary {
    std::vector<double> low;
    std::vector<double> high;
    std::vector<bool> fixed;
};

/// Avoid states are fixed at 0 and, for reach-avoid, target states at 1. For
/// unbounded horizons the qualitative sets (value 0 or 1 under every
/// resolution) are fixed as well.
Boundary robust_boundary(const std::vector<IntervalMatrix>& P, const Labeling& labeling, const Property& property);

/// Clamps to 0 <= p_low <= p_high <= 1 and fills eps.
void finalize(CheckResult& r);

} // namespace stochy::detail
