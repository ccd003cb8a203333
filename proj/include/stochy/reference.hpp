#pragma once

// Straightforward serial implementations of the data-parallel kernels. They
// share no loop code with the OpenMP paths and must agree with them bitwise.

#include "stochy/faust.hpp"
#include "stochy/imdp.hpp"

namespace stochy::reference {

MdpAbstraction build_faust(const ShsModel& model, const HybridGrid& grid, std::size_t horizon);

ImdpAbstraction build_imdp(const ShsModel& model, const HybridGrid& grid, const Labeling& labeling);

/// Full-sort O-maximization over one interval row.
double o_maximization(std::span<const std::uint32_t> cols, std::span<const double> low,
                      std::span<const double> high, std::span<const double> values, Sense sense);

CheckResult imdp_check(const std::vector<IntervalMatrix>& P, const Labeling& labeling, const Property& property,
                       const CheckOptions& options, Strategy* strategy);

} // namespace stochy::reference
