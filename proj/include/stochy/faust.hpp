#pragma once

#include "stochy/gridder.hpp"
#include "stochy/model.hpp"
#include "stochy/sparse.hpp"

#include <vector>

namespace stochy {

/// Finite MDP obtained by evaluating the kernel at cell centres.
struct MdpAbstraction {
    HybridGrid grid;
    std::vector<CsrMatrix> transitions; // one per action; rows and columns are flat states
    std::vector<Vec> rep_points;        // one per cell
    std::vector<double> local_errors;   // one per cell
    std::size_t horizon = 0;
    double global_error = 0.0;          // horizon * max local error, unsaturated

    std::size_t state_count() const { return grid.state_count(); }
    std::size_t action_count() const { return transitions.size(); }
    /// Global error saturated at 1.
    double reported_error() const { return std::min(1.0, global_error); }
};

/// Entries below this are dropped; their mass goes to the sink.
inline constexpr double kDropThreshold = 1e-12;

/// Per-cell Lipschitz factor of the hybrid kernel: for cell states of mode q,
/// max over actions of sum_q' T(q'|q,a) * L(q', a).
std::vector<double> faust_mode_lipschitz(const ShsModel& model);

/// L * diam(cell) * volume(domain) for every cell.
std::vector<double> faust_local_errors(const ShsModel& model, const HybridGrid& grid);

MdpAbstraction build_faust(const ShsModel& model, const HybridGrid& grid, std::size_t horizon,
                           Exec exec = Exec::parallel);

struct FaustRefinement {
    MdpAbstraction abstraction;
    bool budget_exhausted = false;
    std::size_t splits = 0;
};

/// Splits the cell with the largest local error (lowest id on ties) until
/// horizon * max local error <= target_error, or until the next split would
/// exceed max_cells.
FaustRefinement adaptive_refine_faust(const ShsModel& model, const HybridGrid& initial, double target_error,
                                      std::size_t horizon, std::size_t max_cells, Exec exec = Exec::parallel);

} // namespace stochy
