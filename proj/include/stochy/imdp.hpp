#pragma once

#include "stochy/checker.hpp"
#include "stochy/gridder.hpp"
#include "stochy/model.hpp"
#include "stochy/sparse.hpp"

#include <vector>

namespace stochy {

/// Per-row quantities kept so that refinement can reuse rows of unsplit cells.
struct RowExtras {
    double dropped = 0.0;   // upper bound on the mass of entries dropped below the threshold
    double stay_low = 0.0;  // bounds on the mass that stays inside the domain
    double stay_high = 0.0;
};

/// Interval MDP over (mode, cell) states plus the sink.
struct ImdpAbstraction {
    HybridGrid grid;
    Labeling labeling;
    std::vector<IntervalMatrix> P;              // one per action
    std::vector<std::vector<RowExtras>> extras; // [action][state]
    std::vector<double> eps;                    // filled by refine_imdp
    double eps_max_observed = 0.0;

    std::size_t state_count() const { return grid.state_count(); }
    std::size_t action_count() const { return P.size(); }
};

/// Entries whose upper bound is below this are dropped; the sink may absorb their mass.
inline constexpr double kIntervalDropThreshold = 1e-12;

ImdpAbstraction build_imdp(const ShsModel& model, const HybridGrid& grid, const Labeling& labeling,
                           Exec exec = Exec::parallel);

/// Recomputes an abstraction after `refined = split_states(old.grid, split)`.
/// Rows of unsplit cells are reused; only their entries towards split cells are
/// recomputed. `labeling` must label `refined`.
ImdpAbstraction update_imdp(const ShsModel& model, const ImdpAbstraction& old, const HybridGrid& refined,
                            std::span<const std::size_t> split, const Labeling& labeling);

/// Sink bounds from the cell entries of a row: low = max((1 - sum high - dropped)+,
/// 1 - stay_high), high = min(1 - sum low, 1 - stay_low) + dropped, clamped to [0, 1].
IntervalEntry sink_entry(std::uint32_t sink, std::span<const IntervalEntry> cells, const RowExtras& extras);

CheckResult imdp_check(const ImdpAbstraction& a, const Property& property, const CheckOptions& options = {},
                       Strategy* strategy = nullptr);

struct Regions {
    std::vector<HyperRect> targets;
    std::vector<HyperRect> avoids;
};

struct ImdpRefinement {
    ImdpAbstraction abstraction;
    CheckResult result;
    Strategy strategy;
    std::vector<double> eps_history; // max eps after each check
    bool budget_exhausted = false;
};

/// Check, split every cell with eps >= eps_max, relabel, repeat until all
/// eps < eps_max or the next round would exceed max_states.
ImdpRefinement refine_imdp(const ShsModel& model, const HybridGrid& initial, const Regions& regions,
                           const Property& property, double eps_max, std::size_t max_states = 1000000,
                           const CheckOptions& options = {});

} // namespace stochy
