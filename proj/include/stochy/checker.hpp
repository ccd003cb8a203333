#pragma once

#include "stochy/gridder.hpp"
#include "stochy/sparse.hpp"

#include <algorithm>
#include <optional>
#include <span>
#include <vector>

namespace stochy {

enum class PropertyKind { safety, reach_avoid };

/// Safety: never enter an avoid state (the sink included) within the horizon.
/// Reach-avoid: reach a target state before any avoid state.
struct Property {
    PropertyKind kind = PropertyKind::safety;
    std::optional<std::size_t> horizon; // nullopt: unbounded

    bool bounded() const { return horizon.has_value(); }
};

/// Deterministic strategy. Time-indexed strategies hold one decision rule per
/// step (rules[k] is used at time k); stationary ones hold a single rule.
struct Strategy {
    std::vector<std::vector<std::uint32_t>> rules;
    bool time_indexed = false;

    bool stationary() const { return !time_indexed; }
    /// Action at `state` and time `step`; steps past the last rule reuse it.
    std::uint32_t action(std::size_t state, std::size_t step) const {
        if (rules.empty())
            return 0;
        return rules[std::min(step, rules.size() - 1)][state];
    }
};

struct CheckResult {
    std::vector<double> p_low;
    std::vector<double> p_high;
    std::vector<double> eps;
    std::size_t iterations = 0;
    bool converged = true;

    double max_eps() const;
};

struct CheckOptions {
    double tolerance = 1e-6;
    std::size_t max_iterations = 100000;
    Exec exec = Exec::parallel;
};

/// V^K for V^0 = 1{safe}, V^{k+1}(q) = 1{safe}(q) sum_q' T(q'|q) V^k(q').
std::vector<double> mc_bounded_safety(const CsrMatrix& T, const std::vector<bool>& safe, std::size_t horizon);

struct MdpSolution {
    std::vector<double> values;
    Strategy strategy;
    std::size_t iterations = 0;
    bool converged = true;
};

/// Maximising value iteration over per-action point matrices; ties go to the
/// lowest action index.
MdpSolution mdp_value_iteration(const std::vector<CsrMatrix>& T, const Labeling& labeling, const Property& property,
                                const CheckOptions& options = {});

enum class Sense { min, max };

/// Optimum of sum p(q') V(q') over {low <= p <= high, sum p = 1}. Successors are
/// ranked by value (ties by column), start at their lower bound and are raised
/// in rank order until the mass reaches 1. The sum is accumulated in column order.
double o_maximization(std::span<const std::uint32_t> cols, std::span<const double> low,
                      std::span<const double> high, std::span<const double> values, Sense sense,
                      std::vector<double>* distribution = nullptr);

/// True when sum low <= 1 <= sum high (within tol) and 0 <= low <= high <= 1.
bool row_feasible(std::span<const double> low, std::span<const double> high, double tol = 1e-9);

/// Robust value iteration. p_low maximises over actions the adversarial minimum,
/// p_high maximises over actions the cooperative maximum. The strategy is the
/// argmax of the pessimistic backup.
CheckResult imdp_check(const std::vector<IntervalMatrix>& P, const Labeling& labeling, const Property& property,
                       const CheckOptions& options = {}, Strategy* strategy = nullptr);

/// Qualitative analysis on the graph of possible transitions. An edge s -> s' is
/// possible when some feasible distribution of some action gives s' positive mass.
std::vector<bool> can_reach(const std::vector<IntervalMatrix>& P, const std::vector<bool>& goal,
                            const std::vector<bool>& blocked);

/// States from which every strategy and every feasible resolution reaches `goal`
/// with probability 1. States in `absorbing` are treated as trapping non-goal states.
std::vector<bool> almost_sure_all(const std::vector<IntervalMatrix>& P, const std::vector<bool>& goal,
                                  const std::vector<bool>& absorbing);

} // namespace stochy
