#include "stochy/checker.hpp"

#include <deque>

namespace stochy {

namespace {

constexpr double kMassTol = 1e-9;

// Reverse adjacency of the possible-transition graph, over all actions.
std::vector<std::vector<std::uint32_t>> predecessors(const std::vector<IntervalMatrix>& P, std::size_t states) {
    std::vector<std::vector<std::uint32_t>> pred(states);
    for (const auto& m : P)
        for (std::size_t s = 0; s < m.rows; ++s) {
            double low_sum = 0.0;
            for (std::size_t k = m.row_begin(s); k < m.row_end(s); ++k)
                low_sum += m.low[k];
            for (std::size_t k = m.row_begin(s); k < m.row_end(s); ++k) {
                const double reachable = std::min(m.high[k], 1.0 - (low_sum - m.low[k]));
                if (reachable > 0.0)
                    pred[m.col[k]].push_back(static_cast<std::uint32_t>(s));
            }
        }
    return pred;
}

} // namespace

std::vector<bool> can_reach(const std::vector<IntervalMatrix>& P, const std::vector<bool>& goal,
                            const std::vector<bool>& blocked) {
    const std::size_t states = goal.size();
    const auto pred = predecessors(P, states);
    std::vector<bool> seen(goal);
    std::deque<std::uint32_t> queue;
    for (std::size_t s = 0; s < states; ++s)
        if (goal[s])
            queue.push_back(static_cast<std::uint32_t>(s));
    while (!queue.empty()) {
        const auto t = queue.front();
        queue.pop_front();
        for (const auto s : pred[t])
            if (!seen[s] && !blocked[s]) {
                seen[s] = true;
                queue.push_back(s);
            }
    }
    return seen;
}

std::vector<bool> almost_sure_all(const std::vector<IntervalMatrix>& P, const std::vector<bool>& goal,
                                  const std::vector<bool>& absorbing) {
    const std::size_t states = goal.size();
    // Greatest set Z of non-goal states where some action admits a feasible
    // distribution supported inside Z: from Z the goal can be avoided forever.
    std::vector<bool> z(states);
    for (std::size_t s = 0; s < states; ++s)
        z[s] = !goal[s];
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t s = 0; s < states; ++s) {
            if (!z[s] || absorbing[s])
                continue;
            bool keep = false;
            for (const auto& m : P) {
                bool ok = true;
                double inside_high = 0.0;
                for (std::size_t k = m.row_begin(s); k < m.row_end(s) && ok; ++k) {
                    if (z[m.col[k]])
                        inside_high += m.high[k];
                    else if (m.low[k] > 0.0)
                        ok = false;
                }
                if (ok && inside_high >= 1.0 - kMassTol) {
                    keep = true;
                    break;
                }
            }
            if (!keep) {
                z[s] = false;
                changed = true;
            }
        }
    }
    const auto escape = can_reach(P, z, goal);
    std::vector<bool> sure(states);
    for (std::size_t s = 0; s < states; ++s)
        sure[s] = !escape[s];
    return sure;
}

} // namespace stochy
