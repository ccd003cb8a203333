#include "stochy/checker.hpp"

#include "robust_setup.hpp"
#include "stochy/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stochy {

double CheckResult::max_eps() const { return eps.empty() ? 0.0 : *std::max_element(eps.begin(), eps.end()); }

std::vector<double> mc_bounded_safety(const CsrMatrix& T, const std::vector<bool>& safe, std::size_t horizon) {
    if (T.rows != safe.size() || T.cols != safe.size())
        throw ValidationError("mc_bounded_safety: matrix and safe mask disagree in size");
    for (std::size_t r = 0; r < T.rows; ++r)
        if (std::abs(T.row_sum(r) - 1.0) > 1e-9)
            throw ValidationError("mc_bounded_safety: row " + std::to_string(r) + " is not stochastic");
    std::vector<double> v(safe.size()), next(safe.size());
    for (std::size_t s = 0; s < safe.size(); ++s)
        v[s] = safe[s] ? 1.0 : 0.0;
    for (std::size_t k = 0; k < horizon; ++k) {
        for (std::size_t s = 0; s < safe.size(); ++s) {
            double acc = 0.0;
            if (safe[s])
                for (std::size_t j = T.row_ptr[s]; j < T.row_ptr[s + 1]; ++j)
                    acc += T.val[j] * v[T.col[j]];
            next[s] = acc;
        }
        v.swap(next);
    }
    return v;
}

MdpSolution mdp_value_iteration(const std::vector<CsrMatrix>& T, const Labeling& labeling, const Property& property,
                                const CheckOptions& options) {
    if (T.empty())
        throw ValidationError("mdp_value_iteration: no actions");
    const std::size_t states = T.front().rows;
    if (labeling.labels.size() != states)
        throw ValidationError("mdp_value_iteration: labeling does not match the state count");

    const bool reach = property.kind == PropertyKind::reach_avoid;
    std::vector<bool> fixed(states);
    std::vector<double> v(states);
    for (std::size_t s = 0; s < states; ++s) {
        const Label l = labeling.labels[s];
        fixed[s] = l == Label::avoid || (reach && l == Label::target);
        v[s] = l == Label::avoid ? 0.0 : (reach ? (l == Label::target ? 1.0 : 0.0) : 1.0);
    }

    MdpSolution sol;
    std::vector<double> next(v);
    std::vector<std::uint32_t> rule(states, 0);
    const std::size_t limit = property.bounded() ? *property.horizon : options.max_iterations;
    if (property.bounded()) {
        sol.strategy.time_indexed = true;
        sol.strategy.rules.assign(limit, std::vector<std::uint32_t>(states, 0));
    }
    sol.converged = property.bounded();
    for (std::size_t it = 1; it <= limit; ++it) {
        double delta = 0.0;
#pragma omp parallel for schedule(dynamic, 64) reduction(max : delta) if (options.exec == Exec::parallel)
        for (std::size_t s = 0; s < states; ++s) {
            if (fixed[s])
                continue;
            double best = -1.0;
            std::uint32_t arg = 0;
            for (std::size_t a = 0; a < T.size(); ++a) {
                const auto& m = T[a];
                double acc = 0.0;
                for (std::size_t j = m.row_ptr[s]; j < m.row_ptr[s + 1]; ++j)
                    acc += m.val[j] * v[m.col[j]];
                if (acc > best) {
                    best = acc;
                    arg = static_cast<std::uint32_t>(a);
                }
            }
            next[s] = best;
            rule[s] = arg;
            delta = std::max(delta, std::abs(best - v[s]));
        }
        v.swap(next);
        sol.iterations = it;
        if (property.bounded()) {
            sol.strategy.rules[limit - it] = rule;
        } else if (delta < options.tolerance) {
            sol.converged = true;
            break;
        }
    }
    if (!property.bounded())
        sol.strategy.rules.push_back(rule);
    sol.values = std::move(v);
    return sol;
}

bool row_feasible(std::span<const double> low, std::span<const double> high, double tol) {
    double lo = 0.0, hi = 0.0;
    for (std::size_t i = 0; i < low.size(); ++i) {
        if (!(low[i] >= 0.0 && low[i] <= high[i] && high[i] <= 1.0))
            return false;
        lo += low[i];
        hi += high[i];
    }
    return lo <= 1.0 + tol && hi >= 1.0 - tol;
}

double o_maximization(std::span<const std::uint32_t> cols, std::span<const double> low,
                      std::span<const double> high, std::span<const double> values, Sense sense,
                      std::vector<double>* distribution) {
    thread_local std::vector<double> p;
    thread_local std::vector<std::uint32_t> heap;
    const std::size_t n = cols.size();
    p.assign(low.begin(), low.end());
    double remaining = 1.0;
    for (std::size_t i = 0; i < n; ++i)
        remaining -= low[i];

    if (remaining > 0.0) {
        // `before(i, j)`: successor i is raised before j. Heap top is the first to raise.
        const auto before = [&](std::uint32_t i, std::uint32_t j) {
            const double vi = values[cols[i]], vj = values[cols[j]];
            if (vi != vj)
                return sense == Sense::max ? vi > vj : vi < vj;
            return i < j;
        };
        const auto heap_less = [&](std::uint32_t i, std::uint32_t j) { return before(j, i); };
        heap.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            heap[i] = static_cast<std::uint32_t>(i);
        std::make_heap(heap.begin(), heap.end(), heap_less);
        auto end = heap.end();
        while (remaining > 0.0 && end != heap.begin()) {
            std::pop_heap(heap.begin(), end, heap_less);
            --end;
            const std::uint32_t i = *end;
            const double add = std::min(high[i] - low[i], remaining);
            p[i] += add;
            remaining -= add;
        }
    }
    double value = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        value += p[i] * values[cols[i]];
    if (distribution)
        *distribution = p;
    return value;
}

namespace detail {

Boundary robust_boundary(const std::vector<IntervalMatrix>& P, const Labeling& labeling, const Property& property) {
    const std::size_t states = labeling.labels.size();
    const bool reach = property.kind == PropertyKind::reach_avoid;
    Boundary b;
    b.low.assign(states, reach ? 0.0 : 1.0);
    b.fixed.assign(states, false);
    std::vector<bool> avoid(states), target(states);
    for (std::size_t s = 0; s < states; ++s) {
        avoid[s] = labeling.is(s, Label::avoid);
        target[s] = reach && labeling.is(s, Label::target);
        if (avoid[s]) {
            b.low[s] = 0.0;
            b.fixed[s] = true;
        } else if (target[s]) {
            b.low[s] = 1.0;
            b.fixed[s] = true;
        }
    }
    if (!property.bounded()) {
        if (reach) {
            const auto sure = almost_sure_all(P, target, avoid);
            const auto reachable = can_reach(P, target, avoid);
            for (std::size_t s = 0; s < states; ++s) {
                if (b.fixed[s])
                    continue;
                if (sure[s]) {
                    b.low[s] = 1.0;
                    b.fixed[s] = true;
                } else if (!reachable[s]) {
                    b.low[s] = 0.0;
                    b.fixed[s] = true;
                }
            }
        } else {
            const auto doomed = almost_sure_all(P, avoid, std::vector<bool>(states, false));
            for (std::size_t s = 0; s < states; ++s)
                if (doomed[s]) {
                    b.low[s] = 0.0;
                    b.fixed[s] = true;
                }
        }
    }
    b.high = b.low;
    return b;
}

void finalize(CheckResult& r) {
    r.eps.resize(r.p_low.size());
    for (std::size_t s = 0; s < r.p_low.size(); ++s) {
        r.p_low[s] = std::clamp(r.p_low[s], 0.0, 1.0);
        r.p_high[s] = std::clamp(r.p_high[s], r.p_low[s], 1.0);
        r.eps[s] = r.p_high[s] - r.p_low[s];
    }
}

} // namespace detail

CheckResult imdp_check(const std::vector<IntervalMatrix>& P, const Labeling& labeling, const Property& property,
                       const CheckOptions& options, Strategy* strategy) {
    if (P.empty())
        throw ValidationError("imdp_check: no actions");
    const std::size_t states = labeling.labels.size();
    for (const auto& m : P)
        if (m.rows != states || m.cols != states)
            throw ValidationError("imdp_check: matrix and labeling disagree in size");
    if (options.exec == Exec::serial)
        return reference::imdp_check(P, labeling, property, options, strategy);

    auto b = detail::robust_boundary(P, labeling, property);
    std::vector<double> lo = b.low, hi = b.high;
    std::vector<double> next_lo = lo, next_hi = hi;
    std::vector<std::uint32_t> rule(states, 0);
    const std::size_t limit = property.bounded() ? *property.horizon : options.max_iterations;
    if (strategy) {
        strategy->time_indexed = property.bounded();
        strategy->rules.assign(property.bounded() ? limit : 0, std::vector<std::uint32_t>(states, 0));
    }

    CheckResult r;
    r.converged = property.bounded();
    for (std::size_t it = 1; it <= limit; ++it) {
        double delta = 0.0;
#pragma omp parallel for schedule(dynamic, 32) reduction(max : delta)
        for (std::size_t s = 0; s < states; ++s) {
            if (b.fixed[s])
                continue;
            double best_lo = -1.0, best_hi = -1.0;
            std::uint32_t arg = 0;
            for (std::size_t a = 0; a < P.size(); ++a) {
                const auto& m = P[a];
                const std::size_t first = m.row_begin(s), count = m.row_end(s) - first;
                const std::span<const std::uint32_t> cols(m.col.data() + first, count);
                const std::span<const double> l(m.low.data() + first, count), h(m.high.data() + first, count);
                const double vlo = o_maximization(cols, l, h, lo, Sense::min);
                const double vhi = o_maximization(cols, l, h, hi, Sense::max);
                if (vlo > best_lo) {
                    best_lo = vlo;
                    arg = static_cast<std::uint32_t>(a);
                }
                best_hi = std::max(best_hi, vhi);
            }
            next_lo[s] = best_lo;
            next_hi[s] = best_hi;
            rule[s] = arg;
            delta = std::max({delta, std::abs(best_lo - lo[s]), std::abs(best_hi - hi[s])});
        }
        lo.swap(next_lo);
        hi.swap(next_hi);
        r.iterations = it;
        if (property.bounded()) {
            if (strategy)
                strategy->rules[limit - it] = rule;
        } else if (delta < options.tolerance) {
            r.converged = true;
            break;
        }
    }
    if (strategy && !property.bounded())
        strategy->rules.push_back(rule);
    r.p_low = std::move(lo);
    r.p_high = std::move(hi);
    detail::finalize(r);
    return r;
}

} // namespace stochy
