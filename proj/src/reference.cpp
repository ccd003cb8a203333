#include "stochy/reference.hpp"

#include "robust_setup.hpp"
#include "stochy/kernel.hpp"

#include <algorithm>
#include <numeric>

namespace stochy::reference {

MdpAbstraction build_faust(const ShsModel& model, const HybridGrid& grid, std::size_t horizon) {
    validate(model);
    const std::size_t A = model.action_count();
    std::vector<GaussKernel> ks;
    for (std::size_t q = 0; q < model.mode_count(); ++q)
        for (std::size_t a = 0; a < A; ++a) {
            ks.emplace_back(model.modes[q], model.action_input(a));
            if (!ks.back().diagonal())
                throw ValidationError("FAUST engine requires diagonal covariance");
        }

    MdpAbstraction out;
    out.grid = grid;
    out.horizon = horizon;
    const std::size_t states = grid.state_count();
    const auto sink = static_cast<std::uint32_t>(grid.sink());
    for (std::size_t a = 0; a < A; ++a) {
        std::vector<Triplet> trip;
        for (std::size_t s = 0; s < grid.cell_count(); ++s) {
            const auto ref = grid.decode(s);
            const Vec x = grid.rect(s).center();
            double kept = 0.0;
            for (std::size_t t = 0; t < grid.cell_count(); ++t) {
                const auto tref = grid.decode(t);
                const double pi = model.mode_probability(ref.mode, tref.mode, a);
                if (pi == 0.0)
                    continue;
                const double p = cell_prob(ks[tref.mode * A + a], x, grid.rect(t)) * pi;
                if (p >= kDropThreshold) {
                    trip.push_back({static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(t), p});
                    kept += p;
                }
            }
            if (1.0 - kept > 0.0)
                trip.push_back({static_cast<std::uint32_t>(s), sink, 1.0 - kept});
        }
        trip.push_back({sink, sink, 1.0});
        out.transitions.push_back(CsrMatrix::from_triplets(states, states, std::move(trip)));
    }
    for (std::size_t s = 0; s < grid.cell_count(); ++s)
        out.rep_points.push_back(grid.rect(s).center());
    out.local_errors = faust_local_errors(model, grid);
    double worst = 0.0;
    for (const double e : out.local_errors)
        worst = std::max(worst, e);
    out.global_error = static_cast<double>(horizon) * worst;
    return out;
}

ImdpAbstraction build_imdp(const ShsModel& model, const HybridGrid& grid, const Labeling& labeling) {
    validate(model);
    const std::size_t A = model.action_count();
    std::vector<GaussKernel> ks;
    for (std::size_t q = 0; q < model.mode_count(); ++q)
        for (std::size_t a = 0; a < A; ++a)
            ks.emplace_back(model.modes[q], model.action_input(a));

    ImdpAbstraction out;
    out.grid = grid;
    out.labeling = labeling;
    const std::size_t states = grid.state_count();
    const auto sink = static_cast<std::uint32_t>(grid.sink());
    for (std::size_t a = 0; a < A; ++a) {
        std::vector<std::vector<IntervalEntry>> rows(states);
        std::vector<RowExtras> extras(states);
        for (std::size_t s = 0; s < grid.cell_count(); ++s) {
            const auto ref = grid.decode(s);
            RowExtras& ex = extras[s];
            for (std::size_t q2 = 0; q2 < grid.mode_count(); ++q2) {
                const double pi = model.mode_probability(ref.mode, q2, a);
                if (pi == 0.0)
                    continue;
                const GaussKernel& k = ks[q2 * A + a];
                for (std::size_t c2 = 0; c2 < grid.mode(q2).size(); ++c2) {
                    const Bounds b = transition_bounds(k, grid.rect(s), grid.mode(q2).cell(c2));
                    if (pi * b.high < kIntervalDropThreshold)
                        ex.dropped += kIntervalDropThreshold;
                    else
                        rows[s].push_back({static_cast<std::uint32_t>(grid.encode(q2, c2)), pi * b.low, pi * b.high});
                }
                const Bounds stay = transition_bounds(k, grid.rect(s), grid.mode(q2).domain());
                ex.stay_low += pi * stay.low;
                ex.stay_high += pi * stay.high;
            }
            const IntervalEntry e = sink_entry(sink, rows[s], ex);
            if (e.high > 0.0)
                rows[s].push_back(e);
        }
        rows[sink] = {{sink, 1.0, 1.0}};
        out.P.push_back(IntervalMatrix::from_rows(states, rows));
        out.extras.push_back(std::move(extras));
    }
    return out;
}

double o_maximization(std::span<const std::uint32_t> cols, std::span<const double> low,
                      std::span<const double> high, std::span<const double> values, Sense sense) {
    const std::size_t n = cols.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        const double vi = values[cols[i]], vj = values[cols[j]];
        if (vi != vj)
            return sense == Sense::max ? vi > vj : vi < vj;
        return i < j;
    });
    std::vector<double> p(low.begin(), low.end());
    double remaining = 1.0;
    for (std::size_t i = 0; i < n; ++i)
        remaining -= low[i];
    for (std::size_t r = 0; r < n && remaining > 0.0; ++r) {
        const std::size_t i = order[r];
        const double add = std::min(high[i] - low[i], remaining);
        p[i] += add;
        remaining -= add;
    }
    double value = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        value += p[i] * values[cols[i]];
    return value;
}

CheckResult imdp_check(const std::vector<IntervalMatrix>& P, const Labeling& labeling, const Property& property,
                       const CheckOptions& options, Strategy* strategy) {
    const std::size_t states = labeling.labels.size();
    const auto b = detail::robust_boundary(P, labeling, property);
    std::vector<double> lo = b.low, hi = b.high;
    const std::size_t steps = property.bounded() ? *property.horizon : options.max_iterations;
    std::vector<std::vector<std::uint32_t>> rules;

    CheckResult r;
    r.converged = property.bounded();
    for (std::size_t it = 1; it <= steps; ++it) {
        std::vector<double> nlo = lo, nhi = hi;
        std::vector<std::uint32_t> rule(states, 0);
        double delta = 0.0;
        for (std::size_t s = 0; s < states; ++s) {
            if (b.fixed[s])
                continue;
            double best_lo = -1.0, best_hi = -1.0;
            for (std::size_t a = 0; a < P.size(); ++a) {
                const auto& m = P[a];
                const std::size_t first = m.row_begin(s), count = m.row_end(s) - first;
                const std::span<const std::uint32_t> cols(m.col.data() + first, count);
                const std::span<const double> l(m.low.data() + first, count), h(m.high.data() + first, count);
                const double vlo = reference::o_maximization(cols, l, h, lo, Sense::min);
                const double vhi = reference::o_maximization(cols, l, h, hi, Sense::max);
                if (vlo > best_lo) {
                    best_lo = vlo;
                    rule[s] = static_cast<std::uint32_t>(a);
                }
                if (vhi > best_hi)
                    best_hi = vhi;
            }
            nlo[s] = best_lo;
            nhi[s] = best_hi;
            delta = std::max(delta, std::max(std::abs(best_lo - lo[s]), std::abs(best_hi - hi[s])));
        }
        lo = std::move(nlo);
        hi = std::move(nhi);
        r.iterations = it;
        if (property.bounded() || rules.empty())
            rules.push_back(std::move(rule));
        else
            rules.back() = std::move(rule);
        if (!property.bounded() && delta < options.tolerance) {
            r.converged = true;
            break;
        }
    }
    if (strategy) {
        strategy->time_indexed = property.bounded();
        if (property.bounded())
            strategy->rules.assign(rules.rbegin(), rules.rend());
        else
            strategy->rules = rules.empty() ? std::vector<std::vector<std::uint32_t>>{std::vector<std::uint32_t>(states, 0)}
                                            : std::vector<std::vector<std::uint32_t>>{rules.back()};
    }
    r.p_low = std::move(lo);
    r.p_high = std::move(hi);
    detail::finalize(r);
    return r;
}

} // namespace stochy::reference
