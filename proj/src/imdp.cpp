#include "stochy/imdp.hpp"

#include "stochy/kernel.hpp"
#include "stochy/reference.hpp"

#include <algorithm>

namespace stochy {

namespace {

std::vector<GaussKernel> kernels(const ShsModel& model) {
    std::vector<GaussKernel> ks;
    ks.reserve(model.mode_count() * model.action_count());
    for (std::size_t q = 0; q < model.mode_count(); ++q)
        for (std::size_t a = 0; a < model.action_count(); ++a)
            ks.emplace_back(model.modes[q], model.action_input(a));
    return ks;
}

struct Row {
    std::vector<IntervalEntry> entries;
    RowExtras extras;
};

// Appends the bounds towards `targets` (cell ids of mode q2); drops tiny entries.
void append_targets(const GaussKernel& k, const GaussKernel::SourceImage& img, double pi, const HybridGrid& grid,
                    std::size_t q2, std::span<const std::size_t> targets, Row& row) {
    const double cutoff = 0.5 * kIntervalDropThreshold / pi;
    const auto& part = grid.mode(q2);
    for (const std::size_t c2 : targets) {
        const Bounds b = k.target_bounds(img, part.cell(c2), cutoff);
        const double high = pi * b.high;
        if (high < kIntervalDropThreshold)
            row.extras.dropped += kIntervalDropThreshold;
        else
            row.entries.push_back({static_cast<std::uint32_t>(grid.encode(q2, c2)), pi * b.low, high});
    }
}

Row full_row(const ShsModel& model, const HybridGrid& grid, const std::vector<GaussKernel>& ks, std::size_t s,
             std::size_t a) {
    Row row;
    const auto [q, c] = grid.decode(s);
    const HyperRect& source = grid.mode(q).cell(c);
    std::vector<std::size_t> all;
    for (std::size_t q2 = 0; q2 < grid.mode_count(); ++q2) {
        const double pi = model.mode_probability(q, q2, a);
        if (pi == 0.0)
            continue;
        const auto& k = ks[q2 * model.action_count() + a];
        const auto img = k.source_image(source);
        all.resize(grid.mode(q2).size());
        for (std::size_t i = 0; i < all.size(); ++i)
            all[i] = i;
        append_targets(k, img, pi, grid, q2, all, row);
        const Bounds stay = k.target_bounds(img, grid.mode(q2).domain());
        row.extras.stay_low += pi * stay.low;
        row.extras.stay_high += pi * stay.high;
    }
    return row;
}

std::vector<IntervalEntry> finish(Row&& row, std::uint32_t sink) {
    auto out = std::move(row.entries);
    const IntervalEntry e = sink_entry(sink, out, row.extras);
    if (e.high > 0.0)
        out.push_back(e);
    return out;
}

} // namespace

IntervalEntry sink_entry(std::uint32_t sink, std::span<const IntervalEntry> cells, const RowExtras& extras) {
    double sum_low = 0.0, sum_high = 0.0;
    for (const auto& e : cells) {
        sum_low += e.low;
        sum_high += e.high;
    }
    const double low = std::max({0.0, 1.0 - (sum_high + extras.dropped), 1.0 - extras.stay_high});
    const double high = std::min(1.0, std::min(1.0 - sum_low, 1.0 - extras.stay_low) + extras.dropped);
    return {sink, std::min(low, 1.0), std::clamp(high, std::min(low, 1.0), 1.0)};
}

ImdpAbstraction build_imdp(const ShsModel& model, const HybridGrid& grid, const Labeling& labeling, Exec exec) {
    if (labeling.labels.size() != grid.state_count())
        throw ValidationError("build_imdp: labeling does not match the grid");
    if (exec == Exec::serial)
        return reference::build_imdp(model, grid, labeling);

    validate(model);
    const auto ks = kernels(model);
    ImdpAbstraction out;
    out.grid = grid;
    out.labeling = labeling;
    const std::size_t states = grid.state_count();
    const auto sink = static_cast<std::uint32_t>(grid.sink());
    for (std::size_t a = 0; a < model.action_count(); ++a) {
        std::vector<std::vector<IntervalEntry>> rows(states);
        std::vector<RowExtras> extras(states);
#pragma omp parallel for schedule(dynamic, 8)
        for (std::size_t s = 0; s < grid.cell_count(); ++s) {
            Row r = full_row(model, grid, ks, s, a);
            extras[s] = r.extras;
            rows[s] = finish(std::move(r), sink);
        }
        rows[sink] = {{sink, 1.0, 1.0}};
        out.P.push_back(IntervalMatrix::from_rows(states, rows));
        out.extras.push_back(std::move(extras));
    }
    return out;
}

ImdpAbstraction update_imdp(const ShsModel& model, const ImdpAbstraction& old, const HybridGrid& refined,
                            std::span<const std::size_t> split, const Labeling& labeling) {
    if (labeling.labels.size() != refined.state_count())
        throw ValidationError("update_imdp: labeling does not match the refined grid");
    const auto ks = kernels(model);
    const HybridGrid& before = old.grid;
    const std::size_t modes = before.mode_count();

    // children[q][c]: ids in `refined` of the cells that replaced old cell c (empty if unsplit).
    std::vector<std::vector<std::vector<std::size_t>>> children(modes);
    for (std::size_t q = 0; q < modes; ++q)
        children[q].resize(before.mode(q).size());
    for (const std::size_t s : split) {
        const auto [q, c] = before.decode(s);
        children[q][c].push_back(c);
    }
    for (std::size_t q = 0; q < modes; ++q) {
        const auto& part = refined.mode(q);
        for (std::size_t c = before.mode(q).size(); c < part.size(); ++c) {
            const auto parent = before.mode(q).locate(part.cell(c).center());
            children[q].at(parent.value()).push_back(c);
        }
    }
    const auto is_split = [&](std::size_t q, std::size_t c) { return c < children[q].size() && !children[q][c].empty(); };

    ImdpAbstraction out;
    out.grid = refined;
    out.labeling = labeling;
    const std::size_t states = refined.state_count();
    const auto sink = static_cast<std::uint32_t>(refined.sink());
    for (std::size_t a = 0; a < model.action_count(); ++a) {
        std::vector<std::vector<IntervalEntry>> rows(states);
        std::vector<RowExtras> extras(states);
        const auto& P = old.P[a];
#pragma omp parallel for schedule(dynamic, 8)
        for (std::size_t s = 0; s < refined.cell_count(); ++s) {
            const auto [q, c] = refined.decode(s);
            Row r;
            if (c >= before.mode(q).size() || is_split(q, c)) {
                r = full_row(model, refined, ks, s, a);
            } else {
                const std::size_t s_old = before.encode(q, c);
                r.extras = old.extras[a][s_old];
                for (std::size_t k = P.row_begin(s_old); k < P.row_end(s_old); ++k) {
                    if (P.col[k] == before.sink())
                        continue;
                    const auto [q2, c2] = before.decode(P.col[k]);
                    if (!is_split(q2, c2)) {
                        r.entries.push_back({static_cast<std::uint32_t>(refined.encode(q2, c2)), P.low[k], P.high[k]});
                        continue;
                    }
                    const double pi = model.mode_probability(q, q2, a);
                    const auto& kern = ks[q2 * model.action_count() + a];
                    append_targets(kern, kern.source_image(refined.mode(q).cell(c)), pi, refined, q2,
                                   children[q2][c2], r);
                }
                std::sort(r.entries.begin(), r.entries.end(),
                          [](const IntervalEntry& x, const IntervalEntry& y) { return x.col < y.col; });
            }
            extras[s] = r.extras;
            rows[s] = finish(std::move(r), sink);
        }
        rows[sink] = {{sink, 1.0, 1.0}};
        out.P.push_back(IntervalMatrix::from_rows(states, rows));
        out.extras.push_back(std::move(extras));
    }
    return out;
}

CheckResult imdp_check(const ImdpAbstraction& a, const Property& property, const CheckOptions& options,
                       Strategy* strategy) {
    return imdp_check(a.P, a.labeling, property, options, strategy);
}

ImdpRefinement refine_imdp(const ShsModel& model, const HybridGrid& initial, const Regions& regions,
                           const Property& property, double eps_max, std::size_t max_states,
                           const CheckOptions& options) {
    if (!(eps_max > 0.0))
        throw ValidationError("eps_max must be positive");
    const std::size_t extra_per_split = (std::size_t{1} << initial.mode(0).dim()) - 1;

    ImdpRefinement out;
    out.abstraction = build_imdp(model, initial, label_states(initial, regions.targets, regions.avoids), options.exec);
    for (;;) {
        auto& abs = out.abstraction;
        out.strategy = Strategy{};
        out.result = imdp_check(abs, property, options, &out.strategy);
        abs.eps = out.result.eps;
        abs.eps_max_observed = out.result.max_eps();
        out.eps_history.push_back(abs.eps_max_observed);

        std::vector<std::size_t> split;
        for (std::size_t s = 0; s < abs.grid.cell_count(); ++s)
            if (out.result.eps[s] >= eps_max)
                split.push_back(s);
        if (split.empty())
            break;
        if (abs.state_count() + split.size() * extra_per_split > max_states) {
            out.budget_exhausted = true;
            break;
        }
        HybridGrid refined = split_states(abs.grid, split);
        Labeling labeling = label_states(refined, regions.targets, regions.avoids);
        out.abstraction = update_imdp(model, abs, refined, split, labeling);
    }
    return out;
}

} // namespace stochy
