#include "stochy/faust.hpp"

#include "stochy/kernel.hpp"
#include "stochy/reference.hpp"

#include <algorithm>

namespace stochy {

namespace {

std::vector<GaussKernel> faust_kernels(const ShsModel& model) {
    std::vector<GaussKernel> ks;
    ks.reserve(model.mode_count() * model.action_count());
    for (std::size_t q = 0; q < model.mode_count(); ++q)
        for (std::size_t a = 0; a < model.action_count(); ++a) {
            ks.emplace_back(model.modes[q], model.action_input(a));
            if (!ks.back().diagonal())
                throw ValidationError("FAUST engine requires diagonal covariance");
        }
    return ks;
}

std::vector<Entry> faust_row(const ShsModel& model, const HybridGrid& grid, const std::vector<GaussKernel>& ks,
                             std::size_t s, std::size_t a) {
    std::vector<Entry> row;
    const auto sink = static_cast<std::uint32_t>(grid.sink());
    if (s == grid.sink()) {
        row.push_back({sink, 1.0});
        return row;
    }
    const auto [q, c] = grid.decode(s);
    const Vec x = grid.mode(q).cell(c).center();
    for (std::size_t q2 = 0; q2 < grid.mode_count(); ++q2) {
        const double pi = model.mode_probability(q, q2, a);
        if (pi == 0.0)
            continue;
        const auto& k = ks[q2 * model.action_count() + a];
        const Vec m = k.mean(x);
        const auto& cells = grid.mode(q2).cells();
        for (std::size_t c2 = 0; c2 < cells.size(); ++c2) {
            double p = 1.0;
            for (Eigen::Index i = 0; i < m.size() && p >= kDropThreshold; ++i)
                p *= interval_mass(cells[c2].lower[i], cells[c2].upper[i], m[i], k.sigma()[i]);
            p *= pi;
            if (p >= kDropThreshold)
                row.push_back({static_cast<std::uint32_t>(grid.encode(q2, c2)), p});
        }
    }
    double kept = 0.0;
    for (const auto& e : row)
        kept += e.value;
    const double rest = 1.0 - kept;
    if (rest > 0.0)
        row.push_back({sink, rest});
    return row;
}

} // namespace

std::vector<double> faust_mode_lipschitz(const ShsModel& model) {
    const auto ks = faust_kernels(model);
    std::vector<double> lip(ks.size());
    for (std::size_t i = 0; i < ks.size(); ++i)
        lip[i] = lipschitz_constant(ks[i]);
    std::vector<double> out(model.mode_count(), 0.0);
    for (std::size_t q = 0; q < model.mode_count(); ++q)
        for (std::size_t a = 0; a < model.action_count(); ++a) {
            double l = 0.0;
            for (std::size_t q2 = 0; q2 < model.mode_count(); ++q2)
                l += model.mode_probability(q, q2, a) * lip[q2 * model.action_count() + a];
            out[q] = std::max(out[q], l);
        }
    return out;
}

std::vector<double> faust_local_errors(const ShsModel& model, const HybridGrid& grid) {
    const auto lip = faust_mode_lipschitz(model);
    std::vector<double> err(grid.cell_count());
    for (std::size_t s = 0; s < grid.cell_count(); ++s) {
        const auto [q, c] = grid.decode(s);
        const auto& part = grid.mode(q);
        err[s] = lip[q] * part.cell(c).diameter() * part.domain().volume();
    }
    return err;
}

MdpAbstraction build_faust(const ShsModel& model, const HybridGrid& grid, std::size_t horizon, Exec exec) {
    if (horizon < 1)
        throw ValidationError("FAUST engine needs a horizon of at least one step");
    if (exec == Exec::serial)
        return reference::build_faust(model, grid, horizon);

    validate(model);
    const auto ks = faust_kernels(model);
    MdpAbstraction out;
    out.grid = grid;
    out.horizon = horizon;
    const std::size_t states = grid.state_count();
    for (std::size_t a = 0; a < model.action_count(); ++a) {
        std::vector<std::vector<Entry>> rows(states);
#pragma omp parallel for schedule(dynamic, 16)
        for (std::size_t s = 0; s < states; ++s)
            rows[s] = faust_row(model, grid, ks, s, a);
        out.transitions.push_back(CsrMatrix::from_rows(states, rows));
    }
    out.rep_points.reserve(grid.cell_count());
    for (std::size_t s = 0; s < grid.cell_count(); ++s)
        out.rep_points.push_back(grid.rect(s).center());
    out.local_errors = faust_local_errors(model, grid);
    const double max_local =
        out.local_errors.empty() ? 0.0 : *std::max_element(out.local_errors.begin(), out.local_errors.end());
    out.global_error = static_cast<double>(horizon) * max_local;
    return out;
}

FaustRefinement adaptive_refine_faust(const ShsModel& model, const HybridGrid& initial, double target_error,
                                      std::size_t horizon, std::size_t max_cells, Exec exec) {
    if (!(target_error > 0.0))
        throw ValidationError("target abstraction error must be positive");
    const double K = static_cast<double>(horizon);
    const std::size_t children = std::size_t{1} << initial.mode(0).dim();

    FaustRefinement result;
    HybridGrid grid = initial;
    for (;;) {
        const auto err = faust_local_errors(model, grid);
        const auto worst = std::max_element(err.begin(), err.end()); // first maximum: lowest id
        if (worst == err.end() || K * *worst <= target_error)
            break;
        if (grid.cell_count() + children - 1 > max_cells) {
            result.budget_exhausted = true;
            break;
        }
        const std::size_t id = static_cast<std::size_t>(worst - err.begin());
        grid = split_states(grid, std::span<const std::size_t>(&id, 1));
        ++result.splits;
    }
    result.abstraction = build_faust(model, grid, horizon, exec);
    return result;
}

} // namespace stochy
