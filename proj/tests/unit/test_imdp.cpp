#include "fixtures.hpp"
#include "oracles.hpp"
#include "stochy/imdp.hpp"
#include "stochy/kernel.hpp"

#include <doctest.h>

#include <cmath>

using namespace stochy;

namespace {

double exact_probability(const ShsModel& m, std::size_t q, std::size_t q2, const Vec& x, const HyperRect& target) {
    const GaussKernel k(m.modes[q2], Vec());
    const double pi = m.mode_probability(q, q2, 0);
    if (k.diagonal())
        return pi * cell_prob(k, x, target);
    return pi * oracle::rect_prob_2d(k.mean(x), k.covariance(), target.lower, target.upper);
}

Labeling all_safe(const HybridGrid& g) {
    Labeling l;
    l.labels.assign(g.state_count(), Label::safe);
    l.labels[g.sink()] = Label::avoid;
    return l;
}

} // namespace

TEST_CASE("interval rows are feasible and enclose the exact probabilities") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 8; ++trial) {
        const std::size_t modes = 1 + trial % 2, n = 1 + trial % 2;
        const bool diag = trial % 4 < 2;
        const auto m = fixture::random_model(rng, modes, n, diag || n == 1);
        const auto grid = uniform_hybrid_grid(fixture::unit_box(n), Vec::Constant(n, 0.25), modes);
        const auto a = build_imdp(m, grid, all_safe(grid));
        const auto& P = a.P[0];
        for (std::size_t s = 0; s < a.state_count(); ++s) {
            double lo = 0.0, hi = 0.0;
            for (std::size_t k = P.row_begin(s); k < P.row_end(s); ++k) {
                CHECK(P.low[k] >= 0.0);
                CHECK(P.low[k] <= P.high[k]);
                CHECK(P.high[k] <= 1.0);
                lo += P.low[k];
                hi += P.high[k];
            }
            CHECK(lo <= 1.0 + 1e-12);
            CHECK(hi >= 1.0 - 1e-12);
        }
        for (int probe = 0; probe < 40; ++probe) {
            const std::size_t s = rng() % grid.cell_count(), t = rng() % grid.cell_count();
            const auto q = grid.decode(s).mode, q2 = grid.decode(t).mode;
            const auto e = P.at(s, t);
            const double high = e.high > 0.0 ? e.high : kIntervalDropThreshold;
            for (int i = 0; i < 10; ++i) {
                const double p = exact_probability(m, q, q2, fixture::uniform_point(rng, grid.rect(s)), grid.rect(t));
                CHECK(p >= e.low - 1e-10);
                CHECK(p <= high + 1e-10);
            }
        }
    }
}

TEST_CASE("sink bounds combine complements, the domain mass and the dropped mass") {
    const std::vector<IntervalEntry> cells{{0, 0.2, 0.5}, {1, 0.1, 0.3}};
    const auto e = sink_entry(9, cells, RowExtras{0.0, 0.6, 0.7});
    CHECK(e.col == 9);
    CHECK(e.low == doctest::Approx(0.3)); // max(1 - 0.8, 1 - 0.7)
    CHECK(e.high == doctest::Approx(0.4)); // min(1 - 0.3, 1 - 0.6)
    const auto d = sink_entry(9, cells, RowExtras{0.05, 0.0, 1.0});
    CHECK(d.low == doctest::Approx(0.15)); // 1 - (0.8 + 0.05)
    CHECK(d.high == doctest::Approx(0.75)); // 1 - 0.3 + 0.05
    const auto inside = sink_entry(9, {}, RowExtras{0.0, 1.0, 1.0});
    CHECK(inside.low == 1.0); // no cell entries: everything reaches the sink
    CHECK(inside.high == 1.0);
}

TEST_CASE("incremental update matches a fresh build") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 6; ++trial) {
        const std::size_t modes = 1 + trial % 2, n = 2;
        const auto m = fixture::random_model(rng, modes, n, trial % 3 != 2);
        const auto grid = uniform_hybrid_grid(fixture::unit_box(n), Vec::Constant(n, 0.25), modes);
        const auto old = build_imdp(m, grid, all_safe(grid));
        std::vector<std::size_t> split;
        for (std::size_t s = 0; s < grid.cell_count(); ++s)
            if (rng() % 5 == 0)
                split.push_back(s);
        const auto refined = split_states(grid, split);
        const auto labels = all_safe(refined);
        const auto upd = update_imdp(m, old, refined, split, labels);
        const auto fresh = build_imdp(m, refined, labels);
        const auto& A = upd.P[0];
        const auto& B = fresh.P[0];
        REQUIRE(A.rows == B.rows);
        for (std::size_t s = 0; s < A.rows; ++s) {
            // cell entries agree exactly; the sink may differ through the dropped-mass allowance
            REQUIRE(A.row_end(s) - A.row_begin(s) == B.row_end(s) - B.row_begin(s));
            for (std::size_t k = A.row_begin(s), j = B.row_begin(s); k < A.row_end(s); ++k, ++j) {
                CHECK(A.col[k] == B.col[j]);
                if (A.col[k] == refined.sink()) {
                    CHECK(std::abs(A.low[k] - B.low[j]) <= 1e-9);
                    CHECK(std::abs(A.high[k] - B.high[j]) <= 1e-9);
                } else {
                    CHECK(A.low[k] == B.low[j]);
                    CHECK(A.high[k] == B.high[j]);
                }
            }
        }
    }
}

TEST_CASE("refinement splits cells until the error target or the budget") {
    const auto m = fixture::single_mode(Mat::Identity(2, 2) * 0.7, Vec::Zero(2), Mat::Identity(2, 2) * 0.15);
    const auto grid = uniform_hybrid_grid(fixture::unit_box(2), Vec::Constant(2, 0.5), 1);
    const Regions regions{{}, {make_rect({{0.6, 1.0}, {0.6, 1.0}})}};
    const Property safety{PropertyKind::safety, 3};
    const auto r = refine_imdp(m, grid, regions, safety, 0.2, 2000);
    REQUIRE_FALSE(r.eps_history.empty());
    CHECK(r.eps_history.back() <= r.eps_history.front());
    if (!r.budget_exhausted)
        CHECK(r.result.max_eps() < 0.2);
    CHECK(r.abstraction.state_count() <= 2000);
    const auto fresh = label_states(r.abstraction.grid, regions.targets, regions.avoids);
    CHECK(fresh.labels == r.abstraction.labeling.labels);
    const auto tight = refine_imdp(m, grid, regions, safety, 1e-6, 200);
    CHECK(tight.budget_exhausted);
    CHECK(tight.abstraction.state_count() <= 200);
}
