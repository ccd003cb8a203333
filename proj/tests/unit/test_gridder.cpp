#include "fixtures.hpp"
#include "stochy/gridder.hpp"

#include <doctest.h>

#include <numeric>
#include <random>

using namespace stochy;

namespace {

double total_volume(const Partition& p) {
    double v = 0.0;
    for (const auto& c : p.cells())
        v += c.volume();
    return v;
}

} // namespace

TEST_CASE("uniform grid uses ceil(width / delta) cells and truncates the last one") {
    const auto p = uniform_grid(make_rect({{18, 24}, {18, 24}}), Vec::Constant(2, 0.0845));
    CHECK(p.grid_counts() == std::vector<std::size_t>{72, 72});
    CHECK(p.size() == 5184);
    CHECK(total_volume(p) == doctest::Approx(36.0).epsilon(1e-12));
    CHECK(p.cells().back().upper == Vec::Constant(2, 24.0));
    const auto q = uniform_grid(make_rect({{-1, 1}}), Vec::Constant(1, 0.5));
    CHECK(q.size() == 4);
}

TEST_CASE("locate honours the face convention") {
    const auto p = uniform_grid(make_rect({{0, 2}, {0, 2}}), Vec::Constant(2, 1.0));
    for (std::size_t c = 0; c < p.size(); ++c)
        CHECK(p.locate(p.cell(c).center()) == c);
    const auto mid = p.locate(Vec::Constant(2, 1.0));
    REQUIRE(mid);
    CHECK(p.cell(*mid).lower == Vec::Constant(2, 1.0));
    CHECK(p.locate(Vec::Constant(2, 2.0)).has_value());
    CHECK_FALSE(p.locate(Vec::Constant(2, 2.0001)).has_value());
    CHECK_FALSE(p.locate(Vec::Constant(2, -1e-9)).has_value());
}

TEST_CASE("splitting keeps cell ids and tiles the parent") {
    auto p = uniform_grid(fixture::unit_box(2), Vec::Constant(2, 0.5));
    const auto before = p.cells();
    const std::size_t ids[] = {5, 9};
    const auto r = split_cells(p, ids);
    CHECK(r.size() == p.size() + 2 * 3);
    for (std::size_t c = 0; c < before.size(); ++c) {
        if (c == 5 || c == 9) {
            CHECK(before[c].contains(r.cell(c)));
            CHECK(r.cell(c).volume() == doctest::Approx(before[c].volume() / 4));
        } else {
            CHECK(r.cell(c).lower == before[c].lower);
            CHECK(r.cell(c).upper == before[c].upper);
        }
    }
    CHECK(total_volume(r) == doctest::Approx(4.0).epsilon(1e-12));
    std::mt19937_64 rng(4);
    for (int i = 0; i < 2000; ++i) {
        const Vec x = fixture::uniform_point(rng, p.domain());
        const auto c = r.locate(x);
        REQUIRE(c);
        CHECK(r.cell(*c).contains(x));
    }
}

TEST_CASE("hybrid grid encodes modes contiguously with the sink last") {
    const auto g = uniform_hybrid_grid(fixture::unit_box(2), Vec::Constant(2, 1.0), 3);
    CHECK(g.cell_count() == 12);
    CHECK(g.sink() == 12);
    for (std::size_t s = 0; s < g.cell_count(); ++s) {
        const auto ref = g.decode(s);
        CHECK(g.encode(ref.mode, ref.cell) == s);
    }
    CHECK(g.locate(2, Vec::Constant(2, 0.5)) == g.encode(2, 3));
    CHECK(g.locate(1, Vec::Constant(2, 5.0)) == g.sink());
    const std::size_t split[] = {g.encode(1, 0)};
    const auto r = split_states(g, split);
    CHECK(r.cell_count() == 15);
    CHECK(r.mode(1).size() == 7);
    CHECK(r.offset(2) == 11);
    CHECK_THROWS(split_states(g, std::vector<std::size_t>{g.sink()}));
}

TEST_CASE("labels follow containment for targets and overlap for avoids") {
    const auto p = uniform_grid(make_rect({{0, 4}}), Vec::Constant(1, 1.0));
    const std::vector<HyperRect> targets{make_rect({{0, 1.5}}), make_rect({{1.5, 2}})};
    const std::vector<HyperRect> avoids{make_rect({{2.5, 3.2}}), make_rect({{1.0, 1.0}})};
    const auto l = label_cells(p, targets, avoids);
    CHECK(l.labels[0] == Label::target);
    CHECK(l.labels[1] == Label::target); // covered by the union of two targets
    CHECK(l.labels[2] == Label::avoid);
    CHECK(l.labels[3] == Label::avoid);
    CHECK(l.conflicts.empty());
    const auto both = label_cells(p, {make_rect({{0, 1}})}, {make_rect({{0.5, 0.6}})});
    CHECK(both.labels[0] == Label::avoid);
    CHECK(both.conflicts == std::vector<std::size_t>{0});
    const auto g = uniform_hybrid_grid(make_rect({{0, 4}}), Vec::Constant(1, 1.0), 2);
    const auto lg = label_states(g, targets, avoids);
    CHECK(lg.labels.size() == g.state_count());
    CHECK(lg.is(g.sink(), Label::avoid));
    CHECK(lg.is(g.encode(1, 0), Label::target));
}

TEST_CASE("union coverage ignores measure-zero gaps only") {
    const auto cell = make_rect({{0, 1}, {0, 1}});
    CHECK(covered_by_union(cell, {make_rect({{0, 0.5}, {0, 1}}), make_rect({{0.5, 1}, {0, 1}})}));
    CHECK_FALSE(covered_by_union(cell, {make_rect({{0, 0.5}, {0, 1}}), make_rect({{0.6, 1}, {0, 1}})}));
    CHECK(covered_by_union(cell, {make_rect({{-1, 2}, {-1, 2}})}));
}

TEST_CASE("region files parse one rectangle per line") {
    const auto r = parse_regions("-0.3 0.3 -0.3 0.3\n# comment\n\n0.3 0.9 -0.9 -0.3\n", 2);
    REQUIRE(r.size() == 2);
    CHECK(r[1].lower == (Vec(2) << 0.3, -0.9).finished());
    CHECK_THROWS_AS(parse_regions("0 1 2\n", 2), ValidationError);
    CHECK_THROWS_AS(parse_regions("1 0 0 1\n", 2), ValidationError);
}
