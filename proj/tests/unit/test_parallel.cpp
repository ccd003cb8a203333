#include "fixtures.hpp"
#include "stochy/faust.hpp"
#include "stochy/imdp.hpp"
#include "stochy/simulator.hpp"

#include <doctest.h>
#include <omp.h>

using namespace stochy;

namespace {

struct Threads {
    explicit Threads(int n) : saved(omp_get_max_threads()) { omp_set_num_threads(n); }
    ~Threads() { omp_set_num_threads(saved); }
    int saved;
};

bool same(const CheckResult& a, const CheckResult& b) {
    return a.p_low == b.p_low && a.p_high == b.p_high && a.eps == b.eps && a.iterations == b.iterations;
}

} // namespace

TEST_CASE("parallel and serial builders agree bitwise") {
    const Threads threads(4);
    std::mt19937_64 rng(71);
    for (int trial = 0; trial < 4; ++trial) {
        const std::size_t modes = 1 + trial % 2;
        const auto diag = fixture::random_model(rng, modes, 2, true);
        const auto full = fixture::random_model(rng, modes, 2, false);
        const auto grid = uniform_hybrid_grid(fixture::unit_box(2), Vec::Constant(2, 0.2), modes);
        const auto fs = build_faust(diag, grid, 3, Exec::serial);
        const auto fp = build_faust(diag, grid, 3, Exec::parallel);
        CHECK(fs.transitions == fp.transitions);
        CHECK(fs.global_error == fp.global_error);
        const auto labels = label_states(grid, {}, {make_rect({{0.5, 1}, {-1, -0.5}})});
        for (const auto* m : {&diag, &full}) {
            const auto is = build_imdp(*m, grid, labels, Exec::serial);
            const auto ip = build_imdp(*m, grid, labels, Exec::parallel);
            CHECK(is.P == ip.P);
        }
    }
}

TEST_CASE("parallel and serial robust value iteration agree bitwise, strategies included") {
    const Threads threads(4);
    const auto sw = load_model(fixture::config("cs2/model.json"));
    const auto grid = uniform_hybrid_grid(make_rect({{-1.5, 1.5}, {-1.5, 1.5}}), Vec::Constant(2, 0.3), 2);
    const Regions regions{{make_rect({{-0.3, 0.3}, {-0.3, 0.3}})}, {make_rect({{0.3, 0.9}, {-0.9, -0.3}})}};
    const auto labels = label_states(grid, regions.targets, regions.avoids);
    const auto a = build_imdp(sw, grid, labels);
    for (const Property p : {Property{PropertyKind::reach_avoid, std::nullopt}, Property{PropertyKind::safety, 5},
                             Property{PropertyKind::reach_avoid, 7}}) {
        CheckOptions serial, parallel;
        serial.exec = Exec::serial;
        parallel.exec = Exec::parallel;
        Strategy ss, sp;
        const auto rs = imdp_check(a, p, serial, &ss);
        const auto rp = imdp_check(a, p, parallel, &sp);
        CHECK(same(rs, rp));
        CHECK(ss.rules == sp.rules);
        CHECK(ss.time_indexed == sp.time_indexed);
    }
    const auto fa = build_faust([&] {
        auto m = sw;
        for (auto& d : m.modes)
            d.G = Mat::Identity(2, 2) * 0.3;
        return m;
    }(), grid, 4);
    CheckOptions serial;
    serial.exec = Exec::serial;
    const auto vs = mdp_value_iteration(fa.transitions, labels, Property{PropertyKind::reach_avoid, 4}, serial);
    const auto vp = mdp_value_iteration(fa.transitions, labels, Property{PropertyKind::reach_avoid, 4});
    CHECK(vs.values == vp.values);
    CHECK(vs.strategy.rules == vp.strategy.rules);
}

TEST_CASE("parallel and serial simulation agree bitwise") {
    const Threads threads(4);
    const auto m = load_model(fixture::config("cs4/model.json"));
    SimulationSpec s;
    s.init = InitialDistribution{0, (Vec(2) << 450, 17).finished(), (Vec(2) << 25, 2).finished()};
    s.horizon = 16;
    s.n_traces = 777;
    s.seed = 99;
    s.input = InputSignal{Mat::Constant(16, 1, 0.4)};
    CHECK(simulate(m, s, Exec::serial) == simulate(m, s, Exec::parallel));
}

TEST_CASE("controller failures inside parallel regions surface as exceptions") {
    const Threads threads(4);
    const auto sw = load_model(fixture::config("cs2/model.json"));
    SimulationSpec s;
    s.init = std::vector<HybridState>(64, HybridState{0, Vec::Zero(2)});
    s.n_traces = 64;
    s.horizon = 3;
    s.controller = [](std::size_t, const HybridState&) -> std::size_t { return 5; };
    CHECK_THROWS_AS(simulate(sw, s, Exec::parallel), ValidationError);
}
