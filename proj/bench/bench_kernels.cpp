// Serial reference versus OpenMP paths of the data-parallel kernels.
// Thread count follows OMP_NUM_THREADS / STOCHY_THREADS.

#include "stochy/imdp.hpp"
#include "stochy/simulator.hpp"
#include "stochy/task.hpp"

#include <benchmark/benchmark.h>

using namespace stochy;

namespace {

std::string config(const char* rel) { return std::string(STOCHY_CONFIG_DIR) + "/" + rel; }

struct Cs2 {
    ShsModel model = load_model(config("cs2/model.json"));
    HybridGrid grid = uniform_hybrid_grid(make_rect({{-1.5, 1.5}, {-1.5, 1.5}}), Vec::Constant(2, 0.2), 2);
    Labeling labels = label_states(grid, load_regions(config("cs2/green.txt"), 2),
                                   load_regions(config("cs2/purple.txt"), 2));
};

const Cs2& cs2() {
    static const Cs2 c;
    return c;
}

Exec exec_of(const benchmark::State& state) { return state.range(0) ? Exec::parallel : Exec::serial; }

void BM_BuildImdp(benchmark::State& state) {
    const auto& c = cs2();
    for (auto _ : state)
        benchmark::DoNotOptimize(build_imdp(c.model, c.grid, c.labels, exec_of(state)));
    state.SetLabel(state.range(0) ? "parallel" : "serial");
}

void BM_ImdpCheck(benchmark::State& state) {
    const auto& c = cs2();
    static const ImdpAbstraction a = build_imdp(c.model, c.grid, c.labels);
    CheckOptions opt;
    opt.exec = exec_of(state);
    const Property p{PropertyKind::reach_avoid, std::nullopt};
    for (auto _ : state) {
        Strategy s;
        benchmark::DoNotOptimize(imdp_check(a, p, opt, &s));
    }
    state.SetLabel(state.range(0) ? "parallel" : "serial");
}

void BM_Simulate(benchmark::State& state) {
    static const ShsModel m = load_model(config("cs4/model.json"));
    SimulationSpec s;
    s.init = InitialDistribution{0, (Vec(2) << 450, 17).finished(), (Vec(2) << 25, 2).finished()};
    s.input = load_input_signal(config("cs4/u.txt"), 1);
    s.horizon = 32;
    s.n_traces = 5000;
    s.seed = 42;
    for (auto _ : state)
        benchmark::DoNotOptimize(simulate(m, s, exec_of(state)));
    state.SetLabel(state.range(0) ? "parallel" : "serial");
}

} // namespace

BENCHMARK(BM_BuildImdp)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ImdpCheck)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Simulate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
