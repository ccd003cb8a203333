#pragma once

#include "stochy/checker.hpp"
#include "stochy/gridder.hpp"
#include "stochy/model.hpp"

#include <functional>
#include <optional>
#include <variant>
#include <vector>

namespace stochy {

/// Sampled hybrid trajectories, stored trace-major.
struct TraceSet {
    std::size_t n_traces = 0;
    std::size_t horizon = 0;
    std::size_t n = 0;
    std::size_t mode_count = 0;
    std::uint64_t seed = 0;
    std::vector<std::uint32_t> modes; // n_traces * (horizon + 1)
    std::vector<double> states;       // n_traces * (horizon + 1) * n

    std::size_t steps() const { return horizon + 1; }
    std::uint32_t mode(std::size_t t, std::size_t k) const { return modes[t * steps() + k]; }
    Eigen::Map<const Vec> state(std::size_t t, std::size_t k) const {
        return {states.data() + (t * steps() + k) * n, static_cast<Eigen::Index>(n)};
    }

    bool operator==(const TraceSet&) const = default;
};

/// One input vector per step (row k is used for the step k -> k+1).
struct InputSignal {
    Mat u;

    std::size_t length() const { return static_cast<std::size_t>(u.rows()); }
};

/// Whitespace-separated rows, one per step; `#` starts a comment.
InputSignal parse_input_signal(const std::string& text, std::size_t v);
InputSignal load_input_signal(const std::string& path, std::size_t v);

/// Independent Gaussian initial condition in a fixed mode.
struct InitialDistribution {
    std::size_t mode = 0;
    Vec mean;
    Vec stddev;
};

/// Either one state per trace, or a distribution sampled at the start of every trace.
using InitialCondition = std::variant<std::vector<HybridState>, InitialDistribution>;

/// Chooses an action index from the time step and the current hybrid state.
using Controller = std::function<std::size_t(std::size_t step, const HybridState& state)>;

struct SimulationSpec {
    InitialCondition init;
    std::optional<InputSignal> input; // overrides action inputs when present
    std::size_t horizon = 1;
    std::size_t n_traces = 1;
    std::uint64_t seed = 0;
    Controller controller; // required for action-driven models
};

/// Monte Carlo simulation. Trace t draws from RandomStream::derive(seed, t): first
/// the initial state (if sampled), then per step one uniform for the mode switch
/// (stochastic mode kernels only) followed by n normals for the noise.
TraceSet simulate(const ShsModel& model, const SimulationSpec& spec, Exec exec = Exec::parallel);

/// Controller that looks the current cell up in `grid` and plays `strategy`;
/// outside the grid it plays action 0. Holds references to both arguments.
Controller strategy_controller(const HybridGrid& grid, const Strategy& strategy);

struct Histogram {
    std::vector<double> edges; // bins + 1
    std::vector<std::size_t> counts;
};

/// Histogram of a continuous coordinate at step k: `bins` equal-width bins over the
/// observed range (a single occupied bin when the range is empty).
Histogram histogram(const TraceSet& ts, std::size_t dim, std::size_t step, std::size_t bins = 25);
/// One bin per mode, centred on the mode index.
Histogram mode_histogram(const TraceSet& ts, std::size_t step);

} // namespace stochy
