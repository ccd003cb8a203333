#pragma once

#include "stochy/checker.hpp"
#include "stochy/gridder.hpp"
#include "stochy/simulator.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stochy {

enum class Engine { simulator = 1, faust = 2, imdp = 3 };

enum class TaskKind { verify_safety = 1, verify_reach_avoid = 2, synth_safety = 3, synth_reach_avoid = 4 };

struct GridSpec {
    Vec delta;
    std::optional<double> max_error; // adaptive refinement target when present
    std::size_t max_cells = 1000000;
};

struct SimulationBlock {
    std::size_t traces = 1;
    std::uint64_t seed = 0;
    std::optional<std::size_t> steps; // defaults to the task horizon
    InitialCondition init;
    std::optional<std::filesystem::path> input;
    std::vector<std::size_t> histogram_steps;
    std::size_t bins = 25;
};

struct TaskSpec {
    Engine engine = Engine::simulator;
    TaskKind kind = TaskKind::verify_safety;
    std::optional<std::size_t> horizon; // nullopt: unbounded (-1 in the document)
    std::optional<HyperRect> domain;
    std::optional<GridSpec> grid;
    std::optional<std::filesystem::path> target_regions;
    std::optional<std::filesystem::path> avoid_regions;
    CheckOptions solver;
    std::optional<SimulationBlock> simulation;
    bool export_prism = false;

    bool synthesis() const { return kind == TaskKind::synth_safety || kind == TaskKind::synth_reach_avoid; }
    Property property() const;
};

/// Parses a JSON task document; relative paths resolve against `base_dir`.
TaskSpec parse_task(std::string_view text, const std::filesystem::path& base_dir = {});
TaskSpec load_task(const std::filesystem::path& path);

/// Throws ValidationError when the task cannot run on the model.
void validate_task(const TaskSpec& task, const ShsModel& model);

struct RunSummary {
    std::string engine;
    std::size_t states = 0;
    std::size_t cells = 0;
    double seconds = 0.0;
    double error = 0.0; // max eps (IMDP) or saturated global error (FAUST)
    std::size_t iterations = 0;
    bool converged = true;
    bool budget_exhausted = false;
    std::vector<std::string> files;
};

/// Runs the task's engine and writes its result files under `out_dir`.
RunSummary run_task(const ShsModel& model, const TaskSpec& task, const std::filesystem::path& out_dir);

/// Runs the task's simulation block only.
RunSummary run_simulation(const ShsModel& model, const TaskSpec& task, const std::filesystem::path& out_dir);

/// Builds the FAUST abstraction of the task and writes it in PRISM explicit format.
RunSummary run_export(const ShsModel& model, const TaskSpec& task, const std::filesystem::path& out_dir);

} // namespace stochy
