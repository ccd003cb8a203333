#include "stochy/task.hpp"

#include "stochy/faust.hpp"
#include "stochy/imdp.hpp"
#include "stochy/prism.hpp"
#include "stochy/results.hpp"

#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace stochy {

using json = nlohmann::json;
namespace fs = std::filesystem;

Property TaskSpec::property() const {
    const bool reach = kind == TaskKind::verify_reach_avoid || kind == TaskKind::synth_reach_avoid;
    return Property{reach ? PropertyKind::reach_avoid : PropertyKind::safety, horizon};
}

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object())
        throw ValidationError(where + ": expected an object");
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key))
            throw ValidationError(where + ": unknown field '" + key + "'");
}

Vec read_vec(const json& j, const std::string& what) {
    if (!j.is_array() || j.empty())
        throw ValidationError(what + ": expected a non-empty list of numbers");
    Vec v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    return v;
}

fs::path resolve(const fs::path& base, const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

SimulationBlock parse_simulation(const json& j, const fs::path& base) {
    check_keys(j, {"traces", "seed", "steps", "init", "input", "histogram_steps", "bins"}, "simulation");
    SimulationBlock b;
    b.traces = j.value("traces", std::size_t{1});
    b.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("steps"))
        b.steps = j["steps"].get<std::size_t>();
    if (j.contains("input"))
        b.input = resolve(base, j["input"].get<std::string>());
    if (j.contains("histogram_steps"))
        b.histogram_steps = j["histogram_steps"].get<std::vector<std::size_t>>();
    b.bins = j.value("bins", std::size_t{25});
    if (b.traces == 0 || b.bins == 0)
        throw ValidationError("simulation: traces and bins must be positive");

    if (!j.contains("init"))
        throw ValidationError("simulation: missing 'init'");
    const json& init = j["init"];
    check_keys(init, {"mode", "mean", "stddev", "point", "states"}, "simulation.init");
    const std::size_t mode = init.value("mode", std::size_t{0});
    if (init.contains("states")) {
        std::vector<HybridState> states;
        for (const auto& s : init["states"]) {
            check_keys(s, {"mode", "x"}, "simulation.init.states[]");
            states.push_back({s.value("mode", std::size_t{0}), read_vec(s.at("x"), "simulation.init.states[].x")});
        }
        b.init = std::move(states);
    } else if (init.contains("point")) {
        b.init = std::vector<HybridState>(b.traces, HybridState{mode, read_vec(init["point"], "simulation.init.point")});
    } else if (init.contains("mean")) {
        InitialDistribution d{mode, read_vec(init["mean"], "simulation.init.mean"), {}};
        d.stddev = init.contains("stddev") ? read_vec(init["stddev"], "simulation.init.stddev")
                                           : Vec::Zero(d.mean.size());
        b.init = std::move(d);
    } else {
        throw ValidationError("simulation.init: give 'states', 'point' or 'mean'/'stddev'");
    }
    return b;
}

} // namespace

TaskSpec parse_task(std::string_view text, const fs::path& base_dir) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("task document: ") + e.what());
    }
    try {
        check_keys(doc, {"description", "engine", "property", "horizon", "domain", "grid", "regions", "solver",
                         "simulation", "export_prism"},
                   "task");
        TaskSpec t;
        const int engine = doc.at("engine").get<int>();
        if (engine < 1 || engine > 3)
            throw ValidationError("task: engine must be 1 (simulator), 2 (faust) or 3 (imdp)");
        t.engine = static_cast<Engine>(engine);
        const int prop = doc.value("property", 1);
        if (prop < 1 || prop > 4)
            throw ValidationError("task: property must be 1 (verify safety), 2 (verify reach-avoid), "
                                  "3 (safety synthesis) or 4 (reach-avoid synthesis)");
        t.kind = static_cast<TaskKind>(prop);
        if (doc.contains("horizon")) {
            const long long k = doc["horizon"].get<long long>();
            if (k < -1)
                throw ValidationError("task: horizon must be -1 (unbounded) or non-negative");
            if (k >= 0)
                t.horizon = static_cast<std::size_t>(k);
        }
        if (doc.contains("domain")) {
            const auto& d = doc["domain"];
            if (!d.is_array() || d.empty())
                throw ValidationError("task: domain must be a list of [lower, upper] pairs");
            HyperRect r{Vec(static_cast<Eigen::Index>(d.size())), Vec(static_cast<Eigen::Index>(d.size()))};
            for (std::size_t i = 0; i < d.size(); ++i) {
                if (!d[i].is_array() || d[i].size() != 2)
                    throw ValidationError("task: domain must be a list of [lower, upper] pairs");
                r.lower[static_cast<Eigen::Index>(i)] = d[i][0].get<double>();
                r.upper[static_cast<Eigen::Index>(i)] = d[i][1].get<double>();
            }
            if (!r.well_formed())
                throw ValidationError("task: domain bounds must satisfy lower < upper");
            t.domain = r;
        }
        if (doc.contains("grid")) {
            const auto& g = doc["grid"];
            check_keys(g, {"delta", "max_error", "max_cells"}, "grid");
            GridSpec gs;
            gs.delta = read_vec(g.at("delta"), "grid.delta");
            if (g.contains("max_error"))
                gs.max_error = g["max_error"].get<double>();
            gs.max_cells = g.value("max_cells", gs.max_cells);
            t.grid = gs;
        }
        if (doc.contains("regions")) {
            const auto& r = doc["regions"];
            check_keys(r, {"target", "avoid"}, "regions");
            if (r.contains("target"))
                t.target_regions = resolve(base_dir, r["target"].get<std::string>());
            if (r.contains("avoid"))
                t.avoid_regions = resolve(base_dir, r["avoid"].get<std::string>());
        }
        if (doc.contains("solver")) {
            const auto& s = doc["solver"];
            check_keys(s, {"tolerance", "max_iterations"}, "solver");
            t.solver.tolerance = s.value("tolerance", t.solver.tolerance);
            t.solver.max_iterations = s.value("max_iterations", t.solver.max_iterations);
            if (!(t.solver.tolerance > 0.0))
                throw ValidationError("solver: tolerance must be positive");
        }
        if (doc.contains("simulation"))
            t.simulation = parse_simulation(doc["simulation"], base_dir);
        t.export_prism = doc.value("export_prism", false);
        return t;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("task document: ") + e.what());
    }
}

TaskSpec load_task(const fs::path& path) {
    std::ifstream f(path);
    if (!f)
        throw RuntimeError("cannot open task document '" + path.string() + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_task(ss.str(), path.parent_path());
}

void validate_task(const TaskSpec& task, const ShsModel& model) {
    if (task.engine == Engine::simulator) {
        if (!task.simulation)
            throw ValidationError("simulator engine needs a 'simulation' block");
        if (!task.simulation->steps && !task.horizon)
            throw ValidationError("simulator engine needs a finite horizon");
        return;
    }
    if (task.engine == Engine::faust && !task.horizon)
        throw ValidationError("unbounded horizon unsupported by FAUST engine");
    if (!task.domain || !task.grid)
        throw ValidationError("abstraction engines need 'domain' and 'grid'");
    if (task.domain->dim() != model.n || static_cast<std::size_t>(task.grid->delta.size()) != model.n)
        throw ValidationError("domain and grid must match the state dimension " + std::to_string(model.n));
    if (task.property().kind == PropertyKind::reach_avoid && !task.target_regions)
        throw ValidationError("reach-avoid tasks need a target region file");
    if (!task.synthesis() && model.action_count() > 1)
        throw ValidationError("verification needs a model with a single action; use a synthesis task (3 or 4)");
    if (task.engine == Engine::faust && task.grid->max_error && !(*task.grid->max_error > 0.0))
        throw ValidationError("grid.max_error must be positive");
}

namespace {

using Clock = std::chrono::steady_clock;

struct Sets {
    std::vector<HyperRect> targets;
    std::vector<HyperRect> avoids;
};

Sets load_sets(const TaskSpec& task, std::size_t n) {
    Sets s;
    if (task.target_regions)
        s.targets = load_regions(task.target_regions->string(), n);
    if (task.avoid_regions)
        s.avoids = load_regions(task.avoid_regions->string(), n);
    return s;
}

void warn_labels(const Labeling& l, const Property& p) {
    if (p.kind == PropertyKind::reach_avoid && l.count(Label::target) == 0)
        std::cerr << "warning: no state is labelled target; reach-avoid probabilities are all 0\n";
    if (!l.conflicts.empty())
        std::cerr << "warning: " << l.conflicts.size() << " cells meet both target and avoid regions; labelled avoid\n";
}

std::vector<std::pair<std::string, std::string>> summary_fields(const RunSummary& s, const TaskSpec& t) {
    return {{"engine", s.engine},
            {"task", std::to_string(static_cast<int>(t.kind))},
            {"horizon", t.horizon ? std::to_string(*t.horizon) : "-1"},
            {"states", std::to_string(s.states)},
            {"cells", std::to_string(s.cells)},
            {"time_s", format_double(s.seconds)},
            {"error", format_double(s.error)},
            {"iterations", std::to_string(s.iterations)},
            {"converged", s.converged ? "true" : "false"},
            {"budget_exhausted", s.budget_exhausted ? "true" : "false"}};
}

SimulationSpec simulation_spec(const ShsModel& model, const TaskSpec& task, std::size_t steps) {
    const auto& b = *task.simulation;
    SimulationSpec spec;
    spec.init = b.init;
    if (b.input)
        spec.input = load_input_signal(b.input->string(), model.v);
    spec.horizon = steps;
    spec.n_traces = b.traces;
    spec.seed = b.seed;
    return spec;
}

void write_traces_and_histograms(const fs::path& out, const TraceSet& ts, const SimulationBlock& b, RunSummary& s) {
    results::write_traces(out / "traces.csv", ts);
    s.files.push_back("traces.csv");
    for (const std::size_t k : b.histogram_steps) {
        const std::string name = "hist_step_" + std::to_string(k) + ".csv";
        results::write_histograms(out / name, ts, k, b.bins);
        s.files.push_back(name);
    }
}

} // namespace

RunSummary run_simulation(const ShsModel& model, const TaskSpec& task, const fs::path& out_dir) {
    if (!task.simulation)
        throw ValidationError("task has no 'simulation' block");
    const auto t0 = Clock::now();
    const std::size_t steps = task.simulation->steps ? *task.simulation->steps : task.horizon.value_or(0);
    if (steps == 0)
        throw ValidationError("simulation needs a positive number of steps");
    SimulationSpec spec = simulation_spec(model, task, steps);
    if (model.action_driven())
        spec.controller = [](std::size_t, const HybridState&) -> std::size_t { return 0; };
    const TraceSet ts = simulate(model, spec);

    RunSummary s;
    s.engine = "simulator";
    write_traces_and_histograms(out_dir, ts, *task.simulation, s);
    s.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    s.files.push_back("summary.txt");
    results::write_summary(out_dir / "summary.txt", summary_fields(s, task));
    return s;
}

RunSummary run_export(const ShsModel& model, const TaskSpec& task, const fs::path& out_dir) {
    validate_task(task, model);
    if (task.engine != Engine::faust)
        throw ValidationError("PRISM export needs a FAUST (engine 2) task");
    const auto t0 = Clock::now();
    const HybridGrid grid = uniform_hybrid_grid(*task.domain, task.grid->delta, model.mode_count());
    const Sets sets = load_sets(task, model.n);
    const Labeling labeling = label_states(grid, sets.targets, sets.avoids);
    const MdpAbstraction a = build_faust(model, grid, *task.horizon);
    write_prism(out_dir / "model", a, &labeling);

    RunSummary s;
    s.engine = "faust";
    s.states = a.state_count();
    s.cells = grid.cell_count();
    s.error = a.reported_error();
    s.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    s.files = {"model.sta", "model.tra", "model.lab", "summary.txt"};
    results::write_summary(out_dir / "summary.txt", summary_fields(s, task));
    return s;
}

RunSummary run_task(const ShsModel& model, const TaskSpec& task, const fs::path& out_dir) {
    validate(model);
    validate_task(task, model);
    if (task.engine == Engine::simulator)
        return run_simulation(model, task, out_dir);

    const auto t0 = Clock::now();
    fs::create_directories(out_dir);
    const HybridGrid grid = uniform_hybrid_grid(*task.domain, task.grid->delta, model.mode_count());
    const Sets sets = load_sets(task, model.n);
    const Property property = task.property();
    RunSummary s;

    if (task.engine == Engine::faust) {
        s.engine = "faust";
        MdpAbstraction a;
        if (task.grid->max_error) {
            auto r = adaptive_refine_faust(model, grid, *task.grid->max_error, *task.horizon, task.grid->max_cells);
            s.budget_exhausted = r.budget_exhausted;
            a = std::move(r.abstraction);
        } else {
            a = build_faust(model, grid, *task.horizon);
        }
        const Labeling labeling = label_states(a.grid, sets.targets, sets.avoids);
        warn_labels(labeling, property);
        const MdpSolution sol = mdp_value_iteration(a.transitions, labeling, property, task.solver);
        s.states = a.state_count();
        s.cells = a.grid.cell_count();
        s.error = a.reported_error();
        s.iterations = sol.iterations;
        s.converged = sol.converged;
        s.seconds = std::chrono::duration<double>(Clock::now() - t0).count();

        results::write_representative_points(out_dir / "representative_points.txt", a);
        results::write_transition_matrix(out_dir / "transition_matrix.txt", a);
        results::write_error(out_dir / "e.txt", a.global_error);
        results::write_point_solution(out_dir / "problem_solution.txt", sol.values, a.global_error);
        results::write_cells(out_dir / "cells.txt", a.grid, &labeling);
        s.files = {"representative_points.txt", "transition_matrix.txt", "e.txt", "problem_solution.txt",
                   "cells.txt"};
        if (task.synthesis()) {
            results::write_policy(out_dir / "policy.txt", sol.strategy);
            s.files.push_back("policy.txt");
        }
        if (task.export_prism) {
            write_prism(out_dir / "model", a, &labeling);
            s.files.insert(s.files.end(), {"model.sta", "model.tra", "model.lab"});
        }
    } else {
        s.engine = "imdp";
        ImdpRefinement r;
        if (task.grid->max_error) {
            r = refine_imdp(model, grid, Regions{sets.targets, sets.avoids}, property, *task.grid->max_error,
                            task.grid->max_cells + 1, task.solver);
        } else {
            r.abstraction = build_imdp(model, grid, label_states(grid, sets.targets, sets.avoids));
            r.result = imdp_check(r.abstraction, property, task.solver, &r.strategy);
            r.abstraction.eps = r.result.eps;
            r.abstraction.eps_max_observed = r.result.max_eps();
        }
        const auto& a = r.abstraction;
        warn_labels(a.labeling, property);
        s.states = a.state_count();
        s.cells = a.grid.cell_count();
        s.error = r.result.max_eps();
        s.iterations = r.result.iterations;
        s.converged = r.result.converged;
        s.budget_exhausted = r.budget_exhausted;
        s.seconds = std::chrono::duration<double>(Clock::now() - t0).count();

        results::write_interval_bounds(out_dir / "stepsmin.txt", a, false);
        results::write_interval_bounds(out_dir / "stepsmax.txt", a, true);
        results::write_solution(out_dir / "solution.txt", r.result);
        results::write_cells(out_dir / "cells.txt", a.grid, &a.labeling);
        s.files = {"stepsmin.txt", "stepsmax.txt", "solution.txt", "cells.txt"};
        if (task.synthesis()) {
            results::write_policy(out_dir / "policy.txt", r.strategy);
            s.files.push_back("policy.txt");
            if (task.simulation) {
                const std::size_t steps = task.simulation->steps ? *task.simulation->steps : task.horizon.value_or(0);
                if (steps == 0)
                    throw ValidationError("closed-loop simulation needs simulation.steps for unbounded tasks");
                SimulationSpec spec = simulation_spec(model, task, steps);
                spec.controller = strategy_controller(a.grid, r.strategy);
                write_traces_and_histograms(out_dir, simulate(model, spec), *task.simulation, s);
            }
        }
    }
    s.files.push_back("summary.txt");
    results::write_summary(out_dir / "summary.txt", summary_fields(s, task));
    return s;
}

} // namespace stochy
