#include "stochy/simulator.hpp"

#include "stochy/random.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace stochy {

InputSignal parse_input_signal(const std::string& text, std::size_t v) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::istringstream ls(line);
        std::vector<double> row;
        double x;
        while (ls >> x)
            row.push_back(x);
        if (!ls.eof())
            throw ValidationError("input signal line " + std::to_string(lineno) + ": not a number");
        if (row.empty())
            continue;
        if (row.size() != v)
            throw ValidationError("input signal line " + std::to_string(lineno) + ": expected " + std::to_string(v) +
                                  " values, got " + std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    InputSignal s;
    s.u.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(v));
    for (std::size_t k = 0; k < rows.size(); ++k)
        for (std::size_t j = 0; j < v; ++j)
            s.u(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = rows[k][j];
    return s;
}

InputSignal load_input_signal(const std::string& path, std::size_t v) {
    std::ifstream f(path);
    if (!f)
        throw RuntimeError("cannot open input signal '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_input_signal(ss.str(), v);
}

namespace {

void check_spec(const ShsModel& model, const SimulationSpec& spec) {
    if (spec.horizon < 1)
        throw ValidationError("simulation horizon must be at least 1");
    if (spec.input) {
        if (spec.input->length() < spec.horizon)
            throw ValidationError("input signal shorter than the horizon (" + std::to_string(spec.input->length()) +
                                  " < " + std::to_string(spec.horizon) + ")");
        if (static_cast<std::size_t>(spec.input->u.cols()) != model.v)
            throw ValidationError("input signal width does not match the model input dimension");
    }
    if (model.action_driven() && !spec.controller)
        throw ValidationError("action-driven mode switching needs a controller");
    if (const auto* list = std::get_if<std::vector<HybridState>>(&spec.init)) {
        if (list->size() != spec.n_traces)
            throw ValidationError("initial state list must have one entry per trace");
        for (const auto& h : *list)
            if (h.q >= model.mode_count() || static_cast<std::size_t>(h.x.size()) != model.n)
                throw ValidationError("initial state does not fit the model");
    } else {
        const auto& d = std::get<InitialDistribution>(spec.init);
        if (d.mode >= model.mode_count() || static_cast<std::size_t>(d.mean.size()) != model.n ||
            static_cast<std::size_t>(d.stddev.size()) != model.n || (d.stddev.array() < 0.0).any())
            throw ValidationError("initial distribution does not fit the model");
    }
}

void run_trace(const ShsModel& model, const SimulationSpec& spec, std::size_t t, TraceSet& out) {
    RandomStream rng = RandomStream::derive(spec.seed, t);
    const auto n = static_cast<Eigen::Index>(model.n);
    HybridState h;
    if (const auto* list = std::get_if<std::vector<HybridState>>(&spec.init)) {
        h = (*list)[t];
    } else {
        const auto& d = std::get<InitialDistribution>(spec.init);
        h.q = d.mode;
        h.x.resize(n);
        for (Eigen::Index i = 0; i < n; ++i)
            h.x[i] = d.mean[i] + d.stddev[i] * rng.normal();
    }
    const auto* stoch = std::get_if<StochasticModeKernel>(&model.kernel);
    const std::size_t base = t * out.steps();
    Vec w(n);
    for (std::size_t k = 0;; ++k) {
        out.modes[base + k] = static_cast<std::uint32_t>(h.q);
        std::copy(h.x.data(), h.x.data() + n, out.states.begin() + static_cast<std::ptrdiff_t>((base + k) * model.n));
        if (k == spec.horizon)
            break;
        const std::size_t a = spec.controller ? spec.controller(k, h) : 0;
        if (a >= model.action_count())
            throw ValidationError("controller returned an unknown action");
        const Vec u = spec.input ? Vec(spec.input->u.row(static_cast<Eigen::Index>(k)).transpose())
                                 : model.action_input(a);
        if (stoch) {
            const double r = rng.uniform();
            const auto row = stoch->transition.row(static_cast<Eigen::Index>(h.q));
            std::size_t next = h.q;
            double cum = 0.0;
            for (Eigen::Index j = 0; j < row.size(); ++j) {
                if (row[j] <= 0.0)
                    continue;
                next = static_cast<std::size_t>(j);
                cum += row[j];
                if (r < cum)
                    break;
            }
            h.q = next;
        } else {
            h.q = std::get<ActionModeKernel>(model.kernel).mode_of_action[a];
        }
        const ModeDynamics& d = model.modes[h.q];
        for (Eigen::Index i = 0; i < n; ++i)
            w[i] = rng.normal();
        h.x = mode_mean(d, h.x, u) + d.G * w;
    }
}

} // namespace

TraceSet simulate(const ShsModel& model, const SimulationSpec& spec, Exec exec) {
    validate(model);
    check_spec(model, spec);
    TraceSet out;
    out.n_traces = spec.n_traces;
    out.horizon = spec.horizon;
    out.n = model.n;
    out.mode_count = model.mode_count();
    out.seed = spec.seed;
    out.modes.resize(out.n_traces * out.steps());
    out.states.resize(out.n_traces * out.steps() * out.n);

    const auto count = static_cast<std::ptrdiff_t>(spec.n_traces);
    if (exec == Exec::serial) {
        for (std::ptrdiff_t t = 0; t < count; ++t)
            run_trace(model, spec, static_cast<std::size_t>(t), out);
        return out;
    }
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t t = 0; t < count; ++t) {
        try {
            run_trace(model, spec, static_cast<std::size_t>(t), out);
        } catch (...) {
#pragma omp critical(stochy_sim_failure)
            if (!failure)
                failure = std::current_exception();
        }
    }
    if (failure)
        std::rethrow_exception(failure);
    return out;
}

Controller strategy_controller(const HybridGrid& grid, const Strategy& strategy) {
    return [&grid, &strategy](std::size_t step, const HybridState& h) -> std::size_t {
        const std::size_t s = grid.locate(h.q, h.x);
        return s == grid.sink() ? 0 : strategy.action(s, step);
    };
}

Histogram histogram(const TraceSet& ts, std::size_t dim, std::size_t step, std::size_t bins) {
    if (step > ts.horizon)
        throw ValidationError("histogram step beyond the horizon");
    if (dim >= ts.n || bins == 0)
        throw ValidationError("histogram: bad dimension or bin count");
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t t = 0; t < ts.n_traces; ++t) {
        const double x = ts.state(t, step)[static_cast<Eigen::Index>(dim)];
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    Histogram h;
    h.counts.assign(bins, 0);
    h.edges.resize(bins + 1);
    const double width = (hi - lo) / static_cast<double>(bins);
    for (std::size_t b = 0; b <= bins; ++b)
        h.edges[b] = b == bins ? hi : lo + static_cast<double>(b) * width;
    for (std::size_t t = 0; t < ts.n_traces; ++t) {
        const double x = ts.state(t, step)[static_cast<Eigen::Index>(dim)];
        std::size_t b = width > 0.0 ? static_cast<std::size_t>((x - lo) / width) : 0;
        ++h.counts[std::min(b, bins - 1)];
    }
    return h;
}

Histogram mode_histogram(const TraceSet& ts, std::size_t step) {
    if (step > ts.horizon)
        throw ValidationError("histogram step beyond the horizon");
    Histogram h;
    h.counts.assign(ts.mode_count, 0);
    for (std::size_t q = 0; q <= ts.mode_count; ++q)
        h.edges.push_back(static_cast<double>(q) - 0.5);
    for (std::size_t t = 0; t < ts.n_traces; ++t)
        ++h.counts.at(ts.mode(t, step));
    return h;
}

} // namespace stochy
