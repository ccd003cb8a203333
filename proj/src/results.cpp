#include "stochy/results.hpp"

#include <charconv>
#include <fstream>

namespace stochy {

std::string format_double(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

namespace results {

namespace {

std::ofstream open(const Path& p) {
    if (p.has_parent_path())
        std::filesystem::create_directories(p.parent_path());
    std::ofstream f(p);
    if (!f)
        throw RuntimeError("cannot write '" + p.string() + "'");
    return f;
}

void close(std::ofstream& f, const Path& p) {
    f.close();
    if (!f)
        throw RuntimeError("error while writing '" + p.string() + "'");
}

const char* label_name(Label l) {
    switch (l) {
    case Label::target:
        return "target";
    case Label::avoid:
        return "avoid";
    default:
        return "safe";
    }
}

} // namespace

void write_representative_points(const Path& p, const MdpAbstraction& a) {
    auto f = open(p);
    for (const auto& x : a.rep_points) {
        for (Eigen::Index i = 0; i < x.size(); ++i)
            f << (i ? " " : "") << format_double(x[i]);
        f << '\n';
    }
    close(f, p);
}

void write_transition_matrix(const Path& p, const MdpAbstraction& a) {
    auto f = open(p);
    const bool prefix = a.action_count() > 1;
    for (std::size_t act = 0; act < a.action_count(); ++act) {
        const auto& T = a.transitions[act];
        for (std::size_t r = 0; r < T.rows; ++r)
            for (std::size_t k = T.row_ptr[r]; k < T.row_ptr[r + 1]; ++k) {
                if (prefix)
                    f << act << ' ';
                f << r << ' ' << T.col[k] << ' ' << format_double(T.val[k]) << '\n';
            }
    }
    close(f, p);
}

void write_error(const Path& p, double global_error) {
    auto f = open(p);
    f << format_double(global_error) << '\n';
    close(f, p);
}

void write_interval_bounds(const Path& p, const ImdpAbstraction& a, bool upper) {
    auto f = open(p);
    const bool prefix = a.action_count() > 1;
    for (std::size_t act = 0; act < a.action_count(); ++act) {
        const auto& P = a.P[act];
        for (std::size_t r = 0; r < P.rows; ++r)
            for (std::size_t k = P.row_begin(r); k < P.row_end(r); ++k) {
                if (prefix)
                    f << act << ' ';
                f << r << ' ' << P.col[k] << ' ' << format_double(upper ? P.high[k] : P.low[k]) << '\n';
            }
    }
    close(f, p);
}

void write_solution(const Path& p, const CheckResult& r) {
    auto f = open(p);
    for (std::size_t s = 0; s < r.p_low.size(); ++s)
        f << s << ' ' << format_double(r.p_low[s]) << ' ' << format_double(r.p_high[s]) << ' '
          << format_double(r.eps[s]) << '\n';
    close(f, p);
}

void write_point_solution(const Path& p, const std::vector<double>& values, double global_error) {
    auto f = open(p);
    const std::string e = format_double(global_error);
    for (std::size_t s = 0; s < values.size(); ++s) {
        const std::string v = format_double(values[s]);
        f << s << ' ' << v << ' ' << v << ' ' << e << '\n';
    }
    close(f, p);
}

void write_policy(const Path& p, const Strategy& s) {
    auto f = open(p);
    if (s.stationary()) {
        if (!s.rules.empty())
            for (std::size_t st = 0; st < s.rules[0].size(); ++st)
                f << st << ' ' << s.rules[0][st] << '\n';
    } else {
        for (std::size_t k = 0; k < s.rules.size(); ++k)
            for (std::size_t st = 0; st < s.rules[k].size(); ++st)
                f << k << ' ' << st << ' ' << s.rules[k][st] << '\n';
    }
    close(f, p);
}

void write_cells(const Path& p, const HybridGrid& grid, const Labeling* labeling) {
    auto f = open(p);
    for (std::size_t s = 0; s < grid.cell_count(); ++s) {
        const auto ref = grid.decode(s);
        const auto& r = grid.rect(s);
        f << s << ' ' << ref.mode;
        for (Eigen::Index i = 0; i < r.lower.size(); ++i)
            f << ' ' << format_double(r.lower[i]) << ' ' << format_double(r.upper[i]);
        f << ' ' << (labeling ? label_name(labeling->labels[s]) : "safe") << '\n';
    }
    close(f, p);
}

void write_summary(const Path& p, const std::vector<std::pair<std::string, std::string>>& fields) {
    auto f = open(p);
    for (const auto& [k, v] : fields)
        f << k << ' ' << v << '\n';
    close(f, p);
}

void write_traces(const Path& p, const TraceSet& ts) {
    auto f = open(p);
    f << "trace,step,mode";
    for (std::size_t i = 1; i <= ts.n; ++i)
        f << ",x" << i;
    f << '\n';
    for (std::size_t t = 0; t < ts.n_traces; ++t)
        for (std::size_t k = 0; k < ts.steps(); ++k) {
            f << t << ',' << k << ',' << ts.mode(t, k);
            const auto x = ts.state(t, k);
            for (Eigen::Index i = 0; i < x.size(); ++i)
                f << ',' << format_double(x[i]);
            f << '\n';
        }
    close(f, p);
}

void write_histograms(const Path& p, const TraceSet& ts, std::size_t step, std::size_t bins) {
    auto f = open(p);
    f << "variable,bin,lower,upper,count\n";
    const auto emit = [&](const std::string& name, const Histogram& h) {
        for (std::size_t b = 0; b < h.counts.size(); ++b)
            f << name << ',' << b << ',' << format_double(h.edges[b]) << ',' << format_double(h.edges[b + 1]) << ','
              << h.counts[b] << '\n';
    };
    emit("mode", mode_histogram(ts, step));
    for (std::size_t i = 0; i < ts.n; ++i)
        emit("x" + std::to_string(i + 1), histogram(ts, i, step, bins));
    close(f, p);
}

} // namespace results

} // namespace stochy
