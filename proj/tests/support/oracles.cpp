#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace oracle {

long double erf_series(long double x) {
    const long double pi = 3.141592653589793238462643383279502884L;
    if (x < 0)
        return -erf_series(-x);
    if (x <= 3.0L) {
        long double term = x, sum = x;
        for (int n = 1; n < 200; ++n) {
            term *= -x * x / n;
            const long double add = term / (2 * n + 1);
            sum += add;
            if (std::fabs(add) < 1e-22L)
                break;
        }
        return 2.0L / std::sqrt(pi) * sum;
    }
    return 1.0L - erfc_fraction(x);
}

long double erfc_fraction(long double x) {
    const long double pi = 3.141592653589793238462643383279502884L;
    // erfc(x) = exp(-x^2)/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    long double f = x;
    for (int k = 400; k >= 1; --k)
        f = x + (k / 2.0L) / f;
    return std::exp(-x * x) / std::sqrt(pi) / f;
}

double phi(double z) {
    const long double x = z / std::sqrt(2.0L);
    if (x < -3.0L)
        return static_cast<double>(0.5L * erfc_fraction(-x));
    return static_cast<double>(0.5L * (1.0L + erf_series(x)));
}

std::vector<double> bounded_safety_paths(const Dense& T, const std::vector<bool>& safe, std::size_t K) {
    const std::size_t n = T.size();
    std::vector<double> out(n, 0.0);
    std::function<double(std::size_t, std::size_t)> walk = [&](std::size_t s, std::size_t left) -> double {
        if (!safe[s])
            return 0.0;
        if (left == 0)
            return 1.0;
        double total = 0.0;
        for (std::size_t t = 0; t < n; ++t)
            if (T[s][t] > 0.0)
                total += T[s][t] * walk(t, left - 1);
        return total;
    };
    for (std::size_t s = 0; s < n; ++s)
        out[s] = walk(s, K);
    return out;
}

namespace {

bool is(const std::vector<stochy::Label>& l, std::size_t s, stochy::Label x) { return l[s] == x; }

} // namespace

std::vector<double> mdp_by_strategy_enumeration(const std::vector<Dense>& T, const std::vector<stochy::Label>& labels,
                                                stochy::PropertyKind kind, std::size_t K) {
    const std::size_t n = labels.size(), A = T.size();
    const bool reach = kind == stochy::PropertyKind::reach_avoid;
    std::size_t total = 1;
    for (std::size_t i = 0; i < n * K; ++i)
        total *= A;
    std::vector<double> best(n, -1.0);
    std::vector<std::size_t> choice(n * K);
    for (std::size_t code = 0; code < total; ++code) {
        std::size_t c = code;
        for (auto& x : choice) {
            x = c % A;
            c /= A;
        }
        // probability of satisfaction from (s, time t) under this strategy, by recursion over paths
        std::function<double(std::size_t, std::size_t)> value = [&](std::size_t s, std::size_t t) -> double {
            if (is(labels, s, stochy::Label::avoid))
                return 0.0;
            if (reach && is(labels, s, stochy::Label::target))
                return 1.0;
            if (t == K)
                return reach ? 0.0 : 1.0;
            const auto& row = T[choice[t * n + s]][s];
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                if (row[j] > 0.0)
                    acc += row[j] * value(j, t + 1);
            return acc;
        };
        for (std::size_t s = 0; s < n; ++s)
            best[s] = std::max(best[s], value(s, 0));
    }
    return best;
}

std::vector<std::vector<double>> polytope_vertices(const std::vector<double>& low, const std::vector<double>& high) {
    const std::size_t n = low.size();
    std::vector<std::vector<double>> out;
    for (std::size_t free = 0; free <= n; ++free) // free == n: no free coordinate
        for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
            std::vector<double> p(n);
            double sum = 0.0;
            bool skip = false;
            for (std::size_t i = 0; i < n; ++i) {
                if (i == free) {
                    if (mask >> i & 1u)
                        skip = true; // count each vertex once per free index
                    continue;
                }
                p[i] = (mask >> i & 1u) ? high[i] : low[i];
                sum += p[i];
            }
            if (skip)
                continue;
            if (free == n) {
                if (std::abs(sum - 1.0) <= 1e-12)
                    out.push_back(p);
                continue;
            }
            p[free] = 1.0 - sum;
            if (p[free] >= low[free] - 1e-12 && p[free] <= high[free] + 1e-12)
                out.push_back(p);
        }
    return out;
}

double lp_optimum(const std::vector<double>& low, const std::vector<double>& high, const std::vector<double>& v,
                  bool maximise) {
    double best = maximise ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
    for (const auto& p : polytope_vertices(low, high)) {
        long double acc = 0.0L;
        for (std::size_t i = 0; i < p.size(); ++i)
            acc += static_cast<long double>(p[i]) * v[i];
        best = maximise ? std::max(best, static_cast<double>(acc)) : std::min(best, static_cast<double>(acc));
    }
    return best;
}

std::pair<std::vector<double>, std::vector<double>> robust_by_vertices(const DenseImdp& m,
                                                                       const std::vector<stochy::Label>& labels,
                                                                       stochy::PropertyKind kind, std::size_t K) {
    const std::size_t n = labels.size();
    const bool reach = kind == stochy::PropertyKind::reach_avoid;
    std::vector<double> lo(n), hi(n);
    for (std::size_t s = 0; s < n; ++s) {
        const double v0 = is(labels, s, stochy::Label::avoid) ? 0.0
                          : reach ? (is(labels, s, stochy::Label::target) ? 1.0 : 0.0)
                                  : 1.0;
        lo[s] = hi[s] = v0;
    }
    for (std::size_t k = 0; k < K; ++k) {
        std::vector<double> nlo = lo, nhi = hi;
        for (std::size_t s = 0; s < n; ++s) {
            if (is(labels, s, stochy::Label::avoid) || (reach && is(labels, s, stochy::Label::target)))
                continue;
            double bl = -1.0, bh = -1.0;
            for (std::size_t a = 0; a < m.low.size(); ++a) {
                bl = std::max(bl, lp_optimum(m.low[a][s], m.high[a][s], lo, false));
                bh = std::max(bh, lp_optimum(m.low[a][s], m.high[a][s], hi, true));
            }
            nlo[s] = bl;
            nhi[s] = bh;
        }
        lo = nlo;
        hi = nhi;
    }
    return {lo, hi};
}

double max_density_gradient(const stochy::Mat& M, const stochy::Vec& sigma, std::mt19937_64& rng) {
    const auto n = sigma.size();
    const double pi = 3.14159265358979323846;
    const auto grad_norm = [&](const stochy::Vec& z) {
        double dens = 1.0;
        for (Eigen::Index i = 0; i < n; ++i)
            dens *= std::exp(-0.5 * z[i] * z[i] / (sigma[i] * sigma[i])) / (std::sqrt(2 * pi) * sigma[i]);
        const stochy::Vec w = z.cwiseQuotient(sigma.cwiseProduct(sigma));
        return dens * (M.transpose() * w).norm();
    };
    std::normal_distribution<double> nd(0.0, 1.0);
    double best = 0.0;
    stochy::Vec arg = stochy::Vec::Zero(n);
    for (int trial = 0; trial < 20000; ++trial) {
        stochy::Vec z(n);
        for (Eigen::Index i = 0; i < n; ++i)
            z[i] = sigma[i] * 1.5 * nd(rng);
        const double g = grad_norm(z);
        if (g > best) {
            best = g;
            arg = z;
        }
    }
    for (double step = 0.1; step > 1e-7; step *= 0.5)
        for (bool improved = true; improved;) {
            improved = false;
            for (Eigen::Index i = 0; i < n; ++i)
                for (const double dir : {-1.0, 1.0}) {
                    stochy::Vec z = arg;
                    z[i] += dir * step * sigma[i];
                    const double g = grad_norm(z);
                    if (g > best) {
                        best = g;
                        arg = z;
                        improved = true;
                    }
                }
        }
    return best;
}

double rect_prob_2d(const stochy::Vec& mean, const stochy::Mat& cov, const stochy::Vec& lo, const stochy::Vec& hi) {
    const double s1 = std::sqrt(cov(0, 0));
    const double a = std::max(lo[0], mean[0] - 10 * s1), b = std::min(hi[0], mean[0] + 10 * s1);
    if (a >= b)
        return 0.0;
    const double beta = cov(1, 0) / cov(0, 0);
    const double s21 = std::sqrt(std::max(0.0, cov(1, 1) - beta * cov(1, 0)));
    const double pi = 3.14159265358979323846;
    // the inner CDF runs thousands of times per call: std::erfc keeps it cheap
    const auto cdf = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
    const auto f = [&](double y1) {
        const double dens = std::exp(-0.5 * std::pow((y1 - mean[0]) / s1, 2)) / (std::sqrt(2 * pi) * s1);
        const double m = mean[1] + beta * (y1 - mean[0]);
        return dens * (cdf((hi[1] - m) / s21) - cdf((lo[1] - m) / s21));
    };
    const int N = 4000;
    const double h = (b - a) / N;
    double acc = f(a) + f(b);
    for (int i = 1; i < N; ++i)
        acc += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return acc * h / 3.0;
}

std::vector<double> chain_marginal(const stochy::Mat& T, std::size_t q0, std::size_t k) {
    Eigen::RowVectorXd p = Eigen::RowVectorXd::Zero(T.rows());
    p[static_cast<Eigen::Index>(q0)] = 1.0;
    for (std::size_t i = 0; i < k; ++i)
        p = p * T;
    return {p.data(), p.data() + p.size()};
}

stochy::IntervalMatrix to_interval_matrix(const Dense& low, const Dense& high) {
    std::vector<std::vector<stochy::IntervalEntry>> rows(low.size());
    for (std::size_t s = 0; s < low.size(); ++s)
        for (std::size_t t = 0; t < low[s].size(); ++t)
            if (high[s][t] > 0.0)
                rows[s].push_back({static_cast<std::uint32_t>(t), low[s][t], high[s][t]});
    return stochy::IntervalMatrix::from_rows(low.size(), rows);
}

stochy::CsrMatrix to_csr(const Dense& T) { return stochy::CsrMatrix::from_dense(T); }

} // namespace oracle
