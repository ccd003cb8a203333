#pragma once

#include "stochy/gridder.hpp"
#include "stochy/model.hpp"

#include <random>
#include <string>

namespace fixture {

inline std::string config(const std::string& rel) { return std::string(STOCHY_CONFIG_DIR) + "/" + rel; }

inline stochy::ModeDynamics make_mode(const stochy::Mat& A, const stochy::Vec& F, const stochy::Mat& G) {
    stochy::ModeDynamics d;
    d.A = A;
    d.B = stochy::Mat::Zero(A.rows(), 0);
    d.F = F;
    d.G = G;
    return d;
}

inline stochy::ShsModel single_mode(const stochy::Mat& A, const stochy::Vec& F, const stochy::Mat& G) {
    stochy::ShsModel m;
    m.n = static_cast<std::size_t>(A.rows());
    m.modes.push_back(make_mode(A, F, G));
    m.kernel = stochy::StochasticModeKernel{stochy::Mat::Identity(1, 1)};
    return m;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Random stable-ish mode: entries of A in [-0.6, 0.6] plus a diagonal in [0.3, 0.9],
/// noise either diagonal or lower-triangular with positive diagonal.
inline stochy::ModeDynamics random_mode(std::mt19937_64& rng, std::size_t n, bool diagonal_noise) {
    const auto N = static_cast<Eigen::Index>(n);
    stochy::Mat A(N, N), G = stochy::Mat::Zero(N, N);
    stochy::Vec F(N);
    for (Eigen::Index i = 0; i < N; ++i) {
        for (Eigen::Index j = 0; j < N; ++j)
            A(i, j) = (i == j ? uniform(rng, 0.3, 0.9) : uniform(rng, -0.6, 0.6) / static_cast<double>(n));
        F[i] = uniform(rng, -0.3, 0.3);
        G(i, i) = uniform(rng, 0.08, 0.5);
        if (!diagonal_noise)
            for (Eigen::Index j = 0; j < i; ++j)
                G(i, j) = uniform(rng, -0.3, 0.3);
    }
    return make_mode(A, F, G);
}

/// 1-2 modes, 1-3 dimensions, stochastic mode kernel with random rows.
inline stochy::ShsModel random_model(std::mt19937_64& rng, std::size_t modes, std::size_t n, bool diagonal_noise) {
    stochy::ShsModel m;
    m.n = n;
    for (std::size_t q = 0; q < modes; ++q)
        m.modes.push_back(random_mode(rng, n, diagonal_noise));
    const auto M = static_cast<Eigen::Index>(modes);
    stochy::Mat T(M, M);
    for (Eigen::Index r = 0; r < M; ++r) {
        for (Eigen::Index c = 0; c < M; ++c)
            T(r, c) = uniform(rng, 0.1, 1.0);
        T.row(r) /= T.row(r).sum();
    }
    m.kernel = stochy::StochasticModeKernel{T};
    return m;
}

/// [-1, 1]^n.
inline stochy::HyperRect unit_box(std::size_t n) {
    const auto N = static_cast<Eigen::Index>(n);
    return {stochy::Vec::Constant(N, -1.0), stochy::Vec::Constant(N, 1.0)};
}

inline stochy::Vec uniform_point(std::mt19937_64& rng, const stochy::HyperRect& r) {
    stochy::Vec x(r.lower.size());
    for (Eigen::Index i = 0; i < x.size(); ++i)
        x[i] = uniform(rng, r.lower[i], r.upper[i]);
    return x;
}

/// One successor of x under mode d with zero input, drawn with std::normal_distribution.
inline stochy::Vec draw_successor(const stochy::ModeDynamics& d, const stochy::Vec& x, std::mt19937_64& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    stochy::Vec w(x.size());
    for (Eigen::Index i = 0; i < w.size(); ++i)
        w[i] = nd(rng);
    return d.A * x + d.F + d.G * w;
}

} // namespace fixture
