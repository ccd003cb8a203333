#pragma once

// Independent reference computations for the test suites. None of these call
// into the library's numerical code.

#include "stochy/checker.hpp"
#include "stochy/model.hpp"
#include "stochy/sparse.hpp"

#include <random>
#include <vector>

namespace oracle {

/// erf by its Maclaurin series (|x| <= 3) or the Laplace continued fraction for erfc.
long double erf_series(long double x);
/// erfc by the Laplace continued fraction; accurate for x >= 3.
long double erfc_fraction(long double x);
/// Standard normal CDF built on erf_series.
double phi(double z);

/// Dense row-stochastic chain.
using Dense = std::vector<std::vector<double>>;

/// Probability of staying in `safe` for K steps, by summing over all paths.
std::vector<double> bounded_safety_paths(const Dense& T, const std::vector<bool>& safe, std::size_t K);

/// Optimal K-step values of an MDP (per-action dense matrices) by enumerating every
/// time-indexed deterministic strategy; the maximum is taken per initial state.
std::vector<double> mdp_by_strategy_enumeration(const std::vector<Dense>& T, const std::vector<stochy::Label>& labels,
                                                stochy::PropertyKind kind, std::size_t K);

/// Vertices of {low <= p <= high, sum p = 1}: every coordinate at a bound except
/// at most one, which closes the sum.
std::vector<std::vector<double>> polytope_vertices(const std::vector<double>& low, const std::vector<double>& high);

/// min or max of sum p_i v_i over the polytope, by vertex enumeration.
double lp_optimum(const std::vector<double>& low, const std::vector<double>& high, const std::vector<double>& v,
                  bool maximise);

/// Dense interval row set: low[a][s][t], high[a][s][t].
struct DenseImdp {
    std::vector<Dense> low;
    std::vector<Dense> high;
};

/// K-step robust values by dynamic programming with vertex enumeration at every
/// backup: pessimistic = max_a min_vertex, optimistic = max_a max_vertex.
std::pair<std::vector<double>, std::vector<double>> robust_by_vertices(const DenseImdp& m,
                                                                       const std::vector<stochy::Label>& labels,
                                                                       stochy::PropertyKind kind, std::size_t K);

/// Largest value of |d/dx N(y; M x + c, Sigma)| found by random search over the
/// residual z = y - M x - c followed by coordinate refinement.
double max_density_gradient(const stochy::Mat& M, const stochy::Vec& sigma, std::mt19937_64& rng);

/// P(lo <= y <= hi) for a bivariate normal y ~ N(mean, cov), by Simpson quadrature
/// over y1 of the conditional mass of y2.
double rect_prob_2d(const stochy::Vec& mean, const stochy::Mat& cov, const stochy::Vec& lo, const stochy::Vec& hi);

/// Exact k-step mode distribution p0 T^k.
std::vector<double> chain_marginal(const stochy::Mat& T, std::size_t q0, std::size_t k);

stochy::IntervalMatrix to_interval_matrix(const Dense& low, const Dense& high);
stochy::CsrMatrix to_csr(const Dense& T);

} // namespace oracle
