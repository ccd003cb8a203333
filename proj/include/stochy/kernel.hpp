#pragma once

#include "stochy/common.hpp"
#include "stochy/gridder.hpp"
#include "stochy/model.hpp"
#include "stochy/random.hpp"

namespace stochy {

/// Standard normal CDF.
double gauss_cdf(double z);

/// P(lo <= Y <= hi) for Y ~ N(mean, sigma^2), evaluated on whichever tail keeps
/// full relative precision.
double interval_mass(double lo, double hi, double mean, double sigma);

struct Bounds {
    double low = 0.0;
    double high = 0.0;
};

/// One-step Gaussian kernel of a mode under a fixed input: y ~ N(M x + c, G G^T).
class GaussKernel {
public:
    GaussKernel(const ModeDynamics& d, const Vec& u);

    std::size_t dim() const { return static_cast<std::size_t>(M_.rows()); }
    Vec mean(const Vec& x) const { return M_ * x + c_; }
    const Mat& state_map() const { return M_; }
    const Vec& offset() const { return c_; }
    const Mat& noise_map() const { return G_; }
    const Mat& covariance() const { return cov_; }
    bool diagonal() const { return diagonal_; }
    /// Per-axis standard deviations (meaningful when diagonal()).
    const Vec& sigma() const { return sigma_; }

    /// Range of the mean (in whitened coordinates for non-diagonal covariances)
    /// over a source box; the per-target bound evaluation reuses it.
    struct SourceImage {
        Vec lo;
        Vec hi;
    };
    SourceImage source_image(const HyperRect& source) const;

    /// Bounds on min/max over the source of the probability of landing in `target`.
    /// If the running upper bound drops below `cutoff`, returns early with
    /// low = 0 and a (still valid) partial upper bound.
    Bounds target_bounds(const SourceImage& img, const HyperRect& target, double cutoff = 0.0) const;

private:
    Bounds diagonal_bounds(const SourceImage& img, const HyperRect& target, double cutoff) const;
    Bounds whitened_bounds(const SourceImage& img, const HyperRect& target, double cutoff) const;

    Mat M_;
    Vec c_;
    Mat G_;
    Mat cov_;
    bool diagonal_ = true;
    Vec sigma_;
    // whitening, Sigma = L L^T
    Mat L_;
    Mat Linv_;
    Mat Labs_;
    Mat Mw_;
    Vec cw_;
};

/// Probability that the successor of x lands in `target`. Requires a diagonal covariance.
double cell_prob(const GaussKernel& k, const Vec& x, const HyperRect& target);

/// Sound bounds on inf/sup over x in `source` of cell_prob(k, x, target); dispatches
/// to the whitened variant for non-diagonal covariances.
Bounds transition_bounds(const GaussKernel& k, const HyperRect& source, const HyperRect& target);

/// Bounds for a full covariance via Cholesky whitening with outer/inner boxes.
Bounds transition_bounds_nondiag(const GaussKernel& k, const HyperRect& source, const HyperRect& target);

/// Global Lipschitz constant in x of the density N(y; M x + c, Sigma) (diagonal Sigma):
/// ||M||_2 e^{-1/2} (2 pi)^{-n/2} / (prod sigma_i * min sigma_i).
double lipschitz_constant(const GaussKernel& k);

/// mean(x) + G w with w drawn as n standard normals in axis order.
Vec sample_successor(const GaussKernel& k, const Vec& x, RandomStream& rng);

} // namespace stochy
