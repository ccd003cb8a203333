#include "stochy/kernel.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace stochy {

// ---------------------------------------------------------------------------
// random streams

RandomStream RandomStream::derive(std::uint64_t master, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    RandomStream s(0);
    s.engine_.seed(seq);
    return s;
}

double RandomStream::uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::normal() { return gauss_quantile(uniform()); }

double gauss_quantile(double p) {
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

// ---------------------------------------------------------------------------
// scalar Gaussian helpers

double gauss_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

namespace {

double upper_tail(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

} // namespace

double interval_mass(double lo, double hi, double mean, double sigma) {
    const double a = (lo - mean) / sigma;
    const double b = (hi - mean) / sigma;
    double p;
    if (a > 0.0)
        p = upper_tail(a) - upper_tail(b);
    else if (b < 0.0)
        p = gauss_cdf(b) - gauss_cdf(a);
    else
        p = 1.0 - upper_tail(b) - gauss_cdf(a);
    return std::clamp(p, 0.0, 1.0);
}

// ---------------------------------------------------------------------------

GaussKernel::GaussKernel(const ModeDynamics& d, const Vec& u)
    : M_(d.state_map(u)), c_(d.offset(u)), G_(d.G), cov_(d.covariance()) {
    const auto n = cov_.rows();
    sigma_ = cov_.diagonal().cwiseMax(0.0).cwiseSqrt();
    for (Eigen::Index i = 0; i < n && diagonal_; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j && std::abs(cov_(i, j)) > 1e-15 * std::max(1e-300, sigma_[i] * sigma_[j])) {
                diagonal_ = false;
                break;
            }
    if (!diagonal_) {
        // Singular covariances stay usable for sampling; whitening is checked on use.
        Eigen::LLT<Mat> llt(cov_);
        if (llt.info() != Eigen::Success)
            return;
        const Mat L = llt.matrixL();
        if (!(L.diagonal().array() > 1e-300).all())
            return;
        L_ = L;
        Linv_ = L_.triangularView<Eigen::Lower>().solve(Mat::Identity(n, n));
        Labs_ = L_.cwiseAbs();
        Mw_ = Linv_ * M_;
        cw_ = Linv_ * c_;
    }
}

namespace {

void require_nondegenerate(const Vec& sigma) {
    if (!(sigma.array() > 0.0).all())
        throw ValidationError("degenerate noise: a standard deviation is zero");
}

// Exact range of (A x + b)_i over the box [lo, hi].
void affine_range(const Mat& A, const Vec& b, const HyperRect& box, Vec& out_lo, Vec& out_hi) {
    out_lo = b;
    out_hi = b;
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j) {
            const double p = A(i, j) * box.lower[j];
            const double q = A(i, j) * box.upper[j];
            out_lo[i] += std::min(p, q);
            out_hi[i] += std::max(p, q);
        }
}

} // namespace

GaussKernel::SourceImage GaussKernel::source_image(const HyperRect& source) const {
    if (!diagonal_ && L_.size() == 0)
        throw ValidationError("covariance is singular; cannot whiten");
    SourceImage img;
    if (diagonal_)
        affine_range(M_, c_, source, img.lo, img.hi);
    else
        affine_range(Mw_, cw_, source, img.lo, img.hi);
    return img;
}

Bounds GaussKernel::target_bounds(const SourceImage& img, const HyperRect& target, double cutoff) const {
    return diagonal_ ? diagonal_bounds(img, target, cutoff) : whitened_bounds(img, target, cutoff);
}

namespace {

// Per-axis optimisation of prod_i f_i(t_i) with t_i in [lo_i, hi_i], where
// f_i(t) = mass of [tl_i, tu_i] under N(t, s_i^2) is unimodal with peak at the centre.
Bounds box_bounds(const Vec& lo, const Vec& hi, const double* tl, const double* tu, const double* s,
                  double cutoff) {
    double high = 1.0;
    const auto n = lo.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double peak = std::clamp(0.5 * (tl[i] + tu[i]), lo[i], hi[i]);
        high *= interval_mass(tl[i], tu[i], peak, s[i]);
        if (high <= cutoff)
            return {0.0, high};
    }
    double low = 1.0;
    for (Eigen::Index i = 0; i < n && low > 0.0; ++i)
        low *= std::min(interval_mass(tl[i], tu[i], lo[i], s[i]), interval_mass(tl[i], tu[i], hi[i], s[i]));
    return {std::min(low, high), high};
}

} // namespace

Bounds GaussKernel::diagonal_bounds(const SourceImage& img, const HyperRect& target, double cutoff) const {
    require_nondegenerate(sigma_);
    return box_bounds(img.lo, img.hi, target.lower.data(), target.upper.data(), sigma_.data(), cutoff);
}

Bounds GaussKernel::whitened_bounds(const SourceImage& img, const HyperRect& target, double cutoff) const {
    const auto n = L_.rows();
    // Outer box of the whitened target parallelotope.
    Vec olo, ohi;
    affine_range(Linv_, Vec::Zero(n), target, olo, ohi);
    const Vec ones = Vec::Ones(n);
    const Bounds outer = box_bounds(img.lo, img.hi, olo.data(), ohi.data(), ones.data(), cutoff);
    if (outer.high <= cutoff)
        return {0.0, outer.high};

    // Inner box centred at the whitened centroid: z_c + [-h, h] lies in the
    // parallelotope iff |L| h <= r, r the target half-widths.
    const Vec r = 0.5 * (target.upper - target.lower);
    const Vec zc = Linv_ * target.center();
    const Vec d = 0.5 * (ohi - olo);
    const Vec load = Labs_ * d;
    double s = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i)
        if (load[i] > 0.0)
            s = std::min(s, r[i] / load[i]);
    Vec h = std::min(s, 1.0) * d;
    // Greedy growth along each axis into the remaining slack.
    for (int pass = 0; pass < 2; ++pass)
        for (Eigen::Index j = 0; j < n; ++j) {
            const Vec slack = r - Labs_ * h;
            double grow = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < n; ++i)
                if (Labs_(i, j) > 0.0)
                    grow = std::min(grow, std::max(0.0, slack[i]) / Labs_(i, j));
            if (std::isfinite(grow))
                h[j] += grow;
        }
    const Vec ilo = zc - h;
    const Vec ihi = zc + h;
    const Bounds inner = box_bounds(img.lo, img.hi, ilo.data(), ihi.data(), ones.data(), 0.0);
    return {std::min(inner.low, outer.high), outer.high};
}

double cell_prob(const GaussKernel& k, const Vec& x, const HyperRect& target) {
    if (!k.diagonal())
        throw ValidationError("cell_prob requires a diagonal covariance; use transition bounds instead");
    require_nondegenerate(k.sigma());
    const Vec m = k.mean(x);
    double p = 1.0;
    for (Eigen::Index i = 0; i < m.size(); ++i)
        p *= interval_mass(target.lower[i], target.upper[i], m[i], k.sigma()[i]);
    return p;
}

Bounds transition_bounds(const GaussKernel& k, const HyperRect& source, const HyperRect& target) {
    return k.target_bounds(k.source_image(source), target);
}

Bounds transition_bounds_nondiag(const GaussKernel& k, const HyperRect& source, const HyperRect& target) {
    if (k.diagonal()) {
        // Whiten explicitly with L = diag(sigma) so both routes can be compared.
        require_nondegenerate(k.sigma());
        const Vec& s = k.sigma();
        HyperRect wt{target.lower.cwiseQuotient(s), target.upper.cwiseQuotient(s)};
        Vec lo, hi;
        affine_range(s.cwiseInverse().asDiagonal() * k.state_map(), k.offset().cwiseQuotient(s), source, lo, hi);
        const Vec ones = Vec::Ones(s.size());
        return box_bounds(lo, hi, wt.lower.data(), wt.upper.data(), ones.data(), 0.0);
    }
    return k.target_bounds(k.source_image(source), target);
}

double lipschitz_constant(const GaussKernel& k) {
    if (!k.diagonal())
        throw ValidationError("FAUST engine requires diagonal covariance");
    require_nondegenerate(k.sigma());
    const double norm = Eigen::JacobiSVD<Mat>(k.state_map()).singularValues()(0);
    const auto n = static_cast<double>(k.dim());
    return norm * std::exp(-0.5) * std::pow(2.0 * std::numbers::pi, -0.5 * n) /
           (k.sigma().prod() * k.sigma().minCoeff());
}

Vec sample_successor(const GaussKernel& k, const Vec& x, RandomStream& rng) {
    const auto n = static_cast<Eigen::Index>(k.dim());
    Vec w(n);
    for (Eigen::Index i = 0; i < n; ++i)
        w[i] = rng.normal();
    return k.mean(x) + k.noise_map() * w;
}

} // namespace stochy
