#pragma once

#include <cstdint>
#include <random>

namespace stochy {

/// Seeded uniform/normal stream. Normals use the inverse CDF of one uniform each,
/// so a stream position always maps to the same draw.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}
    /// Independent stream for `index` (e.g. trace number) under a master seed.
    static RandomStream derive(std::uint64_t master, std::uint64_t index);

    /// Uniform on the open interval (0, 1).
    double uniform();
    double normal();

private:
    std::mt19937_64 engine_;
};

/// Inverse of the standard normal CDF.
double gauss_quantile(double p);

} // namespace stochy
