#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace stochy {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Malformed input: bad documents, inconsistent dimensions, incompatible task options.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Failures that are not the caller's fault (I/O, numerical breakdown).
class RuntimeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Execution policy for the data-parallel kernels. Both policies produce
/// bitwise-identical results.
enum class Exec { serial, parallel };

/// Number of OpenMP workers in use; honours STOCHY_THREADS when set.
int worker_count();

/// Applies the STOCHY_THREADS cap (if present) to the OpenMP runtime.
void configure_threads_from_env();

} // namespace stochy
