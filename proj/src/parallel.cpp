#include "stochy/common.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace stochy {

int worker_count() { return omp_get_max_threads(); }

void configure_threads_from_env() {
    const char* env = std::getenv("STOCHY_THREADS");
    if (!env || !*env)
        return;
    int n = 0;
    try {
        n = std::stoi(env);
    } catch (const std::exception&) {
        throw ValidationError(std::string("STOCHY_THREADS must be a positive integer, got '") + env + "'");
    }
    if (n < 1)
        throw ValidationError(std::string("STOCHY_THREADS must be a positive integer, got '") + env + "'");
    omp_set_num_threads(n);
}

} // namespace stochy
