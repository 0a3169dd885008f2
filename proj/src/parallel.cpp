#include "emspec/parallel.hpp"

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <limits>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "emspec/errors.hpp"

namespace emspec {

int resolved_thread_count() {
    int fallback = 1;
#ifdef _OPENMP
    fallback = omp_get_max_threads();
#endif
    const char* env = std::getenv("EMSPEC_THREADS");
    if (env == nullptr || *env == '\0') return fallback;
    int value = 0;
    const auto result = std::from_chars(env, env + std::strlen(env), value);
    if (result.ec != std::errc{} || *result.ptr != '\0' || value < 1) {
        throw InputError("EMSPEC_THREADS must be a positive integer, got '" +
                         std::string(env) + "'");
    }
    return value;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    if (n == 0) return;
    const int workers = resolved_thread_count();
#ifdef _OPENMP
    if (workers > 1 && n > 1) {
        std::exception_ptr first_error;
        std::size_t first_index = std::numeric_limits<std::size_t>::max();
#pragma omp parallel for schedule(dynamic) num_threads(workers)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
            try {
                body(static_cast<std::size_t>(i));
            } catch (...) {
#pragma omp critical(emspec_parallel_for_error)
                {
                    if (static_cast<std::size_t>(i) < first_index) {
                        first_index = static_cast<std::size_t>(i);
                        first_error = std::current_exception();
                    }
                }
            }
        }
        if (first_error) std::rethrow_exception(first_error);
        return;
    }
#endif
    (void)workers;
    for (std::size_t i = 0; i < n; ++i) body(i);
}

}  // namespace emspec
