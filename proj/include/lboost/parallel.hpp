#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#include <omp.h>

namespace lboost {

/// How independent work units are scheduled. The serial path is the
/// reference; both produce bitwise-identical results because every unit
/// writes only to its own output slot.
enum class Execution { serial, parallel };

inline void set_thread_count(int threads) {
    if (threads > 0) omp_set_num_threads(threads);
}

inline int thread_count() { return omp_get_max_threads(); }

/// Calls body(i) for i in [0, count). Exceptions are rethrown after the loop,
/// lowest index first.
template <typename Body>
void for_each_index(Execution exec, std::size_t count, Body&& body) {
    if (exec == Execution::serial || count < 2) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(count);
    const long long n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < n; ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace lboost
