#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <limits>
#include <thread>
#include <vector>

namespace srcloc {

// Runs fn(i) for i in [0, count) on up to `workers` threads. Callers write
// results into pre-sized slots indexed by i, so output never depends on
// scheduling. If several calls throw, the exception from the smallest index
// is rethrown.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn&& fn) {
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }

    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::size_t> error_index(workers, std::numeric_limits<std::size_t>::max());
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < count; i += workers) {
                    try {
                        fn(i);
                    } catch (...) {
                        errors[w] = std::current_exception();
                        error_index[w] = i;
                        return;
                    }
                }
            });
        }
    }

    auto first = std::min_element(error_index.begin(), error_index.end());
    if (*first != std::numeric_limits<std::size_t>::max()) {
        std::rethrow_exception(errors[static_cast<std::size_t>(first - error_index.begin())]);
    }
}

}  // namespace srcloc
