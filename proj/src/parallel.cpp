#include "bifbm/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace bifbm {

std::size_t worker_count() {
    if (const char* env = std::getenv("BIFBM_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v >= 1) {
                return static_cast<std::size_t>(v);
            }
        } catch (const std::exception&) {
            // Unparsable values fall through to the hardware default.
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    if (n == 0) {
        return;
    }
    const std::size_t workers = std::min(worker_count(), n);
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> threads;
    threads.reserve(workers);
    const std::size_t block = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * block;
        const std::size_t hi = std::min(n, lo + block);
        if (lo >= hi) {
            break;
        }
        threads.emplace_back([&, lo, hi] {
            try {
                for (std::size_t i = lo; i < hi; ++i) {
                    body(i);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) {
                    first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : threads) {
        t.join();
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }
}

}  // namespace bifbm
