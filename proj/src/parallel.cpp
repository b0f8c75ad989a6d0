#include "pbb/parallel.hpp"

#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace pbb {

int default_worker_count() {
    if (const char* env = std::getenv("PBB_WORKERS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return n;
        } catch (const std::exception&) {
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

std::size_t parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& task,
                         const std::atomic<bool>* cancel) {
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    std::size_t first_error_index = std::numeric_limits<std::size_t>::max();

    auto worker = [&] {
        for (;;) {
            if (cancel && cancel->load()) return;
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                task(i);
                done.fetch_add(1);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (i < first_error_index) {
                    first_error_index = i;
                    first_error = std::current_exception();
                }
            }
        }
    };

    const auto count = static_cast<std::size_t>(workers < 1 ? 1 : workers);
    if (count == 1 || n <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(std::min(count, n));
        for (std::size_t w = 0; w < std::min(count, n); ++w) pool.emplace_back(worker);
    }
    if (first_error) std::rethrow_exception(first_error);
    return done.load();
}

}  // namespace pbb
