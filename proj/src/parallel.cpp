#include "ids/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>

#include <omp.h>

namespace ids {

namespace {

int initial_workers() {
    if (const char* env = std::getenv("IDS_WORKERS")) {
        try {
            int w = std::stoi(env);
            if (w >= 1) return w;
        } catch (const std::exception&) {
        }
    }
    return 1;
}

std::atomic<int> g_workers{initial_workers()};

}  // namespace

int worker_count() { return g_workers.load(); }

void set_worker_count(int workers) { g_workers.store(workers < 1 ? 1 : workers); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    std::exception_ptr error;
    std::mutex error_lock;
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
    for (long long i = 0; i < count; ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard lock(error_lock);
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace ids
