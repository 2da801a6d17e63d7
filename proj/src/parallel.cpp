#include "mcie/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace mcie::parallel {
namespace {

std::atomic<std::size_t> g_workers{1};
thread_local bool t_inside_worker = false;

}  // namespace

std::size_t worker_count() noexcept { return g_workers.load(std::memory_order_relaxed); }

void set_worker_count(std::size_t workers) {
    if (workers == 0) {
        workers = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    }
    g_workers.store(workers, std::memory_order_relaxed);
}

ScopedWorkers::ScopedWorkers(std::size_t workers) : previous_(worker_count()) { set_worker_count(workers); }

ScopedWorkers::~ScopedWorkers() { g_workers.store(previous_, std::memory_order_relaxed); }

void for_chunks(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body) {
    if (count == 0) {
        return;
    }
    const std::size_t workers = std::min(worker_count(), count);
    if (workers <= 1 || t_inside_worker) {
        body(0, count);
        return;
    }

    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> threads;
    threads.reserve(workers - 1);
    auto run_chunk = [&](std::size_t w) {
        const std::size_t begin = count * w / workers;
        const std::size_t end = count * (w + 1) / workers;
        const bool was_inside = t_inside_worker;
        t_inside_worker = true;
        try {
            body(begin, end);
        } catch (...) {
            errors[w] = std::current_exception();
        }
        t_inside_worker = was_inside;
    };
    for (std::size_t w = 1; w < workers; ++w) {
        threads.emplace_back(run_chunk, w);
    }
    run_chunk(0);
    for (auto& t : threads) {
        t.join();
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

}  // namespace mcie::parallel
