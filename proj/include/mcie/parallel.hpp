#pragma once

#include <cstddef>
#include <functional>

namespace mcie::parallel {

/// Number of worker threads used by library loops. Defaults to 1.
std::size_t worker_count() noexcept;

/// 0 selects std::thread::hardware_concurrency().
void set_worker_count(std::size_t workers);

/// Restores the previous worker count on destruction.
class ScopedWorkers {
public:
    explicit ScopedWorkers(std::size_t workers);
    ~ScopedWorkers();
    ScopedWorkers(const ScopedWorkers&) = delete;
    ScopedWorkers& operator=(const ScopedWorkers&) = delete;

private:
    std::size_t previous_;
};

/**
 * Runs body(begin, end) over a static contiguous split of [0, count).
 *
 * Each index is handled by exactly one call, so any output written per index
 * is independent of the worker count. Calls made from inside a worker run
 * inline. The first exception (in chunk order) is rethrown on the caller.
 */
void for_chunks(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace mcie::parallel
