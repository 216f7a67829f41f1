#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace discretediag
{

/// Worker count for a parallelism hint; 0 means "all hardware threads".
inline unsigned resolve_workers(unsigned hint)
{
    if (hint != 0)
        return hint;
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls body(i) for every i in [0, n), distributing indices dynamically
/// over up to `workers` threads. The first exception thrown by any call is
/// rethrown after all workers have stopped.
template <class Body>
void parallel_for(std::size_t n, unsigned workers, Body&& body)
{
    workers = std::min<std::size_t>(resolve_workers(workers), n);
    if (workers <= 1)
    {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
        {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n && !failed; i = next++)
                {
                    try
                    {
                        body(i);
                    }
                    catch (...)
                    {
                        std::lock_guard lock(error_mutex);
                        if (!error)
                            error = std::current_exception();
                        failed = true;
                    }
                }
            });
        }
    }
    if (error)
        std::rethrow_exception(error);
}

} // namespace discretediag
