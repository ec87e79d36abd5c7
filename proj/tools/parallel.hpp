#ifndef POSTSEL_TOOLS_PARALLEL_HPP
#define POSTSEL_TOOLS_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace postsel::cli {

/// Runs fn(i) for i in [0, count) on a small worker pool. Results land in
/// slot i, so output order never depends on scheduling. The first exception
/// (lowest index) is rethrown after all workers finish.
template <class R, class F>
std::vector<R> parallel_map(std::size_t count, F&& fn, unsigned workers = 0) {
    std::vector<R> out(count);
    std::vector<std::exception_ptr> errors(count);
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                out[i] = fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

} // namespace postsel::cli

#endif // POSTSEL_TOOLS_PARALLEL_HPP
