#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace sgpt {

/// 0 means "one per hardware thread".
inline int resolve_threads(int requested) noexcept
{
    if (requested > 0) {
        return requested;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace detail {

template <class T>
T tree_sum(std::vector<T>& v)
{
    if (v.empty()) {
        return T{};
    }
    for (std::size_t stride = 1; stride < v.size(); stride *= 2) {
        for (std::size_t i = 0; i + stride < v.size(); i += 2 * stride) {
            v[i] += v[i + stride];
        }
    }
    return v[0];
}

} // namespace detail

/// Sum of f(i) for i in [0, count).
///
/// Indices are cut into fixed blocks; each block is accumulated sequentially
/// and the block totals are combined by a pairwise tree in block order. The
/// result is therefore bit-identical for every thread count.
template <class T, class F>
T deterministic_sum(std::size_t count, F&& f, int threads = 0, std::size_t block = 2048)
{
    const std::size_t nblocks = (count + block - 1) / block;
    std::vector<T> partial(nblocks);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        try {
            for (std::size_t b = next++; b < nblocks; b = next++) {
                T acc{};
                const std::size_t end = std::min(count, (b + 1) * block);
                for (std::size_t i = b * block; i < end; ++i) {
                    acc += f(i);
                }
                partial[b] = acc;
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) {
                failure = std::current_exception();
            }
            next = nblocks;
        }
    };

    const int nthreads = std::min<int>(resolve_threads(threads), static_cast<int>(std::max<std::size_t>(nblocks, 1)));
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(nthreads);
        for (int t = 0; t < nthreads; ++t) {
            pool.emplace_back(worker);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return detail::tree_sum(partial);
}

} // namespace sgpt
