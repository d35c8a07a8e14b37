#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "smallball/random.hpp"

namespace smallball {

/// Replicates are processed in fixed-size blocks; block b always draws from
/// child_stream(seed, b), so results depend on the seed only, never on the
/// number of worker threads.
inline constexpr std::size_t kReplicateBlock = 1024;

struct MonteCarlo {
    std::uint64_t seed = 0;
    unsigned threads = 0;  // 0: hardware concurrency
};

inline unsigned resolve_threads(unsigned requested) {
    if (requested != 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Runs body(block, begin, end, rng) for every block of [0, n). Blocks may run
/// concurrently; callers write per-replicate results into disjoint slots.
template <class Body>
void for_each_block(std::size_t n, const MonteCarlo& mc, Body&& body) {
    const std::size_t n_blocks = (n + kReplicateBlock - 1) / kReplicateBlock;
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(resolve_threads(mc.threads), n_blocks));
    auto run_block = [&](std::size_t b) {
        Rng rng = child_stream(mc.seed, b);
        const std::size_t begin = b * kReplicateBlock;
        const std::size_t end = std::min(n, begin + kReplicateBlock);
        body(b, begin, end, rng);
    };
    if (workers <= 1) {
        for (std::size_t b = 0; b < n_blocks; ++b) run_block(b);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t b = next.fetch_add(1);
                if (b >= n_blocks) return;
                try {
                    run_block(b);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    next.store(n_blocks);
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

/// Neumaier-compensated running sum. Summing a fixed sequence in a fixed
/// order gives a bit-identical result on every run.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct Moments {
    std::vector<double> mean;
    std::vector<double> std_error;
};

/// Runs body(rng, out) once per replicate, where out has k slots, and returns
/// the per-slot mean and standard error. Partial sums are kept per block and
/// combined in block order, so the result depends on the seed only.
template <class Body>
Moments replicate_moments(std::size_t n, std::size_t k, const MonteCarlo& mc, Body&& body) {
    const std::size_t n_blocks = (n + kReplicateBlock - 1) / kReplicateBlock;
    std::vector<CompensatedSum> sums(n_blocks * k);
    std::vector<CompensatedSum> squares(n_blocks * k);
    for_each_block(n, mc, [&](std::size_t b, std::size_t begin, std::size_t end, Rng& rng) {
        std::vector<double> out(k);
        CompensatedSum* s = &sums[b * k];
        CompensatedSum* q = &squares[b * k];
        for (std::size_t r = begin; r < end; ++r) {
            body(rng, out.data());
            for (std::size_t j = 0; j < k; ++j) {
                s[j].add(out[j]);
                q[j].add(out[j] * out[j]);
            }
        }
    });
    Moments m{std::vector<double>(k), std::vector<double>(k)};
    const double nd = static_cast<double>(n);
    for (std::size_t j = 0; j < k; ++j) {
        CompensatedSum s;
        CompensatedSum q;
        for (std::size_t b = 0; b < n_blocks; ++b) {
            s.add(sums[b * k + j].value());
            q.add(squares[b * k + j].value());
        }
        const double mean = s.value() / nd;
        const double var = n > 1 ? std::max(0.0, (q.value() - nd * mean * mean) / (nd - 1.0)) : 0.0;
        m.mean[j] = mean;
        m.std_error[j] = std::sqrt(var / nd);
    }
    return m;
}

}  // namespace smallball
