// Copyright 2026 The PQLedger Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
///////////////////////////////////////////////////////////////////////////////
//
// Timing buckets for the benchmark harness. The crypto entry points
// (sign / verify / hash) report into whichever collector is active on the
// calling thread; the committer activates one per block, so bucket
// accumulation is race-free without any locking.

#ifndef PQLEDGER_METRICS_HPP
#define PQLEDGER_METRICS_HPP

#include <chrono>
#include <cstdint>

namespace pqledger::metrics {

struct Buckets {
    std::uint64_t sign_ns = 0;
    std::uint64_t verify_ns = 0;
    std::uint64_t hash_ns = 0;
    std::uint64_t sign_ops = 0;
    std::uint64_t verify_ops = 0;
    std::uint64_t hash_ops = 0;
    std::uint64_t hashed_bytes = 0;

    void clear() { *this = Buckets{}; }
};

inline thread_local Buckets* active = nullptr;

// RAII: routes this thread's crypto timings into `b` for the scope.
class Collect {
public:
    explicit Collect(Buckets& b) : prev_(active) { active = &b; }
    ~Collect() { active = prev_; }
    Collect(const Collect&) = delete;
    Collect& operator=(const Collect&) = delete;

private:
    Buckets* prev_;
};

using Clock = std::chrono::steady_clock;

inline std::uint64_t elapsed_ns(Clock::time_point start) {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start)
            .count());
}

inline void add_sign(std::uint64_t ns) {
    if (active) {
        active->sign_ns += ns;
        active->sign_ops += 1;
    }
}

inline void add_verify(std::uint64_t ns) {
    if (active) {
        active->verify_ns += ns;
        active->verify_ops += 1;
    }
}

inline void add_hash(std::uint64_t ns, std::uint64_t bytes) {
    if (active) {
        active->hash_ns += ns;
        active->hash_ops += 1;
        active->hashed_bytes += bytes;
    }
}

// Synthetic CPU cost model: spin until the requested microseconds elapse.
inline void busy_wait_us(std::uint32_t us) {
    if (us == 0) return;
    auto start = Clock::now();
    auto target = std::chrono::microseconds(us);
    while (Clock::now() - start < target) {
        // spin
    }
}

} // namespace pqledger::metrics

#endif // PQLEDGER_METRICS_HPP
