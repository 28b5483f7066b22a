#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace echotrack::detail {

// Seeded RNG with hand-rolled draw primitives. std::uniform_int_distribution
// and friends are implementation-defined, so results would not be stable
// across standard libraries; these are.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 bits of precision.
    double uniform_unit() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return uniform_unit() < p; }

    // Uniform integer in [0, bound), bound >= 1. Rejection sampling keeps the
    // draw unbiased.
    std::uint64_t uniform_int(std::uint64_t bound) {
        if (bound <= 1) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    // Fisher-Yates; same sequence of draws on every platform.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(uniform_int(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace echotrack::detail
