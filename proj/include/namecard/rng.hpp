#pragma once

#include <cstdint>

namespace namecard {

/// PCG-XSH-RR 64/32. The generator is pinned to this exact algorithm because
/// seeded outputs must be byte-identical across platforms and toolchains;
/// std::uniform_* distributions are implementation-defined and are not used
/// anywhere reproducibility matters.
class Pcg32 {
public:
    explicit Pcg32(std::uint64_t seed) {
        state_ = 0;
        next_u32();
        state_ += seed;
        next_u32();
    }

    std::uint32_t next_u32() {
        const std::uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + kIncrement;
        const auto xorshifted = static_cast<std::uint32_t>(((old >> 18) ^ old) >> 27);
        const auto rot = static_cast<std::uint32_t>(old >> 59);
        return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
    }

    /// Uniform in [0, bound); bound 0 yields 0. Rejection keeps it bias-free.
    std::uint32_t bounded(std::uint32_t bound) {
        if (bound <= 1) return 0;
        const std::uint32_t threshold = (0u - bound) % bound;
        for (;;) {
            const std::uint32_t r = next_u32();
            if (r >= threshold) return r % bound;
        }
    }

    /// Uniform in [lo, hi] inclusive.
    int range(int lo, int hi) {
        return lo + static_cast<int>(bounded(static_cast<std::uint32_t>(hi - lo + 1)));
    }

private:
    static constexpr std::uint64_t kIncrement = 1442695040888963407ULL;
    std::uint64_t state_ = 0;
};

}  // namespace namecard
