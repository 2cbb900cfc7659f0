#pragma once

#include <cstdint>
#include <limits>

namespace bellfeas {

/// PCG-XSH-RR 32-bit generator. The stream id selects one of 2^63
/// statistically independent sequences for the same seed, which is what
/// lets every (replica, setting) pair own its own stream: results are
/// then identical no matter how work is divided among threads.
class Pcg32 {
public:
    using result_type = std::uint32_t;

    Pcg32(std::uint64_t seed, std::uint64_t stream) : inc_((stream << 1u) | 1u) {
        state_ = 0;
        (*this)();
        state_ += seed;
        (*this)();
    }

    std::uint32_t operator()() {
        std::uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + inc_;
        auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
        auto rot = static_cast<std::uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((-rot) & 31u));
    }

    /// Uniform double in (0, 1).
    double uniform01() {
        constexpr double inv = 1.0 / 4294967296.0;
        return (static_cast<double>((*this)()) + 0.5) * inv;
    }

    static constexpr std::uint32_t min() { return 0; }
    static constexpr std::uint32_t max() { return std::numeric_limits<std::uint32_t>::max(); }

private:
    std::uint64_t state_;
    std::uint64_t inc_;
};

} // namespace bellfeas
