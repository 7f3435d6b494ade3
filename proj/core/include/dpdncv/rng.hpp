#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace dpdncv {

/// Philox4x32-10 counter-based generator. A (seed, stream) pair selects an
/// independent sequence, so replicates can be drawn in any order.
class Philox4x32 {
public:
    using result_type = std::uint64_t;

    explicit Philox4x32(std::uint64_t seed = 0, std::uint64_t stream = 0);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    /// Raw block function, exposed for known-answer tests.
    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> counter,
                                              std::array<std::uint32_t, 2> key);

private:
    void refill();

    std::array<std::uint32_t, 2> key_{};
    std::uint64_t stream_ = 0;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4;
};

/// SplitMix64-style mixing of two words into a stream id.
std::uint64_t mix_stream(std::uint64_t a, std::uint64_t b);

}  // namespace dpdncv
