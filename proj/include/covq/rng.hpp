#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace covq {

/// Identifies one random stream. Distinct (seed, stream_id) pairs give
/// non-overlapping counter ranges of the same keyed generator.
struct RngSeed {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;

    friend bool operator==(const RngSeed&, const RngSeed&) = default;
};

/// Philox4x32-10 counter-based generator. The key is the 64-bit seed, the
/// upper half of the 128-bit counter is the stream id and the lower half
/// counts blocks, so each stream has 2^64 blocks of four 32-bit words.
/// Satisfies UniformRandomBitGenerator with 64-bit output.
class PhiloxEngine {
public:
    using result_type = std::uint64_t;
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    explicit PhiloxEngine(RngSeed seed);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform();

    /// Skip `blocks` counter blocks (two 64-bit outputs each).
    void discard_blocks(std::uint64_t blocks);

    /// The raw bijection; exposed for known-answer tests.
    static Block generate(Block counter, Key key);

private:
    void refill();

    Key key_{};
    Block counter_{};
    Block buffer_{};
    int next_ = 2;  // index into buffer_ in 64-bit words; 2 means empty
};

/// SplitMix64 finaliser.
std::uint64_t mix64(std::uint64_t x);

/// Child stream id derived from a parent id and an ordered list of labels
/// (grid point, hypothesis, trial, ...). Adding labels elsewhere never
/// changes existing children.
std::uint64_t derive_stream(std::uint64_t parent, std::initializer_list<std::uint64_t> labels);

inline RngSeed derive(const RngSeed& parent, std::initializer_list<std::uint64_t> labels) {
    return {parent.seed, derive_stream(parent.stream_id, labels)};
}

}  // namespace covq
