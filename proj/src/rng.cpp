#include "covq/rng.hpp"

namespace covq {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
}

}  // namespace

PhiloxEngine::PhiloxEngine(RngSeed seed) {
    key_ = {static_cast<std::uint32_t>(seed.seed), static_cast<std::uint32_t>(seed.seed >> 32)};
    counter_ = {0u, 0u, static_cast<std::uint32_t>(seed.stream_id),
                static_cast<std::uint32_t>(seed.stream_id >> 32)};
}

PhiloxEngine::Block PhiloxEngine::generate(Block ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

void PhiloxEngine::refill() {
    buffer_ = generate(counter_, key_);
    // 64-bit block index in the low two words.
    if (++counter_[0] == 0) ++counter_[1];
    next_ = 0;
}

PhiloxEngine::result_type PhiloxEngine::operator()() {
    if (next_ == 2) refill();
    const auto lo = buffer_[2 * next_];
    const auto hi = buffer_[2 * next_ + 1];
    ++next_;
    return (static_cast<std::uint64_t>(hi) << 32) | lo;
}

double PhiloxEngine::uniform() {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

void PhiloxEngine::discard_blocks(std::uint64_t blocks) {
    std::uint64_t index = (static_cast<std::uint64_t>(counter_[1]) << 32) | counter_[0];
    index += blocks;
    counter_[0] = static_cast<std::uint32_t>(index);
    counter_[1] = static_cast<std::uint32_t>(index >> 32);
    next_ = 2;
}

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t derive_stream(std::uint64_t parent, std::initializer_list<std::uint64_t> labels) {
    std::uint64_t h = mix64(parent);
    for (std::uint64_t label : labels) h = mix64(h ^ mix64(label));
    return h;
}

}  // namespace covq
