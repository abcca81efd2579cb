#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "covq/model.hpp"
#include "covq/rng.hpp"

namespace covq {

/// Busy/idle record X_1..X_N: bits[j] == 1 when arrival j found the server busy.
struct ObservationSequence {
    std::vector<std::uint8_t> bits;

    std::size_t n() const { return bits.size(); }
    std::size_t busy_count() const;
    double busy_fraction() const;

    friend bool operator==(const ObservationSequence&, const ObservationSequence&) = default;
};

enum class JobOrigin : std::uint8_t { Willie, Nillie };

/// Per-arrival detail, for validating the simulator only.
struct SimTrace {
    std::vector<double> arrival_times;
    std::vector<JobOrigin> origin;
    std::vector<std::uint8_t> served;
    ObservationSequence sequence;

    std::size_t nillie_count() const;
};

struct SimOptions {
    /// Leading arrivals dropped so the record starts from the stationary
    /// law rather than from the empty-server initial condition.
    std::size_t burn_in = 1;
};

/// Exact event-driven M/M/1/1 simulation: Poisson arrivals at lambda_w
/// (H0) or lambda_w + lambda_b (H1), exponential(mu) service, no buffer.
/// Deterministic in (params, hyp, n, seed, options).
ObservationSequence simulate_sequence(const ModelParams& params, Hypothesis hyp, std::size_t n,
                                      RngSeed seed, const SimOptions& options = {});

/// Same arrivals and bits as simulate_sequence for the same arguments, plus
/// arrival times and Willie/Nillie tags drawn from a sibling stream.
SimTrace simulate_trace(const ModelParams& params, Hypothesis hyp, std::size_t n, RngSeed seed,
                        const SimOptions& options = {});

using CountMatrix = std::array<std::array<std::uint64_t, 2>, 2>;

/// Counts of consecutive pairs (x_{j-1}, x_j). Requires n >= 2.
CountMatrix empirical_transition_counts(const ObservationSequence& obs);

/// Row-normalised counts; a row with no observations is left at zero.
TransitionMatrix normalize_counts(const CountMatrix& counts);

// Sequence files. Text: a single line of '0'/'1'. Binary: the 8-byte magic
// "COVQSEQ1", a little-endian uint64 length, then the bits packed
// LSB-first, eight per byte.
void write_text(const ObservationSequence& obs, std::ostream& out);
ObservationSequence read_text(std::istream& in);
void write_binary(const ObservationSequence& obs, std::ostream& out);
ObservationSequence read_binary(std::istream& in);

enum class SequenceFormat { Text, Binary };
void save_sequence(const ObservationSequence& obs, const std::string& path, SequenceFormat format);
/// Detects the format from the magic bytes.
ObservationSequence load_sequence(const std::string& path);

/// CSV with header "time,origin,served".
void write_trace_csv(const SimTrace& trace, std::ostream& out);

}  // namespace covq
