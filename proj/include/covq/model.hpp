#pragma once

#include <array>
#include <string>
#include <string_view>

#include "covq/config.hpp"

namespace covq {

enum class Hypothesis { H0, H1 };

std::string_view to_string(Hypothesis h);
Hypothesis parse_hypothesis(std::string_view text);

/// Server state seen by an arrival.
enum class ServerState : int { Idle = 0, Busy = 1 };

/// Rate triple shared by both hypotheses. Rates are in jobs per unit time.
struct ModelParams {
    double lambda_w = 0.0;  ///< Willie arrival rate
    double lambda_b = 0.0;  ///< Nillie arrival rate (only present under H1)
    double mu = 1.0;        ///< service rate

    /// Checks lambda_w > 0, mu > 0, lambda_b >= 0 (all finite). Throws
    /// InvalidArgument naming the violated constraint.
    void validate() const;

    /// mu > lambda_w + lambda_b, the light-traffic regime the analysis is
    /// stated for. Formulas hold either way.
    bool in_stable_regime() const { return mu > lambda_w + lambda_b; }

    /// Same triple divided by mu; every probability in the model depends on
    /// rate ratios only, so this is the canonical mu = 1 representative.
    ModelParams normalized() const { return {lambda_w / mu, lambda_b / mu, 1.0}; }

    /// Probability an arrival finds the server idle, per hypothesis.
    double idle_probability(Hypothesis h) const;

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

struct ValidationReport {
    bool valid = true;           ///< hard constraints hold
    bool stable_regime = true;   ///< mu > lambda_w + lambda_b
    std::string message;         ///< empty when nothing to report
};

/// Non-throwing check. The regime condition is a warning unless `strict`,
/// in which case it is reported as invalid.
ValidationReport check(const ModelParams& params, bool strict = false);

/// Row-stochastic 2x2 matrix indexed [previous][next], states ordered
/// (idle, busy).
struct TransitionMatrix {
    std::array<std::array<double, 2>, 2> rows{};

    double operator()(int from, int to) const { return rows[from][to]; }
    bool rows_equal() const { return rows[0] == rows[1]; }
    bool is_stochastic(double tol = 1e-12) const;

    friend bool operator==(const TransitionMatrix&, const TransitionMatrix&) = default;
};

/// Exact transition matrix of the busy/idle chain seen by arrivals.
/// Under H0 lambda_b is ignored.
TransitionMatrix transition_matrix(const ModelParams& params, Hypothesis h);

/// Left eigenvector for eigenvalue 1, normalised to sum to one. Equal-row
/// matrices return the row itself.
std::array<double, 2> stationary_distribution(const TransitionMatrix& m);

// Key-value serialisation (keys: lambda_w, lambda_b, mu).
ModelParams params_from_config(const KeyValueConfig& cfg, const ModelParams& defaults = {});
void params_to_config(const ModelParams& params, KeyValueConfig& cfg);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double x);

}  // namespace covq
