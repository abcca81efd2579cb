#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "covq/model.hpp"
#include "covq/rng.hpp"
#include "covq/sim.hpp"

namespace covq {

/// How the first observation enters the likelihood.
enum class InitialMode {
    Stationary,   ///< X_1 drawn from each chain's stationary law
    Conditioned,  ///< likelihood conditioned on X_1; it contributes nothing
};

std::string_view to_string(InitialMode mode);
InitialMode parse_initial_mode(std::string_view text);

/// Decision H0 exactly when llr >= threshold (ties go to H0).
struct LlrResult {
    double llr = 0.0;  ///< nats
    Hypothesis decision = Hypothesis::H0;
    double threshold = 0.0;
};

/// p_e is the equal-prior average (p_f + p_m) / 2. Exact results carry
/// trials == 0 and zero standard errors.
struct ErrorProbabilities {
    double p_f = 0.0;  ///< P(decide H1 | H0)
    double p_m = 0.0;  ///< P(decide H0 | H1)
    double p_e = 0.0;
    double se_f = 0.0;
    double se_m = 0.0;
    std::uint64_t trials = 0;
};

/// Natural-log likelihood ratio log P[x | H0] - log P[x | H1].
/// Throws UndefinedLlr if the observed path uses a zero transition
/// probability, InvalidArgument for an empty sequence.
double log_likelihood_ratio(const ObservationSequence& obs, const TransitionMatrix& p,
                            const TransitionMatrix& q, InitialMode mode = InitialMode::Stationary);

LlrResult decide(const ObservationSequence& obs, const TransitionMatrix& p,
                 const TransitionMatrix& q, double threshold = 0.0,
                 InitialMode mode = InitialMode::Stationary);

/// Exact P_F, P_M for the LLR test on n observations. With equal-row chains
/// the count of idle observations is a sufficient statistic, binomial under
/// either hypothesis, and the LLR is affine in it. lambda_b == 0 raises
/// DegenerateModel.
ErrorProbabilities exact_error_probabilities(const ModelParams& params, std::size_t n,
                                             double threshold = 0.0,
                                             InitialMode mode = InitialMode::Stationary);

struct MonteCarloOptions {
    unsigned threads = 1;
    InitialMode mode = InitialMode::Stationary;
    SimOptions sim{};
};

/// Simulates `trials` sequences under each hypothesis with the event-driven
/// simulator and counts wrong decisions. Trial t under hypothesis h uses the
/// stream derive(seed, {n, h, t}), so results do not depend on `threads`.
ErrorProbabilities monte_carlo_error(const ModelParams& params, std::size_t n, double threshold,
                                     std::uint64_t trials, RngSeed seed,
                                     const MonteCarloOptions& options = {});

/// Per-symbol log ratios log(P(.,x)/Q(.,x)) for equal-row chains.
struct SymbolLogRatios {
    double idle = 0.0;
    double busy = 0.0;
};
SymbolLogRatios symbol_log_ratios(const TransitionMatrix& p, const TransitionMatrix& q);

/// LLR of any sequence with the given idle/busy counts under equal-row chains.
inline double llr_from_counts(std::uint64_t idle, std::uint64_t busy, const SymbolLogRatios& l) {
    return static_cast<double>(idle) * l.idle + static_cast<double>(busy) * l.busy;
}

}  // namespace covq
