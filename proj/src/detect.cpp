#include "covq/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "covq/errors.hpp"
#include "covq/parallel.hpp"

namespace covq {
namespace {

constexpr std::size_t kTrialBlock = 1024;

double checked_log_ratio(double num, double den) {
    if (num == 0.0 || den == 0.0) {
        throw UndefinedLlr("zero transition probability on the observed path");
    }
    return std::log(num / den);
}

// log C(m, k) for k = 0..m.
std::vector<double> log_binomial_row(std::size_t m) {
    std::vector<double> row(m + 1, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
        row[k + 1] = row[k] + std::log(static_cast<double>(m - k)) - std::log(static_cast<double>(k + 1));
    }
    return row;
}

// log of the sum of exp(terms); -inf for an empty set.
double log_sum_exp(const std::vector<double>& terms) {
    if (terms.empty()) return -std::numeric_limits<double>::infinity();
    const double peak = *std::max_element(terms.begin(), terms.end());
    if (std::isinf(peak)) return peak;
    double sum = 0.0;
    for (double t : terms) sum += std::exp(t - peak);
    return peak + std::log(sum);
}

std::uint64_t count_errors(const ModelParams& params, Hypothesis truth, std::size_t n,
                           double threshold, std::uint64_t trials, RngSeed seed,
                           const TransitionMatrix& p, const TransitionMatrix& q,
                           const MonteCarloOptions& options) {
    const std::size_t blocks = static_cast<std::size_t>((trials + kTrialBlock - 1) / kTrialBlock);
    std::vector<std::uint64_t> errors(blocks, 0);
    const auto hyp_label = static_cast<std::uint64_t>(truth == Hypothesis::H0 ? 0 : 1);
    parallel_for(blocks, options.threads, [&](std::size_t b) {
        const std::uint64_t first = b * kTrialBlock;
        const std::uint64_t last = std::min<std::uint64_t>(trials, first + kTrialBlock);
        std::uint64_t wrong = 0;
        for (std::uint64_t t = first; t < last; ++t) {
            const auto obs = simulate_sequence(params, truth, n, derive(seed, {n, hyp_label, t}),
                                               options.sim);
            if (decide(obs, p, q, threshold, options.mode).decision != truth) ++wrong;
        }
        errors[b] = wrong;
    });
    std::uint64_t total = 0;
    for (auto e : errors) total += e;
    return total;
}

}  // namespace

std::string_view to_string(InitialMode mode) {
    return mode == InitialMode::Stationary ? "stationary" : "conditioned";
}

InitialMode parse_initial_mode(std::string_view text) {
    if (text == "stationary") return InitialMode::Stationary;
    if (text == "conditioned") return InitialMode::Conditioned;
    throw InvalidArgument("initial mode must be 'stationary' or 'conditioned', got '" +
                          std::string(text) + "'");
}

SymbolLogRatios symbol_log_ratios(const TransitionMatrix& p, const TransitionMatrix& q) {
    SymbolLogRatios l;
    l.idle = p(0, 0) == q(0, 0) ? 0.0 : std::log(p(0, 0) / q(0, 0));
    l.busy = p(0, 1) == q(0, 1) ? 0.0 : std::log(p(0, 1) / q(0, 1));
    return l;
}

double log_likelihood_ratio(const ObservationSequence& obs, const TransitionMatrix& p,
                            const TransitionMatrix& q, InitialMode mode) {
    if (obs.n() == 0) throw InvalidArgument("log-likelihood ratio of an empty sequence");
    const std::size_t start = mode == InitialMode::Stationary ? 0 : 1;

    if (p.rows_equal() && q.rows_equal()) {
        std::uint64_t busy = 0;
        for (std::size_t j = start; j < obs.n(); ++j) busy += obs.bits[j];
        const std::uint64_t idle = (obs.n() - start) - busy;
        const auto check = [&](std::uint64_t count, int state) {
            if (count > 0 && (p(0, state) == 0.0 || q(0, state) == 0.0)) {
                throw UndefinedLlr("zero transition probability on the observed path");
            }
        };
        check(idle, 0);
        check(busy, 1);
        return llr_from_counts(idle, busy, symbol_log_ratios(p, q));
    }

    double llr = 0.0;
    if (mode == InitialMode::Stationary) {
        const auto pi_p = stationary_distribution(p);
        const auto pi_q = stationary_distribution(q);
        const int first = obs.bits[0];
        llr += checked_log_ratio(pi_p[first], pi_q[first]);
    }
    if (obs.n() >= 2) {
        const CountMatrix counts = empirical_transition_counts(obs);
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                if (counts[i][j] == 0) continue;
                llr += static_cast<double>(counts[i][j]) * checked_log_ratio(p(i, j), q(i, j));
            }
        }
    }
    return llr;
}

LlrResult decide(const ObservationSequence& obs, const TransitionMatrix& p,
                 const TransitionMatrix& q, double threshold, InitialMode mode) {
    LlrResult result;
    result.llr = log_likelihood_ratio(obs, p, q, mode);
    result.threshold = threshold;
    result.decision = result.llr >= threshold ? Hypothesis::H0 : Hypothesis::H1;
    return result;
}

ErrorProbabilities exact_error_probabilities(const ModelParams& params, std::size_t n,
                                             double threshold, InitialMode mode) {
    params.validate();
    if (params.lambda_b == 0.0) {
        throw DegenerateModel("lambda_b = 0: hypotheses coincide, error probabilities are degenerate");
    }
    if (n == 0) throw InvalidArgument("n must be >= 1");

    const TransitionMatrix p = transition_matrix(params, Hypothesis::H0);
    const TransitionMatrix q = transition_matrix(params, Hypothesis::H1);
    const SymbolLogRatios l = symbol_log_ratios(p, q);
    const std::size_t m = mode == InitialMode::Stationary ? n : n - 1;

    const auto lc = log_binomial_row(m);
    const double log_idle_p = std::log(p(0, 0)), log_busy_p = std::log(p(0, 1));
    const double log_idle_q = std::log(q(0, 0)), log_busy_q = std::log(q(0, 1));

    std::vector<double> false_alarm, miss;
    for (std::size_t k = 0; k <= m; ++k) {
        const double idle = static_cast<double>(k);
        const double busy = static_cast<double>(m - k);
        if (llr_from_counts(k, m - k, l) >= threshold) {
            miss.push_back(lc[k] + idle * log_idle_q + busy * log_busy_q);
        } else {
            false_alarm.push_back(lc[k] + idle * log_idle_p + busy * log_busy_p);
        }
    }

    ErrorProbabilities e;
    e.p_f = std::min(1.0, std::exp(log_sum_exp(false_alarm)));
    e.p_m = std::min(1.0, std::exp(log_sum_exp(miss)));
    e.p_e = 0.5 * (e.p_f + e.p_m);
    return e;
}

ErrorProbabilities monte_carlo_error(const ModelParams& params, std::size_t n, double threshold,
                                     std::uint64_t trials, RngSeed seed,
                                     const MonteCarloOptions& options) {
    params.validate();
    if (n == 0) throw InvalidArgument("n must be >= 1");
    if (trials == 0) throw InvalidArgument("trials must be >= 1");

    const TransitionMatrix p = transition_matrix(params, Hypothesis::H0);
    const TransitionMatrix q = transition_matrix(params, Hypothesis::H1);
    const auto f = count_errors(params, Hypothesis::H0, n, threshold, trials, seed, p, q, options);
    const auto m = count_errors(params, Hypothesis::H1, n, threshold, trials, seed, p, q, options);

    const double t = static_cast<double>(trials);
    ErrorProbabilities e;
    e.trials = trials;
    e.p_f = static_cast<double>(f) / t;
    e.p_m = static_cast<double>(m) / t;
    e.p_e = 0.5 * (e.p_f + e.p_m);
    e.se_f = std::sqrt(e.p_f * (1.0 - e.p_f) / t);
    e.se_m = std::sqrt(e.p_m * (1.0 - e.p_m) / t);
    return e;
}

}  // namespace covq
