#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "covq/config.hpp"
#include "covq/detect.hpp"
#include "covq/exponent.hpp"
#include "covq/model.hpp"
#include "covq/rng.hpp"

namespace covq {

struct CampaignConfig {
    ModelParams params;
    std::vector<std::uint64_t> n_grid;  ///< strictly increasing
    std::uint64_t trials_per_point = 10000;
    double threshold = 0.0;
    RngSeed master_seed{};
    bool use_exact_when_feasible = true;
    InitialMode mode = InitialMode::Stationary;

    void validate() const;
};

enum class Method { Exact, MonteCarlo };
std::string_view to_string(Method method);

struct ExperimentRow {
    std::uint64_t n = 0;
    double p_f = 0.0;
    double p_m = 0.0;
    double p_e = 0.0;
    double se_f = 0.0;
    double se_m = 0.0;
    std::uint64_t trials = 0;  ///< 0 for exact rows
    RngSeed seed{};            ///< stream used by Monte Carlo rows
    Method method = Method::Exact;

    friend bool operator==(const ExperimentRow&, const ExperimentRow&) = default;
};

struct ExperimentResult {
    ModelParams params;
    double threshold = 0.0;
    InitialMode mode = InitialMode::Stationary;
    std::vector<ExperimentRow> rows;
    // Least-squares slopes of log p against n (nats per observation);
    // nullopt when fewer than three rows carry a usable estimate.
    std::optional<double> fitted_slope_f;
    std::optional<double> fitted_slope_m;
    std::optional<double> fitted_slope_e;
    ExponentReport exponent_ref;
};

/// Error probabilities at every n of the grid (exact binomial computation
/// when lambda_b > 0 and allowed, Monte Carlo otherwise), decay-rate fits and
/// the analytic exponent. Row n draws from derive(master_seed, {n}); results
/// are bit-identical for any thread count.
ExperimentResult run_campaign(const CampaignConfig& cfg, unsigned threads = 1);

/// OLS slope of log(p) against n over rows where p is resolvable: p >= 10/trials
/// for Monte Carlo rows, any positive normal value for exact rows.
std::optional<double> fit_log_slope(const std::vector<ExperimentRow>& rows,
                                    const std::function<double(const ExperimentRow&)>& field);

struct SweepRow {
    double threshold = 0.0;
    double p_f = 0.0;
    double p_m = 0.0;
    double p_e = 0.0;
};

struct SweepOptions {
    bool use_exact_when_feasible = true;
    unsigned threads = 1;
    InitialMode mode = InitialMode::Stationary;
};

/// Error trade-off across thresholds. Monte Carlo sweeps reuse one seed for
/// every threshold, so each row sees the same simulated sequences.
std::vector<SweepRow> threshold_sweep(const ModelParams& params, std::size_t n,
                                      const std::vector<double>& thresholds, std::uint64_t trials,
                                      RngSeed seed, const SweepOptions& options = {});

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);

inline constexpr int kResultFormatVersion = 1;

/// Full-fidelity JSON. Throws InputError when the file cannot be written.
void persist(const ExperimentResult& result, const std::string& path);
/// Throws ParseError (with line or field), VersionError, or InputError.
ExperimentResult load(const std::string& path);

std::string to_json_string(const ExperimentResult& result);
ExperimentResult from_json_string(const std::string& text);

/// CSV rows: n,p_f,p_m,p_e,se_f,se_m,trials.
void write_rows_csv(const ExperimentResult& result, std::ostream& out);
void persist_csv(const ExperimentResult& result, const std::string& path);

/// Keys: lambda_w, lambda_b, mu, n_grid, trials_per_point, threshold, seed,
/// stream_id, use_exact, initial_mode.
CampaignConfig campaign_from_config(const KeyValueConfig& cfg);

}  // namespace covq
