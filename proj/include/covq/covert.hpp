#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "covq/config.hpp"
#include "covq/model.hpp"

namespace covq {

/// Sub-exponential prefactor K(N) in P_E(N) ~ K(N) exp(-I_err N).
struct KFunction {
    enum class Family { Constant, Power };

    Family family = Family::Constant;
    double k0 = 1.0;     ///< > 0
    double alpha = 0.0;  ///< >= 0, used as K(N) = k0 * N^(-alpha) for Power

    void validate() const;
    double operator()(double n) const;

    static KFunction constant(double k0 = 1.0) { return {Family::Constant, k0, 0.0}; }
    static KFunction power(double k0, double alpha) { return {Family::Power, k0, alpha}; }
};

std::string_view to_string(KFunction::Family family);
KFunction::Family parse_k_family(std::string_view text);

struct CovertnessSpec {
    double epsilon = 0.1;  ///< strictly inside (0, 1)
    std::uint64_t n = 1;   ///< observations available to the detector
    KFunction k{};

    void validate() const;
};

struct CovertBound {
    double rate = 0.0;      ///< largest covert lambda_b, in units of mu
    double k_of_n = 0.0;
    bool feasible = false;  ///< false when K(N) <= 1 - epsilon; rate is then 0
};

/// sqrt(8 lw (lw + 1)^2 / N * log(K(N) / (1 - epsilon))), with lambda_w in
/// units of the service rate.
CovertBound max_covert_rate(double lambda_w, const CovertnessSpec& spec);

enum class ExponentMode { Taylor, Closed };
std::string_view to_string(ExponentMode mode);
ExponentMode parse_exponent_mode(std::string_view text);

struct CovertnessCheck {
    double i_err = 0.0;
    double p_e_raw = 0.0;     ///< K(N) exp(-I_err N), unclipped
    double p_e_approx = 0.0;  ///< p_e_raw clipped to [0, 1]
    bool covert = false;      ///< p_e_raw >= 1 - epsilon
};

CovertnessCheck covertness_check(const ModelParams& params, const CovertnessSpec& spec,
                                 ExponentMode mode);

struct ScalingRow {
    std::uint64_t n = 0;
    double k_of_n = 0.0;
    double bound = 0.0;
    double bound_times_sqrt_n = 0.0;
    bool feasible = false;
};

/// max_covert_rate over an increasing list of N.
std::vector<ScalingRow> scaling_table(double lambda_w, double epsilon, const KFunction& k,
                                      const std::vector<std::uint64_t>& n_values);

/// CSV with header "N,K_of_N,bound,bound_times_sqrtN".
void write_scaling_csv(const std::vector<ScalingRow>& rows, std::ostream& out);

// Key-value serialisation (keys: epsilon, n, k_family, k0, alpha).
CovertnessSpec covertness_from_config(const KeyValueConfig& cfg, const CovertnessSpec& defaults = {});

}  // namespace covq
