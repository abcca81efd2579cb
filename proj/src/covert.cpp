#include "covq/covert.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "covq/errors.hpp"
#include "covq/exponent.hpp"

namespace covq {

void KFunction::validate() const {
    if (!(k0 > 0.0) || !std::isfinite(k0)) throw InvalidArgument("K(N) scale k0 must be > 0");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InvalidArgument("K(N) exponent alpha must be >= 0");
}

double KFunction::operator()(double n) const {
    return family == Family::Constant ? k0 : k0 * std::pow(n, -alpha);
}

std::string_view to_string(KFunction::Family family) {
    return family == KFunction::Family::Constant ? "constant" : "power";
}

KFunction::Family parse_k_family(std::string_view text) {
    if (text == "constant") return KFunction::Family::Constant;
    if (text == "power") return KFunction::Family::Power;
    throw InvalidArgument("K(N) family must be 'constant' or 'power', got '" + std::string(text) + "'");
}

void CovertnessSpec::validate() const {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("epsilon must lie strictly inside (0, 1)");
    if (n == 0) throw InvalidArgument("N must be >= 1");
    k.validate();
}

CovertBound max_covert_rate(double lambda_w, const CovertnessSpec& spec) {
    spec.validate();
    if (!(lambda_w > 0.0) || !std::isfinite(lambda_w)) throw InvalidArgument("lambda_w must be > 0");
    CovertBound out;
    const double n = static_cast<double>(spec.n);
    out.k_of_n = spec.k(n);
    const double floor = 1.0 - spec.epsilon;
    if (out.k_of_n <= floor) return out;
    out.feasible = true;
    const double scale = 8.0 * lambda_w * (lambda_w + 1.0) * (lambda_w + 1.0);
    out.rate = std::sqrt(scale / n * std::log(out.k_of_n / floor));
    return out;
}

std::string_view to_string(ExponentMode mode) {
    return mode == ExponentMode::Taylor ? "taylor" : "closed";
}

ExponentMode parse_exponent_mode(std::string_view text) {
    if (text == "taylor") return ExponentMode::Taylor;
    if (text == "closed") return ExponentMode::Closed;
    throw InvalidArgument("exponent mode must be 'taylor' or 'closed', got '" + std::string(text) + "'");
}

CovertnessCheck covertness_check(const ModelParams& params, const CovertnessSpec& spec,
                                 ExponentMode mode) {
    params.validate();
    spec.validate();
    CovertnessCheck out;
    out.i_err = mode == ExponentMode::Taylor ? i_err_taylor(params) : i_err_closed(params);
    const double n = static_cast<double>(spec.n);
    out.p_e_raw = spec.k(n) * std::exp(-out.i_err * n);
    out.p_e_approx = std::clamp(out.p_e_raw, 0.0, 1.0);
    out.covert = out.p_e_raw >= 1.0 - spec.epsilon;
    return out;
}

std::vector<ScalingRow> scaling_table(double lambda_w, double epsilon, const KFunction& k,
                                      const std::vector<std::uint64_t>& n_values) {
    if (n_values.empty()) throw InvalidArgument("scaling table needs at least one N");
    if (!std::is_sorted(n_values.begin(), n_values.end()) ||
        std::adjacent_find(n_values.begin(), n_values.end()) != n_values.end()) {
        throw InvalidArgument("N values must be strictly increasing");
    }
    std::vector<ScalingRow> rows;
    rows.reserve(n_values.size());
    for (std::uint64_t n : n_values) {
        const CovertBound b = max_covert_rate(lambda_w, {epsilon, n, k});
        rows.push_back({n, b.k_of_n, b.rate, b.rate * std::sqrt(static_cast<double>(n)), b.feasible});
    }
    return rows;
}

void write_scaling_csv(const std::vector<ScalingRow>& rows, std::ostream& out) {
    out << "N,K_of_N,bound,bound_times_sqrtN\n";
    for (const auto& r : rows) {
        out << r.n << ',' << format_double(r.k_of_n) << ',' << format_double(r.bound) << ','
            << format_double(r.bound_times_sqrt_n) << '\n';
    }
}

CovertnessSpec covertness_from_config(const KeyValueConfig& cfg, const CovertnessSpec& defaults) {
    CovertnessSpec spec = defaults;
    if (auto v = cfg.get_double("epsilon")) spec.epsilon = *v;
    if (auto v = cfg.get_u64("n")) spec.n = *v;
    if (auto v = cfg.raw("k_family")) {
        try {
            spec.k.family = parse_k_family(*v);
        } catch (const InvalidArgument& e) {
            throw ParseError(e.what(), 0, "k_family");
        }
    }
    if (auto v = cfg.get_double("k0")) spec.k.k0 = *v;
    if (auto v = cfg.get_double("alpha")) spec.k.alpha = *v;
    return spec;
}

}  // namespace covq
