#include "covq/model.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "covq/errors.hpp"

namespace covq {

std::string_view to_string(Hypothesis h) { return h == Hypothesis::H0 ? "H0" : "H1"; }

Hypothesis parse_hypothesis(std::string_view text) {
    if (text == "H0" || text == "h0" || text == "0") return Hypothesis::H0;
    if (text == "H1" || text == "h1" || text == "1") return Hypothesis::H1;
    throw InvalidArgument("hypothesis must be h0 or h1, got '" + std::string(text) + "'");
}

void ModelParams::validate() const {
    if (!std::isfinite(lambda_w) || lambda_w <= 0.0) {
        throw InvalidArgument("lambda_w must be > 0 (got " + format_double(lambda_w) + ")");
    }
    if (!std::isfinite(mu) || mu <= 0.0) {
        throw InvalidArgument("mu must be > 0 (got " + format_double(mu) + ")");
    }
    if (!std::isfinite(lambda_b) || lambda_b < 0.0) {
        throw InvalidArgument("lambda_b must be >= 0 (got " + format_double(lambda_b) + ")");
    }
}

double ModelParams::idle_probability(Hypothesis h) const {
    const double arrivals = h == Hypothesis::H0 ? lambda_w : lambda_w + lambda_b;
    return mu / (arrivals + mu);
}

ValidationReport check(const ModelParams& params, bool strict) {
    ValidationReport report;
    try {
        params.validate();
    } catch (const InvalidArgument& e) {
        report.valid = false;
        report.message = e.what();
        return report;
    }
    report.stable_regime = params.in_stable_regime();
    if (!report.stable_regime) {
        report.message = "mu = " + format_double(params.mu) +
                         " does not exceed lambda_w + lambda_b = " +
                         format_double(params.lambda_w + params.lambda_b);
        if (strict) report.valid = false;
    }
    return report;
}

bool TransitionMatrix::is_stochastic(double tol) const {
    for (const auto& row : rows) {
        for (double x : row) {
            if (!(x >= 0.0 && x <= 1.0)) return false;
        }
        if (std::abs(row[0] + row[1] - 1.0) > tol) return false;
    }
    return true;
}

TransitionMatrix transition_matrix(const ModelParams& params, Hypothesis h) {
    params.validate();
    const double arrivals = h == Hypothesis::H0 ? params.lambda_w : params.lambda_w + params.lambda_b;
    // Next arrival finds the server idle iff the service completes first.
    const double idle = params.mu / (arrivals + params.mu);
    const double busy = arrivals / (arrivals + params.mu);
    TransitionMatrix m;
    m.rows = {{{idle, busy}, {idle, busy}}};
    return m;
}

std::array<double, 2> stationary_distribution(const TransitionMatrix& m) {
    if (m.rows_equal()) return m.rows[0];
    const double leave_idle = m(0, 1);
    const double leave_busy = m(1, 0);
    const double total = leave_idle + leave_busy;
    if (total == 0.0) return {0.5, 0.5};  // identity: every distribution is stationary
    return {leave_busy / total, leave_idle / total};
}

ModelParams params_from_config(const KeyValueConfig& cfg, const ModelParams& defaults) {
    ModelParams p = defaults;
    if (auto v = cfg.get_double("lambda_w")) p.lambda_w = *v;
    if (auto v = cfg.get_double("lambda_b")) p.lambda_b = *v;
    if (auto v = cfg.get_double("mu")) p.mu = *v;
    return p;
}

void params_to_config(const ModelParams& params, KeyValueConfig& cfg) {
    cfg.set("lambda_w", format_double(params.lambda_w));
    cfg.set("lambda_b", format_double(params.lambda_b));
    cfg.set("mu", format_double(params.mu));
}

std::string format_double(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc()) {
        std::ostringstream out;
        out.precision(17);
        out << x;
        return out.str();
    }
    return std::string(buf, ptr);
}

}  // namespace covq
