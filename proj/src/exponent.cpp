#include "covq/exponent.hpp"

#include <cmath>
#include <sstream>

#include "covq/errors.hpp"

namespace covq {
namespace {

// Log ratios of the H1 to H0 per-symbol probabilities, written with log1p so
// they stay accurate as lambda_b -> 0. Valid for lambda_b > -lambda_w.
struct LogRatios {
    double p = 0.0;     // idle probability under H0
    double idle = 0.0;  // log(q / p)
    double busy = 0.0;  // log((1 - q) / (1 - p))
};

LogRatios log_ratios(double lw, double lb, double mu) {
    LogRatios l;
    l.p = mu / (lw + mu);
    const double shift = std::log1p(lb / (lw + mu));
    l.idle = -shift;
    l.busy = std::log1p(lb / lw) - shift;
    return l;
}

// r(u) - 1 without cancellation; r = p e^{s a} + (1-p) e^{s b}, s = 1 - u.
double r_minus_one(const LogRatios& l, double u) {
    const double s = 1.0 - u;
    return l.p * std::expm1(s * l.idle) + (1.0 - l.p) * std::expm1(s * l.busy);
}

// r(u1) - r(u2) computed from the difference of exponents.
double r_difference(const LogRatios& l, double u1, double u2) {
    const double s2 = 1.0 - u2;
    const double ds = u2 - u1;
    return l.p * std::exp(s2 * l.idle) * std::expm1(ds * l.idle) +
           (1.0 - l.p) * std::exp(s2 * l.busy) * std::expm1(ds * l.busy);
}

double v_closed_signed(double lw, double lb, double mu) {
    if (std::abs(lb) / lw < kSmallRateSwitch) return 0.5;
    const double a = (lb + lw) / mu;
    const double log_b = std::log1p(lb / lw);
    const double log_bc = std::log1p(lb * mu / (lw * (lb + lw + mu)));
    const double log_inv_c = std::log1p(lb / (lw + mu));
    return std::log(a * log_bc / log_inv_c) / log_b;
}

}  // namespace

RCoefficients r_coefficients(const ModelParams& params) {
    params.validate();
    const double lw = params.lambda_w, lb = params.lambda_b, mu = params.mu;
    RCoefficients k;
    k.A = mu / (lb + lw + mu);
    k.B = (lb + lw + mu) / (lw + mu);
    k.C = (lb + lw) / (lb + lw + mu);
    k.D = lw * (lb + lw + mu) / ((lb + lw) * (lw + mu));
    return k;
}

MinimizerCoefficients minimizer_coefficients(const ModelParams& params) {
    params.validate();
    const double lw = params.lambda_w, lb = params.lambda_b, mu = params.mu;
    return {(lb + lw) / mu, (lb + lw) / lw, (lw + mu) / (lb + lw + mu)};
}

double r_of_u(const ModelParams& params, double u) {
    if (!(u >= 0.0 && u <= 1.0)) throw InvalidArgument("u must lie in [0, 1]");
    params.validate();
    if (params.lambda_b == 0.0) return 1.0;
    const RCoefficients k = r_coefficients(params);
    return k.A * std::pow(k.B, u) + k.C * std::pow(k.D, u);
}

std::array<std::array<double, 2>, 2> tilted_matrix(double p, double q, double u) {
    const double idle = std::pow(p, u) * std::pow(q, 1.0 - u);
    const double busy = std::pow(1.0 - p, u) * std::pow(1.0 - q, 1.0 - u);
    return {{{idle, busy}, {idle, busy}}};
}

double tilted_row_sum(double p, double q, double u) {
    const auto m = tilted_matrix(p, q, u);
    return m[0][0] + m[0][1];
}

bool below_small_rate_switch(const ModelParams& params) {
    return params.lambda_b / params.lambda_w < kSmallRateSwitch;
}

double v_closed_form(const ModelParams& params) {
    params.validate();
    return v_closed_signed(params.lambda_w, params.lambda_b, params.mu);
}

double stationarity_residual(const ModelParams& params, double v) {
    params.validate();
    const RCoefficients k = r_coefficients(params);
    const double lw = params.lambda_w, lb = params.lambda_b, mu = params.mu;
    const double log_B = std::log1p(lb / (lw + mu));
    const double log_D = log_B - std::log1p(lb / lw);
    return k.A * std::pow(k.B, v) * log_B + k.C * std::pow(k.D, v) * log_D;
}

double i_err_closed(const ModelParams& params) {
    params.validate();
    if (params.lambda_b == 0.0) return 0.0;
    if (below_small_rate_switch(params)) return i_err_numeric(params).i_err;
    const LogRatios l = log_ratios(params.lambda_w, params.lambda_b, params.mu);
    return -std::log1p(r_minus_one(l, v_closed_form(params)));
}

NumericMinimum i_err_numeric(const ModelParams& params, double tol) {
    params.validate();
    if (params.lambda_b == 0.0) {
        throw DegenerateModel("numeric exponent needs lambda_b > 0");
    }
    if (!(tol > 0.0 && tol <= 1e-3)) throw InvalidArgument("tol must lie in (0, 1e-3]");

    constexpr int kMaxIterations = 200;
    const double shrink = (std::sqrt(5.0) - 1.0) / 2.0;
    const LogRatios l = log_ratios(params.lambda_w, params.lambda_b, params.mu);

    // log is monotone, so comparing r is the same as comparing log r; the
    // comparison uses the cancellation-free difference.
    double lo = 0.0, hi = 1.0;
    int iterations = 0;
    while (hi - lo > tol) {
        if (++iterations > kMaxIterations) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "golden-section search did not converge: bracket [" << lo << ", " << hi
                << "] after " << kMaxIterations << " iterations";
            throw NumericError(msg.str());
        }
        const double x1 = hi - shrink * (hi - lo);
        const double x2 = lo + shrink * (hi - lo);
        if (r_difference(l, x1, x2) < 0.0) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    NumericMinimum out;
    out.v = 0.5 * (lo + hi);
    out.i_err = -std::log1p(r_minus_one(l, out.v));
    out.iterations = iterations;
    return out;
}

double i_err_taylor(const ModelParams& params) {
    params.validate();
    const ModelParams n = params.normalized();
    const double lw = n.lambda_w;
    return n.lambda_b * n.lambda_b / (8.0 * lw * (lw + 1.0) * (lw + 1.0));
}

LimitFacts q_derivative_facts(double lambda_w) {
    if (!(lambda_w > 0.0) || !std::isfinite(lambda_w)) throw InvalidArgument("lambda_w must be > 0");
    LimitFacts f;
    f.p = 1.0 / (1.0 + lambda_w);
    f.q0 = f.p;
    f.dq0 = -f.p * f.p;
    f.d2q0 = 2.0 * f.p * f.p * f.p;
    f.f0 = 1.0;
    f.df0 = 0.0;
    f.d2f0 = -1.0 / (4.0 * lambda_w * (lambda_w + 1.0) * (lambda_w + 1.0));
    return f;
}

double q_of_lambda_b(double lambda_w, double lambda_b) {
    return 1.0 / (1.0 + lambda_w + lambda_b);
}

double f_of_lambda_b(double lambda_w, double lambda_b) {
    if (!(lambda_w > 0.0)) throw InvalidArgument("lambda_w must be > 0");
    if (!(lambda_b > -lambda_w)) throw InvalidArgument("lambda_b must exceed -lambda_w");
    if (lambda_b == 0.0) return 1.0;
    const LogRatios l = log_ratios(lambda_w, lambda_b, 1.0);
    return 1.0 + r_minus_one(l, v_closed_signed(lambda_w, lambda_b, 1.0));
}

ExponentReport exponent_report(const ModelParams& params, double tol) {
    params.validate();
    ExponentReport rep;
    rep.params = params;
    rep.abcd = r_coefficients(params);
    rep.abc_small = minimizer_coefficients(params);
    rep.small_rate_limit = below_small_rate_switch(params);
    rep.v_closed = v_closed_form(params);
    rep.i_err_taylor = i_err_taylor(params);
    if (params.lambda_b == 0.0) {
        rep.v_numeric = 0.5;
        rep.i_err_closed = 0.0;
        rep.i_err_numeric = 0.0;
        return rep;
    }
    const NumericMinimum num = i_err_numeric(params, tol);
    rep.v_numeric = num.v;
    rep.i_err_numeric = num.i_err;
    rep.iterations = num.iterations;
    rep.i_err_closed = rep.small_rate_limit ? num.i_err : i_err_closed(params);
    return rep;
}

}  // namespace covq
