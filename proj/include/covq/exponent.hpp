#pragma once

#include <array>

#include "covq/model.hpp"

namespace covq {

/// Coefficients of the spectral radius written as r(u) = A B^u + C D^u:
///   A = mu / (lb + lw + mu)             B = (lb + lw + mu) / (lw + mu)
///   C = (lb + lw) / (lb + lw + mu)      D = lw (lb + lw + mu) / ((lb + lw)(lw + mu))
/// A + C = 1 and A B + C D = 1, so r(0) = r(1) = 1.
struct RCoefficients {
    double A = 0.0, B = 0.0, C = 0.0, D = 0.0;
};

/// Ratios in the closed-form minimiser:
///   a = (lb + lw) / mu,  b = (lb + lw) / lw,  c = (lw + mu) / (lb + lw + mu).
struct MinimizerCoefficients {
    double a = 0.0, b = 0.0, c = 0.0;
};

/// Everything known about the error exponent at one parameter point.
struct ExponentReport {
    ModelParams params;
    double v_closed = 0.5;
    double v_numeric = 0.5;
    double i_err_closed = 0.0;   ///< nats per observation
    double i_err_numeric = 0.0;
    double i_err_taylor = 0.0;
    RCoefficients abcd;
    MinimizerCoefficients abc_small;
    bool small_rate_limit = false;  ///< v fixed at its lambda_b -> 0 limit of 1/2
    int iterations = 0;             ///< golden-section iterations used for v_numeric
};

/// lambda_b / lambda_w below this is treated as the lambda_b -> 0 limit.
inline constexpr double kSmallRateSwitch = 1e-7;

/// Default tolerance on u for the numeric minimiser.
inline constexpr double kDefaultMinimizerTol = 1e-10;

RCoefficients r_coefficients(const ModelParams& params);
MinimizerCoefficients minimizer_coefficients(const ModelParams& params);

/// r(u) = A B^u + C D^u, the spectral radius of the tilted matrix M(u).
/// Identically 1 when lambda_b == 0. u outside [0, 1] is rejected.
double r_of_u(const ModelParams& params, double u);

/// Tilted matrix M(u) with both rows (p^u q^{1-u}, (1-p)^u (1-q)^{1-u}).
std::array<std::array<double, 2>, 2> tilted_matrix(double p, double q, double u);

/// Row sum of M(u); for equal rows this is its spectral radius.
double tilted_row_sum(double p, double q, double u);

bool below_small_rate_switch(const ModelParams& params);

/// Closed-form stationary point of r(u). Returns the limit value 1/2 when
/// below_small_rate_switch(params) (including lambda_b == 0).
double v_closed_form(const ModelParams& params);

/// A B^v log B + C D^v log D; zero at the minimiser.
double stationarity_residual(const ModelParams& params, double v);

/// I_err = -log r(v). Exactly 0 when lambda_b == 0; below the small-rate
/// switch the numeric minimiser supplies the value.
double i_err_closed(const ModelParams& params);

struct NumericMinimum {
    double v = 0.5;
    double i_err = 0.0;
    int iterations = 0;
};

/// Golden-section minimisation of log r(u) over [0, 1] to `tol` on u.
/// Requires lambda_b > 0 and tol in (0, 1e-3]. Throws NumericError when the
/// iteration cap (200) is reached.
NumericMinimum i_err_numeric(const ModelParams& params, double tol = kDefaultMinimizerTol);

/// Second-order expansion around lambda_b = 0,
/// lambda_b^2 / (8 lambda_w (lambda_w + 1)^2), evaluated on rates scaled by 1/mu.
double i_err_taylor(const ModelParams& params);

/// Analytic values at lambda_b = 0 (mu = 1) of the idle probability q(lambda_b)
/// under H1, its derivatives, and F(lambda_b) = r(v(lambda_b)) with its derivatives.
struct LimitFacts {
    double p = 0.0;
    double q0 = 0.0;
    double dq0 = 0.0;
    double d2q0 = 0.0;
    double f0 = 1.0;
    double df0 = 0.0;
    double d2f0 = 0.0;
};

/// `lambda_w` is in units of the service rate (mu = 1).
LimitFacts q_derivative_facts(double lambda_w);

/// q(lambda_b) = 1 / (1 + lambda_w + lambda_b) with mu = 1; any lambda_b > -1 - lambda_w.
double q_of_lambda_b(double lambda_w, double lambda_b);

/// F(lambda_b) = r(v(lambda_b)) with mu = 1, evaluated directly. Defined for
/// lambda_b > -lambda_w so central differences around 0 are possible.
double f_of_lambda_b(double lambda_w, double lambda_b);

ExponentReport exponent_report(const ModelParams& params, double tol = kDefaultMinimizerTol);

}  // namespace covq
