// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Reference values come from the test-only oracles.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "covq/covert.hpp"
#include "covq/detect.hpp"
#include "covq/experiment.hpp"
#include "covq/exponent.hpp"
#include "covq/sim.hpp"
#include "oracles/oracles.hpp"

using namespace covq;

namespace {

struct Verdict {
    bool pass;
    std::string detail;
};

int failures = 0;

void report(int id, const char* title, const std::function<Verdict()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
        v = body();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!v.pass) ++failures;
    std::printf("[%s] AC%d %s: %s (%.1fs)\n", v.pass ? "PASS" : "FAIL", id, title, v.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

/// 100 points: lambda_w in [0.05, 0.9], lambda_b in [0.01, 1 - lambda_w - 0.05], mu = 1.
std::vector<ModelParams> acceptance_grid() {
    std::mt19937_64 gen(20240521);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<ModelParams> grid;
    for (int i = 0; i < 100; ++i) {
        const double lw = 0.05 + 0.85 * unit(gen);
        const double hi = 1.0 - lw - 0.05;
        grid.push_back({lw, 0.01 + (hi - 0.01) * unit(gen), 1.0});
    }
    return grid;
}

oracle::Rates rates(const ModelParams& p) { return {p.lambda_w, p.lambda_b, p.mu}; }

Verdict ac1() {
    double dv = 0.0, di = 0.0;
    for (const auto& params : acceptance_grid()) {
        const auto num = i_err_numeric(params);
        dv = std::max(dv, std::abs(v_closed_form(params) - num.v));
        di = std::max(di, std::abs(i_err_closed(params) - num.i_err));
    }
    return {dv < 1e-8 && di < 1e-10, fmt("max|dv|=%.3g (<1e-8) max|dI|=%.3g (<1e-10)", dv, di)};
}

Verdict ac2() {
    double worst = 0.0;
    for (const auto& params : acceptance_grid()) {
        const auto ref = oracle::chernoff_information(oracle::p_of(rates(params)), oracle::q_of(rates(params)));
        worst = std::max(worst, std::abs(i_err_closed(params) - ref.info));
    }
    return {worst < 1e-9, fmt("max|I_closed - I_chernoff|=%.3g (<1e-9)", worst)};
}

Verdict ac3() {
    bool ok = true;
    double worst_rel = 0.0, worst_rich = 0.0, worst_df = 0.0, worst_v = 0.0;
    for (double lw : {0.1, 0.3, 0.6}) {
        const auto facts = q_derivative_facts(lw);
        worst_v = std::max(worst_v, std::abs(v_closed_form({lw, 1e-6, 1.0}) - 0.5));

        auto q = [lw](double lb) { return q_of_lambda_b(lw, lb); };
        auto F = [lw](double lb) { return f_of_lambda_b(lw, lb); };
        auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };

        // Each derivative estimated at h = 1e-3 and 1e-4; the Richardson value
        // must agree with the finer estimate and with the analytic value.
        struct Check {
            double d_coarse, d_fine, exact;
        };
        const Check checks[] = {
            {oracle::central_first(q, 0.0, 1e-3), oracle::central_first(q, 0.0, 1e-4), facts.dq0},
            {oracle::central_second(q, 0.0, 1e-3), oracle::central_second(q, 0.0, 1e-4), facts.d2q0},
            {oracle::central_second(F, 0.0, 1e-3), oracle::central_second(F, 0.0, 1e-4), facts.d2f0},
        };
        for (const auto& c : checks) {
            const double rich = oracle::richardson(c.d_coarse, c.d_fine);
            worst_rel = std::max({worst_rel, rel(c.d_fine, c.exact), rel(rich, c.exact)});
            worst_rich = std::max(worst_rich, rel(rich, c.d_fine));
        }
        ok &= std::abs(facts.q0 - q(0.0)) < 1e-15;
        ok &= std::abs(F(0.0) - facts.f0) < 1e-12;
        // F'(0) = 0 has no relative scale of its own; measure it against |F''(0)|.
        const double df = oracle::richardson(oracle::central_first(F, 0.0, 1e-3), oracle::central_first(F, 0.0, 1e-4));
        worst_df = std::max(worst_df, std::abs(df - facts.df0) / std::abs(facts.d2f0));
    }
    ok &= worst_v < 1e-3 && worst_rel < 1e-3 && worst_rich < 1e-3 && worst_df < 1e-3;
    return {ok, fmt("max|v(1e-6)-1/2|=%.3g; max rel err of q',q'',F''=%.3g", worst_v, worst_rel) +
                    fmt("; Richardson gap=%.3g; |F'(0)|/|F''(0)|=%.3g", worst_rich, worst_df)};
}

Verdict ac4() {
    double lo = 10.0, hi = 0.0;
    for (double lw : {0.1, 0.3, 0.6}) {
        const ModelParams params{lw, 1e-3, 1.0};
        const double ratio = i_err_taylor(params) / i_err_closed(params);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    // Regression value at lambda_b = 0.2, lambda_w = 0.3 from independent oracles.
    const ModelParams big{0.3, 0.2, 1.0};
    const double ref = oracle::taylor(0.3, 0.2) /
                       oracle::chernoff_information(oracle::p_of(rates(big)), oracle::q_of(rates(big))).info;
    const double got = i_err_taylor(big) / i_err_closed(big);
    const bool ok = lo >= 0.995 && hi <= 1.005 && std::abs(got - ref) < 1e-6 && got > 1.45 && got < 1.55;
    return {ok, fmt("taylor/closed at lambda_b=1e-3 in [%.6f, %.6f]", lo, hi) +
                    fmt("; divergence at lambda_b=0.2: %.6f (oracle %.6f)", got, ref)};
}

std::vector<ModelParams> detector_triples() {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> lw(0.05, 1.5), lb(0.01, 1.5), mu(0.5, 3.0);
    std::vector<ModelParams> out;
    for (int i = 0; i < 20; ++i) out.push_back({lw(gen), lb(gen), mu(gen)});
    return out;
}

Verdict ac5() {
    double worst = 0.0;
    for (const auto& params : detector_triples()) {
        for (int n = 1; n <= 12; ++n) {
            const auto ref = oracle::enumerate(rates(params), n, 0.0);
            const auto e = exact_error_probabilities(params, n);
            worst = std::max({worst, std::abs(e.p_f - ref.p_f), std::abs(e.p_m - ref.p_m)});
        }
    }
    return {worst < 1e-12, fmt("20 triples x n=1..12: max diff %.3g (<1e-12)", worst)};
}

Verdict ac6() {
    const ModelParams params{0.3, 0.2, 1.0};
    double worst = 0.0;
    for (Hypothesis h : {Hypothesis::H0, Hypothesis::H1}) {
        const double idle = h == Hypothesis::H0 ? oracle::p_of(rates(params)) : oracle::q_of(rates(params));
        const auto obs = simulate_sequence(params, h, 1000000, {6, static_cast<std::uint64_t>(h)});
        worst = std::max(worst, std::abs(obs.busy_fraction() - (1.0 - idle)));
        const auto m = normalize_counts(empirical_transition_counts(obs));
        for (int i = 0; i < 2; ++i) {
            worst = std::max({worst, std::abs(m(i, 0) - idle), std::abs(m(i, 1) - (1.0 - idle))});
        }
    }
    return {worst < 0.005, fmt("max deviation from analytic marginal/transitions %.3g (<0.005)", worst)};
}

Verdict ac7() {
    const ModelParams params{0.3, 0.2, 1.0};
    const std::uint64_t trials = 100000;
    double worst = 0.0;
    for (std::size_t n : {12u, 50u, 200u}) {
        const auto ex = exact_error_probabilities(params, n);
        const auto mc = monte_carlo_error(params, n, 0.0, trials, {7, n});
        const double sf = std::sqrt(ex.p_f * (1 - ex.p_f) / trials);
        const double sm = std::sqrt(ex.p_m * (1 - ex.p_m) / trials);
        worst = std::max({worst, std::abs(mc.p_f - ex.p_f) / sf, std::abs(mc.p_m - ex.p_m) / sm});
    }
    return {worst < 4.0, fmt("max |mc - exact| = %.2f standard errors (<4)", worst)};
}

Verdict ac8() {
    CampaignConfig cfg;
    cfg.params = {0.3, 0.2, 1.0};
    for (std::uint64_t n = 100; n <= 2000; n += 100) cfg.n_grid.push_back(n);
    const auto result = run_campaign(cfg);
    if (!result.fitted_slope_e || !result.fitted_slope_f || !result.fitted_slope_m) return {false, "slope missing"};
    const double i = result.exponent_ref.i_err_closed;
    const double rel_e = std::abs(*result.fitted_slope_e + i) / i;
    const double sf = *result.fitted_slope_f, sm = *result.fitted_slope_m;
    const double gap = std::abs(sf - sm) / std::max(std::abs(sf), std::abs(sm));
    return {rel_e < 0.10 && gap < 0.15,
            fmt("slope_e/-I = %.4f (rel err %.4f < 0.10)", -*result.fitted_slope_e / i, rel_e) +
                fmt("; |slope_f - slope_m| rel gap %.4f (<0.15)", gap)};
}

Verdict ac9() {
    const CovertnessSpec spec{0.1, 1000, KFunction::constant()};
    double worst_eq = 0.0;
    for (double lw : {0.1, 0.3, 0.6, 0.9}) {
        for (std::uint64_t n : {100u, 1000u, 100000u}) {
            CovertnessSpec s = spec;
            s.n = n;
            const double lb = max_covert_rate(lw, s).rate;
            const auto c = covertness_check({lw, lb, 1.0}, s, ExponentMode::Taylor);
            worst_eq = std::max(worst_eq, std::abs(c.p_e_raw - (1.0 - s.epsilon)));
        }
    }
    const auto table = scaling_table(0.3, 0.1, KFunction::constant(), {10, 100, 1000, 10000, 1000000, 100000000});
    double spread = 0.0;
    for (const auto& row : table) spread = std::max(spread, std::abs(row.bound_times_sqrt_n - table[0].bound_times_sqrt_n));
    const double worked = max_covert_rate(0.3, spec).rate;
    const double ref = oracle::bound(0.3, 1000, 0.1, 1.0);
    const bool ok = worst_eq < 1e-12 && spread < 1e-12 && std::abs(worked - 0.020672) <= 1e-6 &&
                    std::abs(worked - ref) < 1e-15;
    return {ok, fmt("boundary |K e^{-IN} - (1-eps)| max %.3g; bound*sqrt(N) spread %.3g", worst_eq, spread) +
                    fmt("; bound(0.3,1000,0.1)=%.9f", worked)};
}

Verdict ac10() {
    double worst = 0.0;
    for (const auto& params : acceptance_grid()) {
        const double base = i_err_closed(params);
        for (double c : {0.1, 3.0, 10.0}) {
            worst = std::max(worst, std::abs(i_err_closed({c * params.lambda_w, c * params.lambda_b, c * params.mu}) - base));
        }
    }
    return {worst < 1e-12, fmt("max |I(c*rates) - I(rates)| = %.3g (<1e-12)", worst)};
}

Verdict ac11() {
    namespace fs = std::filesystem;
    CampaignConfig cfg;
    cfg.params = {0.3, 0.2, 1.0};
    cfg.n_grid = {25, 50, 100, 200};
    cfg.trials_per_point = 20000;
    cfg.use_exact_when_feasible = false;
    cfg.master_seed = {11, 0};
    const fs::path dir = fs::temp_directory_path() / "covq_acceptance";
    fs::create_directories(dir);
    std::vector<std::string> contents;
    for (unsigned threads : {1u, 4u, 8u}) {
        const auto base = (dir / ("t" + std::to_string(threads))).string();
        const auto result = run_campaign(cfg, threads);
        persist(result, base + ".json");
        persist_csv(result, base + ".csv");
        std::string all;
        for (const char* ext : {".json", ".csv"}) {
            std::ifstream in(base + ext, std::ios::binary);
            all.append(std::istreambuf_iterator<char>(in), {});
        }
        contents.push_back(all);
    }
    fs::remove_all(dir);
    const bool same = contents[0] == contents[1] && contents[0] == contents[2] && !contents[0].empty();
    return {same, same ? "result files bit-identical at 1, 4, 8 threads" : "result files differ across thread counts"};
}

}  // namespace

int main() {
    report(1, "closed-form vs numeric exponent", ac1);
    report(2, "Chernoff oracle agreement", ac2);
    report(3, "small-rate limits and derivative facts", ac3);
    report(4, "Taylor accuracy", ac4);
    report(5, "exhaustive detector oracle", ac5);
    report(6, "simulator fidelity", ac6);
    report(7, "Monte Carlo vs exact", ac7);
    report(8, "decay-rate reproduction", ac8);
    report(9, "covert bound mechanics", ac9);
    report(10, "scale invariance", ac10);
    report(11, "thread-count reproducibility", ac11);
    std::printf("%s: %d failing criteria\n", failures == 0 ? "OK" : "FAILED", failures);
    return failures == 0 ? 0 : 1;
}
