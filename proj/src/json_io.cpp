#include "covq/json_io.hpp"

namespace covq {
namespace {

Json optional_number(const std::optional<double>& x) {
    return x ? Json(*x) : Json(nullptr);
}

}  // namespace

Json to_json(const ModelParams& params) {
    return {{"lambda_w", params.lambda_w}, {"lambda_b", params.lambda_b}, {"mu", params.mu}};
}

Json to_json(const RngSeed& seed) {
    return {{"seed", seed.seed}, {"stream_id", seed.stream_id}};
}

Json to_json(const LlrResult& result) {
    return {{"llr", result.llr},
            {"decision", std::string(to_string(result.decision))},
            {"threshold", result.threshold}};
}

Json to_json(const ExponentReport& r) {
    Json j;
    j["params"] = to_json(r.params);
    j["v_closed"] = r.v_closed;
    j["v_numeric"] = r.v_numeric;
    j["i_err_closed"] = r.i_err_closed;
    j["i_err_numeric"] = r.i_err_numeric;
    j["i_err_taylor"] = r.i_err_taylor;
    j["abcd"] = {{"A", r.abcd.A}, {"B", r.abcd.B}, {"C", r.abcd.C}, {"D", r.abcd.D}};
    j["abc_small"] = {{"a", r.abc_small.a}, {"b", r.abc_small.b}, {"c", r.abc_small.c}};
    j["small_rate_limit"] = r.small_rate_limit;
    j["iterations"] = r.iterations;
    return j;
}

Json to_json(const ExperimentRow& row) {
    return {{"n", row.n},         {"p_f", row.p_f},       {"p_m", row.p_m},
            {"p_e", row.p_e},     {"se_f", row.se_f},     {"se_m", row.se_m},
            {"trials", row.trials}, {"seed", to_json(row.seed)},
            {"method", std::string(to_string(row.method))}};
}

Json to_json(const ExperimentResult& result) {
    Json j;
    j["format"] = "covq.experiment";
    j["version"] = kResultFormatVersion;
    j["params"] = to_json(result.params);
    j["threshold"] = result.threshold;
    j["initial_mode"] = std::string(to_string(result.mode));
    j["rows"] = Json::array();
    for (const auto& row : result.rows) j["rows"].push_back(to_json(row));
    j["fitted_slope_f"] = optional_number(result.fitted_slope_f);
    j["fitted_slope_m"] = optional_number(result.fitted_slope_m);
    j["fitted_slope_e"] = optional_number(result.fitted_slope_e);
    j["exponent_ref"] = to_json(result.exponent_ref);
    return j;
}

Json to_json(const CovertBound& bound) {
    return {{"bound", bound.rate}, {"K_of_N", bound.k_of_n}, {"feasible", bound.feasible}};
}

Json to_json(const CovertnessCheck& check) {
    return {{"i_err", check.i_err},
            {"p_e_raw", check.p_e_raw},
            {"p_e_approx", check.p_e_approx},
            {"covert", check.covert}};
}

Json to_json(const ScalingRow& row) {
    return {{"N", row.n},
            {"K_of_N", row.k_of_n},
            {"bound", row.bound},
            {"bound_times_sqrtN", row.bound_times_sqrt_n},
            {"feasible", row.feasible}};
}

Json to_json(const SweepRow& row) {
    return {{"threshold", row.threshold}, {"p_f", row.p_f}, {"p_m", row.p_m}, {"p_e", row.p_e}};
}

Json error_record(const ModelParams& params, std::size_t n, double threshold,
                  const ErrorProbabilities& e) {
    return {{"n", n},
            {"lambda_w", params.lambda_w},
            {"lambda_b", params.lambda_b},
            {"mu", params.mu},
            {"threshold", threshold},
            {"p_f", e.p_f},
            {"p_m", e.p_m},
            {"p_e", e.p_e},
            {"se_f", e.se_f},
            {"se_m", e.se_m},
            {"trials", e.trials}};
}

}  // namespace covq
