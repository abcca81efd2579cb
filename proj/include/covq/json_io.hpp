#pragma once

// JSON encodings of the toolkit's records; field names match the schemas
// under schemas/.

#include "json.hpp"

#include "covq/covert.hpp"
#include "covq/detect.hpp"
#include "covq/experiment.hpp"
#include "covq/exponent.hpp"
#include "covq/model.hpp"
#include "covq/rng.hpp"

namespace covq {

using Json = nlohmann::ordered_json;

Json to_json(const ModelParams& params);
Json to_json(const RngSeed& seed);
Json to_json(const LlrResult& result);
Json to_json(const ExponentReport& report);
Json to_json(const ExperimentRow& row);
Json to_json(const ExperimentResult& result);
Json to_json(const CovertBound& bound);
Json to_json(const CovertnessCheck& check);
Json to_json(const ScalingRow& row);
Json to_json(const SweepRow& row);

/// Flat record {n, lambda_w, lambda_b, mu, threshold, p_f, p_m, p_e, se_f, se_m, trials}.
Json error_record(const ModelParams& params, std::size_t n, double threshold,
                  const ErrorProbabilities& e);

}  // namespace covq
