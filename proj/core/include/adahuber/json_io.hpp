#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "adahuber/dataset.hpp"
#include "adahuber/experiments.hpp"
#include "adahuber/glasso.hpp"
#include "adahuber/huber.hpp"
#include "adahuber/inference.hpp"
#include "adahuber/lepski.hpp"
#include "adahuber/scale_bounds.hpp"

namespace adahuber {

using Json = nlohmann::ordered_json;

/// The value itself, or null for NaN and infinities.
Json finite_or_null(double v);

Json to_json_value(const VectorXd& v);
Json to_json_value(const SimSpec& spec);
Json to_json_value(const Estimate& est);
Json to_json_value(const ScaleGrid& grid);
Json to_json_value(const LepskiResult& result);
Json to_json_value(const PrecisionEstimate& theta);
Json to_json_value(const OneStepEstimate& est);
/// J is written 1-based.
Json to_json_value(const ConfidenceRegion& region);
Json to_json_value(const ExperimentSpec& spec);
Json to_json_value(const MomMadReport& rep);
Json to_json_value(const EfficiencyTerms& terms);

/// Field names as in SimSpec; unknown keys throw ParseError.
SimSpec sim_spec_from_json(const Json& j);

/// The "beta" array of an Estimate, LepskiResult or OneStepEstimate document
/// ("b_psi" is accepted for the latter).
VectorXd beta_from_json(const Json& j);

Json read_json(const std::filesystem::path& path);
/// Two-space indentation and a trailing newline.
void write_json(const Json& j, const std::filesystem::path& path);

}  // namespace adahuber
