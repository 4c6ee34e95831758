#include "adahuber/json_io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "adahuber/errors.hpp"

namespace adahuber {

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json to_json_value(const VectorXd& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(finite_or_null(v(i)));
  return a;
}

namespace {

Json matrix_rows(const MatrixXd& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) rows.push_back(to_json_value(VectorXd(m.row(i).transpose())));
  return rows;
}

void reject_unknown(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected a JSON object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) throw ParseError(where + ": unknown key \"" + item.key() + "\"");
  }
}

template <typename T>
T get_field(const Json& j, const std::string& key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError(where + ": missing or malformed \"" + key + "\"");
  }
}

VectorXd vector_field(const Json& j, const std::string& key, const std::string& where) {
  const auto values = get_field<std::vector<double>>(j, key, where);
  return Eigen::Map<const VectorXd>(values.data(), static_cast<Index>(values.size()));
}

}  // namespace

Json to_json_value(const SimSpec& spec) {
  Json j;
  j["n"] = spec.n;
  j["p"] = spec.p;
  j["k"] = spec.k;
  j["beta_values"] = to_json_value(spec.beta_values);
  if (const auto* t = std::get_if<StudentTCovariates>(&spec.covariate_dist)) {
    j["covariate_dist"] = {{"type", "student_t"}, {"df", t->df}};
  } else {
    j["covariate_dist"] = {{"type", "gaussian_identity"}};
  }
  if (const auto* t = std::get_if<StudentTErrors>(&spec.error_dist)) {
    j["error_dist"] = {{"type", "student_t"}, {"df", t->df}, {"scale", t->scale}};
  } else {
    j["error_dist"] = {{"type", "gaussian"}, {"sd", std::get<GaussianErrors>(spec.error_dist).sd}};
  }
  j["seed"] = spec.seed;
  return j;
}

SimSpec sim_spec_from_json(const Json& j) {
  const std::string where = "SimSpec";
  reject_unknown(j, {"n", "p", "k", "beta_values", "covariate_dist", "error_dist", "seed"}, where);
  SimSpec spec;
  if (j.contains("n")) spec.n = get_field<Index>(j, "n", where);
  if (j.contains("p")) spec.p = get_field<Index>(j, "p", where);
  if (j.contains("k")) spec.k = get_field<Index>(j, "k", where);
  if (j.contains("beta_values")) {
    spec.beta_values = vector_field(j, "beta_values", where);
  } else {
    spec.beta_values = VectorXd::Ones(spec.k);
  }
  if (j.contains("covariate_dist")) {
    const Json& c = j.at("covariate_dist");
    const std::string cw = where + ".covariate_dist";
    const auto type = get_field<std::string>(c, "type", cw);
    if (type == "gaussian_identity") {
      reject_unknown(c, {"type"}, cw);
      spec.covariate_dist = GaussianCovariates{};
    } else if (type == "student_t") {
      reject_unknown(c, {"type", "df"}, cw);
      spec.covariate_dist = StudentTCovariates{get_field<int>(c, "df", cw)};
    } else {
      throw ParseError(cw + ": unknown type \"" + type + "\"");
    }
  }
  if (j.contains("error_dist")) {
    const Json& e = j.at("error_dist");
    const std::string ew = where + ".error_dist";
    const auto type = get_field<std::string>(e, "type", ew);
    if (type == "gaussian") {
      reject_unknown(e, {"type", "sd"}, ew);
      spec.error_dist = GaussianErrors{e.contains("sd") ? get_field<double>(e, "sd", ew) : 1.0};
    } else if (type == "student_t") {
      reject_unknown(e, {"type", "df", "scale"}, ew);
      spec.error_dist = StudentTErrors{get_field<int>(e, "df", ew),
                                       e.contains("scale") ? get_field<double>(e, "scale", ew) : 1.0};
    } else {
      throw ParseError(ew + ": unknown type \"" + type + "\"");
    }
  }
  if (j.contains("seed")) spec.seed = get_field<std::uint64_t>(j, "seed", where);
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(where + ": " + e.what());
  }
  return spec;
}

Json to_json_value(const Estimate& est) {
  Json j;
  j["beta"] = to_json_value(est.beta);
  j["iterations"] = est.iterations;
  j["converged"] = est.converged;
  j["kkt_residual"] = finite_or_null(est.kkt_residual);
  j["objective_final"] = finite_or_null(est.objective_final());
  return j;
}

Json to_json_value(const ScaleGrid& grid) {
  Json j;
  j["sigma_min"] = grid.sigma_min;
  j["sigma_max"] = grid.sigma_max;
  j["M"] = grid.M;
  j["indices"] = grid.indices;
  j["sigmas"] = grid.sigmas;
  return j;
}

Json to_json_value(const LepskiResult& result) {
  Json j;
  j["j_star"] = result.j_star ? Json(*result.j_star) : Json(nullptr);
  j["used_fallback"] = result.used_fallback;
  j["beta"] = to_json_value(result.beta);
  j["lambda"] = result.lambda;
  j["grid"] = to_json_value(result.grid);
  Json fits = Json::array();
  for (const auto& f : result.per_grid) {
    Json g;
    g["index"] = f.index;
    g["sigma"] = f.sigma;
    g["tau"] = f.tau;
    g["iterations"] = f.estimate.iterations;
    g["converged"] = f.estimate.converged;
    g["kkt_residual"] = finite_or_null(f.estimate.kkt_residual);
    g["objective_final"] = finite_or_null(f.estimate.objective_final());
    g["l2_to_selected"] = finite_or_null((f.estimate.beta - result.beta).norm());
    g["beta"] = to_json_value(f.estimate.beta);
    fits.push_back(std::move(g));
  }
  j["per_grid"] = std::move(fits);
  Json log = Json::array();
  for (const auto& c : result.comparison_log) {
    log.push_back({{"j", c.j},
                   {"i", c.i},
                   {"l2", finite_or_null(c.l2)},
                   {"l1", finite_or_null(c.l1)},
                   {"l2_threshold", c.l2_threshold},
                   {"l1_threshold", c.l1_threshold},
                   {"pass", c.pass}});
  }
  j["comparison_log"] = std::move(log);
  return j;
}

Json to_json_value(const PrecisionEstimate& theta) {
  Json j;
  j["lambda"] = theta.lambda;
  j["iterations"] = theta.iterations;
  j["converged"] = theta.converged;
  j["kkt_residual"] = finite_or_null(theta.kkt_residual);
  j["theta"] = matrix_rows(theta.theta);
  return j;
}

Json to_json_value(const OneStepEstimate& est) {
  Json j;
  j["b_psi"] = to_json_value(est.b_psi);
  j["base_beta"] = to_json_value(est.base_beta);
  j["a_hat"] = finite_or_null(est.diagnostics.a_hat);
  j["psi_sq_mean"] = finite_or_null(est.diagnostics.psi_sq_mean);
  j["sigma_hat"] = finite_or_null(est.diagnostics.sigma_hat);
  return j;
}

Json to_json_value(const ConfidenceRegion& region) {
  Json j;
  Json J = Json::array();
  for (Index idx : region.J) J.push_back(idx + 1);
  j["J"] = std::move(J);
  j["alpha"] = region.alpha;
  j["centers"] = to_json_value(region.centers);
  Json intervals = Json::array();
  for (const auto& [lo, hi] : region.intervals) intervals.push_back({finite_or_null(lo), finite_or_null(hi)});
  j["intervals"] = std::move(intervals);
  j["scale_s"] = finite_or_null(region.scale_s);
  j["a_hat"] = finite_or_null(region.a_hat);
  j["psi_sq_mean"] = finite_or_null(region.psi_sq_mean);
  j["quantile"] = region.quantile;
  j["half_width_matrix"] = matrix_rows(region.half_width_matrix);
  return j;
}

Json to_json_value(const ExperimentSpec& spec) {
  Json j;
  j["scenario"] = to_string(spec.scenario);
  j["n_grid"] = spec.n_grid;
  j["p"] = spec.p ? Json(*spec.p) : Json(nullptr);
  j["k"] = spec.k;
  j["beta_values"] = spec.beta_values ? to_json_value(*spec.beta_values) : Json(nullptr);
  j["trials"] = spec.trials ? Json(*spec.trials) : Json(nullptr);
  j["seed"] = spec.seed;
  j["error_scale"] = spec.error_scale;
  j["C"] = spec.C;
  j["delta"] = spec.delta;
  j["b"] = spec.b;
  j["M"] = spec.M ? Json(*spec.M) : Json(nullptr);
  j["lambda"] = spec.lambda ? Json(*spec.lambda) : Json(nullptr);
  j["glasso_lambda"] = spec.glasso_lambda ? Json(*spec.glasso_lambda) : Json(nullptr);
  j["alpha"] = spec.alpha;
  if (spec.custom) j["custom"] = to_json_value(*spec.custom);
  return j;
}

Json to_json_value(const MomMadReport& rep) {
  Json j;
  j["trials"] = rep.trials;
  j["mom"] = {{"n", rep.mom_n},
              {"delta", rep.delta},
              {"bound", rep.mom_bound},
              {"failure_rate", rep.mom_failure_rate},
              {"ok", rep.mom_ok}};
  j["mad"] = {{"n", rep.mad_n},
              {"mad_x_mean", rep.mad_x_mean},
              {"mad_xy_mean", rep.mad_xy_mean},
              {"diff_se", rep.mad_diff_se},
              {"ok", rep.mad_ok},
              {"degenerate_exact", rep.mad_degenerate_exact}};
  j["sigma_max"] = {{"runs", rep.sigma_runs}, {"validity", rep.sigma_max_validity}, {"ok", rep.sigma_ok}};
  return j;
}

Json to_json_value(const EfficiencyTerms& terms) {
  return {{"v1", terms.v1}, {"v2", terms.v2}};
}

VectorXd beta_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("beta file: expected a JSON object");
  for (const char* key : {"beta", "b_psi"}) {
    if (j.contains(key)) {
      const Json& a = j.at(key);
      if (!a.is_array()) throw ParseError(std::string("beta file: \"") + key + "\" is not an array");
      VectorXd beta(static_cast<Index>(a.size()));
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].is_number()) {
          throw ParseError(std::string("beta file: \"") + key + "\"[" + std::to_string(i) + "] is not a number");
        }
        beta(static_cast<Index>(i)) = a[i].get<double>();
      }
      return beta;
    }
  }
  throw ParseError("beta file: no \"beta\" array");
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_json(const Json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

}  // namespace adahuber
