#include "bimanual/report.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iterator>

#include <openssl/evp.h>

#include "bimanual/error.h"
#include "bimanual/ply.h"
#include "json_util.h"

namespace bimanual {
namespace {

nlohmann::json ResidualsToJson(const Residuals& r) {
  return {{"rotation_rad", r.rotation}, {"translation_m", r.translation}};
}

nlohmann::json SpreadToJson(const ClosureSpread& s) {
  return {{"max_rotation_rad", s.max_rotation},
          {"max_translation_m", s.max_translation}};
}

RigidTransform ReadTransform(const nlohmann::json& doc, const char* key) {
  const std::string pointer = std::string("/") + key;
  if (!doc.contains(key)) {
    throw Error(ErrorKind::kSchema,
                "schema violation at " + pointer + ": missing");
  }
  const Eigen::Matrix4d m = JsonToMatrix4(doc[key], pointer);
  try {
    return RigidTransform(Rotation::FromNearlyOrthonormal(
                              m.topLeftCorner<3, 3>(), 1e-6),
                          m.topRightCorner<3, 1>());
  } catch (const Error& e) {
    throw Error(ErrorKind::kSchema,
                "schema violation at " + pointer + ": " + e.what());
  }
}

}  // namespace

std::string FileDigest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(),
                 nullptr) != 1) {
    throw Error(ErrorKind::kIo, "SHA-256 failed for " + path.string());
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < length; ++i) {
    std::snprintf(buf, sizeof(buf), "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

std::string FormatCalibrationReport(const CalibrationProblem& problem,
                                    const CalibrationRun& run,
                                    const std::string& manifest_digest,
                                    bool relative_closures) {
  const CalibrationSolution& s = run.solution;
  const SolverOptions& o = problem.options;
  nlohmann::json doc;
  doc["version"] = kReportSchemaVersion;
  doc["tool_version"] = kToolVersion;
  doc["manifest_sha256"] = manifest_digest;
  doc["units"] = {{"angles", "rad"}, {"lengths", "m"}, {"lambda", "m per model unit"}};
  doc["extrinsic_1"] = MatrixToJson(s.extrinsic_1.Matrix());
  doc["extrinsic_2"] = MatrixToJson(s.extrinsic_2.Matrix());
  doc["lambda"] = s.lambda;
  doc["world_to_base_1"] = MatrixToJson(s.world_to_base_1.Matrix());
  doc["world_to_base_2"] = MatrixToJson(s.world_to_base_2.Matrix());
  doc["base_1_to_base_2"] = MatrixToJson(s.base_1_to_base_2.Matrix());
  doc["residuals"] = ResidualsToJson(s.residuals);
  doc["closure_spread"] = {{"arm_1", SpreadToJson(s.spread_1)},
                           {"arm_2", SpreadToJson(s.spread_2)}};
  doc["views"] = {{"arm_1", problem.primary.size()},
                  {"arm_2", problem.secondary.size()}};
  doc["options"] = {{"alpha", o.alpha},
                    {"confidence_threshold", o.confidence_threshold},
                    {"gd_max_iters", o.gd_max_iters},
                    {"gd_step", o.gd_step},
                    {"gd_tol", o.gd_tol},
                    {"refine_enabled", o.refine_enabled}};

  const InitialSolution& init = run.initial;
  nlohmann::json initial;
  initial["lambda"] = init.lambda;
  initial["residuals"] = ResidualsToJson(ComputeResiduals(
      problem, init.extrinsic_1, init.extrinsic_2, init.lambda));
  initial["rotation_singular_values"] = {
      VectorToJson(init.rotation_singular_values[0]),
      VectorToJson(init.rotation_singular_values[1])};
  initial["srp_min_singular_value"] = init.srp_min_singular_value;
  initial["srp_residual_norm"] = init.srp_residual_norm;
  doc["initial"] = std::move(initial);

  if (run.refined.has_value()) {
    const RefinedSolution& r = *run.refined;
    doc["refinement"] = {
        {"converged", r.converged},
        {"iterations", r.iterations_used},
        {"stop_reason", r.stop_reason},
        {"initial_cost", r.cost_trace.front().cost},
        {"final_cost", r.cost_trace.back().cost}};
  } else {
    doc["refinement"] = nullptr;
  }
  doc["warnings"] = s.warnings;

  if (relative_closures) {
    doc["debug"] = {
        {"relative_closure_average_1",
         MatrixToJson(RelativeClosureAverage(problem.primary, s.extrinsic_1,
                                             s.lambda)
                          .Matrix())},
        {"relative_closure_average_2",
         MatrixToJson(RelativeClosureAverage(problem.secondary, s.extrinsic_2,
                                             s.lambda)
                          .Matrix())}};
  }
  return DumpJson(doc) + "\n";
}

StoredCalibration ReadCalibration(const std::filesystem::path& path) {
  const nlohmann::json doc = ReadJsonFile(path);
  if (!doc.is_object()) {
    throw Error(ErrorKind::kSchema, "schema violation at /: expected an object");
  }
  if (!doc.contains("version") || doc["version"] != kReportSchemaVersion) {
    throw Error(ErrorKind::kSchema,
                "schema violation at /version: unsupported version");
  }
  StoredCalibration c;
  c.extrinsic_1 = ReadTransform(doc, "extrinsic_1");
  c.extrinsic_2 = ReadTransform(doc, "extrinsic_2");
  c.world_to_base_1 = ReadTransform(doc, "world_to_base_1");
  c.world_to_base_2 = ReadTransform(doc, "world_to_base_2");
  c.base_1_to_base_2 = ReadTransform(doc, "base_1_to_base_2");
  if (!doc.contains("lambda") || !doc["lambda"].is_number() ||
      !(doc["lambda"].get<double>() > 0.0)) {
    throw Error(ErrorKind::kSchema,
                "schema violation at /lambda: expected a positive number");
  }
  c.lambda = doc["lambda"].get<double>();
  const auto& threshold = doc.value("/options/confidence_threshold"_json_pointer,
                                    nlohmann::json());
  if (threshold.is_number()) c.confidence_threshold = threshold.get<double>();
  return c;
}

std::string FormatResidualsReport(const CalibrationProblem& problem,
                                  const StoredCalibration& calibration) {
  nlohmann::json doc;
  doc["version"] = kReportSchemaVersion;
  doc["residuals"] = ResidualsToJson(
      ComputeResiduals(problem, calibration.extrinsic_1,
                       calibration.extrinsic_2, calibration.lambda));
  CalibrationProblem arm_only = problem;
  nlohmann::json arms = nlohmann::json::object();
  for (int a = 0; a < 2; ++a) {
    // Each arm on its own: duplicate it into both slots.
    const CaptureSet& cs = problem.arm(a);
    const RigidTransform& x = a == 0 ? calibration.extrinsic_1
                                     : calibration.extrinsic_2;
    arm_only.primary = cs;
    arm_only.secondary = cs;
    arms["arm_" + std::to_string(a + 1)] = ResidualsToJson(
        ComputeResiduals(arm_only, x, x, calibration.lambda));
  }
  doc["per_arm"] = std::move(arms);
  return DumpJson(doc) + "\n";
}

MetricCloud LoadValidationCloud(const std::filesystem::path& path,
                                const StoredCalibration& calibration) {
  const PlyVertices ply = ReadPly(path);
  if (ply.Find("arm_id") != nullptr || ply.Find("confidence") == nullptr) {
    return ReadMetricCloud(path);
  }
  const auto* x = ply.Find("x");
  const auto* y = ply.Find("y");
  const auto* z = ply.Find("z");
  const auto* conf = ply.Find("confidence");
  if (x == nullptr || y == nullptr || z == nullptr) {
    throw Error(ErrorKind::kSchema, path.string() + ": cloud needs x, y, z");
  }
  PointMap map;
  for (size_t i = 0; i < ply.count; ++i) {
    map.points.emplace_back((*x)[i], (*y)[i], (*z)[i]);
    map.confidences.push_back((*conf)[i]);
  }
  return ToMetricFrame(
      FilterByConfidence(map, calibration.confidence_threshold),
      calibration.lambda, calibration.world_to_base_1);
}

ScaleValidation ValidateScale(const MetricCloud& cloud,
                              const std::filesystem::path& pairs_path) {
  const nlohmann::json doc = ReadJsonFile(pairs_path);
  if (!doc.is_object() || !doc.contains("pairs") || !doc["pairs"].is_array()) {
    throw Error(ErrorKind::kSchema,
                "schema violation at /pairs: expected an array");
  }
  ScaleValidation out;
  const auto& pairs = doc["pairs"];
  if (pairs.empty()) {
    throw Error(ErrorKind::kInvalidInput, "no point pairs given");
  }
  for (size_t k = 0; k < pairs.size(); ++k) {
    const std::string pointer = "/pairs/" + std::to_string(k);
    const auto& p = pairs[k];
    if (!p.is_object() || !p.contains("a") || !p.contains("b") ||
        !p.contains("real_length") || !p["a"].is_number_integer() ||
        !p["b"].is_number_integer() || !p["real_length"].is_number()) {
      throw Error(ErrorKind::kSchema, "schema violation at " + pointer +
                                          ": expected {a, b, real_length}");
    }
    PairError e;
    e.a = p["a"].get<int>();
    e.b = p["b"].get<int>();
    e.real = p["real_length"].get<double>();
    const auto n = static_cast<int>(cloud.size());
    if (e.a < 0 || e.b < 0 || e.a >= n || e.b >= n) {
      throw Error(ErrorKind::kInvalidInput,
                  "point index out of range at " + pointer);
    }
    e.reconstructed = (cloud.points[static_cast<size_t>(e.a)] -
                       cloud.points[static_cast<size_t>(e.b)])
                          .norm();
    e.error = ScaleError(e.reconstructed, e.real);
    out.pairs.push_back(e);
  }
  std::vector<double> errors;
  for (const PairError& e : out.pairs) errors.push_back(e.error);
  std::sort(errors.begin(), errors.end());
  const size_t m = errors.size();
  out.median = m % 2 == 1 ? errors[m / 2]
                          : 0.5 * (errors[m / 2 - 1] + errors[m / 2]);
  out.max = errors.back();
  return out;
}

std::string FormatScaleValidation(const ScaleValidation& validation) {
  nlohmann::json doc;
  doc["version"] = kReportSchemaVersion;
  nlohmann::json rows = nlohmann::json::array();
  for (const PairError& e : validation.pairs) {
    rows.push_back({{"a", e.a},
                    {"b", e.b},
                    {"reconstructed_m", e.reconstructed},
                    {"real_m", e.real},
                    {"error", e.error}});
  }
  doc["pairs"] = std::move(rows);
  doc["median_error"] = validation.median;
  doc["max_error"] = validation.max;
  return DumpJson(doc) + "\n";
}

}  // namespace bimanual
