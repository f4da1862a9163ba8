// Command-line front end: calibrate, residuals, synth, validate-scale.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "bimanual/calibrate.h"
#include "bimanual/capture.h"
#include "bimanual/cloud.h"
#include "bimanual/error.h"
#include "bimanual/report.h"
#include "bimanual/synth.h"

namespace {

using bimanual::Error;
using bimanual::ErrorKind;

int ExitCode(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDegenerate:
    case ErrorKind::kNumerical:
      return 2;
    case ErrorKind::kIo:
    case ErrorKind::kSchema:
    case ErrorKind::kInvalidInput:
      return 1;
  }
  return 1;
}

void WriteFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
}

struct CalibrateArgs {
  std::string manifest;
  std::string output = "calibration.json";
  std::string cloud_out;
  bimanual::SolverOptions options;
  bool no_refine = false;
  bool debug_printed_avg_form = false;
};

int RunCalibrate(const CalibrateArgs& args) {
  bimanual::CalibrationProblem problem = bimanual::LoadProblem(args.manifest);
  problem.options = args.options;
  problem.options.refine_enabled = !args.no_refine;
  const bimanual::CalibrationRun run = bimanual::Calibrate(problem);

  WriteFile(args.output, bimanual::FormatCalibrationReport(
                             problem, run, bimanual::FileDigest(args.manifest),
                             args.debug_printed_avg_form));
  if (!args.cloud_out.empty()) {
    const bimanual::MetricCloud cloud = bimanual::BuildMetricCloud(
        problem, run.solution, problem.options.confidence_threshold);
    bimanual::WriteMetricCloud(args.cloud_out, cloud);
    std::cout << "cloud: " << cloud.size() << " points -> " << args.cloud_out
              << "\n";
  }
  const auto& s = run.solution;
  std::cout << "lambda: " << s.lambda << "\n"
            << "residuals: " << s.residuals.rotation << " rad, "
            << s.residuals.translation << " m\n"
            << "time: init " << run.init_seconds << " s, refine "
            << run.refine_seconds << " s\n";
  if (run.refined.has_value()) {
    std::cout << "refinement: " << run.refined->iterations_used
              << " iterations, " << run.refined->stop_reason << "\n";
  }
  for (const std::string& w : s.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "wrote " << args.output << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dual-arm camera calibration from reconstruction poses"};
  app.require_subcommand(1);

  CalibrateArgs cal;
  CLI::App* calibrate = app.add_subcommand(
      "calibrate", "Solve extrinsics, scale and base poses from a manifest");
  calibrate->add_option("manifest", cal.manifest, "Capture manifest")
      ->required();
  calibrate->add_option("-o,--output", cal.output, "Report path")
      ->capture_default_str();
  calibrate->add_option("--alpha", cal.options.alpha,
                        "Rotation weight in the refinement cost")
      ->capture_default_str();
  calibrate->add_option("--confidence-threshold",
                        cal.options.confidence_threshold,
                        "Minimum point confidence kept in the cloud")
      ->capture_default_str();
  calibrate->add_flag("--no-refine", cal.no_refine,
                      "Skip gradient refinement");
  calibrate->add_option("--gd-max-iters", cal.options.gd_max_iters)
      ->capture_default_str();
  calibrate->add_option("--gd-step", cal.options.gd_step)
      ->capture_default_str();
  calibrate->add_option("--gd-tol", cal.options.gd_tol)->capture_default_str();
  calibrate->add_option("--cloud-out", cal.cloud_out,
                        "Write the fused metric cloud (PLY)");
  calibrate->add_flag("--debug-printed-avg-form", cal.debug_printed_avg_form,
                      "Add the relative-closure averages to the report");

  std::string res_manifest, res_calib;
  CLI::App* residuals = app.add_subcommand(
      "residuals", "Evaluate a stored calibration on a manifest");
  residuals->add_option("manifest", res_manifest)->required();
  residuals->add_option("calibration", res_calib)->required();

  std::string synth_config, synth_outdir;
  uint64_t seed = 0;
  CLI::App* synth =
      app.add_subcommand("synth", "Generate a synthetic capture scene");
  synth->add_option("config", synth_config, "Scene config JSON")->required();
  synth->add_option("outdir", synth_outdir, "Existing output directory")
      ->required();
  synth->add_option("--seed", seed)->capture_default_str();

  std::string vs_calib, vs_cloud, vs_pairs;
  CLI::App* validate = app.add_subcommand(
      "validate-scale", "Compare point-pair distances with real lengths");
  validate->add_option("calibration", vs_calib)->required();
  validate->add_option("cloud", vs_cloud)->required();
  validate->add_option("pairs", vs_pairs)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (calibrate->parsed()) return RunCalibrate(cal);
    if (residuals->parsed()) {
      const bimanual::CalibrationProblem problem =
          bimanual::LoadProblem(res_manifest);
      std::cout << bimanual::FormatResidualsReport(
          problem, bimanual::ReadCalibration(res_calib));
      return 0;
    }
    if (synth->parsed()) {
      const bimanual::SyntheticScene scene = bimanual::Generate(
          bimanual::LoadSceneConfig(synth_config), seed);
      std::cout << bimanual::EmitManifest(scene, synth_outdir).string()
                << "\n";
      return 0;
    }
    if (validate->parsed()) {
      const bimanual::StoredCalibration c = bimanual::ReadCalibration(vs_calib);
      std::cout << bimanual::FormatScaleValidation(bimanual::ValidateScale(
          bimanual::LoadValidationCloud(vs_cloud, c), vs_pairs));
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCode(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
