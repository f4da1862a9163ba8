#ifndef BIMANUAL_REPORT_H_
#define BIMANUAL_REPORT_H_

#include <filesystem>
#include <string>
#include <vector>

#include "bimanual/calibrate.h"
#include "bimanual/cloud.h"

namespace bimanual {

inline constexpr char kToolVersion[] = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

// Lowercase hex SHA-256 of the file contents.
std::string FileDigest(const std::filesystem::path& path);

// calibration.json contents. Timing is left out so that identical inputs
// give identical bytes. With `relative_closures` the diagnostic
// RelativeClosureAverage of each arm is included under "debug".
std::string FormatCalibrationReport(const CalibrationProblem& problem,
                                    const CalibrationRun& run,
                                    const std::string& manifest_digest,
                                    bool relative_closures);

// The transforms and scale stored in a calibration.json.
struct StoredCalibration {
  RigidTransform extrinsic_1;
  RigidTransform extrinsic_2;
  double lambda = 1.0;
  RigidTransform world_to_base_1;
  RigidTransform world_to_base_2;
  RigidTransform base_1_to_base_2;
  double confidence_threshold = 1.5;
};

StoredCalibration ReadCalibration(const std::filesystem::path& path);

// Output of the residuals command.
std::string FormatResidualsReport(const CalibrationProblem& problem,
                                  const StoredCalibration& calibration);

struct PairError {
  int a = 0;
  int b = 0;
  double reconstructed = 0.0;  // meters
  double real = 0.0;           // meters
  double error = 0.0;          // fraction
};

struct ScaleValidation {
  std::vector<PairError> pairs;
  double median = 0.0;
  double max = 0.0;
};

// Loads a cloud for scale validation. A PLY with arm_id/view_id is taken as
// an exported metric cloud; a PLY with a confidence column is a raw point
// map, which is filtered and mapped into base 1 with the stored calibration.
MetricCloud LoadValidationCloud(const std::filesystem::path& path,
                                const StoredCalibration& calibration);

// Pairs file: {"version": 1, "pairs": [{"a": i, "b": j, "real_length": m}]}.
ScaleValidation ValidateScale(const MetricCloud& cloud,
                              const std::filesystem::path& pairs_path);
std::string FormatScaleValidation(const ScaleValidation& validation);

}  // namespace bimanual

#endif  // BIMANUAL_REPORT_H_
