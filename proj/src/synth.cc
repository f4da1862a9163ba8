#include "bimanual/synth.h"

#include <cmath>
#include <numbers>
#include <random>

#include "bimanual/error.h"
#include "json_util.h"

namespace bimanual {
namespace {

constexpr int kMaxRejections = 10000;
// Quaternion components of the world rotation are integers in
// [-kQuaternionScale, kQuaternionScale], which keeps the cube exact in float.
constexpr double kQuaternionScale = 10.0;

class Sampler {
 public:
  explicit Sampler(uint64_t seed) : engine_(seed) {}

  double Uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double Normal(double sigma) {
    if (sigma == 0.0) return 0.0;
    return std::normal_distribution<double>(0.0, sigma)(engine_);
  }
  Eigen::Vector3d NormalVector(double sigma) {
    const double x = Normal(sigma);
    const double y = Normal(sigma);
    const double z = Normal(sigma);
    return Eigen::Vector3d(x, y, z);
  }
  Eigen::Vector3d UniformBox(const Eigen::Vector3d& half_extent) {
    const double x = Uniform(-half_extent.x(), half_extent.x());
    const double y = Uniform(-half_extent.y(), half_extent.y());
    const double z = Uniform(-half_extent.z(), half_extent.z());
    return Eigen::Vector3d(x, y, z);
  }
  Eigen::Vector3d UnitVector() {
    Eigen::Vector3d v;
    do {
      v = NormalVector(1.0);
    } while (v.norm() < 1e-6);
    return v.normalized();
  }
  Eigen::Vector4d UnitQuaternion() {
    Eigen::Vector4d q;
    do {
      const double w = Normal(1.0);
      const Eigen::Vector3d xyz = NormalVector(1.0);
      q << w, xyz;
    } while (q.norm() < 1e-6);
    return q.normalized();
  }
  Rotation UniformRotation() {
    const Eigen::Vector4d q = UnitQuaternion();
    return ExpMapSO3(QuaternionToAxisAngle(q));
  }

  static Eigen::Vector3d QuaternionToAxisAngle(const Eigen::Vector4d& q) {
    const double w = q(0);
    const Eigen::Vector3d v = q.tail<3>();
    const double s = v.norm();
    if (s < 1e-15) return Eigen::Vector3d::Zero();
    return (2.0 * std::atan2(s, w)) * v / s;
  }

 private:
  std::mt19937_64 engine_;
};

Eigen::Matrix3d IntegerRotationNumerator(const Eigen::Vector4d& q) {
  const double w = q(0), x = q(1), y = q(2), z = q(3);
  Eigen::Matrix3d k;
  k << w * w + x * x - y * y - z * z, 2 * (x * y - w * z), 2 * (x * z + w * y),
       2 * (x * y + w * z), w * w - x * x + y * y - z * z, 2 * (y * z - w * x),
       2 * (x * z - w * y), 2 * (y * z + w * x), w * w - x * x - y * y + z * z;
  return k;
}

Rotation DownwardTool() {
  return ExpMapSO3(Eigen::Vector3d(std::numbers::pi, 0.0, 0.0));
}

double LineAngle(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const double c = std::abs(a.normalized().dot(b.normalized()));
  return std::acos(std::min(c, 1.0));
}

bool Diverse(const std::vector<RigidTransform>& poses,
             const SceneConfig& config) {
  std::vector<Eigen::Vector3d> axes;
  for (size_t i = 0; i + 1 < poses.size(); ++i) {
    const Eigen::Vector3d w =
        LogMapSO3(poses[i].rotation().Inverse() * poses[i + 1].rotation());
    if (w.norm() < config.min_relative_angle) return false;
    axes.push_back(w);
  }
  if (axes.size() < 2) return true;
  for (size_t i = 0; i < axes.size(); ++i) {
    for (size_t j = i + 1; j < axes.size(); ++j) {
      if (LineAngle(axes[i], axes[j]) < config.min_axis_separation) {
        return false;
      }
    }
  }
  return true;
}

std::vector<RigidTransform> SampleTrajectory(const SceneConfig& config,
                                             int views, Sampler& rng) {
  const Rotation nominal = DownwardTool();
  for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
    std::vector<RigidTransform> poses;
    const Eigen::Vector3d fixed_axis = rng.UnitVector();
    double angle = 0.0;
    for (int i = 0; i < views; ++i) {
      const Eigen::Vector3d position =
          config.workspace_center + rng.UniformBox(config.workspace_extent);
      Rotation orientation = nominal;
      switch (config.trajectory) {
        case TrajectoryKind::kRandom: {
          const Eigen::Vector3d axis = rng.UnitVector();
          orientation =
              nominal * ExpMapSO3(rng.Uniform(0.0, config.max_tilt) * axis);
          break;
        }
        case TrajectoryKind::kSingleAxis:
          if (i > 0) {
            const double step =
                rng.Uniform(config.min_relative_angle, config.max_tilt);
            angle += (i % 2 == 0 ? 1.0 : -1.0) * step;
          }
          orientation = nominal * ExpMapSO3(angle * fixed_axis);
          break;
        case TrajectoryKind::kPureTranslation:
          break;
      }
      poses.emplace_back(orientation, position);
    }
    if (config.trajectory != TrajectoryKind::kRandom || Diverse(poses, config)) {
      return poses;
    }
  }
  throw Error(ErrorKind::kInvalidInput, "could not satisfy diversity bound");
}

RigidTransform Perturb(const RigidTransform& t, double rot_sigma,
                       double trans_sigma, Sampler& rng) {
  const Eigen::Vector3d xi = rng.NormalVector(rot_sigma);
  const Eigen::Vector3d n = rng.NormalVector(trans_sigma);
  if (rot_sigma == 0.0 && trans_sigma == 0.0) return t;
  return RigidTransform(ExpMapSO3(xi) * t.rotation(), t.translation() + n);
}

double RoundToGrid(double value, double grid) {
  return grid * std::round(value / grid);
}

Eigen::Vector3d ToFloat(const Eigen::Vector3d& v) {
  return v.cast<float>().cast<double>();
}

// Cube geometry in the model frame: eight float-exact vertices and the
// twelve edges between them.
struct ModelCube {
  std::array<Eigen::Vector3d, 8> vertices;
  std::vector<std::pair<int, int>> edges;
  double side_model = 0.0;
};

ModelCube BuildCube(const SceneConfig& config, const Eigen::Matrix3d& numerator,
                    double denominator, const RigidTransform& world_to_base_1,
                    double lambda) {
  const Eigen::Vector3d center =
      world_to_base_1.Inverse() * config.cube_center / lambda;
  // Half-step along each integer row of the rotation numerator.
  const double half_step = config.cube_side / (2.0 * denominator * lambda);
  const double bound =
      center.cwiseAbs().maxCoeff() + 3.0 * denominator * half_step;
  const double grid = std::ldexp(1.0, static_cast<int>(std::ceil(std::log2(bound))) + 1 - 24);

  ModelCube cube;
  const Eigen::Vector3d c(RoundToGrid(center.x(), grid),
                          RoundToGrid(center.y(), grid),
                          RoundToGrid(center.z(), grid));
  const double h = RoundToGrid(half_step, grid);
  cube.side_model = 2.0 * h * denominator;
  for (int v = 0; v < 8; ++v) {
    Eigen::Vector3d offset = Eigen::Vector3d::Zero();
    for (int k = 0; k < 3; ++k) {
      const double sign = (v >> k) & 1 ? 1.0 : -1.0;
      offset += sign * numerator.row(k).transpose();
    }
    cube.vertices[static_cast<size_t>(v)] = c + h * offset;
  }
  for (int v = 0; v < 8; ++v) {
    for (int k = 0; k < 3; ++k) {
      const int u = v ^ (1 << k);
      if (v < u) cube.edges.emplace_back(v, u);
    }
  }
  return cube;
}

PointMap MakePointMap(const ModelCube& cube, const SceneConfig& config,
                      int view, double point_sigma, Sampler& rng) {
  PointMap map;
  map.source_view = view;
  const auto add = [&](const Eigen::Vector3d& p, double confidence) {
    map.points.push_back(ToFloat(p));
    map.confidences.push_back(static_cast<double>(static_cast<float>(confidence)));
  };
  for (const Eigen::Vector3d& v : cube.vertices) {
    const Eigen::Vector3d noise = rng.NormalVector(point_sigma);
    add(point_sigma > 0.0 ? Eigen::Vector3d(v + noise) : v,
        rng.Uniform(2.0, 5.0));
  }
  for (const auto& [a, b] : cube.edges) {
    for (int s = 1; s <= config.edge_samples; ++s) {
      const double f = static_cast<double>(s) / (config.edge_samples + 1);
      const Eigen::Vector3d p =
          (1.0 - f) * cube.vertices[static_cast<size_t>(a)] +
          f * cube.vertices[static_cast<size_t>(b)];
      add(p + rng.NormalVector(point_sigma), rng.Uniform(2.0, 5.0));
    }
  }
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  for (const Eigen::Vector3d& v : cube.vertices) center += v / 8.0;
  const Eigen::Vector3d spread = Eigen::Vector3d::Constant(3.0 * cube.side_model);
  for (int k = 0; k < config.clutter_points; ++k) {
    add(center + rng.UniformBox(spread), rng.Uniform(0.0, 1.4));
  }
  return map;
}

// --- config parsing ---

Error ConfigError(const std::string& pointer, const std::string& what) {
  return Error(ErrorKind::kSchema,
               "schema violation at " + pointer + ": " + what);
}

double GetNumber(const nlohmann::json& obj, const char* key,
                 const std::string& base, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) throw ConfigError(base + "/" + key, "expected a number");
  return obj[key].get<double>();
}

int GetInt(const nlohmann::json& obj, const char* key, const std::string& base,
           int fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer()) {
    throw ConfigError(base + "/" + key, "expected an integer");
  }
  return obj[key].get<int>();
}

Eigen::Vector3d GetVector(const nlohmann::json& obj, const char* key,
                          const std::string& base,
                          const Eigen::Vector3d& fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj[key];
  if (!v.is_array() || v.size() != 3 || !v[0].is_number() ||
      !v[1].is_number() || !v[2].is_number()) {
    throw ConfigError(base + "/" + key, "expected a 3-vector");
  }
  return Eigen::Vector3d(v[0].get<double>(), v[1].get<double>(),
                         v[2].get<double>());
}

}  // namespace

SceneConfig LoadSceneConfig(const std::filesystem::path& path) {
  const nlohmann::json j = ReadJsonFile(path);
  if (!j.is_object()) throw ConfigError("/", "expected an object");
  SceneConfig c;
  if (j.contains("views_per_arm")) {
    const auto& v = j["views_per_arm"];
    if (v.is_number_integer()) {
      c.views_per_arm = {v.get<int>(), v.get<int>()};
    } else if (v.is_array() && v.size() == 2 && v[0].is_number_integer() &&
               v[1].is_number_integer()) {
      c.views_per_arm = {v[0].get<int>(), v[1].get<int>()};
    } else {
      throw ConfigError("/views_per_arm", "expected an integer or two integers");
    }
  }
  if (j.contains("lambda")) c.lambda = GetNumber(j, "lambda", "", 1.0);
  if (j.contains("lambda_range")) {
    const auto& r = j["lambda_range"];
    if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number()) {
      throw ConfigError("/lambda_range", "expected [min, max]");
    }
    c.lambda_range = {r[0].get<double>(), r[1].get<double>()};
  }
  c.base_offset = GetVector(j, "base_offset", "", c.base_offset);
  c.base_yaw = GetNumber(j, "base_yaw", "", c.base_yaw);
  c.world_translation_range =
      GetNumber(j, "world_translation_range", "", c.world_translation_range);
  c.workspace_center = GetVector(j, "workspace_center", "", c.workspace_center);
  c.workspace_extent = GetVector(j, "workspace_extent", "", c.workspace_extent);
  c.max_tilt = GetNumber(j, "max_tilt", "", c.max_tilt);
  c.min_relative_angle = GetNumber(j, "min_relative_angle", "", c.min_relative_angle);
  c.min_axis_separation =
      GetNumber(j, "min_axis_separation", "", c.min_axis_separation);
  c.max_extrinsic_offset =
      GetNumber(j, "max_extrinsic_offset", "", c.max_extrinsic_offset);
  if (j.contains("trajectory")) {
    const std::string kind = j["trajectory"].is_string()
                                 ? j["trajectory"].get<std::string>()
                                 : std::string();
    if (kind == "random") {
      c.trajectory = TrajectoryKind::kRandom;
    } else if (kind == "single_axis") {
      c.trajectory = TrajectoryKind::kSingleAxis;
    } else if (kind == "pure_translation") {
      c.trajectory = TrajectoryKind::kPureTranslation;
    } else {
      throw ConfigError("/trajectory",
                        "expected random, single_axis or pure_translation");
    }
  }
  if (j.contains("noise")) {
    const auto& n = j["noise"];
    if (!n.is_object()) throw ConfigError("/noise", "expected an object");
    c.noise.rot_sigma = GetNumber(n, "rot_sigma", "/noise", 0.0);
    c.noise.trans_sigma = GetNumber(n, "trans_sigma", "/noise", 0.0);
    c.noise.ee_rot_sigma = GetNumber(n, "ee_rot_sigma", "/noise", 0.0);
    c.noise.ee_trans_sigma = GetNumber(n, "ee_trans_sigma", "/noise", 0.0);
    c.noise.point_sigma = GetNumber(n, "point_sigma", "/noise", 0.0);
  }
  if (j.contains("point_maps")) {
    if (!j["point_maps"].is_boolean()) {
      throw ConfigError("/point_maps", "expected a boolean");
    }
    c.point_maps = j["point_maps"].get<bool>();
  }
  c.cube_side = GetNumber(j, "cube_side", "", c.cube_side);
  c.cube_center = GetVector(j, "cube_center", "", c.cube_center);
  c.edge_samples = GetInt(j, "edge_samples", "", c.edge_samples);
  c.clutter_points = GetInt(j, "clutter_points", "", c.clutter_points);
  return c;
}

SyntheticScene Generate(const SceneConfig& config, uint64_t seed) {
  for (const int n : config.views_per_arm) {
    if (n < 2) {
      throw Error(ErrorKind::kInvalidInput, "views_per_arm must be >= 2");
    }
  }
  const NoiseSpec& noise = config.noise;
  if (noise.rot_sigma < 0 || noise.trans_sigma < 0 || noise.ee_rot_sigma < 0 ||
      noise.ee_trans_sigma < 0 || noise.point_sigma < 0) {
    throw Error(ErrorKind::kInvalidInput, "noise sigmas must be non-negative");
  }
  if (!(config.cube_side > 0.0) || config.edge_samples < 0 ||
      config.clutter_points < 0) {
    throw Error(ErrorKind::kInvalidInput, "invalid cube settings");
  }

  Sampler rng(seed);
  SyntheticScene scene;
  scene.rng_seed = seed;
  scene.noise = noise;

  if (config.lambda.has_value()) {
    scene.truth_lambda = *config.lambda;
  } else {
    const auto [lo, hi] = config.lambda_range;
    if (!(lo > 0.0 && hi >= lo)) {
      throw Error(ErrorKind::kInvalidInput, "invalid lambda_range");
    }
    scene.truth_lambda = std::exp(rng.Uniform(std::log(lo), std::log(hi)));
  }
  if (!(scene.truth_lambda > 0.0)) {
    throw Error(ErrorKind::kInvalidInput, "lambda must be positive");
  }

  // World frame with a rational rotation (integer quaternion).
  Eigen::Vector4d q;
  do {
    q = (kQuaternionScale * rng.UnitQuaternion()).array().round().matrix();
  } while (q.squaredNorm() == 0.0);
  const double denominator = q.squaredNorm();
  const Eigen::Matrix3d numerator = IntegerRotationNumerator(q);
  const Eigen::Vector3d world_translation = rng.UniformBox(
      Eigen::Vector3d::Constant(config.world_translation_range));
  scene.truth_world_to_base_1 = RigidTransform(
      Rotation::FromMatrix(numerator / denominator), world_translation);
  const RigidTransform base_1_to_base_2(
      ExpMapSO3(Eigen::Vector3d(0.0, 0.0, config.base_yaw)),
      config.base_offset);
  scene.truth_world_to_base_2 =
      base_1_to_base_2.Inverse() * scene.truth_world_to_base_1;

  const Eigen::Vector3d offset_range =
      Eigen::Vector3d::Constant(config.max_extrinsic_offset);
  scene.truth_extrinsic_1 =
      RigidTransform(rng.UniformRotation(), rng.UniformBox(offset_range));
  scene.truth_extrinsic_2 =
      RigidTransform(rng.UniformRotation(), rng.UniformBox(offset_range));

  const ModelCube cube =
      BuildCube(config, numerator, denominator, scene.truth_world_to_base_1,
                scene.truth_lambda);
  scene.cube_side = scene.truth_lambda * cube.side_model;
  scene.cube_edges = cube.edges;

  const RigidTransform* world_to_base[2] = {&scene.truth_world_to_base_1,
                                            &scene.truth_world_to_base_2};
  const RigidTransform* extrinsic[2] = {&scene.truth_extrinsic_1,
                                        &scene.truth_extrinsic_2};
  for (int a = 0; a < 2; ++a) {
    scene.ee_trajectories[a] =
        SampleTrajectory(config, config.views_per_arm[a], rng);
    CaptureSet& clean = scene.clean[a];
    CaptureSet& observed = scene.observed[a];
    clean.arm_id = observed.arm_id = a + 1;
    for (size_t i = 0; i < scene.ee_trajectories[a].size(); ++i) {
      const RigidTransform& ee = scene.ee_trajectories[a][i];
      // Camera pose in the scaled model frame, then unscaled.
      const RigidTransform scaled =
          world_to_base[a]->Inverse() * ee * *extrinsic[a];
      const RigidTransform cam = ScaledPose(scaled, 1.0 / scene.truth_lambda);
      const std::string id =
          "a" + std::to_string(a + 1) + "_v" + std::to_string(i);

      clean.ee_poses.push_back(ee);
      clean.cam_poses.push_back(cam);
      clean.image_ids.push_back(id);
      observed.ee_poses.push_back(
          Perturb(ee, noise.ee_rot_sigma, noise.ee_trans_sigma, rng));
      observed.cam_poses.push_back(
          Perturb(cam, noise.rot_sigma, noise.trans_sigma, rng));
      observed.image_ids.push_back(id);

      if (config.point_maps) {
        const int view = static_cast<int>(i);
        clean.point_maps.push_back(MakePointMap(cube, config, view, 0.0, rng));
        observed.point_maps.push_back(
            noise.point_sigma > 0.0
                ? MakePointMap(cube, config, view, noise.point_sigma, rng)
                : clean.point_maps.back());
      }
    }
  }
  return scene;
}

std::filesystem::path EmitManifest(const SyntheticScene& scene,
                                   const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorKind::kIo,
                "output directory does not exist: " + dir.string());
  }
  const std::filesystem::path manifest =
      WriteManifest(scene.observed[0], scene.observed[1], dir);

  nlohmann::json truth;
  truth["version"] = 1;
  truth["seed"] = scene.rng_seed;
  truth["lambda"] = scene.truth_lambda;
  truth["extrinsic_1"] = MatrixToJson(scene.truth_extrinsic_1.Matrix());
  truth["extrinsic_2"] = MatrixToJson(scene.truth_extrinsic_2.Matrix());
  truth["world_to_base_1"] = MatrixToJson(scene.truth_world_to_base_1.Matrix());
  truth["world_to_base_2"] = MatrixToJson(scene.truth_world_to_base_2.Matrix());
  truth["base_1_to_base_2"] = MatrixToJson(scene.TruthBaseToBase().Matrix());
  truth["cube_side_m"] = scene.cube_side;
  truth["noise"] = {{"rot_sigma", scene.noise.rot_sigma},
                    {"trans_sigma", scene.noise.trans_sigma},
                    {"ee_rot_sigma", scene.noise.ee_rot_sigma},
                    {"ee_trans_sigma", scene.noise.ee_trans_sigma},
                    {"point_sigma", scene.noise.point_sigma}};
  WriteTextFile(dir / "truth.json", DumpJson(truth) + "\n");

  // The cube vertices lead arm 1's first point map and survive any
  // confidence threshold up to 2, so they are the first points of the cloud.
  if (!scene.observed[0].point_maps.empty() &&
      scene.observed[0].point_maps[0].has_value()) {
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& [a, b] : scene.cube_edges) {
      pairs.push_back({{"a", a}, {"b", b}, {"real_length", scene.cube_side}});
    }
    nlohmann::json doc;
    doc["version"] = 1;
    doc["pairs"] = std::move(pairs);
    WriteTextFile(dir / "pairs.json", DumpJson(doc) + "\n");
  }
  return manifest;
}

}  // namespace bimanual
