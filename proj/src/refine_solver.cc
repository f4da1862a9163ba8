#include "bimanual/refine_solver.h"

#include <array>
#include <cmath>

#include "bimanual/error.h"
#include "jet.h"

namespace bimanual {
namespace {

// Residual norms below this are treated as exactly zero when
// differentiating; the norm has no gradient at the origin.
constexpr double kKinkRadius = 1e-12;

constexpr double kArmijoC = 1e-4;
constexpr double kShrink = 0.5;
constexpr int kMaxBacktracks = 60;
constexpr int kStallWindow = 5;

struct Motion {
  Eigen::Matrix3d ee_rotation;
  Eigen::Vector3d ee_translation;
  Eigen::Matrix3d cam_rotation;
  Eigen::Vector3d cam_translation;  // at unit scale
};

using ArmChain = std::vector<Motion>;

std::array<ArmChain, 2> BuildChains(const CalibrationProblem& problem) {
  std::array<ArmChain, 2> chains;
  for (int a = 0; a < 2; ++a) {
    const auto rel_ee = RelativeEe(problem.arm(a));
    const auto rel_cam = RelativeCam(problem.arm(a), 1.0);
    if (rel_ee.size() != rel_cam.size()) {
      throw Error(ErrorKind::kInvalidInput, "length mismatch");
    }
    for (size_t i = 0; i < rel_ee.size(); ++i) {
      chains[a].push_back({rel_ee[i].rotation().matrix(),
                           rel_ee[i].translation(),
                           rel_cam[i].rotation().matrix(),
                           rel_cam[i].translation()});
    }
  }
  return chains;
}

template <typename T>
using Vec3 = Eigen::Matrix<T, 3, 1>;
template <typename T>
using Mat3 = Eigen::Matrix<T, 3, 3>;

template <typename T>
T SafeNorm(const Vec3<T>& v) {
  const T n2 = v(0) * v(0) + v(1) * v(1) + v(2) * v(2);
  if (Value(n2) < kKinkRadius * kKinkRadius) {
    return T(std::sqrt(Value(n2)));
  }
  using std::sqrt;
  return sqrt(n2);
}

template <typename T>
Mat3<T> ExpRotation(const Vec3<T>& w) {
  using std::cos;
  using std::sin;
  using std::sqrt;
  const T theta2 = w(0) * w(0) + w(1) * w(1) + w(2) * w(2);
  T a;
  T b;
  if (Value(theta2) < 1e-8) {
    // Taylor coefficients stay differentiable at the origin.
    a = T(1.0) - theta2 / 6.0 + theta2 * theta2 / 120.0;
    b = T(0.5) - theta2 / 24.0 + theta2 * theta2 / 720.0;
  } else {
    const T theta = sqrt(theta2);
    a = sin(theta) / theta;
    b = (T(1.0) - cos(theta)) / theta2;
  }
  Mat3<T> k;
  k << T(0.0), -w(2), w(1),
       w(2), T(0.0), -w(0),
       -w(1), w(0), T(0.0);
  return Mat3<T>::Identity() + a * k + b * (k * k);
}

template <typename T>
T ArmCost(const ArmChain& chain, const Vec3<T>& w, const Vec3<T>& t,
          const T& lambda, double alpha) {
  using std::atan2;
  const Mat3<T> rx = ExpRotation(w);
  T total(0.0);
  for (const Motion& m : chain) {
    const Mat3<T> ra = m.ee_rotation.cast<T>();
    const Mat3<T> rb = m.cam_rotation.cast<T>();
    // Rotation parts of A X and X B.
    const Mat3<T> lhs = ra * rx;
    const Mat3<T> rhs = rx * rb;
    const Mat3<T> e = lhs.transpose() * rhs;
    const Vec3<T> vee(e(2, 1) - e(1, 2), e(0, 2) - e(2, 0), e(1, 0) - e(0, 1));
    const T cos_angle = (e(0, 0) + e(1, 1) + e(2, 2) - 1.0) * 0.5;
    const T angle = atan2(SafeNorm(vee) * 0.5, cos_angle);

    const Vec3<T> t_lhs = ra * t + m.ee_translation.cast<T>();
    const Vec3<T> t_rhs = rx * (m.cam_translation.cast<T>() * lambda) + t;
    const T distance = SafeNorm<T>(t_lhs - t_rhs);

    total += alpha * angle + (1.0 - alpha) * distance;
  }
  return total / static_cast<double>(chain.size());
}

template <typename T>
T TotalCost(const std::array<ArmChain, 2>& chains,
            const Eigen::Matrix<T, kNumParameters, 1>& p, double alpha) {
  using std::exp;
  const T lambda = exp(p(12));
  return ArmCost<T>(chains[0], p.template segment<3>(0),
                    p.template segment<3>(3), lambda, alpha) +
         ArmCost<T>(chains[1], p.template segment<3>(6),
                    p.template segment<3>(9), lambda, alpha);
}

ParameterVector TotalGradient(const std::array<ArmChain, 2>& chains,
                              const ParameterVector& params, double alpha) {
  using JetT = Jet<kNumParameters>;
  Eigen::Matrix<JetT, kNumParameters, 1> p;
  for (int k = 0; k < kNumParameters; ++k) {
    p(k) = JetT::Variable(params(k), k);
  }
  return TotalCost<JetT>(chains, p, alpha).v;
}

void CheckAlpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorKind::kInvalidInput, "alpha must be in [0, 1]");
  }
}

}  // namespace

ParameterVector PackParameters(const RigidTransform& x1,
                               const RigidTransform& x2, double lambda) {
  if (!(lambda > 0.0)) {
    throw Error(ErrorKind::kInvalidInput, "scale must be positive");
  }
  ParameterVector p;
  p.segment<3>(0) = LogMapSO3(x1.rotation());
  p.segment<3>(3) = x1.translation();
  p.segment<3>(6) = LogMapSO3(x2.rotation());
  p.segment<3>(9) = x2.translation();
  p(12) = std::log(lambda);
  return p;
}

void UnpackParameters(const ParameterVector& params, RigidTransform* x1,
                      RigidTransform* x2, double* lambda) {
  *x1 = RigidTransform(ExpMapSO3(params.segment<3>(0)), params.segment<3>(3));
  *x2 = RigidTransform(ExpMapSO3(params.segment<3>(6)), params.segment<3>(9));
  *lambda = std::exp(params(12));
}

double Cost(const CalibrationProblem& problem, double lambda,
            const RigidTransform& x1, const RigidTransform& x2,
            double alpha) {
  return Cost(problem, PackParameters(x1, x2, lambda), alpha);
}

double Cost(const CalibrationProblem& problem, const ParameterVector& params,
            double alpha) {
  CheckAlpha(alpha);
  return TotalCost<double>(BuildChains(problem), params, alpha);
}

ParameterVector Gradient(const CalibrationProblem& problem,
                         const ParameterVector& params, double alpha) {
  CheckAlpha(alpha);
  return TotalGradient(BuildChains(problem), params, alpha);
}

RefinedSolution Refine(const CalibrationProblem& problem,
                       const InitialSolution& init,
                       const SolverOptions& opts) {
  opts.Validate();
  const auto chains = BuildChains(problem);
  const double alpha = opts.alpha;

  ParameterVector params =
      PackParameters(init.extrinsic_1, init.extrinsic_2, init.lambda);
  double cost = TotalCost<double>(chains, params, alpha);
  if (!std::isfinite(cost)) {
    throw Error(ErrorKind::kNumerical, "non-finite cost during refinement");
  }

  RefinedSolution result;
  result.cost_trace.push_back({0, cost});
  int stalled = 0;
  int iteration = 0;
  for (; iteration < opts.gd_max_iters; ++iteration) {
    const ParameterVector gradient = TotalGradient(chains, params, alpha);
    if (!gradient.allFinite()) {
      throw Error(ErrorKind::kNumerical, "non-finite cost during refinement");
    }
    const double g2 = gradient.squaredNorm();
    if (std::sqrt(g2) < opts.gd_tol) {
      result.converged = true;
      result.stop_reason = "gradient norm below tolerance";
      break;
    }

    double step = opts.gd_step;
    bool accepted = false;
    ParameterVector candidate;
    double candidate_cost = cost;
    for (int k = 0; k < kMaxBacktracks; ++k, step *= kShrink) {
      candidate = params - step * gradient;
      // Retract the rotations onto SO(3) and pull them back to the algebra.
      for (const int offset : {0, 6}) {
        candidate.segment<3>(offset) =
            LogMapSO3(ExpMapSO3(candidate.segment<3>(offset)));
      }
      candidate_cost = TotalCost<double>(chains, candidate, alpha);
      if (std::isfinite(candidate_cost) &&
          candidate_cost <= cost - kArmijoC * step * g2) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      result.converged = true;
      result.stop_reason = "no descent step above machine precision";
      break;
    }

    const double relative_decrease =
        (cost - candidate_cost) / std::max(cost, 1e-300);
    params = candidate;
    cost = candidate_cost;
    result.cost_trace.push_back({iteration + 1, cost});
    stalled = relative_decrease < opts.gd_tol ? stalled + 1 : 0;
    if (stalled >= kStallWindow) {
      result.converged = true;
      result.stop_reason = "relative decrease below tolerance";
      ++iteration;
      break;
    }
  }
  if (result.stop_reason.empty()) {
    result.stop_reason = "iteration limit reached";
  }
  result.iterations_used = iteration;
  UnpackParameters(params, &result.extrinsic_1, &result.extrinsic_2,
                   &result.lambda);
  return result;
}

}  // namespace bimanual
