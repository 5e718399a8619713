#include "adl/kinematics/ik.h"

#include <cmath>

#include "adl/core/error.h"

namespace adl::kin {
namespace {

struct Residual {
  Eigen::Matrix<double, 6, 1> error;
  double position = 0.0;
  double orientation = 0.0;
};

Residual residual(const ArticulatedBody& body, const Transform& base, int link, const Vec3& point,
                  const Transform& target, const Eigen::VectorXd& q,
                  std::vector<Transform>& frames) {
  frames = forward_kinematics(body, base, q);
  const Transform& f = frames[link];
  Residual r;
  r.error.head<3>() = target.translation() - f.apply(point);
  r.error.tail<3>() = rotation_error(f.rotation(), target.rotation());
  r.position = r.error.head<3>().norm();
  r.orientation = r.error.tail<3>().norm();
  return r;
}

}  // namespace

std::optional<IkSolution> solve_ik(const ArticulatedBody& body, const Transform& base, int link,
                                   const Transform& target, const Eigen::VectorXd& seed,
                                   SeededRng& rng, const IkOptions& options) {
  if (link < 0 || link >= body.link_count()) throw ParameterError("solve_ik: link out of range");
  if (seed.size() != body.dof()) throw ParameterError("solve_ik: seed has wrong length");
  if (!target.translation().allFinite() || !target.rotation().coeffs().allFinite()) {
    throw ParameterError("solve_ik: target is not finite");
  }

  std::vector<int> active = options.active_dofs;
  if (active.empty()) active = body.chain_dofs(link);
  const int n = static_cast<int>(active.size());
  const bool use_orientation = options.orientation_weight > 0.0;
  const double w = options.orientation_weight;
  const double lambda2 = options.damping * options.damping;

  auto converged = [&](const Residual& r) {
    return r.position < options.position_tolerance &&
           (!use_orientation || r.orientation < options.orientation_tolerance);
  };

  std::vector<Transform> frames;
  for (int attempt = 0; attempt <= options.max_restarts; ++attempt) {
    Eigen::VectorXd q = body.clamp(seed);
    if (attempt > 0) {
      for (int k : active) q[k] = rng.uniform(body.joint(k).lower, body.joint(k).upper);
    }
    Residual r = residual(body, base, link, options.point, target, q, frames);
    for (int it = 0; it <= options.iterations; ++it) {
      if (converged(r)) {
        return IkSolution{q, r.position, r.orientation, it, attempt};
      }
      if (it == options.iterations) break;

      const Vec3 p = frames[link].apply(options.point);
      const auto jp = point_jacobian(body, frames, link, p);
      Eigen::MatrixXd j(use_orientation ? 6 : 3, n);
      for (int c = 0; c < n; ++c) {
        const int k = active[c];
        j.block<3, 1>(0, c) = jp.col(k);
        if (use_orientation) {
          const JointSpec& js = body.joint(k);
          const int li = body.link_of_dof(k);
          j.block<3, 1>(3, c) = js.type == JointType::kRevolute && body.is_ancestor_or_self(li, link)
                                    ? Vec3(w * (frames[li].rotation() * js.axis))
                                    : Vec3::Zero();
        }
      }
      Eigen::VectorXd e(j.rows());
      e.head<3>() = r.error.head<3>();
      if (use_orientation) e.tail<3>() = w * r.error.tail<3>();

      const Eigen::MatrixXd jjt = j * j.transpose() + lambda2 * Eigen::MatrixXd::Identity(j.rows(), j.rows());
      Eigen::VectorXd dq = j.transpose() * jjt.ldlt().solve(e);
      const double m = dq.cwiseAbs().maxCoeff();
      if (m > options.max_step) dq *= options.max_step / m;
      for (int c = 0; c < n; ++c) q[active[c]] += dq[c];
      q = body.clamp(q);
      r = residual(body, base, link, options.point, target, q, frames);
    }
  }
  return std::nullopt;
}

}  // namespace adl::kin
