#include "adl/placement/placement.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <thread>

#include <Eigen/Eigenvalues>

#include "adl/core/error.h"

namespace adl::placement {

Eigen::VectorXd joint_limit_weights(const Eigen::VectorXd& q, const Eigen::VectorXd& lower,
                                    const Eigen::VectorXd& upper) {
  if (q.size() != lower.size() || q.size() != upper.size()) {
    throw ParameterError("joint_limit_weights: size mismatch");
  }
  Eigen::VectorXd w(q.size());
  for (int i = 0; i < q.size(); ++i) {
    const double span = upper[i] - lower[i];
    w[i] = span > 0.0 ? std::clamp(1.0 - std::abs(2.0 * q[i] - (upper[i] + lower[i])) / span, 0.0, 1.0) : 0.0;
  }
  return w;
}

double jlwki(const Eigen::MatrixXd& jacobian, const Eigen::VectorXd& q, const Eigen::VectorXd& lower,
             const Eigen::VectorXd& upper) {
  if (jacobian.cols() != q.size()) throw ParameterError("jlwki: Jacobian columns must match q");
  const Eigen::MatrixXd jw = jacobian * joint_limit_weights(q, lower, upper).asDiagonal();
  const Eigen::MatrixXd a = jw * jw.transpose();
  const double m = static_cast<double>(a.rows());
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a, Eigen::EigenvaluesOnly)
                                 .eigenvalues()
                                 .cwiseMax(0.0);
  const double mean = ev.sum() / m;
  if (!(mean > 0.0)) return 0.0;
  // Geometric mean via logs. Eigenvalues at round-off level relative to the
  // largest mark a rank-deficient (singular) Jacobian and give exactly 0.
  if (ev.minCoeff() <= kSingularEigenvalueRatio * ev.maxCoeff()) return 0.0;
  const double geo = std::exp(ev.array().log().sum() / m);
  return std::clamp(geo / mean, 0.0, 1.0);
}

double jlwki(const kin::ArticulatedBody& body, const Transform& base, const Eigen::VectorXd& q, int link,
             std::span<const int> dofs, const Vec3& point) {
  const kin::Jacobian full = kin::jacobian(body, base, q, link, point);
  Eigen::MatrixXd j(6, static_cast<Eigen::Index>(dofs.size()));
  Eigen::VectorXd qs(j.cols()), lo(j.cols()), hi(j.cols());
  for (std::size_t i = 0; i < dofs.size(); ++i) {
    j.col(i) = full.col(dofs[i]);
    qs[i] = q[dofs[i]];
    lo[i] = body.joint(dofs[i]).lower;
    hi[i] = body.joint(dofs[i]).upper;
  }
  return jlwki(j, qs, lo, hi);
}

Transform BasePose::transform(double z) const {
  return {quat_from_axis_angle(Vec3::UnitZ(), yaw), Vec3(x, y, z)};
}

bool better(const PlacementCandidate& a, const PlacementCandidate& b) {
  if (a.reached_goals != b.reached_goals) return a.reached_goals > b.reached_goals;
  return a.jlwki_sum > b.jlwki_sum;
}

bool collision_free(const PlacementProblem& problem, const Transform& base, const Eigen::VectorXd& q) {
  kin::Scene scene = problem.obstacles;
  scene.self_pairs.clear();
  kin::BodyState robot;
  robot.name = problem.robot->name;
  robot.model = std::shared_ptr<const kin::ArticulatedBody>(&problem.robot->body, [](const kin::ArticulatedBody*) {});
  robot.base = base;
  robot.q = q;
  scene.bodies.push_back(std::move(robot));
  const int robot_index = static_cast<int>(scene.bodies.size()) - 1;
  for (const kin::ContactReport& c : kin::detect_contacts(scene, 0.0)) {
    if ((c.body_a == robot_index || c.body_b == robot_index) && c.distance < 0.0) return false;
  }
  return true;
}

PlacementCandidate evaluate_candidate(const PlacementProblem& problem, const BasePose& pose, SeededRng& rng,
                                      const PlacementOptions& options) {
  PlacementCandidate c;
  c.pose = pose;
  const Transform base = pose.transform(options.base_height);
  kin::IkOptions ik = options.ik;
  ik.active_dofs = problem.active_dofs;
  ik.point = problem.point;
  for (const Transform& goal : problem.goals) {
    std::optional<kin::IkSolution> sol =
        kin::solve_ik(problem.robot->body, base, problem.link, goal, problem.seed_q, rng, ik);
    if (sol && collision_free(problem, base, sol->q)) {
      ++c.reached_goals;
      c.jlwki_sum += jlwki(problem.robot->body, base, sol->q, problem.link, problem.active_dofs, problem.point);
      c.ik_solutions.emplace_back(sol->q);
    } else {
      c.ik_solutions.emplace_back(std::nullopt);
    }
  }
  return c;
}

PlacementResult optimize_base_pose(const PlacementProblem& problem, SeededRng& rng,
                                   const PlacementOptions& options) {
  if (problem.robot == nullptr) throw ParameterError("optimize_base_pose: no robot");
  if (problem.goals.empty()) throw ParameterError("optimize_base_pose: goal set is empty");
  if (options.samples <= 0) throw ParameterError("optimize_base_pose: samples must be positive");
  if (!(options.radius_min >= 0.0 && options.radius_min <= options.radius_max)) {
    throw ParameterError("optimize_base_pose: bad sampling annulus");
  }
  const SeededRng streams(rng.next_u64());
  PlacementResult out;
  out.candidates.resize(options.samples);
  auto work = [&](int first, int stride) {
    for (int i = first; i < options.samples; i += stride) {
      SeededRng r = streams.fork(static_cast<std::uint64_t>(i));
      const double radius = r.uniform(options.radius_min, options.radius_max);
      const double angle = r.uniform(-std::numbers::pi, std::numbers::pi);
      BasePose pose;
      pose.x = problem.centroid.x() + radius * std::cos(angle);
      pose.y = problem.centroid.y() + radius * std::sin(angle);
      const double facing = std::atan2(problem.centroid.y() - pose.y, problem.centroid.x() - pose.x);
      pose.yaw = facing + r.uniform(-options.yaw_spread, options.yaw_spread);
      out.candidates[i] = evaluate_candidate(problem, pose, r, options);
    }
  };
  const int workers = std::clamp(options.workers, 1, options.samples);
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
  }
  for (int i = 1; i < options.samples; ++i) {
    if (better(out.candidates[i], out.candidates[out.best_index])) out.best_index = i;
  }
  out.best = out.candidates[out.best_index];
  out.reached = out.best.reached_goals > 0;
  return out;
}

}  // namespace adl::placement
