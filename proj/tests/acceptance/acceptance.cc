// Acceptance checks: one PASS/FAIL line per criterion.
//
// Usage: acceptance [--only 1,2,...] [--workers N]
// Exit status is 0 only when every selected check passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/QR>

#include "adl/core/rng.h"
#include "adl/core/task.h"
#include "adl/envs/env.h"
#include "adl/envs/toy.h"
#include "adl/harness/run_config.h"
#include "adl/harness/trace.h"
#include "adl/human/human.h"
#include "adl/human/limitation.h"
#include "adl/kinematics/body.h"
#include "adl/kinematics/ik.h"
#include "adl/learn/network_file.h"
#include "adl/learn/policy.h"
#include "adl/learn/ppo.h"
#include "adl/learn/trainer.h"
#include "adl/placement/placement.h"
#include "adl/reward/preference.h"
#include "adl/robots/robot.h"

namespace adl {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

Eigen::VectorXd random_q(const kin::ArticulatedBody& body, SeededRng& rng) {
  Eigen::VectorXd q(body.dof());
  for (int k = 0; k < body.dof(); ++k) q[k] = rng.uniform(body.joint(k).lower, body.joint(k).upper);
  return q;
}

std::vector<envs::EnvSpec> all_env_specs() {
  std::vector<envs::EnvSpec> out;
  for (Task t : kAllTasks) {
    for (const std::string& r : robots::robot_names()) {
      for (envs::HumanMode m : {envs::HumanMode::kStatic, envs::HumanMode::kActive}) {
        out.push_back(envs::EnvSpec::make(t, r, m));
      }
    }
  }
  return out;
}

// ------------------------------------------------------------------------ 1

Outcome default_weights() {
  const reward::CostArray expected = {0.25, 0.01, 0.05, 1.0, 1.0, 0.01, 0.01};
  bool ok = reward::kDefaultWeights == expected && reward::PreferenceConfig{}.omega == expected;
  for (Task t : kAllTasks) ok = ok && reward::default_preferences(t).omega == expected;
  return {ok, "omega = [0.25, 0.01, 0.05, 1.0, 1.0, 0.01, 0.01] for every task"};
}

// ------------------------------------------------------------------------ 2

Outcome limitation_formulas() {
  const auto start = std::chrono::steady_clock::now();
  SeededRng rng(2);
  int bad_tremor = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const double q_bar = rng.uniform(-2.0, 2.0);
    const double eps = rng.uniform(0.0, 20.0 * kDeg);
    Eigen::VectorXd qv(10);
    for (int i = 0; i < 10; ++i) qv[i] = rng.uniform(-2.0, 2.0);
    for (std::int64_t t = 0; t < 200; ++t) {
      const double sign = t % 2 == 0 ? 1.0 : -1.0;
      if (human::tremor_offset(q_bar, eps, t) != q_bar + eps * sign) ++bad_tremor;
      const Eigen::VectorXd v = human::tremor_offset(qv, eps, t);
      for (int i = 0; i < 10; ++i) {
        if (v[i] != qv[i] + eps * sign) ++bad_tremor;
      }
    }
  }
  int bad_range = 0;
  double beta_min = 1, beta_max = 0, gamma_min = 1, gamma_max = 0, eps_max = 0;
  for (int i = 0; i < 10000; ++i) {
    const human::LimitationProfile p = human::sample_limitation(rng);
    const bool in = p.strength_scale >= 0.25 && p.strength_scale < 1.0 && p.limit_scale >= 0.5 &&
                    p.limit_scale < 1.0 && p.tremor_amplitude >= 0.0 && p.tremor_amplitude < 20.0 * kDeg;
    if (!in) ++bad_range;
    beta_min = std::min(beta_min, p.strength_scale);
    beta_max = std::max(beta_max, p.strength_scale);
    gamma_min = std::min(gamma_min, p.limit_scale);
    gamma_max = std::max(gamma_max, p.limit_scale);
    eps_max = std::max(eps_max, p.tremor_amplitude / kDeg);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {bad_tremor == 0 && bad_range == 0 && secs < 1.0,
          fmt("tremor mismatches %d/22000; out-of-range samples %d/10000 (beta [%.4f, %.4f], gamma [%.4f, "
              "%.4f], eps max %.3f deg); %.3f s (< 1 s)",
              bad_tremor, bad_range, beta_min, beta_max, gamma_min, gamma_max, eps_max, secs)};
}

// ------------------------------------------------------------------------ 3

struct ShippedModel {
  std::string name;
  kin::ArticulatedBody body;
  std::vector<int> links;  // end links whose Jacobians are checked
};

std::vector<ShippedModel> shipped_models() {
  std::vector<ShippedModel> out;
  for (const std::string& name : robots::robot_names()) {
    const robots::RobotModel r = robots::load_robot(name);
    ShippedModel m{name, r.body, {}};
    for (const robots::ArmInfo& a : r.arms) m.links.push_back(a.end_effector);
    out.push_back(std::move(m));
  }
  for (human::Sex sex : {human::Sex::kMale, human::Sex::kFemale}) {
    const human::HumanModel h = human::generate_human(sex);
    out.push_back({sex == human::Sex::kMale ? "human_male" : "human_female", h.body,
                   {h.right_arm.hand, h.left_arm.hand, h.head, h.mouth}});
  }
  return out;
}

Outcome jacobians() {
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  int configs = 0;
  std::string worst_model;
  for (const ShippedModel& m : shipped_models()) {
    SeededRng rng(3);
    for (int trial = 0; trial < 100; ++trial, ++configs) {
      const Eigen::VectorXd q = random_q(m.body, rng);
      const Transform base(quat_from_axis_angle(Vec3(rng.normal(), rng.normal(), rng.normal()).normalized(),
                                                rng.uniform(-3.0, 3.0)),
                           Vec3(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(0, 1)));
      const Vec3 point(rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1));
      for (int link : m.links) {
        const kin::Jacobian j = kin::jacobian(m.body, base, q, link, point);
        kin::Jacobian fd(6, m.body.dof());
        const double h = 1e-6;
        for (int k = 0; k < m.body.dof(); ++k) {
          Eigen::VectorXd qp = q, qm = q;
          qp[k] += h;
          qm[k] -= h;
          const Transform tp = kin::forward_kinematics(m.body, base, qp)[link];
          const Transform tm = kin::forward_kinematics(m.body, base, qm)[link];
          fd.col(k).head<3>() = (tp.apply(point) - tm.apply(point)) / (2 * h);
          fd.col(k).tail<3>() = rotation_error(tm.rotation(), tp.rotation()) / (2 * h);
        }
        const double rel = (j - fd).norm() / std::max(fd.norm(), 1e-12);
        if (rel > worst) {
          worst = rel;
          worst_model = m.name;
        }
      }
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {worst < 1e-5 && secs < 10.0,
          fmt("worst relative error %.2e (%s) over %d configurations of 6 models; %.2f s (< 10 s)", worst,
              worst_model.c_str(), configs, secs)};
}

// ------------------------------------------------------------------------ 4

Outcome inverse_kinematics() {
  const auto start = std::chrono::steady_clock::now();
  std::string detail;
  bool ok = true;
  for (const std::string& name : robots::robot_names()) {
    const robots::RobotModel r = robots::load_robot(name);
    const robots::ArmInfo& arm = r.tool_arm_info();
    SeededRng rng(4);
    Eigen::VectorXd seed = Eigen::VectorXd::Zero(r.body.dof());
    for (int i = 0; i < robots::kArmDof; ++i) seed[arm.dofs[i]] = arm.park[i];
    seed = r.body.clamp(seed);
    kin::IkOptions opts;
    opts.active_dofs.assign(arm.dofs.begin(), arm.dofs.end());
    int solved = 0;
    for (int trial = 0; trial < 100; ++trial) {
      Eigen::VectorXd q = seed;
      for (int d : arm.dofs) q[d] = rng.uniform(r.body.joint(d).lower, r.body.joint(d).upper);
      const Transform target = kin::forward_kinematics(r.body, q)[arm.end_effector];
      const auto sol = kin::solve_ik(r.body, Transform::identity(), arm.end_effector, target, seed, rng, opts);
      if (!sol) continue;
      const Vec3 reached = kin::forward_kinematics(r.body, sol->q)[arm.end_effector].translation();
      if ((reached - target.translation()).norm() < 0.005) ++solved;
    }
    ok = ok && solved >= 95;
    detail += fmt("%s %d/100, ", name.c_str(), solved);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {ok && secs < 60.0, detail + fmt("full-pose targets, < 5 mm; %.1f s (< 60 s)", secs)};
}

// ------------------------------------------------------------------------ 5

Outcome jlwki_properties() {
  const auto start = std::chrono::steady_clock::now();
  SeededRng rng(5);
  int out_of_range = 0, limit_nonzero = 0, singular_nonzero = 0, ortho_bad = 0;
  double ortho_worst = 0.0;
  std::vector<robots::RobotModel> models;
  for (const std::string& name : robots::robot_names()) models.push_back(robots::load_robot(name));
  for (int i = 0; i < 10000; ++i) {
    const robots::RobotModel& r = models[i % models.size()];
    const robots::ArmInfo& arm = r.arms[rng.below(r.arms.size())];
    const Eigen::VectorXd q = random_q(r.body, rng);
    const double s = placement::jlwki(r.body, Transform::identity(), q, arm.end_effector, arm.dofs, Vec3::Zero());
    if (!(s >= 0.0 && s <= 1.0)) ++out_of_range;
    if (i % 10 == 0) {
      // Weights vanish at limits. A 7-dof arm keeps rank 6 with one joint
      // pinned, so pin two (or all) to drop J_w below full task rank.
      Eigen::VectorXd ql = q;
      const int a = static_cast<int>(rng.below(robots::kArmDof));
      const int b = (a + 1 + static_cast<int>(rng.below(robots::kArmDof - 1))) % robots::kArmDof;
      for (int d : {arm.dofs[a], arm.dofs[b]}) {
        ql[d] = rng.bernoulli(0.5) ? r.body.joint(d).lower : r.body.joint(d).upper;
      }
      Eigen::VectorXd qa = q;
      for (int d : arm.dofs) qa[d] = rng.bernoulli(0.5) ? r.body.joint(d).lower : r.body.joint(d).upper;
      for (const Eigen::VectorXd* x : {&ql, &qa}) {
        if (placement::jlwki(r.body, Transform::identity(), *x, arm.end_effector, arm.dofs, Vec3::Zero()) != 0.0) {
          ++limit_nonzero;
        }
      }
    }
  }
  for (int i = 0; i < 1000; ++i) {
    // Square (6-dof) Jacobians with a single joint at a limit.
    Eigen::MatrixXd j(6, 6);
    for (int k = 0; k < j.size(); ++k) j.data()[k] = rng.normal();
    Eigen::VectorXd q(6);
    for (int k = 0; k < 6; ++k) q[k] = rng.uniform(-0.9, 0.9);
    q[rng.below(6)] = rng.bernoulli(0.5) ? -1.0 : 1.0;
    if (placement::jlwki(j, q, Eigen::VectorXd::Constant(6, -1.0), Eigen::VectorXd::Constant(6, 1.0)) != 0.0) {
      ++limit_nonzero;
    }
  }
  for (int i = 0; i < 1000; ++i) {
    // Rank-deficient Jacobians (rank 5 and lower) at random in-limit q.
    const int rank = 1 + static_cast<int>(rng.below(5));
    Eigen::MatrixXd a(6, rank), b(rank, 7);
    for (int k = 0; k < a.size(); ++k) a.data()[k] = rng.normal();
    for (int k = 0; k < b.size(); ++k) b.data()[k] = rng.normal();
    Eigen::VectorXd q(7);
    for (int k = 0; k < 7; ++k) q[k] = rng.uniform(-0.9, 0.9);
    if (placement::jlwki(a * b, q, Eigen::VectorXd::Constant(7, -1.0), Eigen::VectorXd::Constant(7, 1.0)) != 0.0) {
      ++singular_nonzero;
    }
    // Orthonormal rows at mid-range.
    Eigen::MatrixXd g(7, 7);
    for (int k = 0; k < g.size(); ++k) g.data()[k] = rng.normal();
    const Eigen::MatrixXd qmat = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
    const Eigen::MatrixXd j = qmat.topRows(6);
    Eigen::VectorXd lo(7), hi(7);
    for (int k = 0; k < 7; ++k) {
      lo[k] = rng.uniform(-3.0, -0.1);
      hi[k] = rng.uniform(0.1, 3.0);
    }
    const double s = placement::jlwki(j, 0.5 * (lo + hi), lo, hi);
    ortho_worst = std::max(ortho_worst, std::abs(s - 1.0));
    if (std::abs(s - 1.0) > 1e-12) ++ortho_bad;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool ok = out_of_range == 0 && limit_nonzero == 0 && singular_nonzero == 0 && ortho_bad == 0 && secs < 30;
  return {ok, fmt("out of [0,1] %d/10000; at-limit nonzero %d/3000; singular nonzero %d/1000; orthonormal "
                  "|s-1| max %.1e; %.1f s (< 30 s)",
                  out_of_range, limit_nonzero, singular_nonzero, ortho_worst, secs)};
}

// ------------------------------------------------------------------------ 6

Outcome base_placement() {
  const auto start = std::chrono::steady_clock::now();
  std::vector<robots::RobotModel> models;
  for (const std::string& name : robots::robot_names()) models.push_back(robots::load_robot(name));
  int violations = 0, reached_trials = 0, candidates = 0;
  std::string first_violation;
  for (int trial = 0; trial < 100; ++trial) {
    SeededRng rng(mix_seed(6, static_cast<std::uint64_t>(trial)));
    const robots::RobotModel& robot = models[trial % models.size()];
    const robots::ArmInfo& arm = robot.tool_arm_info();
    placement::PlacementProblem p;
    p.robot = &robot;
    p.link = arm.end_effector;
    p.active_dofs.assign(arm.dofs.begin(), arm.dofs.end());
    p.seed_q = Eigen::VectorXd::Zero(robot.body.dof());
    for (int i = 0; i < robots::kArmDof; ++i) p.seed_q[arm.dofs[i]] = arm.park[i];
    p.seed_q = robot.body.clamp(p.seed_q);
    const Vec3 centre(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), rng.uniform(0.7, 1.1));
    for (int g = 0; g < 3; ++g) {
      p.goals.push_back(Transform::from_translation(
          centre + Vec3(rng.uniform(-0.15, 0.15), rng.uniform(-0.15, 0.15), rng.uniform(-0.1, 0.1))));
    }
    p.centroid = centre;
    // A table-height bar next to the goals as an obstacle.
    kin::Fixture bar;
    bar.name = "bar";
    bar.capsule = {centre + Vec3(-0.4, 0.25, -0.35), centre + Vec3(0.4, 0.25, -0.35), 0.05};
    p.obstacles.fixtures.push_back(bar);
    placement::PlacementOptions o;
    o.samples = 12;
    o.base_height = robot.mobility == robots::Mobility::kWheeled ? 0.0 : 0.4;
    const placement::PlacementResult res = placement::optimize_base_pose(p, rng, o);
    reached_trials += res.reached ? 1 : 0;
    // Exhaustive re-check: recompute every candidate's score from its stored
    // IK solutions, then confirm nothing beats the selection.
    std::vector<placement::PlacementCandidate> rescored;
    for (const placement::PlacementCandidate& c : res.candidates) {
      ++candidates;
      placement::PlacementCandidate s;
      s.pose = c.pose;
      const Transform base = c.pose.transform(o.base_height);
      for (std::size_t g = 0; g < p.goals.size(); ++g) {
        if (!c.ik_solutions.at(g)) continue;
        const Eigen::VectorXd& q = *c.ik_solutions[g];
        const Vec3 tip = kin::forward_kinematics(robot.body, base, q)[p.link].apply(p.point);
        if ((tip - p.goals[g].translation()).norm() > o.ik.position_tolerance + 1e-9) continue;
        if (!placement::collision_free(p, base, q)) continue;
        ++s.reached_goals;
        s.jlwki_sum += placement::jlwki(robot.body, base, q, p.link, p.active_dofs, p.point);
      }
      if (s.reached_goals != c.reached_goals || s.jlwki_sum != c.jlwki_sum) {
        ++violations;
        if (first_violation.empty()) first_violation = fmt("trial %d: candidate score not reproducible", trial);
      }
      rescored.push_back(s);
    }
    for (std::size_t i = 0; i < rescored.size(); ++i) {
      if (placement::better(rescored[i], rescored[res.best_index])) {
        ++violations;
        if (first_violation.empty()) first_violation = fmt("trial %d: candidate %zu beats selection", trial, i);
      }
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {violations == 0 && secs < 300.0,
          fmt("%d violations over %d candidates in 100 trials (%d reached a goal)%s%s; %.1f s (< 300 s)",
              violations, candidates, reached_trials, first_violation.empty() ? "" : ": ", first_violation.c_str(),
              secs)};
}

// ------------------------------------------------------------------------ 7

Outcome reward_composition() {
  const auto start = std::chrono::steady_clock::now();
  long frames = 0, bad = 0;
  int envs_checked = 0;
  for (const envs::EnvSpec& spec : all_env_specs()) {
    envs::AssistiveEnv env(spec);
    const reward::PreferenceConfig& prefs = env.preferences();
    learn::EvalHooks hooks;
    hooks.on_step = [&](int, const envs::Environment&, const std::vector<Eigen::VectorXd>&,
                        const envs::Transition& tr) {
      const reward::RewardBreakdown& r = tr.reward;
      double sum = 0.0;
      for (int i = 0; i < reward::kCostCount; ++i) sum += prefs.alpha[i] * prefs.omega[i] * r.costs.values[i];
      const bool ok = r.total == r.task + r.preference && r.preference == -sum && r.alpha == prefs.alpha &&
                      r.omega == prefs.omega;
      ++frames;
      if (!ok) ++bad;
    };
    learn::evaluate(env, {}, 10, mix_seed(7, envs_checked), 1, hooks);
    ++envs_checked;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {bad == 0 && frames > 0,
          fmt("%ld/%ld frames violate r = r_R + r_H or r_H = -sum(alpha*omega*C) over %d environments x 10 random "
              "episodes; %.1f s",
              bad, frames, envs_checked, secs)};
}

// ------------------------------------------------------------------------ 8

std::string trace_bytes(const harness::RunConfig& c, const std::vector<const learn::GaussianPolicy*>& policies,
                        int episodes, int workers) {
  const auto env = harness::make_env(c);
  std::vector<harness::Trace> traces(episodes);
  learn::EvalHooks hooks;
  hooks.on_reset = [&](int i, std::uint64_t seed, const envs::Environment& e, const std::vector<Eigen::VectorXd>& obs) {
    traces[i].header = {c, e.id(), i, seed, obs};
  };
  hooks.on_step = [&](int i, const envs::Environment& e, const std::vector<Eigen::VectorXd>& a,
                      const envs::Transition& tr) { traces[i].frames.push_back(harness::make_frame(e, a, tr)); };
  learn::evaluate(*env, policies, episodes, c.seed, workers, hooks);
  std::ostringstream out;
  for (const harness::Trace& t : traces) harness::write_trace(out, t);
  return out.str();
}

Outcome determinism() {
  const auto start = std::chrono::steady_clock::now();
  int envs_checked = 0, mismatches = 0, short_traces = 0;
  for (const envs::EnvSpec& spec : all_env_specs()) {
    harness::RunConfig c;
    c.env = to_string(spec.task);
    c.robot = spec.robot;
    c.human = spec.human;
    c.seed = 8;
    const std::string a = trace_bytes(c, {}, 2, 1);
    const std::string b = trace_bytes(c, {}, 2, 1);
    const std::string w8 = trace_bytes(c, {}, 2, 8);
    if (a != b || a != w8) ++mismatches;
    if (std::count(a.begin(), a.end(), '\n') != 2 * 201) ++short_traces;
    ++envs_checked;
  }
  // Training with 1 and 8 rollout workers must give the same policies and
  // therefore the same policy-driven traces.
  harness::RunConfig c;
  c.env = "scratch_itch";
  c.robot = "jaco";
  c.human = envs::HumanMode::kActive;
  c.seed = 8;
  c.actors = 8;
  c.steps = 8 * 200 * 2;
  std::vector<std::string> trained;
  for (int workers : {1, 8}) {
    c.workers = workers;
    const auto env = harness::make_env(c);
    const learn::TrainResult r = learn::train(*env, harness::trainer_config(c));
    std::vector<const learn::GaussianPolicy*> ptrs;
    std::string bytes;
    for (const auto& p : r.policies) {
      ptrs.push_back(&p);
      const std::vector<std::uint8_t> enc = learn::encode_network(p.to_file("policy"));
      bytes.append(enc.begin(), enc.end());
    }
    // The header embeds the config; record both under the same one.
    harness::RunConfig recorded = c;
    recorded.workers = 1;
    trained.push_back(bytes + trace_bytes(recorded, ptrs, 2, 1));
  }
  const bool train_same = trained[0] == trained[1];
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {mismatches == 0 && short_traces == 0 && train_same,
          fmt("%d/%d environments differ across runs or workers {1, 8}; %d short traces; trained policies and "
              "their traces %s across workers {1, 8}; %.1f s",
              mismatches, envs_checked, short_traces, train_same ? "identical" : "DIFFER", secs)};
}

// ------------------------------------------------------------------------ 9

learn::GaussianPolicy random_policy(int obs, int act, std::uint64_t seed) {
  learn::GaussianPolicy p(obs, act, 8);
  SeededRng rng(seed);
  p.initialize(rng, -0.3);
  p.actor().weight(p.actor().layer_count() - 1) *= 50.0;
  for (int i = 0; i < act; ++i) p.log_std()[i] = rng.uniform(-1.0, 0.5);
  return p;
}

Outcome ppo_correctness() {
  double worst = 0.0;
  int checked = 0;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    learn::GaussianPolicy p = random_policy(3, 2, 900 + trial);
    SeededRng rng(950 + trial);
    learn::RolloutBatch b;
    b.resize(3, 2, 6);
    for (int j = 0; j < 6; ++j) {
      for (int i = 0; i < 3; ++i) b.observations(i, j) = rng.normal();
      const auto out = p.forward(b.observations.col(j));
      b.actions.col(j) = p.sample(out, rng);
      b.log_probs[j] = learn::gaussian_log_prob(out.mean, out.log_std, b.actions.col(j)) + rng.uniform(-0.1, 0.1);
      b.values[j] = out.value;
      b.advantages[j] = rng.normal();
      b.returns[j] = rng.normal();
    }
    std::vector<int> idx(6);
    std::iota(idx.begin(), idx.end(), 0);
    learn::PpoConfig cfg;
    cfg.entropy_coef = 0.01;
    Eigen::VectorXd gp, gv;
    learn::ppo_loss(p, b, idx, cfg, &gp, &gv);
    auto policy_loss = [&](const Eigen::VectorXd& th) {
      learn::GaussianPolicy q = p;
      q.set_policy_parameters(th);
      const learn::LossTerms l = learn::ppo_loss(q, b, idx, cfg, nullptr, nullptr);
      return -l.surrogate - cfg.entropy_coef * l.entropy;
    };
    auto value_loss = [&](const Eigen::VectorXd& th) {
      learn::GaussianPolicy q = p;
      q.critic().set_parameters(th);
      return cfg.value_coef * learn::ppo_loss(q, b, idx, cfg, nullptr, nullptr).value_loss;
    };
    const double h = 1e-6;
    auto check = [&](const Eigen::VectorXd& th, const Eigen::VectorXd& g, auto&& loss) {
      for (int i = 0; i < th.size(); ++i) {
        Eigen::VectorXd a = th, c = th;
        a[i] += h;
        c[i] -= h;
        const double fd = (loss(a) - loss(c)) / (2 * h);
        worst = std::max(worst, std::abs(fd - g[i]) / std::max(1e-3, std::abs(fd) + std::abs(g[i])));
        ++checked;
      }
    };
    check(p.policy_parameters(), gp, policy_loss);
    check(p.critic().parameters(), gv, value_loss);
  }
  // Hand-computed clipped objective on one transition.
  learn::GaussianPolicy p = random_policy(3, 2, 5);
  learn::RolloutBatch b;
  b.resize(3, 2, 1);
  b.observations.col(0) << 0.3, -0.7, 1.1;
  b.actions.col(0) << 0.2, -0.1;
  b.advantages[0] = 1.7;
  b.returns[0] = 0.4;
  const auto out = p.forward(b.observations.col(0));
  double logp = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double z = (b.actions(i, 0) - out.mean[i]) / std::exp(out.log_std[i]);
    logp += -0.5 * z * z - out.log_std[i] - 0.5 * std::log(2.0 * std::numbers::pi);
  }
  double hand_worst = 0.0;
  for (double shift : {-0.5, -0.1, 0.0, 0.05, 0.3}) {
    b.log_probs[0] = logp + shift;
    const double ratio = std::exp(-shift);
    const double expected = std::min(ratio * 1.7, std::clamp(ratio, 0.8, 1.2) * 1.7);
    const std::vector<int> idx = {0};
    hand_worst = std::max(hand_worst,
                          std::abs(learn::ppo_loss(p, b, idx, learn::PpoConfig{}, nullptr, nullptr).surrogate - expected));
  }
  return {worst < 1e-4 && hand_worst < 1e-8,
          fmt("worst gradient relative error %.2e over %d parameters (< 1e-4); clipped objective error %.1e (< 1e-8)",
              worst, checked, hand_worst)};
}

// ---------------------------------------------------------------- 10 to 12

double mean_of_rows(const std::vector<learn::CurveRow>& rows, std::size_t begin, std::size_t end) {
  double s = 0.0;
  for (std::size_t i = begin; i < end; ++i) s += rows[i].mean_return;
  return s / static_cast<double>(end - begin);
}

harness::RunConfig learning_config(const std::string& env, const std::string& robot, envs::HumanMode human,
                                   std::int64_t steps, int workers) {
  harness::RunConfig c = harness::default_run_config(env);
  c.robot = robot;
  c.human = human;
  c.steps = steps;
  c.workers = workers;
  return c;
}

Outcome toy_learning(int workers) {
  const auto start = std::chrono::steady_clock::now();
  const harness::RunConfig c = learning_config(harness::kToyEnvId, "", envs::HumanMode::kStatic, 200000, workers);
  const auto env = harness::make_env(c);
  const learn::TrainResult r = learn::train(*env, harness::trainer_config(c));
  std::vector<learn::CurveRow> rows;
  for (const auto& row : r.curve) {
    if (row.episodes > 0) rows.push_back(row);
  }
  const std::size_t tenth = std::max<std::size_t>(1, rows.size() / 10);
  const double first = mean_of_rows(rows, 0, tenth);
  const double last = mean_of_rows(rows, rows.size() - tenth, rows.size());
  const learn::GaussianPolicy* pol = &r.policies[0];
  const learn::EvalResult e = learn::evaluate(*env, {pol}, 100, c.seed, workers);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool ok = last >= 1.5 * first && e.success_rate() >= 0.9 && secs < 600.0;
  return {ok, fmt("first-tenth return %.2f, final-tenth %.2f (ratio %.2f >= 1.5); eval success %.0f%% (>= 90%%); "
                  "%.0f s (< 600 s)",
                  first, last, last / first, 100.0 * e.success_rate(), secs)};
}

Outcome feeding_learning(int workers) {
  const auto start = std::chrono::steady_clock::now();
  const harness::RunConfig c = learning_config("feeding", "jaco", envs::HumanMode::kStatic, 500000, workers);
  const auto env = harness::make_env(c);
  const learn::TrainResult r = learn::train(*env, harness::trainer_config(c));
  const learn::EvalResult trained = learn::evaluate(*env, {&r.policies[0]}, 100, c.seed, workers);
  const learn::EvalResult random = learn::evaluate(*env, {}, 100, c.seed, workers);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {trained.success_rate() > random.success_rate() && secs < 3600.0,
          fmt("trained success %.0f%% vs random %.0f%% (mean reward %.1f vs %.1f); %.0f s (< 3600 s)",
              100.0 * trained.success_rate(), 100.0 * random.success_rate(), trained.mean_return(),
              random.mean_return(), secs)};
}

Outcome co_optimization(int workers) {
  const auto start = std::chrono::steady_clock::now();
  double success[2] = {0, 0}, reward[2] = {0, 0};
  int k = 0;
  for (envs::HumanMode mode : {envs::HumanMode::kStatic, envs::HumanMode::kActive}) {
    const harness::RunConfig c = learning_config("scratch_itch", "jaco", mode, 500000, workers);
    const auto env = harness::make_env(c);
    const learn::TrainResult r = learn::train(*env, harness::trainer_config(c));
    std::vector<const learn::GaussianPolicy*> ptrs;
    for (const auto& p : r.policies) ptrs.push_back(&p);
    const learn::EvalResult e = learn::evaluate(*env, ptrs, 100, c.seed, workers);
    success[k] = e.success_rate();
    reward[k] = e.mean_return();
    ++k;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {success[1] >= success[0] && secs < 7200.0,
          fmt("active-human success %.0f%% vs static %.0f%% (mean reward %.1f vs %.1f); %.0f s (< 7200 s)",
              100.0 * success[1], 100.0 * success[0], reward[1], reward[0], secs)};
}

// ----------------------------------------------------------------------- 13

// Random 10 -> 24 -> 1 network: a fragmented, arbitrary valid region.
learn::Mlp adversarial_net(std::uint64_t seed) {
  learn::Mlp net({human::kArmJoints, 24, 1});
  SeededRng rng(seed);
  net.initialize(rng, 3.0, 1.0);
  for (int l = 0; l < net.layer_count(); ++l) {
    for (int i = 0; i < net.bias(l).size(); ++i) net.bias(l)[i] = rng.uniform(-0.5, 0.5);
  }
  return net;
}

Outcome rollback_fuzz() {
  const auto start = std::chrono::steady_clock::now();
  const learn::Mlp net = adversarial_net(13);
  auto valid = [&](const Eigen::VectorXd& q) { return net.forward(q)[0] > 0.0; };

  // Rule level: random proposals around the current pose.
  SeededRng rng(13);
  const human::HumanModel h = human::generate_human(human::Sex::kFemale);
  const human::PoseValidityPredicate pred{"adversarial", [&](std::span<const double> q) {
                                            Eigen::VectorXd v(static_cast<Eigen::Index>(q.size()));
                                            for (std::size_t i = 0; i < q.size(); ++i) v[i] = q[i];
                                            return valid(v);
                                          }};
  Eigen::VectorXd q = Eigen::VectorXd::Zero(human::kArmJoints);
  while (!valid(q)) {
    for (int i = 0; i < q.size(); ++i) q[i] = rng.uniform(-1.0, 1.0);
  }
  int rule_bad = 0, rule_accepted = 0, rule_rejected = 0;
  for (int step = 0; step < 10000; ++step) {
    Eigen::VectorXd proposal = q;
    for (int i = 0; i < q.size(); ++i) proposal[i] += rng.uniform(-0.3, 0.3);
    const Eigen::VectorXd next = human::enforce_pose_validity(q, proposal, pred);
    (next == proposal ? rule_accepted : rule_rejected)++;
    if (!valid(next)) ++rule_bad;
    q = next;
  }

  // Environment level: the predicate loaded from a network file and applied
  // to both arms while an active person and the robot move randomly.
  const auto path = std::filesystem::temp_directory_path() / "adl_adversarial_predicate.adlnet";
  learn::write_network_file(path, learn::NetworkFile{"adversarial", net, std::nullopt, std::nullopt, std::nullopt});
  envs::EnvSpec spec = envs::EnvSpec::make(Task::kScratchItch, "jaco", envs::HumanMode::kActive);
  spec.pose_predicate = path;
  envs::AssistiveEnv env(spec);
  int env_bad = 0, env_accepted = 0, env_steps = 0;
  Eigen::VectorXd prev;
  learn::EvalHooks hooks;
  auto arms = [&](const envs::Environment& e) {
    const auto& a = dynamic_cast<const envs::AssistiveEnv&>(e);
    const Eigen::VectorXd& hq = a.state().scene.bodies.at(1).q;
    Eigen::VectorXd out(2 * human::kArmJoints);
    for (int s = 0; s < 2; ++s) {
      const human::ArmChain& arm = a.human().arm(s == 0);
      for (int i = 0; i < human::kArmJoints; ++i) out[s * human::kArmJoints + i] = hq[arm.dofs[i]];
    }
    return out;
  };
  hooks.on_reset = [&](int, std::uint64_t, const envs::Environment& e, const std::vector<Eigen::VectorXd>&) {
    prev = arms(e);
  };
  hooks.on_step = [&](int, const envs::Environment& e, const std::vector<Eigen::VectorXd>&, const envs::Transition&) {
    const Eigen::VectorXd now = arms(e);
    ++env_steps;
    for (int s = 0; s < 2; ++s) {
      const Eigen::VectorXd before = prev.segment(s * human::kArmJoints, human::kArmJoints);
      const Eigen::VectorXd after = now.segment(s * human::kArmJoints, human::kArmJoints);
      if (after == before) continue;  // rolled back or unmoved
      ++env_accepted;
      if (!valid(after)) ++env_bad;
    }
    prev = now;
  };
  learn::evaluate(env, {}, 50, 13, 1, hooks);
  std::filesystem::remove(path);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool ok = rule_bad == 0 && env_bad == 0 && rule_rejected > 0 && env_steps >= 10000;
  return {ok, fmt("rule fuzz: %d invalid of 10000 (%d accepted, %d rolled back); environment fuzz: %d invalid of %d "
                  "accepted arm moves over %d steps; %.1f s",
                  rule_bad, rule_accepted, rule_rejected, env_bad, env_accepted, env_steps, secs)};
}

}  // namespace
}  // namespace adl

int main(int argc, char** argv) {
  using namespace adl;
  CLI::App app{"Acceptance checks"};
  std::vector<int> only;
  int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  app.add_option("--only", only, "Run only these checks")->delimiter(',')->check(CLI::Range(1, 13));
  app.add_option("--workers", workers, "Threads for training and evaluation")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks = {
      {"default preference weights", default_weights},
      {"limitation formulas", limitation_formulas},
      {"Jacobians vs finite differences", jacobians},
      {"inverse kinematics", inverse_kinematics},
      {"JLWKI properties", jlwki_properties},
      {"base placement optimality", base_placement},
      {"reward composition", reward_composition},
      {"trace determinism", determinism},
      {"PPO gradients and objective", ppo_correctness},
      {"toy reach learning", [&] { return toy_learning(workers); }},
      {"feeding beats random", [&] { return feeding_learning(workers); }},
      {"co-optimization direction", [&] { return co_optimization(workers); }},
      {"joint-limit rollback", rollback_fuzz},
  };
  const std::set<int> selected(only.begin(), only.end());
  int failed = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    try {
      o = checks[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, checks[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
