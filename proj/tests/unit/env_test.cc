// Tests for the assistive environments and the toy reaching task.

#include "adl/envs/env.h"

#include <cmath>
#include <string>

#include <gtest/gtest.h>

#include "adl/core/error.h"
#include "adl/core/rng.h"
#include "adl/envs/toy.h"

namespace adl::envs {
namespace {

Eigen::VectorXd random_action(int dim, SeededRng& rng) {
  Eigen::VectorXd a(dim);
  for (int i = 0; i < dim; ++i) a[i] = rng.uniform(-1.0, 1.0);
  return a;
}

TEST(EnvSpecTest, IdAndModes) {
  const EnvSpec s = EnvSpec::make(Task::kFeeding, "jaco", HumanMode::kActive);
  EXPECT_EQ(s.id(), "feeding/jaco/active");
  EXPECT_EQ(human_mode_from_string("static"), HumanMode::kStatic);
  EXPECT_THROW(human_mode_from_string("asleep"), ParameterError);
}

TEST(EnvTest, FeedingJacoDimensions) {
  AssistiveEnv env(EnvSpec::make(Task::kFeeding, "jaco", HumanMode::kActive));
  EXPECT_EQ(env.agent_count(), 2);
  EXPECT_EQ(env.action_dim(0), 7);
  EXPECT_EQ(env.action_dim(1), 4);
  EXPECT_EQ(env.episode_length(), 200);
}

TEST(EnvTest, ObservationLayoutsMatchDimensions) {
  for (Task task : kAllTasks) {
    for (const std::string robot : {"jaco", "baxter"}) {
      const EnvSpec spec = EnvSpec::make(task, robot, HumanMode::kActive);
      AssistiveEnv env(spec);
      int robot_size = 0, human_size = 0;
      for (const ObservationField& f : robot_observation_layout(spec)) robot_size += f.size;
      for (const ObservationField& f : human_observation_layout(spec)) human_size += f.size;
      EXPECT_EQ(robot_size, env.observation_dim(0)) << spec.id();
      EXPECT_EQ(human_size, env.observation_dim(1)) << spec.id();
      const auto obs = env.reset(1);
      ASSERT_EQ(obs.size(), 2u);
      EXPECT_EQ(obs[0].size(), robot_size) << spec.id();
      EXPECT_EQ(obs[1].size(), human_size) << spec.id();
      EXPECT_TRUE(obs[0].allFinite()) << spec.id();
    }
  }
}

TEST(EnvTest, SameSeedGivesIdenticalInitialState) {
  AssistiveEnv a(EnvSpec::make(Task::kScratchItch, "pr2"));
  AssistiveEnv b(EnvSpec::make(Task::kScratchItch, "pr2"));
  const auto oa = a.reset(42);
  const auto ob = b.reset(42);
  EXPECT_EQ(oa[0], ob[0]);
  for (int i = 0; i < 2; ++i) {
    EXPECT_EQ(a.state().scene.bodies[i].q, b.state().scene.bodies[i].q);
    EXPECT_EQ(a.state().scene.bodies[i].base.translation(), b.state().scene.bodies[i].base.translation());
  }
  const auto oc = a.reset(43);
  EXPECT_NE(oa[0], oc[0]);
}

TEST(EnvTest, StartOffsetWithinFiveCentimetres) {
  AssistiveEnv env(EnvSpec::make(Task::kFeeding, "jaco"));
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    env.reset(seed);
    const Vec3 offset = env.tool_tip() - env.state().start_nominal;
    EXPECT_LE(offset.cwiseAbs().maxCoeff(), kStartPerturbation + 1e-9) << "seed " << seed;
  }
}

TEST(EnvTest, PersonSamplerIsBalanced) {
  AssistiveEnv env(EnvSpec::make(Task::kFeeding, "jaco"));
  int male = 0;
  int kinds[3] = {0, 0, 0};
  const int n = 1000;
  for (int seed = 0; seed < n; ++seed) {
    env.reset(static_cast<std::uint64_t>(seed));
    male += env.state().sex == human::Sex::kMale ? 1 : 0;
    ++kinds[static_cast<int>(env.state().limitation.kind)];
  }
  const double e2 = n / 2.0, e3 = n / 3.0;
  const double chi_sex = 2 * (male - e2) * (male - e2) / e2;
  double chi_kind = 0.0;
  for (int k : kinds) chi_kind += (k - e3) * (k - e3) / e3;
  EXPECT_LT(chi_sex, 10.83);   // 1 dof, p = 0.001
  EXPECT_LT(chi_kind, 13.82);  // 2 dof, p = 0.001
}

TEST(EnvTest, ZeroActionStepHasNoParticleEvents) {
  AssistiveEnv env(EnvSpec::make(Task::kFeeding, "jaco"));
  env.reset(3);
  const Transition tr = env.step({Eigen::VectorXd::Zero(7)});
  EXPECT_EQ(tr.info.captured, 0);
  EXPECT_EQ(tr.info.spilled, 0);
  EXPECT_EQ(tr.reward.costs[reward::kVelocity], 0.0);
  EXPECT_EQ(tr.reward.total, reward::total_reward(tr.reward.task, tr.reward.preference));
}

TEST(EnvTest, EpisodeEndsAfterTwoHundredSteps) {
  AssistiveEnv env(EnvSpec::make(Task::kFeeding, "jaco"));
  env.reset(0);
  for (int t = 1; t <= 200; ++t) {
    const Transition tr = env.step({Eigen::VectorXd::Zero(7)});
    EXPECT_EQ(tr.done, t == 200) << "step " << t;
  }
  try {
    env.step({Eigen::VectorXd::Zero(7)});
    FAIL() << "step after done must throw";
  } catch (const StepError& e) {
    EXPECT_NE(std::string(e.what()).find("episode finished"), std::string::npos);
  }
}

TEST(EnvTest, RejectsMalformedActions) {
  AssistiveEnv env(EnvSpec::make(Task::kFeeding, "jaco"));
  EXPECT_THROW(env.step({Eigen::VectorXd::Zero(7)}), StepError);  // before reset
  env.reset(0);
  EXPECT_THROW(env.step({Eigen::VectorXd::Zero(6)}), StepError);
  Eigen::VectorXd a = Eigen::VectorXd::Zero(7);
  a[2] = std::nan("");
  EXPECT_THROW(env.step({a}), StepError);
  EXPECT_THROW(env.step({}), StepError);
}

TEST(EnvTest, RewardCompositionHoldsEveryStep) {
  AssistiveEnv env(EnvSpec::make(Task::kDrinking, "jaco", HumanMode::kActive));
  env.reset(5);
  SeededRng rng(6);
  for (int t = 0; t < 50; ++t) {
    const Transition tr = env.step({random_action(7, rng), random_action(4, rng)});
    EXPECT_EQ(tr.reward.preference, reward::human_preference_reward(tr.reward.costs, env.preferences()));
    EXPECT_EQ(tr.reward.total, tr.reward.task + tr.reward.preference);
  }
}

TEST(EnvTest, ParticlesAreConservedDuringRandomEpisode) {
  AssistiveEnv env(EnvSpec::make(Task::kDrinking, "jaco"));
  env.reset(7);
  const int total = env.state().particles.counts().total();
  ASSERT_GT(total, 0);
  SeededRng rng(8);
  for (int t = 0; t < 200; ++t) {
    const Transition tr = env.step({random_action(7, rng)});
    EXPECT_EQ(tr.info.particles.total(), total);
  }
}

// Shifting the whole world leaves base-relative observations unchanged.
TEST(EnvTest, ObservationsAreTranslationInvariant) {
  EnvSpec s0 = EnvSpec::make(Task::kFeeding, "jaco");
  EnvSpec s1 = s0;
  s1.world_origin = Vec3(3.0, -2.0, 0.0);
  AssistiveEnv a(s0), b(s1);
  auto oa = a.reset(11);
  auto ob = b.reset(11);
  EXPECT_LT((oa[0] - ob[0]).cwiseAbs().maxCoeff(), 1e-6);
  SeededRng rng(12);
  for (int t = 0; t < 20; ++t) {
    const Eigen::VectorXd act = random_action(7, rng);
    oa = a.step({act}).observations;
    ob = b.step({act}).observations;
    EXPECT_LT((oa[0] - ob[0]).cwiseAbs().maxCoeff(), 1e-6) << "step " << t;
  }
}

TEST(EnvTest, SuccessPredicates) {
  AssistiveEnv feed(EnvSpec::make(Task::kFeeding, "jaco"));
  feed.reset(1);
  EXPECT_FALSE(feed.task_success());
  for (Particle& p : feed.mutable_state().particles.particles) p.state = ParticleState::kCaptured;
  EXPECT_TRUE(feed.task_success());

  AssistiveEnv bath(EnvSpec::make(Task::kBedBathing, "jaco"));
  bath.reset(1);
  EXPECT_EQ(bath.state().markers.wiped_count(), 0);
  EXPECT_FALSE(bath.task_success());

  AssistiveEnv itch(EnvSpec::make(Task::kScratchItch, "jaco"));
  itch.reset(1);
  itch.mutable_state().itch.rub = std::nextafter(kItchSuccessRub, 0.0);
  EXPECT_FALSE(itch.task_success());
  itch.mutable_state().itch.rub = kItchSuccessRub;
  EXPECT_TRUE(itch.task_success());
}

TEST(EnvTest, ResetIsRepeatableAfterSteps) {
  AssistiveEnv env(EnvSpec::make(Task::kDressing, "jaco"));
  const auto first = env.reset(9);
  SeededRng rng(10);
  for (int t = 0; t < 10; ++t) env.step({random_action(7, rng)});
  const auto again = env.reset(9);
  EXPECT_EQ(first[0], again[0]);
}

TEST(EnvTest, CloneStartsFresh) {
  AssistiveEnv env(EnvSpec::make(Task::kFeeding, "jaco"));
  const auto a = env.reset(4);
  auto copy = env.clone();
  EXPECT_EQ(copy->id(), env.id());
  EXPECT_EQ(copy->reset(4)[0], a[0]);
}

TEST(ToyReachTest, ResetAndRewardRules) {
  ToyReachEnv env;
  const auto obs = env.reset(3);
  ASSERT_EQ(obs[0].size(), 8);
  EXPECT_GE(env.target().norm(), 0.2);
  EXPECT_LE(env.target().norm(), 0.9);
  const Transition tr = env.step({Eigen::VectorXd::Zero(2)});
  const double d = env.distance();
  EXPECT_DOUBLE_EQ(tr.reward.total, env.config().distance_weight * (2.0 - d) +
                                        (d < env.config().reach_radius ? env.config().reach_bonus : 0.0));
  EXPECT_GT(tr.reward.total, 0.0);
}

TEST(ToyReachTest, ActionsAreClippedAndScaled) {
  ToyReachEnv env;
  env.reset(5);
  const Eigen::Vector2d q0 = env.q();
  Eigen::VectorXd a(2);
  a << 10.0, -0.5;
  env.step({a});
  EXPECT_NEAR(env.q()[0], std::remainder(q0[0] + env.config().action_scale, 2 * std::numbers::pi), 1e-12);
  EXPECT_NEAR(env.q()[1], std::remainder(q0[1] - 0.5 * env.config().action_scale, 2 * std::numbers::pi), 1e-12);
}

TEST(ToyReachTest, EpisodeTruncatesAtLength) {
  ToyReachEnv env;
  env.reset(0);
  Transition tr;
  for (int t = 0; t < env.episode_length(); ++t) tr = env.step({Eigen::VectorXd::Zero(2)});
  EXPECT_TRUE(tr.done);
  EXPECT_TRUE(tr.truncated);
  EXPECT_THROW(env.step({Eigen::VectorXd::Zero(2)}), StepError);
}

}  // namespace
}  // namespace adl::envs
