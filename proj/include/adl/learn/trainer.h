#ifndef ADL_LEARN_TRAINER_H_
#define ADL_LEARN_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "adl/envs/env.h"
#include "adl/learn/policy.h"
#include "adl/learn/ppo.h"

namespace adl::learn {

inline constexpr int kRolloutLength = 200;  // steps per actor per update

struct TrainerConfig {
  int actors = 8;
  std::int64_t total_steps = 200000;  // environment steps summed over actors
  int rollout_length = kRolloutLength;
  int workers = 1;  // threads collecting rollouts; never changes the result
  std::uint64_t seed = 0;
  double initial_log_std = -0.5;
  PpoConfig ppo;
  // Called after every update (progress reporting).
  std::function<void(const struct CurveRow&)> on_update;
};

struct CurveRow {
  int update = 0;
  std::int64_t steps = 0;     // cumulative environment steps
  double mean_return = 0.0;   // over episodes finished during this update
  double kl = 0.0;
  double success_rate = 0.0;  // over the same episodes
  int episodes = 0;
  bool aborted = false;
};

struct TrainResult {
  // One policy per agent of the environment: robot first, then the person
  // when the environment has an active human (co-optimization).
  std::vector<GaussianPolicy> policies;
  std::vector<CurveRow> curve;
  std::int64_t steps = 0;
  int aborted_updates = 0;
  int reset_failures = 0;
  double seconds = 0.0;
};

TrainResult train(const envs::Environment& prototype, const TrainerConfig& config);

// CSV with header "update,steps,mean_return,kl".
void write_curve(const std::filesystem::path& path, const std::vector<CurveRow>& curve);

struct EvalResult {
  std::vector<double> returns;
  std::vector<bool> successes;  // success flag of the final step
  int reset_failures = 0;
  double mean_return() const;
  double success_rate() const;
};

// Observers for evaluation episodes, called from the worker running the
// episode; distinct episodes may be reported concurrently.
struct EvalHooks {
  std::function<void(int episode, std::uint64_t reset_seed, const envs::Environment& env,
                     const std::vector<Eigen::VectorXd>& observations)>
      on_reset;
  std::function<void(int episode, const envs::Environment& env, const std::vector<Eigen::VectorXd>& actions,
                     const envs::Transition& transition)>
      on_step;
};

// Reset seed of evaluation episode `episode` on its `attempt`-th try.
std::uint64_t evaluation_reset_seed(std::uint64_t seed, int episode, int attempt);

struct EpisodeOutcome {
  double total_reward = 0.0;
  bool success = false;
  int reset_failures = 0;
};

// Evaluation episode `episode` on `env` (which it resets), as run by
// evaluate().
EpisodeOutcome run_evaluation_episode(envs::Environment& env, const std::vector<const GaussianPolicy*>& policies,
                                      int episode, std::uint64_t seed, const EvalHooks& hooks = {});

// Runs `episodes` episodes; episode i resets with
// evaluation_reset_seed(seed, i, 0) (later attempts are tried if a reset
// fails). With policies given (one per agent) actions are the policy means;
// with none they are uniform in [-1, 1].
EvalResult evaluate(const envs::Environment& prototype, const std::vector<const GaussianPolicy*>& policies,
                    int episodes, std::uint64_t seed, int workers = 1, const EvalHooks& hooks = {});

}  // namespace adl::learn

#endif  // ADL_LEARN_TRAINER_H_
