#ifndef ADL_HARNESS_RUN_CONFIG_H_
#define ADL_HARNESS_RUN_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "adl/envs/env.h"
#include "adl/learn/trainer.h"
#include "adl/reward/preference.h"

namespace adl::harness {

inline constexpr int kRunConfigVersion = 1;
inline constexpr const char* kToyEnvId = "toy_reach";

// Everything needed to rebuild an environment, train on it and evaluate it.
// Serialized as JSON (schema in docs/formats.md); unknown keys are rejected.
struct RunConfig {
  std::string env = "feeding";  // a task id or "toy_reach"
  std::string robot = "jaco";   // ignored by toy_reach
  envs::HumanMode human = envs::HumanMode::kStatic;
  std::uint64_t seed = 0;
  int episode_length = envs::kEpisodeLength;  // assistive tasks only

  // Trainer overrides.
  int actors = 8;
  std::int64_t steps = 200000;
  int rollout_length = learn::kRolloutLength;
  int workers = 1;
  double initial_log_std = -0.5;
  learn::PpoConfig ppo;

  // Preference overrides; the task defaults are used when absent.
  std::optional<reward::CostArray> alpha;
  std::optional<reward::CostArray> omega;

  int episodes = 100;                           // evaluation episodes
  std::vector<std::filesystem::path> policies;  // one per agent, robot first
  std::filesystem::path out = "run";            // output directory

  bool operator==(const RunConfig&) const = default;
};

// PPO settings used when a configuration does not give them. The toy task
// uses a shorter discount horizon (its episodes last 50 steps) and larger
// minibatches than the assistive tasks.
learn::PpoConfig default_ppo_config(const std::string& env);
// Defaults for every field, with the PPO settings of `env`.
RunConfig default_run_config(const std::string& env);

nlohmann::json to_json(const RunConfig& c);
// Throws ParameterError for unknown keys, wrong types or invalid values.
// Trainer keys that are absent take the defaults of the configured env.
RunConfig run_config_from_json(const nlohmann::json& j);

void save_run_config(const std::filesystem::path& path, const RunConfig& c);
RunConfig load_run_config(const std::filesystem::path& path);

// Throws ParameterError for an unknown env or robot.
void validate(const RunConfig& c);
std::unique_ptr<envs::Environment> make_env(const RunConfig& c);
learn::TrainerConfig trainer_config(const RunConfig& c);

// Policies named by the config (empty when none are given). Throws
// ParameterError when the count or dimensions do not match the environment.
std::vector<learn::GaussianPolicy> load_policies(const RunConfig& c, const envs::Environment& env);

}  // namespace adl::harness

#endif  // ADL_HARNESS_RUN_CONFIG_H_
