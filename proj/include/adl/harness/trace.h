#ifndef ADL_HARNESS_TRACE_H_
#define ADL_HARNESS_TRACE_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "adl/core/transform.h"
#include "adl/envs/env.h"
#include "adl/harness/run_config.h"
#include "adl/learn/policy.h"
#include "adl/reward/preference.h"

namespace adl::harness {

inline constexpr int kTraceVersion = 1;

// State and outcome of one environment step.
struct TraceFrame {
  std::int64_t t = 0;  // step index after the step, 1-based
  std::vector<Eigen::VectorXd> actions;
  Eigen::VectorXd robot_q;
  Eigen::VectorXd human_q;  // empty without a person
  // Tool frame; kept as raw components so decoding is bit-exact.
  Vec3 tool_position = Vec3::Zero();
  Quat tool_orientation = Quat::Identity();
  reward::RewardBreakdown reward;
  envs::StepInfo info;  // events and contact summary
  std::vector<Eigen::VectorXd> observations;
  bool done = false;
  bool truncated = false;
};

struct TraceHeader {
  RunConfig config;
  std::string env_id;
  int episode = 0;
  std::uint64_t reset_seed = 0;
  std::vector<Eigen::VectorXd> observations;  // returned by reset
};

struct Trace {
  TraceHeader header;
  std::vector<TraceFrame> frames;  // ordered by t
  double total_reward() const;
};

// Frame of the step just taken by `env`.
TraceFrame make_frame(const envs::Environment& env, const std::vector<Eigen::VectorXd>& actions,
                      const envs::Transition& transition);

// Canonical JSON encodings. Doubles are written with 17 significant digits,
// so decoding reproduces every value bit for bit.
nlohmann::json to_json(const TraceHeader& h);
nlohmann::json to_json(const TraceFrame& f);
TraceHeader header_from_json(const nlohmann::json& j);
TraceFrame frame_from_json(const nlohmann::json& j);

// JSON Lines: the header record, then one record per frame.
void write_trace(std::ostream& out, const Trace& trace);
void write_trace(const std::filesystem::path& path, const Trace& trace);
Trace read_trace(std::istream& in);
Trace read_trace(const std::filesystem::path& path);

// Records episode `episode` of an evaluation with the given policies (random
// actions when empty), using the evaluation seed schedule.
Trace record_episode(const RunConfig& config, const std::vector<const learn::GaussianPolicy*>& policies,
                     int episode = 0);

struct ReplayResult {
  int frames = 0;       // frames compared
  int divergences = 0;  // frames whose re-simulated record differs
  int first_divergence = -1;  // t of the first differing frame
  bool initial_match = true;  // reset observations agree
  std::string message;
  bool ok() const { return divergences == 0 && initial_match; }
};

// Rebuilds the environment from the header, resets with the recorded seed,
// re-applies the recorded actions and compares every frame's canonical
// encoding.
ReplayResult replay(const Trace& trace);

}  // namespace adl::harness

#endif  // ADL_HARNESS_TRACE_H_
