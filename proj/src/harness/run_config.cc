#include "adl/harness/run_config.h"

#include <algorithm>
#include <fstream>
#include <set>

#include "adl/core/error.h"
#include "adl/core/task.h"
#include "adl/envs/toy.h"
#include "adl/robots/robot.h"

namespace adl::harness {
namespace {

using nlohmann::json;

// Reads optional members of one JSON object, rejecting unknown keys.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ParameterError(where_ + ": expected an object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      if constexpr (std::is_same_v<T, std::uint64_t> || std::is_same_v<T, int> ||
                    std::is_same_v<T, std::int64_t>) {
        if (!it->is_number_integer()) throw ParameterError("expected an integer");
        if constexpr (std::is_same_v<T, std::uint64_t>) {
          if (!it->is_number_unsigned()) throw ParameterError("expected a non-negative integer");
        }
      } else if constexpr (std::is_same_v<T, double>) {
        if (!it->is_number()) throw ParameterError("expected a number");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!it->is_string()) throw ParameterError("expected a string");
      }
      out = it->get<T>();
    } catch (const std::exception& e) {
      throw ParameterError(where_ + "." + key + ": " + e.what());
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() || it->is_null() ? nullptr : &*it;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ParameterError(where_ + ": unknown key '" + it.key() + "'");
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

std::optional<reward::CostArray> read_costs(const json* j, const char* name) {
  if (j == nullptr) return std::nullopt;
  if (!j->is_array() || j->size() != reward::kCostCount) {
    throw ParameterError(std::string("preferences.") + name + ": expected an array of 7 numbers");
  }
  reward::CostArray a{};
  for (int i = 0; i < reward::kCostCount; ++i) {
    if (!(*j)[i].is_number()) throw ParameterError(std::string("preferences.") + name + ": expected numbers");
    a[i] = (*j)[i].get<double>();
  }
  return a;
}

json costs_json(const std::optional<reward::CostArray>& a) {
  if (!a) return nullptr;
  return json(*a);
}

}  // namespace

json to_json(const RunConfig& c) {
  json policies = json::array();
  for (const auto& p : c.policies) policies.push_back(p.generic_string());
  return json{
      {"version", kRunConfigVersion},
      {"env", c.env},
      {"robot", c.robot},
      {"human", envs::to_string(c.human)},
      {"seed", c.seed},
      {"episode_length", c.episode_length},
      {"trainer",
       {{"actors", c.actors},
        {"steps", c.steps},
        {"rollout_length", c.rollout_length},
        {"workers", c.workers},
        {"initial_log_std", c.initial_log_std},
        {"learning_rate", c.ppo.learning_rate},
        {"clip", c.ppo.clip},
        {"gamma", c.ppo.gamma},
        {"lambda", c.ppo.lambda},
        {"epochs", c.ppo.epochs},
        {"minibatches", c.ppo.minibatches},
        {"value_coef", c.ppo.value_coef},
        {"entropy_coef", c.ppo.entropy_coef},
        {"max_grad_norm", c.ppo.max_grad_norm}}},
      {"preferences", {{"alpha", costs_json(c.alpha)}, {"omega", costs_json(c.omega)}}},
      {"eval", {{"episodes", c.episodes}}},
      {"policies", policies},
      {"out", c.out.generic_string()},
  };
}

learn::PpoConfig default_ppo_config(const std::string& env) {
  learn::PpoConfig p;
  if (env == kToyEnvId) {
    p.gamma = 0.95;
    p.minibatches = 16;
  }
  return p;
}

RunConfig default_run_config(const std::string& env) {
  RunConfig c;
  c.env = env;
  c.ppo = default_ppo_config(env);
  return c;
}

RunConfig run_config_from_json(const json& j) {
  RunConfig c;
  Reader r(j, "config");
  int version = kRunConfigVersion;
  r.read("version", version);
  if (version != kRunConfigVersion) {
    throw ParameterError("config: unsupported version " + std::to_string(version));
  }
  r.read("env", c.env);
  c.ppo = default_ppo_config(c.env);
  r.read("robot", c.robot);
  std::string human = envs::to_string(c.human);
  r.read("human", human);
  c.human = envs::human_mode_from_string(human);
  r.read("seed", c.seed);
  r.read("episode_length", c.episode_length);
  if (const json* t = r.child("trainer")) {
    Reader tr(*t, "config.trainer");
    tr.read("actors", c.actors);
    tr.read("steps", c.steps);
    tr.read("rollout_length", c.rollout_length);
    tr.read("workers", c.workers);
    tr.read("initial_log_std", c.initial_log_std);
    tr.read("learning_rate", c.ppo.learning_rate);
    tr.read("clip", c.ppo.clip);
    tr.read("gamma", c.ppo.gamma);
    tr.read("lambda", c.ppo.lambda);
    tr.read("epochs", c.ppo.epochs);
    tr.read("minibatches", c.ppo.minibatches);
    tr.read("value_coef", c.ppo.value_coef);
    tr.read("entropy_coef", c.ppo.entropy_coef);
    tr.read("max_grad_norm", c.ppo.max_grad_norm);
    tr.finish();
  }
  if (const json* p = r.child("preferences")) {
    Reader pr(*p, "config.preferences");
    c.alpha = read_costs(pr.child("alpha"), "alpha");
    c.omega = read_costs(pr.child("omega"), "omega");
    pr.finish();
  }
  if (const json* e = r.child("eval")) {
    Reader er(*e, "config.eval");
    er.read("episodes", c.episodes);
    er.finish();
  }
  if (const json* p = r.child("policies")) {
    if (!p->is_array()) throw ParameterError("config.policies: expected an array of paths");
    for (const json& s : *p) {
      if (!s.is_string()) throw ParameterError("config.policies: expected an array of paths");
      c.policies.emplace_back(s.get<std::string>());
    }
  }
  std::string out = c.out.generic_string();
  r.read("out", out);
  c.out = out;
  r.finish();
  validate(c);
  return c;
}

void save_run_config(const std::filesystem::path& path, const RunConfig& c) {
  std::ofstream f(path);
  if (!f) throw LoadError("cannot write " + path.string());
  f << to_json(c).dump(2) << '\n';
  if (!f) throw LoadError("failed writing " + path.string());
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw LoadError("cannot open " + path.string());
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
  return run_config_from_json(j);
}

void validate(const RunConfig& c) {
  if (c.env != kToyEnvId) {
    task_from_string(c.env);
    const auto& names = robots::robot_names();
    if (std::find(names.begin(), names.end(), c.robot) == names.end()) {
      throw ParameterError("unknown robot '" + c.robot + "'");
    }
  } else if (c.human == envs::HumanMode::kActive) {
    throw ParameterError("toy_reach has no human");
  }
  if (c.episode_length <= 0) throw ParameterError("episode_length must be positive");
  if (c.actors <= 0 || c.steps < 0 || c.rollout_length <= 0 || c.workers <= 0) {
    throw ParameterError("trainer: actors, rollout_length and workers must be positive; steps non-negative");
  }
  if (c.ppo.epochs <= 0 || c.ppo.minibatches <= 0) throw ParameterError("trainer: epochs and minibatches must be positive");
  if (c.episodes < 0) throw ParameterError("eval.episodes must be non-negative");
}

std::unique_ptr<envs::Environment> make_env(const RunConfig& c) {
  validate(c);
  if (c.env == kToyEnvId) return std::make_unique<envs::ToyReachEnv>();
  envs::EnvSpec spec = envs::EnvSpec::make(task_from_string(c.env), c.robot, c.human);
  spec.episode_length = c.episode_length;
  if (c.alpha || c.omega) {
    reward::PreferenceConfig p = reward::default_preferences(spec.task);
    if (c.alpha) p.alpha = *c.alpha;
    if (c.omega) p.omega = *c.omega;
    spec.preferences = p;
  }
  return envs::make_environment(spec);
}

learn::TrainerConfig trainer_config(const RunConfig& c) {
  learn::TrainerConfig t;
  t.actors = c.actors;
  t.total_steps = c.steps;
  t.rollout_length = c.rollout_length;
  t.workers = c.workers;
  t.seed = c.seed;
  t.initial_log_std = c.initial_log_std;
  t.ppo = c.ppo;
  return t;
}

std::vector<learn::GaussianPolicy> load_policies(const RunConfig& c, const envs::Environment& env) {
  std::vector<learn::GaussianPolicy> out;
  if (c.policies.empty()) return out;
  if (static_cast<int>(c.policies.size()) != env.agent_count()) {
    throw ParameterError(env.id() + " needs " + std::to_string(env.agent_count()) + " policies, got " +
                         std::to_string(c.policies.size()));
  }
  for (std::size_t k = 0; k < c.policies.size(); ++k) {
    learn::GaussianPolicy p = learn::GaussianPolicy::load(c.policies[k]);
    const int agent = static_cast<int>(k);
    if (p.observation_dim() != env.observation_dim(agent) || p.action_dim() != env.action_dim(agent)) {
      throw ParameterError(c.policies[k].string() + " does not match the dimensions of agent " +
                           std::to_string(agent) + " of " + env.id());
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace adl::harness
