#include "adl/learn/trainer.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <thread>

#include "adl/core/error.h"

namespace adl::learn {
namespace {

constexpr int kMaxResetTries = 100;

void run_parallel(int count, int workers, const std::function<void(int)>& fn) {
  workers = std::clamp(workers, 1, std::max(count, 1));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (int i = w; i < count; i += workers) fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Resets with the next usable episode seed; counts failures.
std::vector<Eigen::VectorXd> reset_next(envs::Environment& env, std::uint64_t stream, std::uint64_t& episode,
                                        int& failures) {
  for (int attempt = 0; attempt < kMaxResetTries; ++attempt) {
    const std::uint64_t seed = mix_seed(stream, episode++);
    try {
      return env.reset(seed);
    } catch (const ResetError&) {
      ++failures;
    }
  }
  throw ResetError("no feasible episode start in " + std::to_string(kMaxResetTries) + " consecutive seeds");
}

struct Actor {
  std::unique_ptr<envs::Environment> env;
  SeededRng rng{0};
  std::uint64_t stream = 0;
  std::uint64_t episode = 0;
  std::vector<Eigen::VectorXd> obs;
  double episode_return = 0.0;
  int reset_failures = 0;
};

struct ActorRollout {
  std::vector<RolloutBatch> per_agent;
  std::vector<Eigen::MatrixXd> raw_obs;
  std::vector<double> bootstrap;
  std::vector<double> returns;
  std::vector<bool> successes;
};

}  // namespace

TrainResult train(const envs::Environment& prototype, const TrainerConfig& cfg) {
  if (cfg.actors <= 0 || cfg.rollout_length <= 0 || cfg.total_steps <= 0) {
    throw ParameterError("train: actors, rollout length and step budget must be positive");
  }
  const auto t0 = std::chrono::steady_clock::now();
  const int agents = prototype.agent_count();
  TrainResult result;
  std::vector<Adam> popt, vopt;
  SeededRng init(mix_seed(cfg.seed, 0x1417));
  for (int a = 0; a < agents; ++a) {
    GaussianPolicy p(prototype.observation_dim(a), prototype.action_dim(a));
    p.initialize(init, cfg.initial_log_std);
    popt.emplace_back(p.policy_parameter_count(), cfg.ppo.learning_rate);
    vopt.emplace_back(p.critic().parameter_count(), cfg.ppo.learning_rate);
    result.policies.push_back(std::move(p));
  }

  std::vector<Actor> actors(cfg.actors);
  run_parallel(cfg.actors, cfg.workers, [&](int i) {
    Actor& a = actors[i];
    a.env = prototype.clone();
    a.rng = SeededRng(mix_seed(cfg.seed, 2 * static_cast<std::uint64_t>(i) + 1));
    a.stream = mix_seed(cfg.seed, 2 * static_cast<std::uint64_t>(i) + 2);
    a.obs = reset_next(*a.env, a.stream, a.episode, a.reset_failures);
  });

  const std::int64_t per_update = static_cast<std::int64_t>(cfg.actors) * cfg.rollout_length;
  const int updates = static_cast<int>((cfg.total_steps + per_update - 1) / per_update);
  double last_return = std::numeric_limits<double>::quiet_NaN();
  double last_success = 0.0;
  for (int u = 0; u < updates; ++u) {
    std::vector<ActorRollout> rolls(cfg.actors);
    run_parallel(cfg.actors, cfg.workers, [&](int i) {
      Actor& a = actors[i];
      ActorRollout& r = rolls[i];
      const int T = cfg.rollout_length;
      r.per_agent.resize(agents);
      r.raw_obs.resize(agents);
      r.bootstrap.resize(agents);
      for (int k = 0; k < agents; ++k) {
        r.per_agent[k].resize(result.policies[k].observation_dim(), result.policies[k].action_dim(), T);
        r.raw_obs[k].resize(result.policies[k].observation_dim(), T);
      }
      std::vector<Eigen::VectorXd> act(agents);
      for (int t = 0; t < T; ++t) {
        for (int k = 0; k < agents; ++k) {
          const GaussianPolicy& p = result.policies[k];
          const GaussianPolicy::Output out = p.forward(a.obs[k]);
          act[k] = p.sample(out, a.rng);
          RolloutBatch& b = r.per_agent[k];
          b.observations.col(t) = p.normalize(a.obs[k]);
          r.raw_obs[k].col(t) = a.obs[k];
          b.actions.col(t) = act[k];
          b.log_probs[t] = gaussian_log_prob(out.mean, out.log_std, act[k]);
          b.values[t] = out.value;
        }
        const envs::Transition tr = a.env->step(act);
        a.episode_return += tr.reward.total;
        for (int k = 0; k < agents; ++k) {
          r.per_agent[k].rewards[t] = tr.reward.total;
          r.per_agent[k].dones[t] = !tr.done ? kContinuing : tr.truncated ? kTruncated : kTerminal;
          if (tr.done && tr.truncated) {
            r.per_agent[k].truncation_values[t] = result.policies[k].forward(tr.observations[k]).value;
          }
        }
        if (tr.done) {
          r.returns.push_back(a.episode_return);
          r.successes.push_back(tr.info.success);
          a.episode_return = 0.0;
          a.obs = reset_next(*a.env, a.stream, a.episode, a.reset_failures);
        } else {
          a.obs = tr.observations;
        }
      }
      for (int k = 0; k < agents; ++k) {
        r.bootstrap[k] = result.policies[k].forward(a.obs[k]).value;
        compute_gae(r.per_agent[k], 0, T, r.bootstrap[k], cfg.ppo.gamma, cfg.ppo.lambda);
      }
    });

    CurveRow row;
    row.update = u;
    result.steps += per_update;
    row.steps = result.steps;
    double sum = 0.0;
    int wins = 0;
    for (const ActorRollout& r : rolls) {
      for (std::size_t e = 0; e < r.returns.size(); ++e) {
        sum += r.returns[e];
        wins += r.successes[e] ? 1 : 0;
        ++row.episodes;
      }
    }
    if (row.episodes > 0) {
      last_return = sum / row.episodes;
      last_success = static_cast<double>(wins) / row.episodes;
    }
    row.mean_return = last_return;
    row.success_rate = last_success;

    double kl = 0.0;
    for (int k = 0; k < agents; ++k) {
      RolloutBatch batch;
      Eigen::MatrixXd raw(result.policies[k].observation_dim(), per_update);
      for (int i = 0; i < cfg.actors; ++i) {
        batch.append(rolls[i].per_agent[k]);
        raw.middleCols(static_cast<Eigen::Index>(i) * cfg.rollout_length, cfg.rollout_length) = rolls[i].raw_obs[k];
      }
      normalize_advantages(batch);
      SeededRng update_rng(mix_seed(mix_seed(cfg.seed, 0x5eed + static_cast<std::uint64_t>(k)),
                                    static_cast<std::uint64_t>(u)));
      const PpoStats stats = ppo_update(result.policies[k], popt[k], vopt[k], batch, cfg.ppo, update_rng);
      if (stats.aborted) {
        row.aborted = true;
      } else {
        kl = std::max(kl, stats.approx_kl);
      }
      result.policies[k].normalizer().update(raw);
    }
    row.kl = kl;
    if (row.aborted) ++result.aborted_updates;
    result.curve.push_back(row);
    if (cfg.on_update) cfg.on_update(row);
  }
  for (const Actor& a : actors) result.reset_failures += a.reset_failures;
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

void write_curve(const std::filesystem::path& path, const std::vector<CurveRow>& curve) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write curve file " + path.string());
  out.precision(10);
  out << "update,steps,mean_return,kl\n";
  for (const CurveRow& r : curve) out << r.update << ',' << r.steps << ',' << r.mean_return << ',' << r.kl << '\n';
}

double EvalResult::mean_return() const {
  if (returns.empty()) return 0.0;
  double s = 0.0;
  for (double r : returns) s += r;
  return s / static_cast<double>(returns.size());
}

double EvalResult::success_rate() const {
  if (successes.empty()) return 0.0;
  return static_cast<double>(std::count(successes.begin(), successes.end(), true)) /
         static_cast<double>(successes.size());
}

std::uint64_t evaluation_reset_seed(std::uint64_t seed, int episode, int attempt) {
  return mix_seed(seed, static_cast<std::uint64_t>(episode) + static_cast<std::uint64_t>(attempt) * 1000003ULL);
}

EpisodeOutcome run_evaluation_episode(envs::Environment& env, const std::vector<const GaussianPolicy*>& policies,
                                      int episode, std::uint64_t seed, const EvalHooks& hooks) {
  const int agents = env.agent_count();
  if (!policies.empty() && static_cast<int>(policies.size()) != agents) {
    throw ParameterError("evaluate: need one policy per agent");
  }
  EpisodeOutcome out;
  std::vector<Eigen::VectorXd> obs;
  for (int tries = 0;; ++tries) {
    if (tries >= kMaxResetTries) throw ResetError("evaluate: no feasible episode start");
    try {
      const std::uint64_t reset_seed = evaluation_reset_seed(seed, episode, tries);
      obs = env.reset(reset_seed);
      if (hooks.on_reset) hooks.on_reset(episode, reset_seed, env, obs);
      break;
    } catch (const ResetError&) {
      ++out.reset_failures;
    }
  }
  SeededRng rng(mix_seed(~seed, static_cast<std::uint64_t>(episode)));
  std::vector<Eigen::VectorXd> act(agents);
  for (;;) {
    for (int k = 0; k < agents; ++k) {
      if (policies.empty()) {
        act[k].resize(env.action_dim(k));
        for (int d = 0; d < act[k].size(); ++d) act[k][d] = rng.uniform(-1.0, 1.0);
      } else {
        act[k] = policies[k]->forward(obs[k]).mean;
      }
    }
    const envs::Transition tr = env.step(act);
    if (hooks.on_step) hooks.on_step(episode, env, act, tr);
    out.total_reward += tr.reward.total;
    if (tr.done) {
      out.success = tr.info.success;
      return out;
    }
    obs = tr.observations;
  }
}

EvalResult evaluate(const envs::Environment& prototype, const std::vector<const GaussianPolicy*>& policies,
                    int episodes, std::uint64_t seed, int workers, const EvalHooks& hooks) {
  if (episodes < 0) throw ParameterError("evaluate: negative episode count");
  if (!policies.empty() && static_cast<int>(policies.size()) != prototype.agent_count()) {
    throw ParameterError("evaluate: need one policy per agent");
  }
  std::vector<EpisodeOutcome> outcomes(episodes);
  run_parallel(episodes, workers, [&](int i) {
    std::unique_ptr<envs::Environment> env = prototype.clone();
    outcomes[i] = run_evaluation_episode(*env, policies, i, seed, hooks);
  });
  EvalResult r;
  for (const EpisodeOutcome& o : outcomes) {
    r.returns.push_back(o.total_reward);
    r.successes.push_back(o.success);
    r.reset_failures += o.reset_failures;
  }
  return r;
}

}  // namespace adl::learn
