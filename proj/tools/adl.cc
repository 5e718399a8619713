// Command-line front end: train, eval, replay and serve.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adl/core/error.h"
#include "adl/harness/protocol.h"
#include "adl/harness/report.h"
#include "adl/harness/run_config.h"
#include "adl/harness/trace.h"
#include "adl/learn/trainer.h"

namespace fs = std::filesystem;
using namespace adl;

namespace {

constexpr int kUsageError = 2;

// Flags shared by every subcommand; only flags given on the command line
// override the configuration file.
struct CommonFlags {
  std::string config;
  std::string env;
  std::string robot;
  std::string human;
  std::uint64_t seed = 0;
  int episode_length = 0;
  std::vector<CLI::Option*> options;

  void add(CLI::App* app) {
    options.push_back(app->add_option("--config", config, "Run configuration file (JSON)"));
    options.push_back(app->add_option("--env", env, "Environment: a task id or toy_reach"));
    options.push_back(app->add_option("--robot", robot, "Robot: pr2, jaco, baxter or sawyer"));
    options.push_back(app->add_option("--human", human, "Human mode")->check(CLI::IsMember({"static", "active"})));
    options.push_back(app->add_option("--seed", seed, "Seed"));
    options.push_back(app->add_option("--episode-length", episode_length, "Steps per episode")->check(CLI::PositiveNumber));
  }

  harness::RunConfig resolve() const {
    harness::RunConfig c;
    if (!config.empty()) {
      c = harness::load_run_config(config);
      if (options[1]->count()) c.env = env;
    } else if (options[1]->count()) {
      c = harness::default_run_config(env);
    }
    if (options[2]->count()) c.robot = robot;
    if (options[3]->count()) c.human = envs::human_mode_from_string(human);
    if (options[4]->count()) c.seed = seed;
    if (options[5]->count()) c.episode_length = episode_length;
    harness::validate(c);
    return c;
  }
};

std::string agent_file(int agent) { return agent == 0 ? "policy_robot.adlnet" : "policy_human.adlnet"; }

// A directory stands for the policy files a training run wrote into it.
std::vector<fs::path> expand_policies(const std::vector<std::string>& given, int agents) {
  std::vector<fs::path> out;
  for (const std::string& p : given) {
    if (fs::is_directory(p)) {
      for (int k = 0; k < agents; ++k) out.push_back(fs::path(p) / agent_file(k));
    } else {
      out.emplace_back(p);
    }
  }
  return out;
}

int cmd_train(const harness::RunConfig& base, std::int64_t steps, int actors, int workers, bool steps_given,
              bool actors_given, bool workers_given, const std::string& out, bool quiet) {
  harness::RunConfig c = base;
  if (steps_given) c.steps = steps;
  if (actors_given) c.actors = actors;
  if (workers_given) c.workers = workers;
  if (!out.empty()) c.out = out;
  harness::validate(c);
  const auto env = harness::make_env(c);
  fs::create_directories(c.out);
  learn::TrainerConfig tc = harness::trainer_config(c);
  if (!quiet) {
    tc.on_update = [](const learn::CurveRow& r) {
      std::fprintf(stderr, "update %4d  steps %9lld  return %10.3f  success %5.1f%%  kl %.5f%s\n", r.update,
                   static_cast<long long>(r.steps), r.mean_return, 100.0 * r.success_rate, r.kl,
                   r.aborted ? "  (aborted)" : "");
    };
  }
  const learn::TrainResult result = learn::train(*env, tc);
  c.policies.clear();
  for (std::size_t k = 0; k < result.policies.size(); ++k) {
    const fs::path p = c.out / agent_file(static_cast<int>(k));
    result.policies[k].save(p, env->id() + (k == 0 ? "#robot" : "#human"));
    c.policies.push_back(p);
  }
  learn::write_curve(c.out / "curve.csv", result.curve);
  harness::save_run_config(c.out / "config.json", c);
  std::printf("trained %s for %lld steps in %.1f s (%d aborted updates); wrote %s\n", env->id().c_str(),
              static_cast<long long>(result.steps), result.seconds, result.aborted_updates, c.out.string().c_str());
  return 0;
}

int cmd_eval(harness::RunConfig c, const std::vector<std::string>& policies, int episodes, bool episodes_given,
             int workers, const std::string& out, const std::string& traces) {
  if (episodes_given) c.episodes = episodes;
  const auto env = harness::make_env(c);
  if (!policies.empty()) c.policies = expand_policies(policies, env->agent_count());
  const std::vector<learn::GaussianPolicy> loaded = harness::load_policies(c, *env);
  std::vector<const learn::GaussianPolicy*> ptrs;
  for (const auto& p : loaded) ptrs.push_back(&p);

  std::vector<harness::Trace> recorded;
  learn::EvalHooks hooks;
  if (!traces.empty()) {
    fs::create_directories(traces);
    recorded.resize(c.episodes);
    hooks.on_reset = [&](int i, std::uint64_t seed, const envs::Environment& e, const std::vector<Eigen::VectorXd>& obs) {
      harness::TraceHeader& h = recorded[i].header;
      h.config = c;
      h.env_id = e.id();
      h.episode = i;
      h.reset_seed = seed;
      h.observations = obs;
    };
    hooks.on_step = [&](int i, const envs::Environment& e, const std::vector<Eigen::VectorXd>& act,
                        const envs::Transition& tr) { recorded[i].frames.push_back(harness::make_frame(e, act, tr)); };
  }
  const learn::EvalResult result = learn::evaluate(*env, ptrs, c.episodes, c.seed, workers, hooks);
  for (std::size_t i = 0; i < recorded.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "episode_%04zu.jsonl", i);
    harness::write_trace(fs::path(traces) / name, recorded[i]);
  }
  const std::string report = harness::format_report({harness::make_report_row(c, result)});
  std::fputs(report.c_str(), stdout);
  if (!out.empty()) {
    std::ofstream f(out, std::ios::binary);
    if (!f) throw LoadError("cannot write " + out);
    f << report;
  }
  return 0;
}

int cmd_replay(const std::vector<std::string>& paths) {
  int status = 0;
  for (const std::string& p : paths) {
    const harness::Trace trace = harness::read_trace(fs::path(p));
    const harness::ReplayResult r = harness::replay(trace);
    std::printf("%s: %d frames, %d divergences%s%s\n", p.c_str(), r.frames, r.divergences,
                r.initial_match ? "" : ", reset differs", r.message.empty() ? "" : (" (" + r.message + ")").c_str());
    if (!r.ok()) status = 1;
  }
  return status;
}

int cmd_serve(const harness::RunConfig& c, int port, bool stdio, const std::string& host) {
  if (stdio) {
    harness::serve_stream(std::cin, std::cout, c);
    return 0;
  }
  harness::TcpServer server(c, static_cast<std::uint16_t>(port), host);
  std::fprintf(stderr, "serving %s on %s:%u\n", harness::make_env(c)->id().c_str(), host.c_str(), server.port());
  server.serve();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Assistive robotics simulation: train, evaluate, replay and serve environments"};
  app.require_subcommand(1);

  CommonFlags train_flags, eval_flags, serve_flags;
  std::int64_t steps = 0;
  int actors = 0, workers = 1, eval_workers = 1, episodes = 0, port = 5555;
  std::string train_out, eval_out, traces, host = "127.0.0.1";
  std::vector<std::string> policies, trace_paths;
  bool quiet = false, stdio = false;

  CLI::App* train = app.add_subcommand("train", "Train policies with PPO");
  train_flags.add(train);
  CLI::Option* steps_opt = train->add_option("--steps", steps, "Environment steps")->check(CLI::NonNegativeNumber);
  CLI::Option* actors_opt = train->add_option("--actors", actors, "Parallel actors")->check(CLI::PositiveNumber);
  CLI::Option* workers_opt = train->add_option("--workers", workers, "Rollout threads")->check(CLI::PositiveNumber);
  train->add_option("--out", train_out, "Output directory");
  train->add_flag("--quiet", quiet, "No per-update progress");

  CLI::App* eval = app.add_subcommand("eval", "Evaluate policies (random actions without --policy)");
  eval_flags.add(eval);
  eval->add_option("--policy", policies, "Policy file per agent, or a training output directory");
  CLI::Option* episodes_opt = eval->add_option("--episodes", episodes, "Episodes")->check(CLI::NonNegativeNumber);
  eval->add_option("--workers", eval_workers, "Threads")->check(CLI::PositiveNumber);
  eval->add_option("--out", eval_out, "Write the report table to this file");
  eval->add_option("--traces", traces, "Write one trace per episode into this directory");

  CLI::App* replay = app.add_subcommand("replay", "Re-simulate traces and check bit-identity");
  replay->add_option("traces", trace_paths, "Trace files")->required()->check(CLI::ExistingFile);

  CLI::App* serve = app.add_subcommand("serve", "Serve an environment over the wire protocol");
  serve_flags.add(serve);
  serve->add_option("--port", port, "TCP port")->check(CLI::Range(0, 65535));
  serve->add_option("--host", host, "IPv4 address to bind");
  serve->add_flag("--stdio", stdio, "Serve one session on stdin/stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      return cmd_train(train_flags.resolve(), steps, actors, workers, steps_opt->count() > 0, actors_opt->count() > 0,
                       workers_opt->count() > 0, train_out, quiet);
    }
    if (*eval) return cmd_eval(eval_flags.resolve(), policies, episodes, episodes_opt->count() > 0, eval_workers, eval_out, traces);
    if (*replay) return cmd_replay(trace_paths);
    if (*serve) return cmd_serve(serve_flags.resolve(), port, stdio, host);
  } catch (const ParameterError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kUsageError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
