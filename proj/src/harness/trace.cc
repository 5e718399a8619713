#include "adl/harness/trace.h"

#include <fstream>
#include <istream>
#include <ostream>

#include "adl/core/error.h"
#include "adl/envs/toy.h"

namespace adl::harness {
namespace {

using nlohmann::json;

json vec_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd vec_from(const json& j) {
  if (!j.is_array()) throw LoadError("trace: expected a number array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

json vecs_json(const std::vector<Eigen::VectorXd>& vs) {
  json a = json::array();
  for (const auto& v : vs) a.push_back(vec_json(v));
  return a;
}

std::vector<Eigen::VectorXd> vecs_from(const json& j) {
  if (!j.is_array()) throw LoadError("trace: expected an array of arrays");
  std::vector<Eigen::VectorXd> out;
  for (const json& v : j) out.push_back(vec_from(v));
  return out;
}

json costs_json(const reward::CostArray& a) { return json(a); }

reward::CostArray costs_from(const json& j) {
  if (!j.is_array() || j.size() != reward::kCostCount) throw LoadError("trace: expected 7 cost values");
  reward::CostArray a{};
  for (int i = 0; i < reward::kCostCount; ++i) a[i] = j[i].get<double>();
  return a;
}

json pose_json(const Vec3& p, const Quat& q) {
  return {{"position", {p.x(), p.y(), p.z()}}, {"quaternion", {q.w(), q.x(), q.y(), q.z()}}};
}

}  // namespace

double Trace::total_reward() const {
  double sum = 0.0;
  for (const TraceFrame& f : frames) sum += f.reward.total;
  return sum;
}

TraceFrame make_frame(const envs::Environment& env, const std::vector<Eigen::VectorXd>& actions,
                      const envs::Transition& tr) {
  TraceFrame f;
  f.t = tr.info.t;
  f.actions = actions;
  f.reward = tr.reward;
  f.info = tr.info;
  f.observations = tr.observations;
  f.done = tr.done;
  f.truncated = tr.truncated;
  if (const auto* a = dynamic_cast<const envs::AssistiveEnv*>(&env)) {
    f.robot_q = a->state().scene.bodies.at(0).q;
    f.human_q = a->state().scene.bodies.at(1).q;
    const Transform tool = a->tool_frame();
    f.tool_position = tool.translation();
    f.tool_orientation = tool.rotation();
  } else if (const auto* toy = dynamic_cast<const envs::ToyReachEnv*>(&env)) {
    f.robot_q = toy->q();
    f.tool_position = Vec3(toy->tip().x(), toy->tip().y(), 0.0);
  } else {
    throw ParameterError("make_frame: unsupported environment " + env.id());
  }
  return f;
}

json to_json(const TraceHeader& h) {
  return {{"record", "header"},   {"version", kTraceVersion},     {"env_id", h.env_id},
          {"config", to_json(h.config)}, {"episode", h.episode}, {"reset_seed", h.reset_seed},
          {"observations", vecs_json(h.observations)}};
}

json to_json(const TraceFrame& f) {
  const envs::StepInfo& e = f.info;
  return {
      {"record", "frame"},
      {"t", f.t},
      {"actions", vecs_json(f.actions)},
      {"robot_q", vec_json(f.robot_q)},
      {"human_q", vec_json(f.human_q)},
      {"tool_pose", pose_json(f.tool_position, f.tool_orientation)},
      {"reward",
       {{"task", f.reward.task},
        {"preference", f.reward.preference},
        {"total", f.reward.total},
        {"costs", costs_json(f.reward.costs.values)},
        {"alpha", costs_json(f.reward.alpha)},
        {"omega", costs_json(f.reward.omega)}}},
      {"events",
       {{"captured", e.captured},
        {"spilled", e.spilled},
        {"spilled_on_person", e.spilled_on_person},
        {"markers_new", e.markers_new},
        {"markers_wiped", e.markers_wiped},
        {"markers_total", e.markers_total},
        {"ring_advance", e.ring_advance},
        {"ring_s", e.ring_s},
        {"rub", e.rub},
        {"particles",
         {{"held", e.particles.held},
          {"airborne", e.particles.airborne},
          {"captured", e.particles.captured},
          {"spilled", e.particles.spilled},
          {"spilled_on_person", e.particles.spilled_on_person}}},
        {"success", e.success}}},
      {"contacts", {{"count", e.contacts}, {"tool_force", e.tool_force}, {"ring_force", e.ring_force}}},
      {"observations", vecs_json(f.observations)},
      {"done", f.done},
      {"truncated", f.truncated},
  };
}

TraceHeader header_from_json(const json& j) {
  try {
    if (j.at("record") != "header") throw LoadError("trace: first record is not a header");
    if (j.at("version").get<int>() != kTraceVersion) throw LoadError("trace: unsupported version");
    TraceHeader h;
    h.env_id = j.at("env_id").get<std::string>();
    h.config = run_config_from_json(j.at("config"));
    h.episode = j.at("episode").get<int>();
    h.reset_seed = j.at("reset_seed").get<std::uint64_t>();
    h.observations = vecs_from(j.at("observations"));
    return h;
  } catch (const json::exception& e) {
    throw LoadError(std::string("trace header: ") + e.what());
  }
}

TraceFrame frame_from_json(const json& j) {
  try {
    if (j.at("record") != "frame") throw LoadError("trace: expected a frame record");
    TraceFrame f;
    f.t = j.at("t").get<std::int64_t>();
    f.actions = vecs_from(j.at("actions"));
    f.robot_q = vec_from(j.at("robot_q"));
    f.human_q = vec_from(j.at("human_q"));
    const json& pose = j.at("tool_pose");
    const json& p = pose.at("position");
    const json& q = pose.at("quaternion");
    f.tool_position = Vec3(p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>());
    f.tool_orientation = Quat(q.at(0).get<double>(), q.at(1).get<double>(), q.at(2).get<double>(), q.at(3).get<double>());
    const json& r = j.at("reward");
    f.reward.task = r.at("task").get<double>();
    f.reward.preference = r.at("preference").get<double>();
    f.reward.total = r.at("total").get<double>();
    f.reward.costs.values = costs_from(r.at("costs"));
    f.reward.alpha = costs_from(r.at("alpha"));
    f.reward.omega = costs_from(r.at("omega"));
    const json& e = j.at("events");
    envs::StepInfo& info = f.info;
    info.t = f.t;
    info.captured = e.at("captured").get<int>();
    info.spilled = e.at("spilled").get<int>();
    info.spilled_on_person = e.at("spilled_on_person").get<int>();
    info.markers_new = e.at("markers_new").get<int>();
    info.markers_wiped = e.at("markers_wiped").get<int>();
    info.markers_total = e.at("markers_total").get<int>();
    info.ring_advance = e.at("ring_advance").get<double>();
    info.ring_s = e.at("ring_s").get<double>();
    info.rub = e.at("rub").get<double>();
    const json& pc = e.at("particles");
    info.particles.held = pc.at("held").get<int>();
    info.particles.airborne = pc.at("airborne").get<int>();
    info.particles.captured = pc.at("captured").get<int>();
    info.particles.spilled = pc.at("spilled").get<int>();
    info.particles.spilled_on_person = pc.at("spilled_on_person").get<int>();
    info.success = e.at("success").get<bool>();
    const json& c = j.at("contacts");
    info.contacts = c.at("count").get<int>();
    info.tool_force = c.at("tool_force").get<double>();
    info.ring_force = c.at("ring_force").get<double>();
    f.observations = vecs_from(j.at("observations"));
    f.done = j.at("done").get<bool>();
    f.truncated = j.at("truncated").get<bool>();
    return f;
  } catch (const json::exception& e) {
    throw LoadError(std::string("trace frame: ") + e.what());
  }
}

void write_trace(std::ostream& out, const Trace& trace) {
  out << to_json(trace.header).dump() << '\n';
  for (const TraceFrame& f : trace.frames) out << to_json(f).dump() << '\n';
}

void write_trace(const std::filesystem::path& path, const Trace& trace) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw LoadError("cannot write " + path.string());
  write_trace(f, trace);
  if (!f) throw LoadError("failed writing " + path.string());
}

Trace read_trace(std::istream& in) {
  Trace trace;
  std::string line;
  bool have_header = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw LoadError("trace line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!have_header) {
      trace.header = header_from_json(j);
      have_header = true;
      continue;
    }
    TraceFrame f = frame_from_json(j);
    if (!trace.frames.empty() && f.t <= trace.frames.back().t) {
      throw LoadError("trace line " + std::to_string(line_no) + ": frames out of order");
    }
    trace.frames.push_back(std::move(f));
  }
  if (!have_header) throw LoadError("trace: empty");
  return trace;
}

Trace read_trace(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw LoadError("cannot open " + path.string());
  return read_trace(f);
}

Trace record_episode(const RunConfig& config, const std::vector<const learn::GaussianPolicy*>& policies,
                     int episode) {
  if (episode < 0) throw ParameterError("record_episode: negative episode index");
  const std::unique_ptr<envs::Environment> env = make_env(config);
  Trace trace;
  trace.header.config = config;
  trace.header.env_id = env->id();
  trace.header.episode = episode;
  learn::EvalHooks hooks;
  hooks.on_reset = [&](int, std::uint64_t seed, const envs::Environment&, const std::vector<Eigen::VectorXd>& obs) {
    trace.header.reset_seed = seed;
    trace.header.observations = obs;
  };
  hooks.on_step = [&](int, const envs::Environment& e, const std::vector<Eigen::VectorXd>& act,
                      const envs::Transition& tr) {
    trace.frames.push_back(make_frame(e, act, tr));
  };
  learn::run_evaluation_episode(*env, policies, episode, config.seed, hooks);
  return trace;
}

ReplayResult replay(const Trace& trace) {
  ReplayResult r;
  const std::unique_ptr<envs::Environment> env = make_env(trace.header.config);
  if (env->id() != trace.header.env_id) {
    r.initial_match = false;
    r.message = "environment id " + env->id() + " differs from recorded " + trace.header.env_id;
    return r;
  }
  const std::vector<Eigen::VectorXd> obs = env->reset(trace.header.reset_seed);
  if (vecs_json(obs) != vecs_json(trace.header.observations)) {
    r.initial_match = false;
    r.message = "reset observations differ";
  }
  for (const TraceFrame& recorded : trace.frames) {
    ++r.frames;
    bool same = false;
    try {
      const envs::Transition tr = env->step(recorded.actions);
      same = to_json(make_frame(*env, recorded.actions, tr)) == to_json(recorded);
    } catch (const std::exception& e) {
      if (r.message.empty()) r.message = "t=" + std::to_string(recorded.t) + ": " + e.what();
    }
    if (!same) {
      ++r.divergences;
      if (r.first_divergence < 0) r.first_divergence = static_cast<int>(recorded.t);
    }
  }
  return r;
}

}  // namespace adl::harness
