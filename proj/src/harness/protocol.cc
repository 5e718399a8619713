#include "adl/harness/protocol.h"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <istream>
#include <ostream>
#include <thread>

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

json vecs_json(const std::vector<Eigen::VectorXd>& vs) {
  json a = json::array();
  for (const auto& v : vs) a.push_back(vec_json(v));
  return a;
}

Eigen::VectorXd vec_from(const json& j, const std::string& what) {
  if (!j.is_array()) throw ParameterError(what + " must be an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ParameterError(what + " must be an array of numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

json error_reply(const std::string& message) { return {{"ok", false}, {"error", message}}; }

}  // namespace

std::vector<envs::ObservationField> observation_layout(const envs::Environment& env, int agent) {
  if (agent < 0 || agent >= env.agent_count()) throw ParameterError("observation_layout: no such agent");
  if (const auto* a = dynamic_cast<const envs::AssistiveEnv*>(&env)) {
    return agent == 0 ? envs::robot_observation_layout(a->spec()) : envs::human_observation_layout(a->spec());
  }
  if (dynamic_cast<const envs::ToyReachEnv*>(&env) != nullptr) {
    return {{"joint_positions", 2}, {"target", 2}, {"tip", 2}, {"target_minus_tip", 2}};
  }
  return {{"observation", env.observation_dim(agent)}};
}

Session::Session(RunConfig defaults) : config_(std::move(defaults)) { validate(config_); }

envs::Environment& Session::env() {
  if (!env_) env_ = make_env(config_);
  return *env_;
}

std::string Session::handle(std::string_view line) {
  json reply;
  json request;
  try {
    request = json::parse(line);
  } catch (const json::parse_error& e) {
    return error_reply(std::string("malformed message: ") + e.what()).dump();
  }
  try {
    reply = dispatch(request);
  } catch (const std::exception& e) {
    reply = error_reply(e.what());
  }
  if (request.is_object() && request.contains("id")) reply["id"] = request["id"];
  return reply.dump();
}

json Session::dispatch(const json& request) {
  if (!request.is_object()) return error_reply("malformed message: expected an object");
  auto cmd = request.find("cmd");
  if (cmd == request.end() || !cmd->is_string()) return error_reply("malformed message: missing \"cmd\"");
  const std::string name = cmd->get<std::string>();
  if (name == "spec") return spec_reply(request);
  if (name == "reset") return reset_reply(request);
  if (name == "step") return step_reply(request);
  if (name == "close") {
    closed_ = true;
    return {{"ok", true}, {"cmd", "close"}};
  }
  return error_reply("unknown command '" + name + "'");
}

json Session::spec_reply(const json& request) {
  // Optional reconfiguration; the running episode (if any) is discarded.
  if (request.contains("env") || request.contains("robot") || request.contains("human") ||
      request.contains("episode_length")) {
    RunConfig next = config_;
    if (request.contains("env")) next.env = request.at("env").get<std::string>();
    if (request.contains("robot")) next.robot = request.at("robot").get<std::string>();
    if (request.contains("human")) next.human = envs::human_mode_from_string(request.at("human").get<std::string>());
    if (request.contains("episode_length")) next.episode_length = request.at("episode_length").get<int>();
    std::unique_ptr<envs::Environment> env = make_env(next);
    config_ = std::move(next);
    env_ = std::move(env);
  }
  envs::Environment& e = env();
  json agents = json::array();
  for (int k = 0; k < e.agent_count(); ++k) {
    json layout = json::array();
    for (const envs::ObservationField& f : observation_layout(e, k)) {
      layout.push_back({{"name", f.name}, {"size", f.size}});
    }
    agents.push_back({{"name", k == 0 ? "robot" : "human"},
                      {"observation_dim", e.observation_dim(k)},
                      {"action_dim", e.action_dim(k)},
                      {"action_low", -1.0},
                      {"action_high", 1.0},
                      {"observation_layout", layout}});
  }
  return {{"ok", true},
          {"cmd", "spec"},
          {"protocol_version", kProtocolVersion},
          {"env_id", e.id()},
          {"episode_length", e.episode_length()},
          {"agents", agents}};
}

json Session::reset_reply(const json& request) {
  std::uint64_t seed = 0;
  if (request.contains("seed")) {
    const json& s = request.at("seed");
    if (!s.is_number_unsigned()) return error_reply("reset: seed must be a non-negative integer");
    seed = s.get<std::uint64_t>();
  }
  const std::vector<Eigen::VectorXd> obs = env().reset(seed);
  return {{"ok", true}, {"cmd", "reset"}, {"seed", seed}, {"observations", vecs_json(obs)}};
}

json Session::step_reply(const json& request) {
  envs::Environment& e = env();
  std::vector<Eigen::VectorXd> actions;
  if (request.contains("actions")) {
    const json& a = request.at("actions");
    if (!a.is_array()) return error_reply("step: actions must be an array of arrays");
    for (std::size_t k = 0; k < a.size(); ++k) actions.push_back(vec_from(a[k], "step: actions[" + std::to_string(k) + "]"));
  } else if (request.contains("action")) {
    actions.push_back(vec_from(request.at("action"), "step: action"));
  } else {
    return error_reply("step: missing \"actions\"");
  }
  if (static_cast<int>(actions.size()) != e.agent_count()) {
    return error_reply("step: expected " + std::to_string(e.agent_count()) + " action vectors, got " +
                       std::to_string(actions.size()));
  }
  for (int k = 0; k < e.agent_count(); ++k) {
    if (actions[k].size() != e.action_dim(k)) {
      return error_reply("step: action dimension mismatch for agent " + std::to_string(k) + ": expected " +
                         std::to_string(e.action_dim(k)) + ", got " + std::to_string(actions[k].size()));
    }
  }
  const envs::Transition tr = e.step(actions);
  const envs::StepInfo& i = tr.info;
  json info = {{"t", i.t},
               {"success", i.success},
               {"reward_task", tr.reward.task},
               {"reward_preference", tr.reward.preference},
               {"costs", tr.reward.costs.values},
               {"captured", i.captured},
               {"spilled", i.spilled},
               {"spilled_on_person", i.spilled_on_person},
               {"markers_wiped", i.markers_wiped},
               {"markers_new", i.markers_new},
               {"ring_advance", i.ring_advance},
               {"rub", i.rub},
               {"contacts", i.contacts},
               {"tool_force", i.tool_force}};
  return {{"ok", true},
          {"cmd", "step"},
          {"observations", vecs_json(tr.observations)},
          {"reward", tr.reward.total},
          {"done", tr.done},
          {"truncated", tr.truncated},
          {"info", info}};
}

void serve_stream(std::istream& in, std::ostream& out, const RunConfig& defaults) {
  Session session(defaults);
  std::string line;
  while (!session.closed() && std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    out << session.handle(line) << '\n' << std::flush;
  }
}

namespace {

bool send_all(int fd, const std::string& data) {
  std::size_t sent = 0;
  while (sent < data.size()) {
    const ssize_t n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    sent += static_cast<std::size_t>(n);
  }
  return true;
}

void run_connection(int fd, const RunConfig& defaults) {
  try {
    Session session(defaults);
    std::string buffer;
    char chunk[4096];
    while (!session.closed()) {
      const ssize_t n = ::recv(fd, chunk, sizeof(chunk), 0);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) break;
      buffer.append(chunk, static_cast<std::size_t>(n));
      std::size_t pos;
      while (!session.closed() && (pos = buffer.find('\n')) != std::string::npos) {
        std::string line = buffer.substr(0, pos);
        buffer.erase(0, pos + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!send_all(fd, session.handle(line) + "\n")) {
          ::close(fd);
          return;
        }
      }
      if (buffer.size() > kMaxMessageBytes) {
        send_all(fd, json(error_reply("message too long")).dump() + "\n");
        break;
      }
    }
  } catch (const std::exception&) {
    // A session that cannot start (bad defaults) just drops the connection.
  }
  ::close(fd);
}

}  // namespace

TcpServer::TcpServer(RunConfig defaults, std::uint16_t port, const std::string& host) : defaults_(std::move(defaults)) {
  validate(defaults_);
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw LoadError(std::string("socket: ") + std::strerror(errno));
  const int yes = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    throw ParameterError("invalid IPv4 address '" + host + "'");
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 || ::listen(listen_fd_, 16) != 0) {
    const std::string err = std::strerror(errno);
    ::close(listen_fd_);
    throw LoadError("cannot listen on " + host + ":" + std::to_string(port) + ": " + err);
  }
  socklen_t len = sizeof(addr);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpServer::~TcpServer() {
  stop();
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

void TcpServer::stop() {
  stopping_ = true;
  if (listen_fd_ >= 0) ::shutdown(listen_fd_, SHUT_RDWR);
}

void TcpServer::serve(int max_sessions) {
  std::vector<std::jthread> sessions;
  int accepted = 0;
  while (!stopping_ && (max_sessions < 0 || accepted < max_sessions)) {
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR) continue;
      break;
    }
    ++accepted;
    sessions.emplace_back(run_connection, fd, std::cref(defaults_));
  }
}

}  // namespace adl::harness
