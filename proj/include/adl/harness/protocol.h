#ifndef ADL_HARNESS_PROTOCOL_H_
#define ADL_HARNESS_PROTOCOL_H_

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "adl/envs/env.h"
#include "adl/harness/run_config.h"

namespace adl::harness {

inline constexpr int kProtocolVersion = 1;
inline constexpr std::size_t kMaxMessageBytes = 1 << 20;

// Ordered observation fields of one agent of `env`.
std::vector<envs::ObservationField> observation_layout(const envs::Environment& env, int agent);

// One client session of the newline-delimited JSON protocol (documented in
// docs/formats.md). Requests carry "cmd": spec, reset, step or close. Every
// request gets exactly one reply with "ok"; failures reply
// {"ok": false, "error": ...} and leave the session usable.
class Session {
 public:
  explicit Session(RunConfig defaults);

  // Reply line (without the trailing newline) for one request line.
  std::string handle(std::string_view line);
  bool closed() const { return closed_; }

 private:
  nlohmann::json dispatch(const nlohmann::json& request);
  nlohmann::json spec_reply(const nlohmann::json& request);
  nlohmann::json reset_reply(const nlohmann::json& request);
  nlohmann::json step_reply(const nlohmann::json& request);
  envs::Environment& env();

  RunConfig config_;
  std::unique_ptr<envs::Environment> env_;
  bool closed_ = false;
};

// Serves one session over a pair of streams until close or end of input.
void serve_stream(std::istream& in, std::ostream& out, const RunConfig& defaults);

// TCP endpoint; each accepted connection is an independent session on its
// own thread.
class TcpServer {
 public:
  // Binds and listens immediately; port 0 picks a free port.
  TcpServer(RunConfig defaults, std::uint16_t port, const std::string& host = "127.0.0.1");
  ~TcpServer();
  TcpServer(const TcpServer&) = delete;
  TcpServer& operator=(const TcpServer&) = delete;

  std::uint16_t port() const { return port_; }
  // Accepts connections until stop() or, when max_sessions >= 0, until that
  // many sessions were accepted; then waits for open sessions to finish.
  void serve(int max_sessions = -1);
  void stop();

 private:
  RunConfig defaults_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
};

}  // namespace adl::harness

#endif  // ADL_HARNESS_PROTOCOL_H_
