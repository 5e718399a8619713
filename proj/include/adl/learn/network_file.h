#ifndef ADL_LEARN_NETWORK_FILE_H_
#define ADL_LEARN_NETWORK_FILE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "adl/learn/mlp.h"

namespace adl::learn {

// Versioned binary container for a network and its companions. Layout
// (little-endian, documented in docs/formats.md):
//   magic "ADLNET\r\n" | u32 version | u32 flags | u32 tag_len | tag bytes
//   | net: u32 n_sizes, u32 sizes[n], f64 params (per layer: W row-major, b)
//   | [flags&1] f64 log_std[output_dim]
//   | [flags&2] value net, same encoding as net
//   | [flags&4] f64 count, f64 mean[input_dim], f64 var[input_dim], f64 clip
struct NetworkFile {
  std::string tag;
  Mlp net;
  std::optional<Eigen::VectorXd> log_std;
  std::optional<Mlp> value;
  std::optional<RunningNormalizer> normalizer;
};

inline constexpr std::uint32_t kNetworkFileVersion = 1;

std::vector<std::uint8_t> encode_network(const NetworkFile& f);
NetworkFile decode_network(const std::vector<std::uint8_t>& bytes);

void write_network_file(const std::filesystem::path& path, const NetworkFile& f);
NetworkFile read_network_file(const std::filesystem::path& path);

}  // namespace adl::learn

#endif  // ADL_LEARN_NETWORK_FILE_H_
