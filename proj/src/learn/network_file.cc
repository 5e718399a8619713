#include "adl/learn/network_file.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "adl/core/error.h"

namespace adl::learn {
namespace {

constexpr char kMagic[8] = {'A', 'D', 'L', 'N', 'E', 'T', '\r', '\n'};
constexpr std::uint32_t kHasLogStd = 1;
constexpr std::uint32_t kHasValue = 2;
constexpr std::uint32_t kHasNormalizer = 4;

static_assert(std::endian::native == std::endian::little, "container encoding assumes little-endian hosts");

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  void u32(std::uint32_t v) { bytes(&v, 4); }
  void f64(double v) { bytes(&v, 8); }
  void vec(const Eigen::VectorXd& v) {
    for (int i = 0; i < v.size(); ++i) f64(v[i]);
  }
  void net(const Mlp& m) {
    u32(static_cast<std::uint32_t>(m.sizes().size()));
    for (int s : m.sizes()) u32(static_cast<std::uint32_t>(s));
    vec(m.parameters());
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& in) : in_(in) {}
  void bytes(void* p, std::size_t n) {
    if (pos_ + n > in_.size()) throw LoadError("network file truncated");
    std::memcpy(p, in_.data() + pos_, n);
    pos_ += n;
  }
  std::uint32_t u32() {
    std::uint32_t v;
    bytes(&v, 4);
    return v;
  }
  double f64() {
    double v;
    bytes(&v, 8);
    return v;
  }
  Eigen::VectorXd vec(int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = f64();
    return v;
  }
  Mlp net() {
    const std::uint32_t n = u32();
    if (n < 2 || n > 64) throw LoadError("network file: bad layer count");
    std::vector<int> sizes(n);
    for (auto& s : sizes) {
      s = static_cast<int>(u32());
      if (s <= 0 || s > (1 << 20)) throw LoadError("network file: bad layer size");
    }
    Mlp m(sizes);
    m.set_parameters(vec(m.parameter_count()));
    return m;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  const std::vector<std::uint8_t>& in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_network(const NetworkFile& f) {
  Writer w;
  w.bytes(kMagic, sizeof(kMagic));
  w.u32(kNetworkFileVersion);
  std::uint32_t flags = 0;
  if (f.log_std) flags |= kHasLogStd;
  if (f.value) flags |= kHasValue;
  if (f.normalizer) flags |= kHasNormalizer;
  w.u32(flags);
  w.u32(static_cast<std::uint32_t>(f.tag.size()));
  w.bytes(f.tag.data(), f.tag.size());
  w.net(f.net);
  if (f.log_std) {
    if (f.log_std->size() != f.net.output_dim()) throw ParameterError("log_std size must match output dim");
    w.vec(*f.log_std);
  }
  if (f.value) w.net(*f.value);
  if (f.normalizer) {
    if (f.normalizer->dim() != f.net.input_dim()) throw ParameterError("normalizer dim must match input dim");
    w.f64(f.normalizer->count());
    w.vec(f.normalizer->mean());
    w.vec(f.normalizer->variance());
    w.f64(f.normalizer->clip());
  }
  return w.take();
}

NetworkFile decode_network(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  char magic[8];
  r.bytes(magic, 8);
  if (std::memcmp(magic, kMagic, 8) != 0) throw LoadError("not a network file (bad magic)");
  const std::uint32_t version = r.u32();
  if (version != kNetworkFileVersion) throw LoadError("unsupported network file version " + std::to_string(version));
  const std::uint32_t flags = r.u32();
  const std::uint32_t tag_len = r.u32();
  if (tag_len > 4096) throw LoadError("network file: tag too long");
  NetworkFile f;
  f.tag.resize(tag_len);
  r.bytes(f.tag.data(), tag_len);
  f.net = r.net();
  if (flags & kHasLogStd) f.log_std = r.vec(f.net.output_dim());
  if (flags & kHasValue) {
    f.value = r.net();
    if (f.value->input_dim() != f.net.input_dim()) throw LoadError("network file: value net input mismatch");
  }
  if (flags & kHasNormalizer) {
    const double count = r.f64();
    Eigen::VectorXd mean = r.vec(f.net.input_dim());
    Eigen::VectorXd var = r.vec(f.net.input_dim());
    const double clip = r.f64();
    RunningNormalizer n(f.net.input_dim(), clip);
    n.set_state(count, std::move(mean), std::move(var));
    f.normalizer = std::move(n);
  }
  if (!r.done()) throw LoadError("network file has trailing bytes");
  return f;
}

void write_network_file(const std::filesystem::path& path, const NetworkFile& f) {
  const auto bytes = encode_network(f);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

NetworkFile read_network_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_network(bytes);
}

}  // namespace adl::learn
