#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "chaoswave/errors.hpp"
#include "chaoswave/train.hpp"

namespace chaoswave {

namespace {

constexpr char kMagic[8] = {'C', 'H', 'W', 'V', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  void u32(std::uint32_t v) { uint_le(v, 4); }
  void u64(std::uint64_t v) { uint_le(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void bytes(const char* p, std::size_t n) { out_.append(p, n); }
  void tensor(const Tensor& t) {
    u32(static_cast<std::uint32_t>(t.rank()));
    for (std::size_t d : t.shape()) u64(d);
    for (double v : t.values()) f64(v);
  }
  std::string take() { return std::move(out_); }

 private:
  void uint_le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}
  std::uint32_t u32() { return static_cast<std::uint32_t>(uint_le(4)); }
  std::uint64_t u64() { return uint_le(8); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::size_t pos() const noexcept { return pos_; }
  void expect_magic() {
    need(sizeof(kMagic));
    if (std::memcmp(bytes_.data(), kMagic, sizeof(kMagic)) != 0) throw FormatError("checkpoint: bad magic", 0);
    pos_ += sizeof(kMagic);
  }
  Tensor tensor() {
    const std::size_t start = pos_;
    const std::uint32_t rank = u32();
    if (rank == 0 || rank > 8) throw FormatError("checkpoint: implausible tensor rank", start);
    Shape shape(rank);
    std::uint64_t count = 1;
    for (auto& d : shape) {
      d = u64();
      if (d == 0 || d > (std::uint64_t{1} << 40)) throw FormatError("checkpoint: implausible dimension", start);
      count *= d;
    }
    if (count > (bytes_.size() - pos_) / 8) throw FormatError("checkpoint: truncated tensor data", bytes_.size());
    std::vector<double> data(count);
    for (auto& v : data) v = f64();
    return Tensor(std::move(shape), std::move(data));
  }

 private:
  void need(std::size_t n) {
    if (bytes_.size() - pos_ < n) throw FormatError("checkpoint: truncated", bytes_.size());
  }
  std::uint64_t uint_le(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= std::uint64_t{static_cast<unsigned char>(bytes_[pos_ + i])} << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

void copy_into(const std::vector<Tensor*>& dst, const std::vector<Tensor>& src, const char* what) {
  if (dst.size() != src.size()) throw InvalidInput(std::string("checkpoint: ") + what + " count mismatch");
  for (std::size_t i = 0; i < dst.size(); ++i) {
    if (dst[i]->shape() != src[i].shape()) {
      throw InvalidInput(std::string("checkpoint: ") + what + " " + std::to_string(i) + " has shape " +
                         shape_string(src[i].shape()) + ", expected " + shape_string(dst[i]->shape()));
    }
    *dst[i] = src[i];
  }
}

}  // namespace

Checkpoint make_checkpoint(const Network& network, const std::vector<Tensor>& velocities, std::uint64_t seed,
                           std::uint64_t epoch) {
  Checkpoint c;
  c.spec_hash = network.spec().hash();
  c.seed = seed;
  c.epoch = epoch;
  for (const Tensor* t : network.parameters()) c.parameters.push_back(*t);
  for (const Tensor* t : network.buffers()) c.buffers.push_back(*t);
  c.velocities = velocities;
  return c;
}

Network restore_network(const NetworkSpec& spec, const Checkpoint& checkpoint) {
  if (spec.hash() != checkpoint.spec_hash) throw InvalidInput("checkpoint was written for a different network spec");
  Network net(spec);
  net.initialize(0, 0.0);
  copy_into(net.parameters(), checkpoint.parameters, "parameter");
  copy_into(net.buffers(), checkpoint.buffers, "buffer");
  return net;
}

std::string encode_checkpoint(const Checkpoint& c) {
  Writer w;
  w.bytes(kMagic, sizeof(kMagic));
  w.u32(kVersion);
  w.u64(c.spec_hash);
  w.u64(c.seed);
  w.u64(c.epoch);
  w.u32(static_cast<std::uint32_t>(c.parameters.size()));
  w.u32(static_cast<std::uint32_t>(c.buffers.size()));
  w.u32(static_cast<std::uint32_t>(c.velocities.size()));
  for (const auto& t : c.parameters) w.tensor(t);
  for (const auto& t : c.buffers) w.tensor(t);
  for (const auto& t : c.velocities) w.tensor(t);
  return w.take();
}

Checkpoint decode_checkpoint(std::string_view bytes) {
  Reader r(bytes);
  r.expect_magic();
  const std::size_t version_pos = r.pos();
  if (const auto v = r.u32(); v != kVersion) {
    throw FormatError("checkpoint: unsupported version " + std::to_string(v), version_pos);
  }
  Checkpoint c;
  c.spec_hash = r.u64();
  c.seed = r.u64();
  c.epoch = r.u64();
  const std::uint32_t np = r.u32(), nb = r.u32(), nv = r.u32();
  for (std::uint32_t i = 0; i < np; ++i) c.parameters.push_back(r.tensor());
  for (std::uint32_t i = 0; i < nb; ++i) c.buffers.push_back(r.tensor());
  for (std::uint32_t i = 0; i < nv; ++i) c.velocities.push_back(r.tensor());
  if (r.pos() != bytes.size()) throw FormatError("checkpoint: trailing bytes", r.pos());
  return c;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path.string());
  const std::string bytes = encode_checkpoint(checkpoint);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open checkpoint " + path.string());
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return decode_checkpoint(bytes);
}

}  // namespace chaoswave
