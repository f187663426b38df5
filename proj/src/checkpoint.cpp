#include "qspike/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "qspike/error.hpp"

namespace qspike::checkpoint {

namespace {

std::uint64_t fnv1a(const std::uint8_t* data, std::size_t n) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= data[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Writer {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u32(std::uint32_t v) { little(v, 4); }
  void u64(std::uint64_t v) { little(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    buf_.insert(buf_.end(), s.begin(), s.end());
  }
  void tensor(std::string_view name, const std::vector<std::size_t>& shape, std::span<const double> values) {
    str(std::string(name));
    u32(static_cast<std::uint32_t>(shape.size()));
    for (auto d : shape) u64(d);
    for (double v : values) f64(v);
  }
  std::vector<std::uint8_t> finish() {
    const std::uint64_t sum = fnv1a(buf_.data(), buf_.size());
    u64(sum);
    return std::move(buf_);
  }

 private:
  void little(std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> buf_;
};

class Reader {
 public:
  Reader(const std::uint8_t* data, std::size_t n) : data_(data), n_(n) {}
  std::uint8_t u8() { return take(1)[0]; }
  std::uint32_t u32() { return static_cast<std::uint32_t>(little(4)); }
  std::uint64_t u64() { return little(8); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint32_t len = u32();
    const auto* p = take(len);
    return std::string(reinterpret_cast<const char*>(p), len);
  }
  // Reads a tensor record and checks its name and shape against expectations.
  void tensor_into(std::string_view name, const std::vector<std::size_t>& shape, std::span<double> out) {
    const std::string got = str();
    if (got != name) throw FormatError("checkpoint: expected tensor '" + std::string(name) + "', found '" + got + "'");
    const std::uint32_t rank = u32();
    if (rank != shape.size()) throw FormatError("checkpoint: rank mismatch for " + got);
    for (std::size_t d : shape) {
      if (u64() != d) throw FormatError("checkpoint: shape mismatch for " + got);
    }
    for (auto& v : out) v = f64();
  }
  std::size_t remaining() const { return n_ - pos_; }

 private:
  const std::uint8_t* take(std::size_t k) {
    if (k > n_ - pos_) throw FormatError("checkpoint truncated");
    const auto* p = data_ + pos_;
    pos_ += k;
    return p;
  }
  std::uint64_t little(int bytes) {
    const auto* p = take(static_cast<std::size_t>(bytes));
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= std::uint64_t{p[i]} << (8 * i);
    return v;
  }
  const std::uint8_t* data_;
  std::size_t n_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode(const Checkpoint& ckpt) {
  const auto& cfg = ckpt.model.config;
  Writer w;
  for (char c : kMagic) w.u8(static_cast<std::uint8_t>(c));
  w.u32(kVersion);
  w.u64(ckpt.seed);

  w.u64(cfg.input);
  w.u64(cfg.hidden);
  w.u64(cfg.features);
  w.u32(static_cast<std::uint32_t>(cfg.n_qubits));
  w.u32(static_cast<std::uint32_t>(cfg.n_layers));
  w.u32(static_cast<std::uint32_t>(cfg.n_classes));
  w.u8(cfg.head == model::HeadKind::quantum ? 0 : 1);
  w.u64(cfg.spike_steps);
  w.f64(cfg.dt);
  w.f64(cfg.vqc_init_scale);
  w.u64(ckpt.model.revision);

  std::vector<std::string> names;
  std::vector<std::vector<std::size_t>> shapes;
  ckpt.model.params.for_each([&](std::string_view name, std::vector<std::size_t> shape, std::span<const double>) {
    names.emplace_back(name);
    shapes.push_back(std::move(shape));
  });
  w.u32(static_cast<std::uint32_t>(names.size()));
  ckpt.model.params.for_each([&](std::string_view name, std::vector<std::size_t> shape, std::span<const double> v) {
    w.tensor(name, shape, v);
  });

  const auto& opt = ckpt.optimizer;
  const bool has_opt = opt.m.size() == names.size() && opt.v.size() == names.size();
  w.u8(has_opt ? 1 : 0);
  w.u64(opt.t);
  w.f64(opt.hyper.lr);
  w.f64(opt.hyper.beta1);
  w.f64(opt.hyper.beta2);
  w.f64(opt.hyper.eps);
  if (has_opt) {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (opt.m[i].size() != opt.v[i].size()) throw ShapeError("optimizer moments differ in size");
      w.tensor("m." + names[i], shapes[i], opt.m[i]);
      w.tensor("v." + names[i], shapes[i], opt.v[i]);
    }
  }
  return w.finish();
}

Checkpoint decode(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < sizeof kMagic + 4 + 8) throw FormatError("checkpoint truncated");
  if (std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) throw FormatError("not a checkpoint (bad magic)");
  const std::size_t body = bytes.size() - 8;
  Reader tail(bytes.data() + body, 8);
  if (tail.u64() != fnv1a(bytes.data(), body)) {
    // Distinguish an unknown version from corruption when the header is intact.
    Reader hdr(bytes.data() + sizeof kMagic, 4);
    if (hdr.u32() != kVersion) throw FormatError("unsupported checkpoint version");
    throw FormatError("checkpoint checksum mismatch (corrupt or truncated file)");
  }

  Reader r(bytes.data() + sizeof kMagic, body - sizeof kMagic);
  const std::uint32_t version = r.u32();
  if (version != kVersion) throw FormatError("unsupported checkpoint version " + std::to_string(version));

  Checkpoint ck;
  ck.seed = r.u64();
  model::ModelConfig cfg;
  cfg.input = r.u64();
  cfg.hidden = r.u64();
  cfg.features = r.u64();
  cfg.n_qubits = static_cast<int>(r.u32());
  cfg.n_layers = static_cast<int>(r.u32());
  cfg.n_classes = static_cast<int>(r.u32());
  const std::uint8_t head = r.u8();
  if (head > 1) throw FormatError("checkpoint: unknown head kind");
  cfg.head = head == 0 ? model::HeadKind::quantum : model::HeadKind::classical;
  cfg.spike_steps = r.u64();
  cfg.dt = r.f64();
  cfg.vqc_init_scale = r.f64();
  const std::uint64_t revision = r.u64();

  try {
    ck.model = model::RqnnModel::zeros(cfg);
  } catch (const ArgumentError& e) {
    throw FormatError(std::string("checkpoint: invalid model configuration: ") + e.what());
  }
  ck.model.revision = revision;

  const std::uint32_t count = r.u32();
  std::vector<std::string> names;
  std::vector<std::vector<std::size_t>> shapes;
  std::vector<std::size_t> sizes;
  ck.model.params.for_each([&](std::string_view name, std::vector<std::size_t> shape, std::span<double> v) {
    names.emplace_back(name);
    shapes.push_back(shape);
    sizes.push_back(v.size());
  });
  if (count != names.size()) throw FormatError("checkpoint: tensor count does not match configuration");
  ck.model.params.for_each([&](std::string_view name, std::vector<std::size_t> shape, std::span<double> v) {
    r.tensor_into(name, shape, v);
  });

  const std::uint8_t has_opt = r.u8();
  train::AdamHyper hyper;
  const std::uint64_t t = r.u64();
  hyper.lr = r.f64();
  hyper.beta1 = r.f64();
  hyper.beta2 = r.f64();
  hyper.eps = r.f64();
  if (has_opt == 1) {
    ck.optimizer = train::AdamState::zeros(sizes, hyper);
    for (std::size_t i = 0; i < names.size(); ++i) {
      r.tensor_into("m." + names[i], shapes[i], ck.optimizer.m[i]);
      r.tensor_into("v." + names[i], shapes[i], ck.optimizer.v[i]);
    }
  } else if (has_opt == 0) {
    ck.optimizer.hyper = hyper;
  } else {
    throw FormatError("checkpoint: bad optimizer flag");
  }
  ck.optimizer.t = t;
  if (r.remaining() != 0) throw FormatError("checkpoint: trailing bytes");
  return ck;
}

void save_checkpoint(const model::RqnnModel& model, const train::AdamState& optimizer, std::uint64_t seed,
                     const std::filesystem::path& path) {
  const auto bytes = encode(Checkpoint{model, optimizer, seed});
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode(bytes);
}

}  // namespace qspike::checkpoint
