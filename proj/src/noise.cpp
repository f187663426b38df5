#include "qspike/noise.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "qspike/error.hpp"

namespace qspike::noise {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double parse_number(std::string_view key, std::string_view text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw ArgumentError("noise parameter '" + std::string(key) + "' is not a number: '" + std::string(text) + "'");
  }
  return v;
}

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

double fade(double t) { return t * t * t * (t * (t * 6 - 15) + 10); }
double lerp(double a, double b, double t) { return a + t * (b - a); }

}  // namespace

void validate(const NoiseSpec& spec) {
  std::visit(overloaded{
                 [](const None&) {},
                 [](const SaltPepper& s) {
                   if (!(s.p >= 0.0 && s.p <= 1.0)) throw ArgumentError("salt_pepper p must lie in [0, 1]");
                 },
                 [](const Gaussian& s) {
                   if (!(s.sigma >= 0.0) || !std::isfinite(s.sigma)) throw ArgumentError("gaussian sigma must be >= 0");
                 },
                 [](const Rayleigh& s) {
                   if (!(s.scale >= 0.0) || !std::isfinite(s.scale)) throw ArgumentError("rayleigh scale must be >= 0");
                 },
                 [](const Uniform& s) {
                   if (!std::isfinite(s.low) || !std::isfinite(s.high) || s.low > s.high) {
                     throw ArgumentError("uniform noise needs finite low <= high");
                   }
                 },
                 [](const Perlin& s) {
                   if (s.resolution < 1 || s.resolution > kSide) throw ArgumentError("perlin resolution must lie in [1, 28]");
                   if (!std::isfinite(s.amplitude)) throw ArgumentError("perlin amplitude must be finite");
                 },
             },
             spec);
}

NoiseSpec parse_noise_spec(std::string_view text) {
  const auto colon = text.find(':');
  const std::string kind(text.substr(0, colon));
  std::map<std::string, double, std::less<>> kv;
  if (colon != std::string_view::npos) {
    std::string_view rest = text.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view item = rest.substr(0, comma);
      const auto eq = item.find('=');
      if (eq == std::string_view::npos) throw ArgumentError("noise parameter '" + std::string(item) + "' lacks '='");
      const std::string key(item.substr(0, eq));
      kv[key] = parse_number(key, item.substr(eq + 1));
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
  }

  auto take = [&](std::string_view key, double fallback, bool required) {
    auto it = kv.find(key);
    if (it == kv.end()) {
      if (required) throw ArgumentError(kind + " noise requires parameter '" + std::string(key) + "'");
      return fallback;
    }
    const double v = it->second;
    kv.erase(it);
    return v;
  };

  NoiseSpec spec;
  if (kind == "none") {
    spec = None{};
  } else if (kind == "salt_pepper") {
    spec = SaltPepper{take("p", 0, true)};
  } else if (kind == "gaussian") {
    spec = Gaussian{take("sigma", 0, true)};
  } else if (kind == "rayleigh") {
    spec = Rayleigh{take("scale", 0, true)};
  } else if (kind == "uniform") {
    const double low = take("low", 0.0, false);
    spec = Uniform{low, take("high", 0, true)};
  } else if (kind == "perlin") {
    const double res = take("res", 0, true);
    if (res != std::floor(res)) throw ArgumentError("perlin res must be an integer");
    spec = Perlin{static_cast<int>(res), take("amp", 1.0, false)};
  } else {
    throw ArgumentError("unknown noise kind '" + kind + "'");
  }
  if (!kv.empty()) throw ArgumentError("unknown parameter '" + kv.begin()->first + "' for " + kind + " noise");
  validate(spec);
  return spec;
}

std::string to_string(const NoiseSpec& spec) {
  return std::visit(overloaded{
                        [](const None&) { return std::string("none"); },
                        [](const SaltPepper& s) { return "salt_pepper:p=" + fmt(s.p); },
                        [](const Gaussian& s) { return "gaussian:sigma=" + fmt(s.sigma); },
                        [](const Rayleigh& s) { return "rayleigh:scale=" + fmt(s.scale); },
                        [](const Uniform& s) { return "uniform:low=" + fmt(s.low) + ",high=" + fmt(s.high); },
                        [](const Perlin& s) {
                          std::string out = "perlin:res=" + std::to_string(s.resolution);
                          if (s.amplitude != 1.0) out += ",amp=" + fmt(s.amplitude);
                          return out;
                        },
                    },
                    spec);
}

std::string kind_name(const NoiseSpec& spec) {
  static constexpr const char* names[] = {"none", "salt_pepper", "gaussian", "rayleigh", "uniform", "perlin"};
  return names[spec.index()];
}

double intensity(const NoiseSpec& spec) {
  return std::visit(overloaded{
                        [](const None&) { return 0.0; },
                        [](const SaltPepper& s) { return s.p; },
                        [](const Gaussian& s) { return s.sigma; },
                        [](const Rayleigh& s) { return s.scale; },
                        [](const Uniform& s) { return s.high; },
                        [](const Perlin& s) { return static_cast<double>(s.resolution); },
                    },
                    spec);
}

NoiseSpec with_parameter(const NoiseSpec& spec, std::string_view param, double value) {
  NoiseSpec out = spec;
  auto expect = [&](std::string_view name) {
    if (param != name) {
      throw ArgumentError("parameter '" + std::string(param) + "' does not apply to " + kind_name(spec) + " noise");
    }
  };
  std::visit(overloaded{
                 [&](None&) { throw ArgumentError("noise kind 'none' has no parameters"); },
                 [&](SaltPepper& s) { expect("p"); s.p = value; },
                 [&](Gaussian& s) { expect("sigma"); s.sigma = value; },
                 [&](Rayleigh& s) { expect("scale"); s.scale = value; },
                 [&](Uniform& s) { expect("high"); s.high = value; },
                 [&](Perlin& s) {
                   expect("res");
                   if (value != std::floor(value)) throw ArgumentError("perlin res must be an integer");
                   s.resolution = static_cast<int>(value);
                 },
             },
             out);
  validate(out);
  return out;
}

Image perlin_field(int resolution, Rng& rng) {
  if (resolution < 1 || resolution > kSide) throw ArgumentError("perlin resolution must lie in [1, 28]");
  const int nodes = resolution + 1;
  std::vector<double> gx(nodes * nodes), gy(nodes * nodes);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  for (int i = 0; i < nodes * nodes; ++i) {
    const double a = angle(rng);
    gx[i] = std::cos(a);
    gy[i] = std::sin(a);
  }
  auto corner = [&](int cx, int cy, double dx, double dy) {
    const int idx = cy * nodes + cx;
    return gx[idx] * dx + gy[idx] * dy;
  };

  Image field{};
  for (int row = 0; row < kSide; ++row) {
    const double y = static_cast<double>(row * resolution) / kSide;
    const int cy = std::min(static_cast<int>(std::floor(y)), resolution - 1);
    const double fy = y - cy;
    for (int col = 0; col < kSide; ++col) {
      const double x = static_cast<double>(col * resolution) / kSide;
      const int cx = std::min(static_cast<int>(std::floor(x)), resolution - 1);
      const double fx = x - cx;
      const double n00 = corner(cx, cy, fx, fy);
      const double n10 = corner(cx + 1, cy, fx - 1, fy);
      const double n01 = corner(cx, cy + 1, fx, fy - 1);
      const double n11 = corner(cx + 1, cy + 1, fx - 1, fy - 1);
      const double u = fade(fx);
      field[row * kSide + col] = lerp(lerp(n00, n10, u), lerp(n01, n11, u), fade(fy));
    }
  }
  return field;
}

Image corrupt(const Image& img, const NoiseSpec& spec, Rng& rng) {
  validate(spec);
  Image out = img;
  std::visit(overloaded{
                 [](const None&) {},
                 [&](const SaltPepper& s) {
                   std::uniform_real_distribution<double> unif(0.0, 1.0);
                   for (auto& px : out) {
                     const double u = unif(rng);
                     if (u < s.p / 2) {
                       px = 0.0;
                     } else if (u < s.p) {
                       px = 1.0;
                     }
                   }
                 },
                 [&](const Gaussian& s) {
                   if (s.sigma == 0.0) return;
                   std::normal_distribution<double> dist(0.0, s.sigma);
                   for (auto& px : out) px += dist(rng);
                 },
                 [&](const Rayleigh& s) {
                   if (s.scale == 0.0) return;
                   std::uniform_real_distribution<double> unif(0.0, 1.0);
                   for (auto& px : out) px += s.scale * std::sqrt(-2.0 * std::log1p(-unif(rng)));
                 },
                 [&](const Uniform& s) {
                   if (s.low == s.high) {
                     for (auto& px : out) px += s.low;
                     return;
                   }
                   std::uniform_real_distribution<double> dist(s.low, s.high);
                   for (auto& px : out) px += dist(rng);
                 },
                 [&](const Perlin& s) {
                   const Image field = perlin_field(s.resolution, rng);
                   for (int i = 0; i < kPixels; ++i) out[i] += s.amplitude * field[i];
                 },
             },
             spec);
  for (auto& px : out) px = std::clamp(px, 0.0, 1.0);
  return out;
}

void corrupt_all(std::span<double> pixels, const NoiseSpec& spec, Rng& rng) {
  if (pixels.size() % kPixels != 0) throw ShapeError("pixel buffer is not a whole number of 28x28 images");
  Image img;
  for (std::size_t off = 0; off < pixels.size(); off += kPixels) {
    std::copy_n(pixels.begin() + off, kPixels, img.begin());
    img = corrupt(img, spec, rng);
    std::copy(img.begin(), img.end(), pixels.begin() + off);
  }
}

}  // namespace qspike::noise
