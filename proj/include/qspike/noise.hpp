#pragma once

#include <array>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace qspike::noise {

inline constexpr int kSide = 28;
inline constexpr int kPixels = kSide * kSide;

using Image = std::array<double, kPixels>;
using Rng = std::mt19937_64;

struct None {};
/// Each pixel replaced with probability p: pepper (0) and salt (1) at p/2 each.
struct SaltPepper { double p = 0.0; };
struct Gaussian { double sigma = 0.0; };
struct Rayleigh { double scale = 0.0; };
struct Uniform { double low = 0.0; double high = 0.0; };
/// Additive Perlin field with `resolution` lattice cells per axis.
struct Perlin {
  int resolution = 1;
  double amplitude = 1.0;
};

using NoiseSpec = std::variant<None, SaltPepper, Gaussian, Rayleigh, Uniform, Perlin>;

/// Throws ArgumentError when a parameter is outside its range.
void validate(const NoiseSpec& spec);

/// Parses `kind[:key=value[,key=value]]`, e.g. `salt_pepper:p=0.3`,
/// `gaussian:sigma=0.3`, `rayleigh:scale=0.3`, `uniform:low=0,high=0.3`,
/// `perlin:res=14` or `none`.
NoiseSpec parse_noise_spec(std::string_view text);

/// Canonical text form accepted by parse_noise_spec.
std::string to_string(const NoiseSpec& spec);

/// Name of the spec's kind (`gaussian`, ...).
std::string kind_name(const NoiseSpec& spec);

/// The spec's intensity parameter (p, sigma, scale, high, resolution; 0 for none).
double intensity(const NoiseSpec& spec);

/// Returns a copy of `spec` with its intensity parameter replaced by `value`.
/// The parameter name must be the one `intensity` reports for the kind.
NoiseSpec with_parameter(const NoiseSpec& spec, std::string_view param, double value);

/// Corrupts a 28x28 image with pixels in [0, 1]; the result is clamped to [0, 1].
Image corrupt(const Image& img, const NoiseSpec& spec, Rng& rng);

/// Applies `corrupt` to a row-major stack of images in place.
void corrupt_all(std::span<double> pixels, const NoiseSpec& spec, Rng& rng);

/// Classic 2-D gradient noise over a (resolution+1)^2 lattice of random unit
/// gradients, sampled at pixel positions x = col * resolution / 28. Zero at
/// lattice points; bounded by sqrt(2)/2 in magnitude.
Image perlin_field(int resolution, Rng& rng);

}  // namespace qspike::noise
