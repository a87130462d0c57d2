#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "bmit/data.hpp"

namespace bmit {

/// xoshiro256** 1.0 (Blackman & Vigna), state seeded from a 64-bit seed by
/// four successive splitmix64 outputs (increment 0x9e3779b97f4a7c15,
/// multipliers 0xbf58476d1ce4e5b9 and 0x94d049bb133111eb). Fixed so that
/// generated data is identical on every platform.
class Xoshiro256 {
 public:
  explicit Xoshiro256(std::uint64_t seed);

  std::uint64_t next();
  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();
  /// Standard normal by Box-Muller, two uniforms per draw, no caching.
  double normal();

 private:
  std::array<std::uint64_t, 4> s_;
};

enum class Family { independent_uniform, independent_mixture, nonlinear_sine, checkerboard, ring };

std::string to_string(Family f);
/// Throws std::invalid_argument for unknown names.
Family parse_family(const std::string& name);

struct SynthSpec {
  Family family = Family::independent_uniform;
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  double noise = 0.1;

  void validate() const;
};

/// Two continuous columns x and y.
///
///  independent-uniform  x, y ~ U(0,1) independently.
///  independent-mixture  x ~ ½N(0.25, 0.08²) + ½N(0.7, 0.05²),
///                       y ~ ⅓N(0.2, 0.05²) + ⅔N(0.6, 0.12²), independently.
///  nonlinear-sine       x ~ U(0,1), y = sin(4πx) + N(0, noise²).
///  checkerboard         uniform on the 32 cells (i+j even) of an 8×8 board
///                       over [0,1]²; marginals are uniform and the 2×2
///                       aggregate is exactly balanced, so only fine grids
///                       show the dependence. noise adds N(0, (noise/8)²)
///                       jitter to y, i.e. noise is in cell widths.
///  ring                 θ ~ U(0,2π), r = 1 + N(0, noise²),
///                       (x, y) = (r cos θ, r sin θ).
Dataset generate(const SynthSpec& spec);

}  // namespace bmit
