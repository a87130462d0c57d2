#include "bmit/synth.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bmit {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Xoshiro256::Xoshiro256(std::uint64_t seed) {
  for (auto& word : s_) word = splitmix64(seed);
}

std::uint64_t Xoshiro256::next() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Xoshiro256::uniform() {
  return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

double Xoshiro256::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::string to_string(Family f) {
  switch (f) {
    case Family::independent_uniform: return "independent-uniform";
    case Family::independent_mixture: return "independent-mixture";
    case Family::nonlinear_sine: return "nonlinear-sine";
    case Family::checkerboard: return "checkerboard";
    case Family::ring: return "ring";
  }
  return "?";
}

Family parse_family(const std::string& name) {
  for (auto f : {Family::independent_uniform, Family::independent_mixture, Family::nonlinear_sine,
                 Family::checkerboard, Family::ring}) {
    if (to_string(f) == name) return f;
  }
  throw std::invalid_argument("unknown family '" + name + "'");
}

void SynthSpec::validate() const {
  if (n < 1) throw std::invalid_argument("sample count must be at least 1");
  if (!(noise >= 0) || !std::isfinite(noise)) throw std::invalid_argument("noise must be >= 0");
}

Dataset generate(const SynthSpec& spec) {
  spec.validate();
  Xoshiro256 rng(spec.seed);
  std::vector<double> xs(spec.n), ys(spec.n);
  const double two_pi = 2.0 * std::numbers::pi;

  for (std::size_t i = 0; i < spec.n; ++i) {
    double x = 0, y = 0;
    switch (spec.family) {
      case Family::independent_uniform:
        x = rng.uniform();
        y = rng.uniform();
        break;
      case Family::independent_mixture:
        x = rng.uniform() < 0.5 ? 0.25 + 0.08 * rng.normal() : 0.7 + 0.05 * rng.normal();
        y = rng.uniform() < 1.0 / 3.0 ? 0.2 + 0.05 * rng.normal() : 0.6 + 0.12 * rng.normal();
        break;
      case Family::nonlinear_sine:
        x = rng.uniform();
        y = std::sin(2.0 * two_pi * x) + spec.noise * rng.normal();
        break;
      case Family::checkerboard: {
        const auto cell = static_cast<unsigned>(rng.next() >> 59);  // 0..31
        const unsigned row = cell / 4;
        const unsigned col = 2 * (cell % 4) + (row % 2);
        x = (row + rng.uniform()) / 8.0;
        y = (col + rng.uniform()) / 8.0;
        // Jitter in cell widths; a full 0.1 in data units would blur the board away.
        if (spec.noise > 0) y += spec.noise / 8.0 * rng.normal();
        break;
      }
      case Family::ring: {
        const double theta = two_pi * rng.uniform();
        const double r = 1.0 + spec.noise * rng.normal();
        x = r * std::cos(theta);
        y = r * std::sin(theta);
        break;
      }
    }
    xs[i] = x;
    ys[i] = y;
  }
  return Dataset({Column{"x", ColumnKind::continuous(), std::move(xs)},
                  Column{"y", ColumnKind::continuous(), std::move(ys)}});
}

}  // namespace bmit
