#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "modframe/verdict.hpp"

namespace modframe {

/// 64-bit FNV-1a over a byte string.
std::uint64_t fnv1a64(std::string_view bytes);

/// Deterministic random source. The engine is std::mt19937_64 (bit-exact
/// per the standard); all mappings to doubles are spelled out here instead
/// of using std distributions, whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t bits() { return eng_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Inclusive range; uses rejection-free modulo (fine at these ranges).
  int uniform_int(int lo, int hi);

  /// Standard normal via Box-Muller; always consumes two uniforms and
  /// never caches, so the stream stays position-independent.
  double gaussian();

  /// Complex standard normal (independent N(0, 1/2) parts).
  Complex cgaussian();

  CMat gaussian_matrix(Eigen::Index rows, Eigen::Index cols);
  CMat hermitian_matrix(Eigen::Index n);
  /// G G* scaled to unit operator norm, plus ridge * I.
  CMat psd_matrix(Eigen::Index n, double ridge = 0.0);
  /// Haar-ish unitary: QR of a complex Gaussian with the phase convention
  /// diag(R) > 0, which makes it deterministic.
  CMat unitary_matrix(Eigen::Index n);

 private:
  std::mt19937_64 eng_;
};

}  // namespace modframe
