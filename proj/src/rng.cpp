#include "modframe/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace modframe {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;
}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

int Rng::uniform_int(int lo, int hi) {
  if (hi < lo) throw std::invalid_argument("Rng::uniform_int: empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi) - lo + 1;
  return lo + static_cast<int>(bits() % span);
}

double Rng::gaussian() {
  // Box-Muller; u clamped away from 0 so the log stays finite.
  double u = uniform();
  if (u < 0x1.0p-60) u = 0x1.0p-60;
  const double v = uniform();
  return std::sqrt(-2.0 * std::log(u)) * std::cos(kTwoPi * v);
}

Complex Rng::cgaussian() {
  const double re = gaussian();
  const double im = gaussian();
  return Complex(re * kInvSqrt2, im * kInvSqrt2);
}

CMat Rng::gaussian_matrix(Eigen::Index rows, Eigen::Index cols) {
  CMat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = cgaussian();
  return m;
}

CMat Rng::hermitian_matrix(Eigen::Index n) {
  CMat g = gaussian_matrix(n, n);
  return ((g + g.adjoint()) / 2.0).eval();
}

CMat Rng::psd_matrix(Eigen::Index n, double ridge) {
  CMat g = gaussian_matrix(n, n);
  CMat p = g * g.adjoint();
  Eigen::JacobiSVD<CMat> svd(p);
  const double top = svd.singularValues()(0);
  if (top > 0) p /= top;
  return p + ridge * CMat::Identity(n, n);
}

CMat Rng::unitary_matrix(Eigen::Index n) {
  CMat g = gaussian_matrix(n, n);
  Eigen::HouseholderQR<CMat> qr(g);
  CMat q = qr.householderQ();
  CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex d = r(i, i);
    const double a = std::abs(d);
    q.col(i) *= (a > 0) ? d / a : Complex(1.0, 0.0);
  }
  return q;
}

}  // namespace modframe
