#include "modframe/space.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>

namespace modframe {

ModuleSpace ModuleSpace::free_module(int rank, int algebra_dim) {
  if (rank < 1) throw std::invalid_argument("ModuleSpace: rank must be >= 1");
  if (algebra_dim < 1)
    throw std::invalid_argument("ModuleSpace: algebra_dim must be >= 1");
  ModuleSpace s;
  s.kind_ = SpaceKind::Free;
  s.algebra_dim_ = algebra_dim;
  s.rank_ = rank;
  s.ambient_dim_ = rank * algebra_dim * algebra_dim;
  return s;
}

ModuleSpace ModuleSpace::pattern_module(int rows, int cols,
                                        std::vector<std::pair<int, int>> positions) {
  if (rows < 1 || cols < 1)
    throw std::invalid_argument("ModuleSpace: pattern shape must be positive");
  if (positions.empty())
    throw std::invalid_argument("ModuleSpace: pattern must have at least one position");
  std::set<std::pair<int, int>> seen;
  for (const auto& [r, c] : positions) {
    if (r < 0 || r >= rows || c < 0 || c >= cols)
      throw std::invalid_argument("ModuleSpace: pattern position (" + std::to_string(r) +
                                  ", " + std::to_string(c) + ") out of range");
    if (!seen.insert({r, c}).second)
      throw std::invalid_argument("ModuleSpace: duplicate pattern position");
  }
  ModuleSpace s;
  s.kind_ = SpaceKind::MatrixPattern;
  s.algebra_dim_ = rows;
  s.rows_ = rows;
  s.cols_ = cols;
  s.ambient_dim_ = static_cast<int>(positions.size());
  s.positions_ = std::move(positions);
  return s;
}

int ModuleSpace::rank() const {
  if (kind_ != SpaceKind::Free)
    throw std::invalid_argument("ModuleSpace: rank() on a pattern space");
  return rank_;
}

int ModuleSpace::rows() const {
  if (kind_ != SpaceKind::MatrixPattern)
    throw std::invalid_argument("ModuleSpace: rows() on a free module");
  return rows_;
}

int ModuleSpace::cols() const {
  if (kind_ != SpaceKind::MatrixPattern)
    throw std::invalid_argument("ModuleSpace: cols() on a free module");
  return cols_;
}

const std::vector<std::pair<int, int>>& ModuleSpace::positions() const {
  if (kind_ != SpaceKind::MatrixPattern)
    throw std::invalid_argument("ModuleSpace: positions() on a free module");
  return positions_;
}

bool ModuleSpace::operator==(const ModuleSpace& other) const {
  return kind_ == other.kind_ && algebra_dim_ == other.algebra_dim_ &&
         rank_ == other.rank_ && rows_ == other.rows_ && cols_ == other.cols_ &&
         positions_ == other.positions_;
}

ModuleVector::ModuleVector(ModuleSpace s, CVec c) : space(std::move(s)), coords(std::move(c)) {
  if (coords.size() != space.ambient_dim())
    throw std::invalid_argument("ModuleVector: coordinate length " +
                                std::to_string(coords.size()) + " does not match space (" +
                                std::to_string(space.ambient_dim()) + ")");
}

ModuleVector zero_vector(const ModuleSpace& space) {
  return ModuleVector(space, CVec::Zero(space.ambient_dim()));
}

ModuleVector coordinate_basis(const ModuleSpace& space, int i) {
  if (i < 0 || i >= space.ambient_dim())
    throw std::invalid_argument("coordinate_basis: index out of range");
  CVec c = CVec::Zero(space.ambient_dim());
  c(i) = 1.0;
  return ModuleVector(space, c);
}

ModuleVector free_module_basis(const ModuleSpace& space, int i) {
  if (!space.is_free())
    throw std::invalid_argument("free_module_basis: space is not free");
  if (i < 0 || i >= space.rank())
    throw std::invalid_argument("free_module_basis: index out of range");
  ModuleVector x = zero_vector(space);
  set_free_block(x, i, CMat::Identity(space.algebra_dim(), space.algebra_dim()));
  return x;
}

CMat free_block(const ModuleVector& x, int i) {
  if (!x.space.is_free())
    throw std::invalid_argument("free_block: space is not free");
  const int n = x.space.algebra_dim();
  if (i < 0 || i >= x.space.rank())
    throw std::invalid_argument("free_block: index out of range");
  CMat b(n, n);
  const auto* base = x.coords.data() + static_cast<std::ptrdiff_t>(i) * n * n;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) b(r, c) = base[r * n + c];
  return b;
}

void set_free_block(ModuleVector& x, int i, const CMat& block) {
  if (!x.space.is_free())
    throw std::invalid_argument("set_free_block: space is not free");
  const int n = x.space.algebra_dim();
  if (block.rows() != n || block.cols() != n)
    throw std::invalid_argument("set_free_block: block shape mismatch");
  auto* base = x.coords.data() + static_cast<std::ptrdiff_t>(i) * n * n;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) base[r * n + c] = block(r, c);
}

CMat pattern_matrix(const ModuleVector& x) {
  if (x.space.kind() != SpaceKind::MatrixPattern)
    throw std::invalid_argument("pattern_matrix: space is not a pattern");
  CMat m = CMat::Zero(x.space.rows(), x.space.cols());
  const auto& pos = x.space.positions();
  for (size_t i = 0; i < pos.size(); ++i) m(pos[i].first, pos[i].second) = x.coords(i);
  return m;
}

ModuleVector pattern_vector(const ModuleSpace& space, const CMat& m) {
  if (space.kind() != SpaceKind::MatrixPattern)
    throw std::invalid_argument("pattern_vector: space is not a pattern");
  if (m.rows() != space.rows() || m.cols() != space.cols())
    throw std::invalid_argument("pattern_vector: matrix shape mismatch");
  const auto& pos = space.positions();
  CVec c(space.ambient_dim());
  for (size_t i = 0; i < pos.size(); ++i) c(i) = m(pos[i].first, pos[i].second);
  return ModuleVector(space, c);
}

CMat inner_product(const ModuleVector& x, const ModuleVector& y) {
  if (x.space != y.space)
    throw std::invalid_argument("inner_product: vectors live in different spaces");
  const int n = x.space.algebra_dim();
  if (x.space.is_free()) {
    CMat acc = CMat::Zero(n, n);
    for (int i = 0; i < x.space.rank(); ++i)
      acc += free_block(x, i) * free_block(y, i).adjoint();
    return acc;
  }
  return pattern_matrix(x) * pattern_matrix(y).adjoint();
}

double module_norm(const ModuleVector& x) {
  return std::sqrt(opnorm(inner_product(x, x)));
}

ModuleVector algebra_act(const CMat& a, const ModuleVector& x) {
  const int n = x.space.algebra_dim();
  if (a.rows() != n || a.cols() != n)
    throw std::invalid_argument("algebra_act: algebra element has wrong size");
  if (x.space.is_free()) {
    ModuleVector out = zero_vector(x.space);
    for (int i = 0; i < x.space.rank(); ++i)
      set_free_block(out, i, a * free_block(x, i));
    return out;
  }
  const CMat full = a * pattern_matrix(x);
  ModuleVector out = pattern_vector(x.space, full);
  // Anything the action leaves outside the pattern is a real error, not
  // something to silently project away.
  const CMat back = pattern_matrix(out);
  const double leak = max_abs(full - back);
  const double ref = std::max(1.0, max_abs(full));
  if (leak > 1e-12 * ref)
    throw std::domain_error("algebra_act: element does not preserve the pattern (leak " +
                            std::to_string(leak) + ")");
  return out;
}

std::vector<CMat> pattern_preserving_algebra_basis(const ModuleSpace& space) {
  const int n = space.algebra_dim();
  std::vector<CMat> basis;
  if (space.is_free()) {
    basis.reserve(static_cast<size_t>(n) * n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        CMat e = CMat::Zero(n, n);
        e(r, c) = 1.0;
        basis.push_back(std::move(e));
      }
    return basis;
  }
  // g E_{rc} puts column g(:, r) into column c, so g_{ir} must vanish
  // whenever some pattern column c sits in row r but not in row i.
  const auto& pos = space.positions();
  auto in_pattern = [&](int r, int c) {
    return std::find(pos.begin(), pos.end(), std::make_pair(r, c)) != pos.end();
  };
  for (int i = 0; i < n; ++i)
    for (int r = 0; r < n; ++r) {
      bool allowed = true;
      for (const auto& [pr, pc] : pos)
        if (pr == r && !in_pattern(i, pc)) {
          allowed = false;
          break;
        }
      if (allowed) {
        CMat e = CMat::Zero(n, n);
        e(i, r) = 1.0;
        basis.push_back(std::move(e));
      }
    }
  return basis;
}

CMat random_preserving_algebra_element(const ModuleSpace& space, Rng& rng) {
  const auto basis = pattern_preserving_algebra_basis(space);
  const int n = space.algebra_dim();
  CMat a = CMat::Zero(n, n);
  for (const auto& e : basis) a += rng.cgaussian() * e;
  return a;
}

ModuleVector random_module_vector(const ModuleSpace& space, Rng& rng) {
  CVec c(space.ambient_dim());
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = rng.cgaussian();
  return ModuleVector(space, c);
}

}  // namespace modframe
