#pragma once

#include <utility>
#include <vector>

#include "modframe/algebra.hpp"
#include "modframe/rng.hpp"

namespace modframe {

enum class SpaceKind { Free, MatrixPattern };

/// A finitely generated module over the algebra A = M_n(C), in one of two
/// shapes:
///
///  - Free: A^d, elements are d-tuples of n x n matrices, stored as one
///    coordinate vector of length d * n^2 (blocks in order, each block
///    row-major).
///  - MatrixPattern: the subspace of p x q complex matrices supported on a
///    fixed set of positions, with the A = M_p(C)-valued pairing
///    <x, y> = x y*. Elements are stored as one coordinate per position,
///    in the declared position order.
class ModuleSpace {
 public:
  static ModuleSpace free_module(int rank, int algebra_dim);
  static ModuleSpace pattern_module(int rows, int cols,
                                    std::vector<std::pair<int, int>> positions);

  SpaceKind kind() const { return kind_; }
  bool is_free() const { return kind_ == SpaceKind::Free; }

  /// n for A = M_n(C). For patterns this is the row count p.
  int algebra_dim() const { return algebra_dim_; }
  /// Free rank d (throws for patterns).
  int rank() const;
  int rows() const;
  int cols() const;
  const std::vector<std::pair<int, int>>& positions() const;

  /// Length of the coordinate vector: d * n^2 or |pattern|.
  int ambient_dim() const { return ambient_dim_; }

  bool operator==(const ModuleSpace& other) const;
  bool operator!=(const ModuleSpace& other) const { return !(*this == other); }

 private:
  ModuleSpace() = default;
  SpaceKind kind_ = SpaceKind::Free;
  int algebra_dim_ = 0;
  int rank_ = 0;
  int rows_ = 0;
  int cols_ = 0;
  int ambient_dim_ = 0;
  std::vector<std::pair<int, int>> positions_;
};

struct ModuleVector {
  ModuleVector(ModuleSpace s, CVec c);
  ModuleSpace space;
  CVec coords;
};

ModuleVector zero_vector(const ModuleSpace& space);
/// Unit coordinate direction i (for patterns this is the matrix unit at
/// the i-th pattern position).
ModuleVector coordinate_basis(const ModuleSpace& space, int i);
/// Module basis e_i of a free module: identity of A in block i.
ModuleVector free_module_basis(const ModuleSpace& space, int i);

/// Block i of a free-module element, as an n x n matrix.
CMat free_block(const ModuleVector& x, int i);
void set_free_block(ModuleVector& x, int i, const CMat& block);

/// Pattern element as its dense p x q matrix (throws for free modules).
CMat pattern_matrix(const ModuleVector& x);
ModuleVector pattern_vector(const ModuleSpace& space, const CMat& m);

/// The A-valued inner product: sum_i x_i y_i* on free modules, x y* on
/// pattern spaces. Conjugate-linear in the second argument.
CMat inner_product(const ModuleVector& x, const ModuleVector& y);

/// sqrt(opnorm(<x, x>)).
double module_norm(const ModuleVector& x);

/// Left action of an algebra element. On pattern spaces the action must
/// preserve the pattern; mass landed outside the pattern beyond rounding
/// is a std::domain_error.
ModuleVector algebra_act(const CMat& a, const ModuleVector& x);

/// Basis (matrix units) of the subalgebra of A whose left action maps the
/// space into itself. For free modules this is all of A; for patterns it
/// is the coordinate subspace {g : g_ir = 0 whenever column r has a
/// pattern position in some column c that row i lacks}.
std::vector<CMat> pattern_preserving_algebra_basis(const ModuleSpace& space);

CMat random_preserving_algebra_element(const ModuleSpace& space, Rng& rng);
ModuleVector random_module_vector(const ModuleSpace& space, Rng& rng);

}  // namespace modframe
