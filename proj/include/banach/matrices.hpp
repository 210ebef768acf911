#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "banach/algebra.hpp"

namespace banach {

using PointMatrix = Eigen::MatrixXcd;

/// Square n x n matrix whose entries are elements of one algebra instance.
class Matrix {
 public:
  Matrix() = default;
  /// Row-major entries, n * n of them.
  Matrix(Instance owner, std::size_t n, std::vector<Element> entries);

  static Matrix identity(const Instance& owner, std::size_t n);
  static Matrix zero(const Instance& owner, std::size_t n);
  /// Constant matrix: every spectrum point carries the same scalar matrix.
  static Matrix scalar(const Instance& owner, const PointMatrix& m);
  /// Builds the matrix from its value at each spectrum point.
  static Matrix from_points(const Instance& owner, std::size_t n, const std::function<PointMatrix(std::size_t)>& fn);
  static Matrix from_rows(const std::vector<Tuple>& rows);

  std::size_t n() const noexcept { return n_; }
  const Instance& owner() const noexcept { return owner_; }
  const Element& operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }
  const std::vector<Element>& entries() const noexcept { return entries_; }

  /// The scalar matrix obtained by evaluating every entry at spectrum point k.
  PointMatrix at(std::size_t k) const;
  Tuple row(std::size_t i) const;
  Tuple col(std::size_t j) const;
  Matrix transpose() const;
  /// True when every entry is constant over the spectrum.
  bool is_constant(double tol = 0.0) const;
  /// max over entries of the entry sup norm.
  double sup_norm() const;

 private:
  Instance owner_;
  std::size_t n_ = 0;
  std::vector<Element> entries_;
};

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a);
Matrix operator*(Scalar c, const Matrix& a);
Matrix mat_mul(const Matrix& a, const Matrix& b);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix identity(const Instance& owner, std::size_t n);
/// Row vector times matrix: (u M)_j = Σ_i u_i M_ij.
Tuple row_times_matrix(const Tuple& u, const Matrix& m);
/// Applies fn to the scalar matrix at each spectrum point.
Matrix map_points(const Matrix& m, const std::function<PointMatrix(const PointMatrix&)>& fn);

/// Cofactor expansion for n <= 6, fraction-free Bareiss elimination above.
Element determinant(const Matrix& m);
Scalar determinant(const PointMatrix& m);

/// Pointwise inverse; throws NotInvertible when min |det| <= tol.
Matrix mat_inverse(const Matrix& m, std::optional<double> tol = std::nullopt);

/// Scaling and squaring with a Taylor kernel.
PointMatrix expm(const PointMatrix& m);
Matrix mat_exp(const Matrix& m);

/// Logarithm of I + N with N nilpotent (N^n = 0).
Matrix log_unipotent(const Matrix& m);
/// Logarithm series for ‖M - I‖ < 1 (row sums of entry sup norms).
Matrix log_near_identity(const Matrix& m);
/// Skew-symmetric real logarithm of a constant matrix in SO(n).
Eigen::MatrixXd so_log(const Eigen::MatrixXd& w);
Matrix so_log(const Matrix& w);

/// A finite product exp(L_1) ... exp(L_k); an empty list is the identity.
struct ExpProduct {
  Instance owner;
  std::size_t n = 0;
  std::vector<Matrix> logs;
  std::optional<Matrix> target;

  Matrix evaluate() const;
  /// The same product with the factors' signs flipped and order reversed.
  ExpProduct inverse() const;
};

ExpProduct exp_product(const Instance& owner, std::size_t n, std::vector<Matrix> logs = {});
/// Concatenation: evaluates to a.evaluate() * b.evaluate().
ExpProduct concat(const ExpProduct& a, const ExpProduct& b);

/// {S^-1 L_j S}; throws SingularS when det S comes within tol of zero.
ExpProduct conjugate_exp_product(const Matrix& s, const ExpProduct& e, std::optional<double> tol = std::nullopt);

struct ExpCheck {
  double residual = 0.0;
  double tol = 0.0;
  bool passed = false;
};

/// Entrywise sup distance between the evaluated product and the target.
ExpCheck verify_exp_product(const ExpProduct& e, const Matrix& target, double tol);

}  // namespace banach
