#include "banach/matrices.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "banach/error.hpp"
#include "banach/parallel.hpp"

namespace banach {

namespace {

double row_sum_norm(const PointMatrix& m) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) best = std::max(best, m.row(i).cwiseAbs().sum());
  return best;
}

Scalar cofactor_det(const PointMatrix& m, std::vector<Eigen::Index>& cols, Eigen::Index row) {
  if (cols.size() == 1) return m(row, cols[0]);
  if (cols.size() == 2) return m(row, cols[0]) * m(row + 1, cols[1]) - m(row, cols[1]) * m(row + 1, cols[0]);
  Scalar total = 0.0;
  double sign = 1.0;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const Eigen::Index col = cols[c];
    const Scalar a = m(row, col);
    if (a != 0.0) {
      cols.erase(cols.begin() + static_cast<std::ptrdiff_t>(c));
      total += sign * a * cofactor_det(m, cols, row + 1);
      cols.insert(cols.begin() + static_cast<std::ptrdiff_t>(c), col);
    }
    sign = -sign;
  }
  return total;
}

Scalar bareiss_det(PointMatrix a) {
  const Eigen::Index n = a.rows();
  Scalar prev = 1.0;
  double sign = 1.0;
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    Eigen::Index pivot = k;
    for (Eigen::Index i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(pivot, k))) pivot = i;
    if (a(pivot, k) == 0.0) return 0.0;
    if (pivot != k) {
      a.row(k).swap(a.row(pivot));
      sign = -sign;
    }
    for (Eigen::Index i = k + 1; i < n; ++i)
      for (Eigen::Index j = k + 1; j < n; ++j) a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
    prev = a(k, k);
  }
  return sign * a(n - 1, n - 1);
}

void require_square_match(const Matrix& a, const Matrix& b) {
  if (a.n() != b.n()) fail(ErrorKind::DimensionMismatch, "matrix sizes differ", {{"left", a.n()}, {"right", b.n()}});
  if (!same_owner(a.owner(), b.owner())) fail(ErrorKind::OwnerMismatch, "matrices belong to different algebras");
}

}  // namespace

// ---------------------------------------------------------------------------
// Matrix

Matrix::Matrix(Instance owner, std::size_t n, std::vector<Element> entries)
    : owner_(std::move(owner)), n_(n), entries_(std::move(entries)) {
  if (n_ == 0) fail(ErrorKind::DimensionMismatch, "matrix of size zero");
  if (entries_.size() != n_ * n_)
    fail(ErrorKind::DimensionMismatch, "matrix needs n*n entries", {{"n", n_}, {"entries", entries_.size()}});
  for (const auto& e : entries_)
    if (!same_owner(e.owner(), owner_)) fail(ErrorKind::OwnerMismatch, "matrix entry from another algebra");
}

Matrix Matrix::identity(const Instance& owner, std::size_t n) {
  return scalar(owner, PointMatrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
}

Matrix Matrix::zero(const Instance& owner, std::size_t n) {
  return scalar(owner, PointMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
}

Matrix Matrix::scalar(const Instance& owner, const PointMatrix& m) {
  if (m.rows() != m.cols()) fail(ErrorKind::DimensionMismatch, "matrix is not square");
  const auto n = static_cast<std::size_t>(m.rows());
  std::vector<Element> entries;
  entries.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      entries.push_back(Element::constant(owner, m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
  return Matrix(owner, n, std::move(entries));
}

Matrix Matrix::from_points(const Instance& owner, std::size_t n, const std::function<PointMatrix(std::size_t)>& fn) {
  const std::size_t points = owner->size();
  std::vector<std::vector<Scalar>> values(n * n, std::vector<Scalar>(points));
  parallel_for(points, [&](std::size_t k) {
    const PointMatrix m = fn(k);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) values[i * n + j][k] = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  });
  std::vector<Element> entries;
  entries.reserve(n * n);
  for (auto& v : values) entries.emplace_back(owner, std::move(v));
  return Matrix(owner, n, std::move(entries));
}

Matrix Matrix::from_rows(const std::vector<Tuple>& rows) {
  const std::size_t n = rows.size();
  if (n == 0) fail(ErrorKind::DimensionMismatch, "matrix without rows");
  std::vector<Element> entries;
  entries.reserve(n * n);
  for (const auto& r : rows) {
    if (r.size() != n) fail(ErrorKind::DimensionMismatch, "row length differs from row count");
    for (const auto& e : r.coords()) entries.push_back(e);
  }
  return Matrix(rows[0].owner(), n, std::move(entries));
}

PointMatrix Matrix::at(std::size_t k) const {
  const auto n = static_cast<Eigen::Index>(n_);
  PointMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = entries_[static_cast<std::size_t>(i * n + j)][k];
  return m;
}

Tuple Matrix::row(std::size_t i) const {
  return Tuple(std::vector<Element>(entries_.begin() + static_cast<std::ptrdiff_t>(i * n_),
                                    entries_.begin() + static_cast<std::ptrdiff_t>((i + 1) * n_)));
}

Tuple Matrix::col(std::size_t j) const {
  std::vector<Element> c;
  c.reserve(n_);
  for (std::size_t i = 0; i < n_; ++i) c.push_back((*this)(i, j));
  return Tuple(std::move(c));
}

Matrix Matrix::transpose() const {
  std::vector<Element> e;
  e.reserve(n_ * n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) e.push_back((*this)(j, i));
  return Matrix(owner_, n_, std::move(e));
}

bool Matrix::is_constant(double tol) const {
  for (const auto& e : entries_)
    for (std::size_t k = 1; k < e.size(); ++k)
      if (std::abs(e[k] - e[0]) > tol) return false;
  return true;
}

double Matrix::sup_norm() const {
  double m = 0.0;
  for (const auto& e : entries_) m = std::max(m, e.sup_norm());
  return m;
}

// ---------------------------------------------------------------------------
// ring operations

Matrix operator+(const Matrix& a, const Matrix& b) {
  require_square_match(a, b);
  std::vector<Element> e;
  e.reserve(a.entries().size());
  for (std::size_t k = 0; k < a.entries().size(); ++k) e.push_back(a.entries()[k] + b.entries()[k]);
  return Matrix(a.owner(), a.n(), std::move(e));
}

Matrix operator-(const Matrix& a, const Matrix& b) { return a + (-b); }

Matrix operator-(const Matrix& a) { return Scalar(-1.0) * a; }

Matrix operator*(Scalar c, const Matrix& a) {
  std::vector<Element> e;
  e.reserve(a.entries().size());
  for (const auto& x : a.entries()) e.push_back(c * x);
  return Matrix(a.owner(), a.n(), std::move(e));
}

Matrix mat_mul(const Matrix& a, const Matrix& b) {
  require_square_match(a, b);
  const std::size_t n = a.n();
  std::vector<Element> e;
  e.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Element acc = a(i, 0) * b(0, j);
      for (std::size_t l = 1; l < n; ++l) acc = acc + a(i, l) * b(l, j);
      e.push_back(std::move(acc));
    }
  return Matrix(a.owner(), n, std::move(e));
}

Matrix operator*(const Matrix& a, const Matrix& b) { return mat_mul(a, b); }

Matrix identity(const Instance& owner, std::size_t n) { return Matrix::identity(owner, n); }

Tuple row_times_matrix(const Tuple& u, const Matrix& m) {
  if (u.size() != m.n()) fail(ErrorKind::DimensionMismatch, "row length differs from matrix size");
  std::vector<Element> out;
  out.reserve(m.n());
  for (std::size_t j = 0; j < m.n(); ++j) {
    Element acc = u[0] * m(0, j);
    for (std::size_t i = 1; i < m.n(); ++i) acc = acc + u[i] * m(i, j);
    out.push_back(std::move(acc));
  }
  return Tuple(std::move(out));
}

Matrix map_points(const Matrix& m, const std::function<PointMatrix(const PointMatrix&)>& fn) {
  return Matrix::from_points(m.owner(), m.n(), [&](std::size_t k) { return fn(m.at(k)); });
}

Scalar determinant(const PointMatrix& m) {
  if (m.rows() != m.cols()) fail(ErrorKind::DimensionMismatch, "matrix is not square");
  if (m.rows() <= 6) {
    std::vector<Eigen::Index> cols(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) cols[static_cast<std::size_t>(c)] = c;
    return cofactor_det(m, cols, 0);
  }
  return bareiss_det(m);
}

Element determinant(const Matrix& m) {
  std::vector<Scalar> out(m.owner()->size());
  parallel_for(out.size(), [&](std::size_t k) { out[k] = determinant(m.at(k)); });
  return Element(m.owner(), std::move(out));
}

Matrix mat_inverse(const Matrix& m, std::optional<double> tol) {
  const Element det = determinant(m);
  const double t = tol.value_or(default_tol(det));
  const std::size_t k = det.argmin_abs();
  if (!(std::abs(det[k]) > t))
    fail(ErrorKind::NotInvertible, "matrix is singular at a spectrum point", {{"point", k}, {"det_modulus", std::abs(det[k])}});
  return map_points(m, [](const PointMatrix& a) { return PointMatrix(a.partialPivLu().inverse()); });
}

// ---------------------------------------------------------------------------
// exponentials and logarithms

PointMatrix expm(const PointMatrix& m) {
  const Eigen::Index n = m.rows();
  const double norm = row_sum_norm(m);
  int s = 0;
  if (norm > 0.5) s = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const PointMatrix a = m / std::ldexp(1.0, s);
  PointMatrix sum = PointMatrix::Identity(n, n);
  PointMatrix term = PointMatrix::Identity(n, n);
  for (int k = 1; k <= 40; ++k) {
    term = term * a / static_cast<double>(k);
    sum += term;
    if (row_sum_norm(term) <= 1e-18 * row_sum_norm(sum)) break;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

Matrix mat_exp(const Matrix& m) {
  return map_points(m, [](const PointMatrix& a) { return expm(a); });
}

Matrix log_unipotent(const Matrix& m) {
  const std::size_t n = m.n();
  const Matrix nil = m - identity(m.owner(), n);
  Matrix power = nil;
  Matrix log = nil;
  for (std::size_t k = 2; k <= n; ++k) {
    power = power * nil;
    if (k < n) log = log + (Scalar(k % 2 == 0 ? -1.0 : 1.0) / static_cast<double>(k)) * power;
  }
  if (n == 1) power = nil;
  const double scale = std::pow(1.0 + nil.sup_norm(), static_cast<double>(n));
  const double residual = power.sup_norm();
  if (residual > 1e-10 * scale)
    fail(ErrorKind::NotUnipotent, "M - I is not nilpotent", {{"power", n}, {"residual", residual}});
  const double round_trip = (mat_exp(log) - m).sup_norm();
  if (round_trip > 1e-9 * (1.0 + m.sup_norm()))
    fail(ErrorKind::NotUnipotent, "logarithm series does not reproduce M", {{"power", n}, {"residual", round_trip}});
  return log;
}

Matrix log_near_identity(const Matrix& m) {
  const std::size_t n = m.n();
  const Matrix nil = m - identity(m.owner(), n);
  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += nil(i, j).sup_norm();
    norm = std::max(norm, row);
  }
  if (!(norm < 1.0)) fail(ErrorKind::NotNearIdentity, "M is not within the logarithm radius of I", {{"norm", norm}});
  const Matrix log = map_points(nil, [](const PointMatrix& x) {
    PointMatrix sum = x;
    PointMatrix power = x;
    for (int k = 2; k < 1000000; ++k) {
      power = power * x;
      const PointMatrix term = ((k % 2 == 0) ? -1.0 : 1.0) / static_cast<double>(k) * power;
      sum += term;
      if (row_sum_norm(term) < 1e-14) break;
    }
    return sum;
  });
  const double round_trip = (mat_exp(log) - m).sup_norm();
  if (round_trip > 1e-9 * (1.0 + m.sup_norm()))
    fail(ErrorKind::NotNearIdentity, "logarithm series does not reproduce M", {{"norm", norm}, {"residual", round_trip}});
  return log;
}

Eigen::MatrixXd so_log(const Eigen::MatrixXd& w) {
  const Eigen::Index n = w.rows();
  if (n != w.cols() || n == 0) fail(ErrorKind::NotSpecialOrthogonal, "matrix is not square");
  const double orth = (w.transpose() * w - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
  const double det = w.determinant();
  if (orth > 1e-10 || std::abs(det - 1.0) > 1e-10)
    fail(ErrorKind::NotSpecialOrthogonal, "matrix is not in SO(n)", {{"orthogonality", orth}, {"det", det}});

  Eigen::RealSchur<Eigen::MatrixXd> schur(w);
  const Eigen::MatrixXd& t = schur.matrixT();
  const Eigen::MatrixXd& u = schur.matrixU();
  Eigen::MatrixXd lt = Eigen::MatrixXd::Zero(n, n);
  std::vector<Eigen::Index> flips;
  for (Eigen::Index i = 0; i < n;) {
    if (i + 1 < n && std::abs(t(i + 1, i)) > 1e-12) {
      const double theta = std::atan2(0.5 * (t(i + 1, i) - t(i, i + 1)), 0.5 * (t(i, i) + t(i + 1, i + 1)));
      lt(i, i + 1) = -theta;
      lt(i + 1, i) = theta;
      i += 2;
    } else {
      if (t(i, i) < 0.0) flips.push_back(i);
      i += 1;
    }
  }
  // det = 1 forces an even number of -1 eigenvalues; pair them into half turns
  for (std::size_t p = 0; p + 1 < flips.size(); p += 2) {
    lt(flips[p], flips[p + 1]) = -std::numbers::pi;
    lt(flips[p + 1], flips[p]) = std::numbers::pi;
  }
  Eigen::MatrixXd l = u * lt * u.transpose();
  l = 0.5 * (l - l.transpose());
  const double residual = (expm(l.cast<Scalar>()).real() - w).cwiseAbs().maxCoeff();
  if (flips.size() % 2 != 0 || residual > 1e-9)
    fail(ErrorKind::NotSpecialOrthogonal, "block logarithm does not reproduce W", {{"residual", residual}});
  return l;
}

Matrix so_log(const Matrix& w) {
  if (!w.is_constant(1e-12)) fail(ErrorKind::NotSpecialOrthogonal, "entries are not scalars");
  const PointMatrix m = w.at(0);
  if (m.imag().cwiseAbs().maxCoeff() > 1e-12) fail(ErrorKind::NotSpecialOrthogonal, "entries are not real");
  return Matrix::scalar(w.owner(), so_log(Eigen::MatrixXd(m.real())).cast<Scalar>());
}

// ---------------------------------------------------------------------------
// exponential products

Matrix ExpProduct::evaluate() const {
  if (logs.empty()) return identity(owner, n);
  for (const auto& l : logs)
    if (l.n() != n) fail(ErrorKind::DimensionMismatch, "factor size differs from product size");
  return Matrix::from_points(owner, n, [&](std::size_t k) {
    PointMatrix acc = expm(logs[0].at(k));
    for (std::size_t j = 1; j < logs.size(); ++j) acc = acc * expm(logs[j].at(k));
    return acc;
  });
}

ExpProduct ExpProduct::inverse() const {
  ExpProduct out{owner, n, {}, std::nullopt};
  for (auto it = logs.rbegin(); it != logs.rend(); ++it) out.logs.push_back(-*it);
  return out;
}

ExpProduct exp_product(const Instance& owner, std::size_t n, std::vector<Matrix> logs) {
  return ExpProduct{owner, n, std::move(logs), std::nullopt};
}

ExpProduct concat(const ExpProduct& a, const ExpProduct& b) {
  if (a.n != b.n) fail(ErrorKind::DimensionMismatch, "products of different sizes");
  ExpProduct out{a.owner, a.n, a.logs, std::nullopt};
  out.logs.insert(out.logs.end(), b.logs.begin(), b.logs.end());
  return out;
}

ExpProduct conjugate_exp_product(const Matrix& s, const ExpProduct& e, std::optional<double> tol) {
  if (s.n() != e.n) fail(ErrorKind::DimensionMismatch, "conjugator size differs from product size");
  const Element det = determinant(s);
  const double t = tol.value_or(default_tol(det));
  if (!(det.min_abs() > t)) fail(ErrorKind::SingularS, "conjugating matrix is singular", {{"det_min", det.min_abs()}});
  const Matrix inv = mat_inverse(s, 0.0);
  ExpProduct out{e.owner, e.n, {}, std::nullopt};
  for (const auto& l : e.logs) out.logs.push_back(inv * l * s);
  return out;
}

ExpCheck verify_exp_product(const ExpProduct& e, const Matrix& target, double tol) {
  if (target.n() != e.n) fail(ErrorKind::DimensionMismatch, "target size differs from product size");
  const double residual = (e.evaluate() - target).sup_norm();
  return {residual, tol, residual <= tol};
}

}  // namespace banach
