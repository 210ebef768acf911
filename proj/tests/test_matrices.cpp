#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <unsupported/Eigen/MatrixFunctions>

#include "banach/error.hpp"
#include "banach/matrices.hpp"
#include "support.hpp"

using namespace banach;
using fixtures::Rng;

namespace {

// Leibniz expansion over all permutations.
Scalar leibniz_det(const PointMatrix& m) {
  const int n = static_cast<int>(m.rows());
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  Scalar total = 0.0;
  do {
    int inversions = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) inversions += p[i] > p[j];
    Scalar term = inversions % 2 ? -1.0 : 1.0;
    for (int i = 0; i < n; ++i) term *= m(i, p[i]);
    total += term;
  } while (std::next_permutation(p.begin(), p.end()));
  return total;
}

PointMatrix random_point_matrix(Rng& rng, int n, double scale) {
  PointMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = rng.complex(scale);
  return m;
}

Matrix random_matrix(const Instance& owner, std::size_t n, Rng& rng, double scale = 1.0) {
  return Matrix::from_points(owner, n, [&](std::size_t) { return random_point_matrix(rng, static_cast<int>(n), scale); });
}

double distance(const Matrix& a, const Matrix& b) { return (a - b).sup_norm(); }

}  // namespace

TEST_CASE("determinants") {
  const auto owner = AlgebraInstance::finite_product(Field::Complex, 3);
  CHECK((determinant(Matrix::identity(owner, 3)) - Element::one(owner)).sup_norm() == 0.0);

  SUBCASE("3-cycle for n = 2") {
    PointMatrix w3 = PointMatrix::Zero(3, 3);
    w3.col(0)(2) = 1.0;
    w3.col(1)(0) = 1.0;
    w3.col(2)(1) = 1.0;
    CHECK(std::abs(leibniz_det(w3) - 1.0) < 1e-15);
    CHECK(std::abs(determinant(w3) - 1.0) < 1e-15);
  }
  SUBCASE("against the permutation expansion") {
    Rng rng(3);
    for (int n = 1; n <= 8; ++n) {
      const PointMatrix m = random_point_matrix(rng, n, 1.0);
      const Scalar oracle = leibniz_det(m);
      CHECK(std::abs(determinant(m) - oracle) <= 1e-11 * (1.0 + std::abs(oracle)));
    }
  }
  SUBCASE("singular and empty") {
    PointMatrix s(2, 2);
    s << 1.0, 2.0, 2.0, 4.0;
    CHECK(std::abs(determinant(s)) < 1e-15);
    PointMatrix big = PointMatrix::Zero(7, 7);
    CHECK(std::abs(determinant(big)) == 0.0);
  }
  SUBCASE("multiplicative on random pairs") {
    Rng rng(8);
    for (int trial = 0; trial < 25; ++trial) {
      const Matrix a = random_matrix(owner, 3, rng), b = random_matrix(owner, 3, rng);
      const Element lhs = determinant(a * b), rhs = determinant(a) * determinant(b);
      CHECK((lhs - rhs).sup_norm() <= 1e-10);
    }
  }
}

TEST_CASE("products and rows") {
  Rng rng(4);
  const auto owner = AlgebraInstance::finite_product(Field::Complex, 2);
  const Matrix m = random_matrix(owner, 3, rng);
  const Tuple first = row_times_matrix(Tuple::unit(owner, 3, 0), m);
  for (std::size_t j = 0; j < 3; ++j) CHECK((first[j] - m.row(0)[j]).sup_norm() == 0.0);
  CHECK(distance(mat_mul(identity(owner, 3), m), m) == 0.0);
  CHECK(distance(m.transpose().transpose(), m) == 0.0);
  CHECK_THROWS_AS(mat_mul(m, Matrix::identity(owner, 2)), Error);
  CHECK_THROWS_AS(row_times_matrix(Tuple::unit(owner, 2, 0), m), Error);
  CHECK_THROWS_AS(mat_mul(m, Matrix::identity(AlgebraInstance::finite_product(Field::Complex, 5), 3)), Error);
}

TEST_CASE("inverse") {
  Rng rng(12);
  const auto owner = AlgebraInstance::finite_product(Field::Complex, 4);
  const Matrix m = random_matrix(owner, 3, rng) + Matrix::scalar(owner, PointMatrix::Identity(3, 3) * 3.0);
  CHECK(distance(mat_inverse(m) * m, Matrix::identity(owner, 3)) < 1e-12);
  CHECK_THROWS_AS(mat_inverse(Matrix::zero(owner, 2)), Error);
}

TEST_CASE("matrix exponential") {
  const auto owner = AlgebraInstance::finite_product(Field::Complex, 2);
  CHECK(distance(mat_exp(Matrix::zero(owner, 3)), Matrix::identity(owner, 3)) == 0.0);
  PointMatrix nil = PointMatrix::Zero(2, 2);
  nil(0, 1) = Scalar(2.0, -1.0);
  PointMatrix expected = PointMatrix::Identity(2, 2);
  expected(0, 1) = nil(0, 1);
  CHECK((expm(nil) - expected).cwiseAbs().maxCoeff() < 1e-15);
  PointMatrix d = PointMatrix::Zero(2, 2);
  d(0, 0) = Scalar(0.5, 1.0);
  d(1, 1) = -3.0;
  const PointMatrix ed = expm(d);
  CHECK(std::abs(ed(0, 0) - std::exp(d(0, 0))) < 1e-14);
  CHECK(std::abs(ed(1, 1) - std::exp(-3.0)) < 1e-15);
  CHECK(std::abs(ed(0, 1)) == 0.0);

  Rng rng(19);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = rng.integer(1, 7);
    const double scale = rng.uniform(0.01, 4.0);
    const PointMatrix m = random_point_matrix(rng, n, scale);
    const PointMatrix oracle = m.exp();
    const double err = (expm(m) - oracle).cwiseAbs().maxCoeff();
    CHECK(err <= 1e-10 * (1.0 + oracle.cwiseAbs().maxCoeff()));
  }

  SUBCASE("commuting diagonal family") {
    PointMatrix a = PointMatrix::Zero(3, 3), b = PointMatrix::Zero(3, 3);
    for (int i = 0; i < 3; ++i) {
      a(i, i) = rng.complex();
      b(i, i) = rng.complex();
    }
    REQUIRE((a * b - b * a).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((expm(a + b) - expm(a) * expm(b)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("unipotent logarithm") {
  const auto owner = AlgebraInstance::finite_product(Field::Complex, 2);
  CHECK(log_unipotent(Matrix::identity(owner, 3)).sup_norm() == 0.0);
  PointMatrix m = PointMatrix::Identity(2, 2);
  m(0, 1) = 5.0;
  const Matrix l = log_unipotent(Matrix::scalar(owner, m));
  CHECK(std::abs(l.at(0)(0, 1) - 5.0) < 1e-15);
  CHECK(std::abs(l.at(1)(0, 0)) == 0.0);

  Rng rng(2);
  PointMatrix n3 = PointMatrix::Zero(3, 3);
  n3(0, 1) = rng.complex();
  n3(0, 2) = rng.complex();
  n3(1, 2) = rng.complex();
  const PointMatrix series = n3 - n3 * n3 / 2.0;
  const Matrix l3 = log_unipotent(Matrix::scalar(owner, PointMatrix::Identity(3, 3) + n3));
  CHECK((l3.at(0) - series).cwiseAbs().maxCoeff() < 1e-14);
  const auto target = Matrix::scalar(owner, PointMatrix::Identity(3, 3) + n3);
  CHECK(verify_exp_product(exp_product(owner, 3, {l3}), target, 1e-9).passed);

  PointMatrix bad = PointMatrix::Identity(2, 2);
  bad(1, 0) = 1.0;
  bad(0, 1) = 1.0;
  try {
    log_unipotent(Matrix::scalar(owner, bad));
    FAIL("expected NotUnipotent");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotUnipotent);
  }
}

TEST_CASE("near-identity logarithm") {
  const auto owner = AlgebraInstance::finite_product(Field::Complex, 3);
  CHECK(log_near_identity(Matrix::identity(owner, 2)).sup_norm() == 0.0);
  const Matrix l = log_near_identity(Matrix::scalar(owner, PointMatrix::Identity(2, 2) * 1.1));
  CHECK(std::abs(l.at(2)(1, 1) - std::log(1.1)) < 1e-14);
  CHECK(std::abs(l.at(2)(0, 1)) < 1e-15);

  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const auto m = Matrix::from_points(owner, 3, [&](std::size_t) {
      PointMatrix r = random_point_matrix(rng, 3, 1.0);
      return PointMatrix(PointMatrix::Identity(3, 3) + 0.3 * r / r.cwiseAbs().rowwise().sum().maxCoeff());
    });
    const Matrix log_m = log_near_identity(m);
    CHECK(verify_exp_product(exp_product(owner, 3, {log_m}), m, 1e-9).passed);
  }
  try {
    log_near_identity(Matrix::scalar(owner, PointMatrix::Identity(2, 2) * 2.5));
    FAIL("expected NotNearIdentity");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotNearIdentity);
  }
}

TEST_CASE("special orthogonal logarithm") {
  CHECK(so_log(Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-15);
  Eigen::MatrixXd quarter(2, 2);
  quarter << 0, -1, 1, 0;
  Eigen::MatrixXd expected(2, 2);
  expected << 0, -std::numbers::pi / 2, std::numbers::pi / 2, 0;
  CHECK((so_log(quarter) - expected).cwiseAbs().maxCoeff() < 1e-14);

  SUBCASE("3-cycle") {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(3, 3);
    w(2, 0) = 1;
    w(0, 1) = 1;
    w(1, 2) = 1;
    const Eigen::MatrixXd l = so_log(w);
    CHECK((l + l.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((Eigen::MatrixXd(l.exp()) - w).cwiseAbs().maxCoeff() < 1e-9);
    // rotation by 2π/3 about the axis (1, 1, 1)
    const Eigen::Vector3d axis(l(2, 1), l(0, 2), l(1, 0));
    CHECK(axis.norm() == doctest::Approx(2 * std::numbers::pi / 3));
    CHECK(std::abs(axis.normalized().dot(Eigen::Vector3d::Ones().normalized())) == doctest::Approx(1.0));
  }
  SUBCASE("half turns and random rotations") {
    Eigen::MatrixXd flip = Eigen::MatrixXd::Identity(4, 4);
    flip(0, 0) = flip(1, 1) = -1;
    CHECK((Eigen::MatrixXd(so_log(flip).exp()) - flip).cwiseAbs().maxCoeff() < 1e-9);
    Rng rng(6);
    for (int trial = 0; trial < 10; ++trial) {
      const int n = rng.integer(2, 6);
      Eigen::MatrixXd a(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = rng.uniform(-2, 2);
      const Eigen::MatrixXd skew = a - a.transpose();
      const Eigen::MatrixXd w = skew.exp();
      CHECK((Eigen::MatrixXd(so_log(w).exp()) - w).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
  SUBCASE("rejections") {
    Eigen::MatrixXd reflect = Eigen::MatrixXd::Identity(2, 2);
    reflect(1, 1) = -1;
    CHECK_THROWS_AS(so_log(reflect), Error);
    CHECK_THROWS_AS(so_log(Eigen::MatrixXd::Identity(2, 2) * 2.0), Error);
  }
  SUBCASE("embedded") {
    const auto owner = AlgebraInstance::finite_product(Field::Real, 2);
    PointMatrix q = PointMatrix::Zero(2, 2);
    q(0, 1) = -1.0;
    q(1, 0) = 1.0;
    const Matrix l = so_log(Matrix::scalar(owner, q));
    CHECK(verify_exp_product(exp_product(owner, 2, {l}), Matrix::scalar(owner, q), 1e-9).passed);
    const auto varying = Matrix::from_points(owner, 2, [&](std::size_t k) { return PointMatrix(q * (k == 0 ? 1.0 : -1.0)); });
    CHECK_THROWS_AS(so_log(varying), Error);
  }
}

TEST_CASE("exponential products") {
  Rng rng(29);
  const auto owner = AlgebraInstance::finite_product(Field::Complex, 3);
  CHECK(verify_exp_product(exp_product(owner, 3), Matrix::identity(owner, 3), 0.0).residual == 0.0);

  std::vector<Matrix> logs{random_matrix(owner, 3, rng, 0.5), random_matrix(owner, 3, rng, 0.5)};
  const ExpProduct e = exp_product(owner, 3, logs);
  const Matrix direct = mat_exp(logs[0]) * mat_exp(logs[1]);
  CHECK(distance(e.evaluate(), direct) < 1e-13);
  CHECK(distance(e.evaluate() * e.inverse().evaluate(), Matrix::identity(owner, 3)) < 1e-12);
  CHECK(distance(concat(e, e.inverse()).evaluate(), Matrix::identity(owner, 3)) < 1e-12);

  SUBCASE("conjugation") {
    CHECK(distance(conjugate_exp_product(Matrix::identity(owner, 3), e).evaluate(), e.evaluate()) < 1e-13);
    const auto zero = conjugate_exp_product(random_matrix(owner, 3, rng), exp_product(owner, 3, {Matrix::zero(owner, 3)}));
    CHECK(zero.logs[0].sup_norm() < 1e-13);
    for (int trial = 0; trial < 10; ++trial) {
      const Matrix s = random_matrix(owner, 3, rng) + Matrix::scalar(owner, PointMatrix::Identity(3, 3) * 2.0);
      const Matrix lhs = mat_inverse(s) * e.evaluate() * s;
      CHECK(distance(lhs, conjugate_exp_product(s, e).evaluate()) <= 1e-8);
    }
    try {
      conjugate_exp_product(Matrix::zero(owner, 3), e);
      FAIL("expected SingularS");
    } catch (const Error& err) {
      CHECK(err.kind() == ErrorKind::SingularS);
    }
  }
  SUBCASE("constructed violation") {
    const Matrix l = random_matrix(owner, 3, rng, 0.5);
    const Matrix r = random_matrix(owner, 3, rng);
    const Matrix target = mat_exp(l) * (Matrix::identity(owner, 3) + Scalar(1e-3) * r);
    const auto check = verify_exp_product(exp_product(owner, 3, {l}), target, 1e-6);
    CHECK_FALSE(check.passed);
    CHECK(check.residual > 1e-6);
  }
}
