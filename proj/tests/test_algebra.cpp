#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <algorithm>

#include "banach/algebra.hpp"
#include "banach/error.hpp"
#include "banach/parallel.hpp"
#include "banach/raster.hpp"
#include "banach/topology.hpp"
#include "support.hpp"

using namespace banach;
using fixtures::Rng;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("raster domains") {
  const auto ann = fixtures::annulus(1.0 / 64);
  std::size_t oracle = 0;
  for (std::size_t idx = 0; idx < ann.size(); ++idx) {
    const double r = std::abs(ann.center(idx));
    oracle += r >= 1.0 && r <= 2.0;
  }
  CHECK(ann.count() == oracle);
  CHECK(ann.margin() == 2);
  CHECK((ann | ann) == ann);
  CHECK((ann - ann).empty());
  CHECK((ann & ann.empty_like()).empty());
  CHECK(ann.subset_of(fixtures::annulus(1.0 / 64, 0.5, 2.0)));
  CHECK_FALSE(fixtures::annulus(1.0 / 64, 0.5, 2.0).subset_of(ann));
  CHECK(ann.same_grid(ann.with_mask(std::vector<std::uint8_t>(ann.size(), 0))));
  CHECK(kind_of([&] { (void)(ann | fixtures::disk(1.0 / 32)); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { RasterDomain(2, 0, 0, 1.0, 4, 4, std::vector<std::uint8_t>(16, 1), 0); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { fixtures::disk(0.0); }) == ErrorKind::InvalidArgument);

  const auto line = RasterDomain::rasterize(1, {-1, 1, 0, 0}, 0.25, [](double, double) { return true; });
  CHECK(line.dim() == 1);
  CHECK(line.ny() == 1);
  CHECK(line.count() == 8);
}

TEST_CASE("instances") {
  const auto fp = make_instance(AlgebraKind::FiniteProduct, Field::Real, 3);
  CHECK(fp->size() == 3);
  CHECK(fp->position(2) == Scalar(2.0));
  const auto circle = make_instance(AlgebraKind::Circle, Field::Complex, 1024);
  CHECK(circle->size() == 1024);
  CHECK(circle->angle(256) == doctest::Approx(std::numbers::pi / 2));
  CHECK(std::abs(circle->position(512) + 1.0) < 1e-15);
  const auto ann = fixtures::annulus(1.0 / 64);
  const auto grid = make_instance(AlgebraKind::GridFunction, Field::Complex, ann);
  CHECK(grid->size() == ann.count());
  for (std::size_t k = 0; k < grid->size(); k += 997) CHECK(grid->point_of(grid->cell_of(k)) == static_cast<std::ptrdiff_t>(k));

  CHECK(kind_of([] { AlgebraInstance::finite_product(Field::Real, 0); }) == ErrorKind::EmptySpectrum);
  CHECK(kind_of([] { AlgebraInstance::circle(Field::Real, 7); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { AlgebraInstance::grid(Field::Real, ann.empty_like()); }) == ErrorKind::EmptySpectrum);
  CHECK(kind_of([&] { make_instance(AlgebraKind::Circle, Field::Real, ann); }) == ErrorKind::InvalidArgument);

  CHECK(fp->equivalent(*AlgebraInstance::finite_product(Field::Real, 3)));
  CHECK(same_owner(fp, AlgebraInstance::finite_product(Field::Real, 3)));
  CHECK_FALSE(fp->equivalent(*AlgebraInstance::finite_product(Field::Complex, 3)));
  CHECK(AlgebraInstance::finite_product(Field::Complex, 2)->bsr1_connected());
  CHECK_FALSE(grid->bsr1_connected());
  CHECK(grid->annotated(true)->bsr1_connected());
}

TEST_CASE("element operations") {
  const auto r3 = AlgebraInstance::finite_product(Field::Real, 3);
  const auto one = Element::one(r3);
  CHECK((invert(one) - one).sup_norm() == 0.0);
  const Element v(r3, {1.0, 2.0, 4.0});
  const Element inv = invert(v);
  CHECK(inv[0] == Scalar(1.0));
  CHECK(inv[1] == Scalar(0.5));
  CHECK(inv[2] == Scalar(0.25));
  CHECK(v.argmin_abs() == 0);
  CHECK((neg(v) + v).sup_norm() == 0.0);
  CHECK((scalar_embed(r3, 3.0) - Element::constant(r3, 3.0)).sup_norm() == 0.0);
  CHECK(sup_norm(v) == 4.0);

  CHECK(kind_of([&] { Element(r3, {Scalar(1.0, 0.5), 0.0, 0.0}); }) == ErrorKind::FieldMismatch);
  CHECK(Element(r3, {Scalar(1.0, 1e-14), 0.0, 0.0})[0].imag() == 0.0);
  CHECK(kind_of([&] { Element(r3, {1.0}); }) == ErrorKind::DimensionMismatch);
  CHECK(kind_of([&] { (void)(v + Element::one(AlgebraInstance::finite_product(Field::Complex, 3))); }) ==
        ErrorKind::OwnerMismatch);

  try {
    invert(Element(r3, {1.0, 0.0, 2.0}));
    FAIL("expected NotInvertible");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotInvertible);
    CHECK(e.detail()["point"] == 1);
  }
}

TEST_CASE("ring laws and norm inequalities") {
  Rng rng(101);
  for (const auto& owner : {AlgebraInstance::finite_product(Field::Complex, 6), AlgebraInstance::circle(Field::Real, 16)}) {
    for (int trial = 0; trial < 1000; ++trial) {
      const Element a = fixtures::random_element(owner, rng), b = fixtures::random_element(owner, rng);
      CHECK((a * b).sup_norm() <= a.sup_norm() * b.sup_norm() + 1e-15);
      CHECK((a + b).sup_norm() <= a.sup_norm() + b.sup_norm() + 1e-15);
      if (trial % 20 == 0) {
        const Element c = fixtures::random_element(owner, rng);
        CHECK(((a * b) * c - a * (b * c)).sup_norm() < 1e-15);
        CHECK((a * b - b * a).sup_norm() == 0.0);
        CHECK((a * (b + c) - (a * b + a * c)).sup_norm() < 1e-15);
      }
    }
  }
}

TEST_CASE("inverse residuals") {
  Rng rng(7);
  const auto fp = AlgebraInstance::finite_product(Field::Complex, 50);
  const Element a = fixtures::random_element(fp, rng) + Element::constant(fp, 2.0);
  CHECK((invert(a) * a - Element::one(fp)).sup_norm() <= 1e-12);
  const auto grid = fixtures::grid(Field::Complex, fixtures::annulus(1.0 / 32));
  const Element z = fixtures::z_of(grid);
  CHECK((invert(z) * z - Element::one(grid)).sup_norm() <= 1e-9);
}

TEST_CASE("tuples") {
  const auto owner = fixtures::grid(Field::Complex, fixtures::annulus(1.0 / 64));
  const Tuple f({fixtures::z_of(owner), fixtures::radial(owner, 1.5)});
  // dense scan of sqrt(r² + (r - 1.5)²) over 1 ≤ r ≤ 2
  double oracle = 1e300;
  for (int i = 0; i <= 100000; ++i) {
    const double r = 1.0 + i / 100000.0;
    oracle = std::min(oracle, std::hypot(r, r - 1.5));
  }
  CHECK(oracle == doctest::Approx(std::sqrt(1.25)).epsilon(1e-9));
  CHECK(f.min_modulus() == doctest::Approx(oracle).epsilon(0.02));
  CHECK(f.min_modulus() >= oracle - 1e-12);

  const auto fp = AlgebraInstance::finite_product(Field::Complex, 2);
  const Tuple u = Tuple::unit(fp, 3, 1);
  CHECK(u.size() == 3);
  CHECK(u[1][0] == Scalar(1.0));
  CHECK(dot(u, Tuple({Element::one(fp), Element::constant(fp, 5.0), Element::zero(fp)}))[1] == Scalar(5.0));
  CHECK(u.append(Element::one(fp)).size() == 4);
  CHECK(u.head(2).size() == 2);
  CHECK(sup_distance(u, u.with(1, Element::zero(fp))) == 1.0);
  CHECK(default_tol(u) == doctest::Approx(2e-8));
  CHECK(kind_of([&] { Tuple({Element::one(fp), Element::one(AlgebraInstance::finite_product(Field::Complex, 4))}); }) ==
        ErrorKind::OwnerMismatch);
}

TEST_CASE("exp and log") {
  const auto r2 = AlgebraInstance::finite_product(Field::Real, 2);
  CHECK((exp_element(Element::zero(r2)) - Element::one(r2)).sup_norm() == 0.0);
  const Element l = log_element(Element(r2, {1.0, std::exp(1.0)}));
  CHECK(std::abs(l[0]) < 1e-15);
  CHECK(std::abs(l[1] - 1.0) < 1e-15);
  CHECK(kind_of([&] { log_element(Element(r2, {1.0, -1.0})); }) == ErrorKind::NonPositiveValue);

  const auto circle = AlgebraInstance::circle(Field::Complex, 1024);
  const Element e1 = Element::from_position(circle, [](Scalar w) { return w; });
  try {
    log_element(e1);
    FAIL("expected LogObstruction");
  } catch (const ObstructionError& e) {
    CHECK(e.kind() == ErrorKind::LogObstruction);
    // oracle: summed principal phase increments
    double total = 0.0;
    for (std::size_t k = 0; k < e1.size(); ++k) total += std::arg(e1[(k + 1) % e1.size()] / e1[k]);
    CHECK(e.report().winding == static_cast<int>(std::lround(total / (2 * std::numbers::pi))));
    CHECK(e.report().winding == 1);
  }

  Rng rng(13);
  const auto c5 = AlgebraInstance::finite_product(Field::Complex, 5);
  for (int trial = 0; trial < 50; ++trial) {
    const Element a = fixtures::random_element(c5, rng) + Element::constant(c5, rng.complex(0.5));
    if (a.min_abs() < 1e-3) continue;
    CHECK((exp_element(log_element(a)) - a).sup_norm() <= 1e-9);
  }
  const Element shifted = Element::from_position(circle, [](Scalar w) { return w + 2.0; });
  CHECK((exp_element(log_element(shifted)) - shifted).sup_norm() <= 1e-9);
}

TEST_CASE("thread count") {
  ::setenv("BANACH_REDUCE_THREADS", "3", 1);
  CHECK(thread_count() == 3);
  ::setenv("BANACH_REDUCE_THREADS", "0", 1);
  CHECK(thread_count() >= 1);
  ::unsetenv("BANACH_REDUCE_THREADS");
  std::vector<int> hits(20000, 0);
  parallel_for(hits.size(), [&](std::size_t k) { hits[k] += 1; });
  CHECK(std::count(hits.begin(), hits.end(), 1) == 20000);
}
