#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "banach/algebra.hpp"
#include "banach/raster.hpp"

namespace fixtures {

using banach::Box;
using banach::Element;
using banach::Field;
using banach::Instance;
using banach::RasterDomain;
using banach::Scalar;

inline RasterDomain annulus(double h, double r1 = 1.0, double r2 = 2.0) {
  return RasterDomain::rasterize(2, {-r2, r2, -r2, r2}, h, [=](double x, double y) {
    const double r = std::hypot(x, y);
    return r >= r1 && r <= r2;
  });
}

inline RasterDomain disk(double h, double r = 2.0) {
  return RasterDomain::rasterize(2, {-r, r, -r, r}, h, [=](double x, double y) { return std::hypot(x, y) <= r; });
}

inline Instance grid(Field field, const RasterDomain& dom) { return banach::AlgebraInstance::grid(field, dom); }

inline Element z_of(const Instance& owner) {
  return Element::from_position(owner, [](Scalar z) { return z; });
}

inline Element radial(const Instance& owner, double shift) {
  return Element::from_position(owner, [shift](Scalar z) { return Scalar(std::abs(z) - shift); });
}

// Deterministic generator shared by the randomized suites.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  Scalar complex(double scale = 1.0) { return {uniform(-scale, scale), uniform(-scale, scale)}; }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

inline Element random_element(const Instance& owner, Rng& rng, double scale = 1.0) {
  return Element::from_function(owner, [&](std::size_t) {
    return owner->is_real() ? Scalar(rng.uniform(-scale, scale)) : rng.complex(scale);
  });
}

}  // namespace fixtures
