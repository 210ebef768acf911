#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "banach/raster.hpp"

namespace banach {

using Scalar = std::complex<double>;

enum class Field { Real, Complex };
enum class AlgebraKind { GridFunction, FiniteProduct, Circle };

std::string_view to_string(Field field);
std::string_view to_string(AlgebraKind kind);

/// A concrete commutative unital Banach algebra with a finite spectrum:
/// continuous functions sampled on the set cells of a raster (GridFunction),
/// the product K^m (FiniteProduct), or functions on N equispaced points of the
/// unit circle (Circle). Point evaluation is the Gelfand transform, so every
/// element is literally its table of values.
class AlgebraInstance {
 public:
  using Descriptor = std::variant<RasterDomain, int>;

  static std::shared_ptr<const AlgebraInstance> grid(Field field, RasterDomain domain);
  static std::shared_ptr<const AlgebraInstance> finite_product(Field field, int m);
  static std::shared_ptr<const AlgebraInstance> circle(Field field, int samples);

  AlgebraKind kind() const noexcept { return kind_; }
  Field field() const noexcept { return field_; }
  bool is_real() const noexcept { return field_ == Field::Real; }
  std::size_t size() const noexcept { return size_; }

  /// Grid instances only.
  const RasterDomain& domain() const;
  /// Grid cell index of spectrum point k (grid instances only).
  std::size_t cell_of(std::size_t k) const { return cells_[k]; }
  /// Spectrum index of a grid cell, or -1 when the cell is not in the domain.
  std::ptrdiff_t point_of(std::size_t cell) const { return point_of_cell_[cell]; }

  /// Position of spectrum point k: x + iy for grids, e^{iθ} for the circle,
  /// k itself for finite products.
  Scalar position(std::size_t k) const;
  /// Angle θ_k = 2πk/N (circle only).
  double angle(std::size_t k) const;

  /// Annotation: bsr A = 1 and U_1(A) connected. Defaults: true for C^m, false
  /// otherwise; grids may be annotated explicitly.
  bool bsr1_connected() const noexcept { return bsr1_connected_; }
  std::shared_ptr<const AlgebraInstance> annotated(bool bsr1_connected) const;

  /// Same kind, field and spectrum.
  bool equivalent(const AlgebraInstance& other) const;

 private:
  AlgebraInstance() = default;

  AlgebraKind kind_ = AlgebraKind::FiniteProduct;
  Field field_ = Field::Complex;
  std::size_t size_ = 0;
  bool bsr1_connected_ = false;
  std::optional<RasterDomain> domain_;
  std::vector<std::size_t> cells_;
  std::vector<std::ptrdiff_t> point_of_cell_;
};

using Instance = std::shared_ptr<const AlgebraInstance>;

Instance make_instance(AlgebraKind kind, Field field, const AlgebraInstance::Descriptor& descriptor);

/// An immutable member of an algebra instance: one scalar per spectrum point.
/// Real instances store complex values with zero imaginary part.
class Element {
 public:
  Element(Instance owner, std::vector<Scalar> values);

  static Element constant(const Instance& owner, Scalar c);
  static Element zero(const Instance& owner) { return constant(owner, 0.0); }
  static Element one(const Instance& owner) { return constant(owner, 1.0); }
  static Element from_function(const Instance& owner, const std::function<Scalar(std::size_t)>& fn);
  /// Values as a function of the point position (see AlgebraInstance::position).
  static Element from_position(const Instance& owner, const std::function<Scalar(Scalar)>& fn);

  const Instance& owner() const noexcept { return owner_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const Scalar> values() const noexcept { return values_; }
  Scalar operator[](std::size_t k) const { return values_[k]; }

  double sup_norm() const;
  double min_abs() const;
  std::size_t argmin_abs() const;

 private:
  Instance owner_;
  std::vector<Scalar> values_;
};

void require_same_owner(const Element& a, const Element& b);
bool same_owner(const Instance& a, const Instance& b);

Element operator+(const Element& a, const Element& b);
Element operator-(const Element& a, const Element& b);
Element operator*(const Element& a, const Element& b);
Element operator-(const Element& a);
Element operator*(Scalar c, const Element& a);
Element add(const Element& a, const Element& b);
Element mul(const Element& a, const Element& b);
Element neg(const Element& a);
Element scalar_embed(const Instance& owner, Scalar c);
double sup_norm(const Element& a);
Element conj(const Element& a);
/// Pointwise modulus, as a real-valued element.
Element abs(const Element& a);
/// Pointwise map; the result must stay in the owner's field.
Element map(const Element& a, const std::function<Scalar(Scalar)>& fn);

/// Multiplicative inverse; throws NotInvertible when min|a| <= tol. The
/// default tolerance is 1e-8 (1 + ‖a‖).
Element invert(const Element& a, std::optional<double> tol = std::nullopt);

Element exp_element(const Element& a);
/// A logarithm h with e^h = a. Grids over C need a continuous phase branch
/// (LogObstruction otherwise), the circle needs winding 0, real instances need
/// positive values (NonPositiveValue).
Element log_element(const Element& a);

/// Ordered list of elements of one owner: an n-tuple over A.
class Tuple {
 public:
  Tuple() = default;
  explicit Tuple(std::vector<Element> coords);

  static Tuple zeros(const Instance& owner, std::size_t n);
  /// The canonical vector e_j (0-based j).
  static Tuple unit(const Instance& owner, std::size_t n, std::size_t j);

  std::size_t size() const noexcept { return coords_.size(); }
  const Element& operator[](std::size_t j) const { return coords_[j]; }
  const std::vector<Element>& coords() const noexcept { return coords_; }
  const Instance& owner() const;

  /// Pointwise Euclidean norm |f|(x) = sqrt(Σ|f_j(x)|²) as a real element.
  Element pointwise_norm() const;
  /// min over the spectrum of |f|.
  double min_modulus() const;
  /// sup over the spectrum of |f|.
  double sup_norm() const;

  Tuple with(std::size_t j, Element value) const;
  Tuple append(Element value) const;
  Tuple head(std::size_t count) const;

 private:
  std::vector<Element> coords_;
};

Tuple operator+(const Tuple& a, const Tuple& b);
Tuple operator-(const Tuple& a, const Tuple& b);
Tuple operator*(const Element& s, const Tuple& a);
/// ⟨f, g⟩ = Σ f_j g_j (bilinear, no conjugation).
Element dot(const Tuple& f, const Tuple& g);
/// sup over the spectrum of |a - b|.
double sup_distance(const Tuple& a, const Tuple& b);

/// Default invertibility tolerance 1e-8 (1 + ‖f‖).
double default_tol(const Tuple& f);
double default_tol(const Element& a);

}  // namespace banach
