#include "banach/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "banach/error.hpp"
#include "banach/topology.hpp"

namespace banach {

std::string_view to_string(Field field) { return field == Field::Real ? "R" : "C"; }

std::string_view to_string(AlgebraKind kind) {
  switch (kind) {
    case AlgebraKind::GridFunction: return "GridFunction";
    case AlgebraKind::FiniteProduct: return "FiniteProduct";
    case AlgebraKind::Circle: return "Circle";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// AlgebraInstance

Instance AlgebraInstance::grid(Field field, RasterDomain domain) {
  if (domain.empty()) fail(ErrorKind::EmptySpectrum, "grid domain has no cells");
  std::shared_ptr<AlgebraInstance> inst(new AlgebraInstance());
  inst->kind_ = AlgebraKind::GridFunction;
  inst->field_ = field;
  inst->cells_ = domain.cells();
  inst->size_ = inst->cells_.size();
  inst->point_of_cell_.assign(domain.size(), -1);
  for (std::size_t k = 0; k < inst->cells_.size(); ++k)
    inst->point_of_cell_[inst->cells_[k]] = static_cast<std::ptrdiff_t>(k);
  inst->domain_ = std::move(domain);
  return inst;
}

Instance AlgebraInstance::finite_product(Field field, int m) {
  if (m < 1) fail(ErrorKind::EmptySpectrum, "finite product needs m >= 1", {{"m", m}});
  std::shared_ptr<AlgebraInstance> inst(new AlgebraInstance());
  inst->kind_ = AlgebraKind::FiniteProduct;
  inst->field_ = field;
  inst->size_ = static_cast<std::size_t>(m);
  inst->bsr1_connected_ = field == Field::Complex;
  return inst;
}

Instance AlgebraInstance::circle(Field field, int samples) {
  if (samples < 8) fail(ErrorKind::InvalidArgument, "circle needs at least 8 samples", {{"N", samples}});
  std::shared_ptr<AlgebraInstance> inst(new AlgebraInstance());
  inst->kind_ = AlgebraKind::Circle;
  inst->field_ = field;
  inst->size_ = static_cast<std::size_t>(samples);
  return inst;
}

Instance make_instance(AlgebraKind kind, Field field, const AlgebraInstance::Descriptor& descriptor) {
  switch (kind) {
    case AlgebraKind::GridFunction:
      if (!std::holds_alternative<RasterDomain>(descriptor))
        fail(ErrorKind::InvalidArgument, "grid instances are described by a raster domain");
      return AlgebraInstance::grid(field, std::get<RasterDomain>(descriptor));
    case AlgebraKind::FiniteProduct:
    case AlgebraKind::Circle: {
      if (!std::holds_alternative<int>(descriptor))
        fail(ErrorKind::InvalidArgument, "finite products and circles are described by a count");
      const int count = std::get<int>(descriptor);
      return kind == AlgebraKind::FiniteProduct ? AlgebraInstance::finite_product(field, count)
                                                : AlgebraInstance::circle(field, count);
    }
  }
  fail(ErrorKind::InvalidArgument, "unknown algebra kind");
}

const RasterDomain& AlgebraInstance::domain() const {
  if (!domain_) fail(ErrorKind::InvalidArgument, "instance has no raster domain");
  return *domain_;
}

Scalar AlgebraInstance::position(std::size_t k) const {
  switch (kind_) {
    case AlgebraKind::GridFunction: return domain_->center(cells_[k]);
    case AlgebraKind::Circle: return std::polar(1.0, angle(k));
    case AlgebraKind::FiniteProduct: return static_cast<double>(k);
  }
  return 0.0;
}

double AlgebraInstance::angle(std::size_t k) const {
  return 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(size_);
}

Instance AlgebraInstance::annotated(bool bsr1_connected) const {
  auto copy = std::shared_ptr<AlgebraInstance>(new AlgebraInstance(*this));
  copy->bsr1_connected_ = bsr1_connected;
  return copy;
}

bool AlgebraInstance::equivalent(const AlgebraInstance& other) const {
  if (kind_ != other.kind_ || field_ != other.field_ || size_ != other.size_) return false;
  if (kind_ == AlgebraKind::GridFunction) return *domain_ == *other.domain_;
  return true;
}

bool same_owner(const Instance& a, const Instance& b) {
  return a == b || (a && b && a->equivalent(*b));
}

void require_same_owner(const Element& a, const Element& b) {
  if (!same_owner(a.owner(), b.owner())) fail(ErrorKind::OwnerMismatch, "elements belong to different algebras");
}

// ---------------------------------------------------------------------------
// Element

Element::Element(Instance owner, std::vector<Scalar> values) : owner_(std::move(owner)), values_(std::move(values)) {
  if (!owner_) fail(ErrorKind::InvalidArgument, "element without owner");
  if (values_.size() != owner_->size())
    fail(ErrorKind::DimensionMismatch, "value count differs from spectrum size",
         {{"values", values_.size()}, {"spectrum", owner_->size()}});
  if (owner_->is_real()) {
    for (std::size_t k = 0; k < values_.size(); ++k) {
      auto& v = values_[k];
      if (std::abs(v.imag()) > 1e-12 * (1.0 + std::abs(v.real())))
        fail(ErrorKind::FieldMismatch, "complex value in a real algebra", {{"point", k}, {"imag", v.imag()}});
      v = {v.real(), 0.0};
    }
  }
}

Element Element::constant(const Instance& owner, Scalar c) {
  return Element(owner, std::vector<Scalar>(owner->size(), c));
}

Element Element::from_function(const Instance& owner, const std::function<Scalar(std::size_t)>& fn) {
  std::vector<Scalar> v(owner->size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = fn(k);
  return Element(owner, std::move(v));
}

Element Element::from_position(const Instance& owner, const std::function<Scalar(Scalar)>& fn) {
  return from_function(owner, [&](std::size_t k) { return fn(owner->position(k)); });
}

double Element::sup_norm() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v));
  return m;
}

double Element::min_abs() const { return std::abs(values_[argmin_abs()]); }

std::size_t Element::argmin_abs() const {
  std::size_t best = 0;
  double m = std::abs(values_[0]);
  for (std::size_t k = 1; k < values_.size(); ++k) {
    const double a = std::abs(values_[k]);
    if (a < m) m = a, best = k;
  }
  return best;
}

namespace {
template <typename Op>
Element zip(const Element& a, const Element& b, Op op) {
  require_same_owner(a, b);
  std::vector<Scalar> out(a.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = op(a[k], b[k]);
  return Element(a.owner(), std::move(out));
}
}  // namespace

Element operator+(const Element& a, const Element& b) { return zip(a, b, std::plus<>{}); }
Element operator-(const Element& a, const Element& b) { return zip(a, b, std::minus<>{}); }
Element operator*(const Element& a, const Element& b) { return zip(a, b, std::multiplies<>{}); }
Element operator-(const Element& a) { return map(a, [](Scalar v) { return -v; }); }
Element operator*(Scalar c, const Element& a) { return map(a, [c](Scalar v) { return c * v; }); }
Element add(const Element& a, const Element& b) { return a + b; }
Element mul(const Element& a, const Element& b) { return a * b; }
Element neg(const Element& a) { return -a; }
Element scalar_embed(const Instance& owner, Scalar c) { return Element::constant(owner, c); }
double sup_norm(const Element& a) { return a.sup_norm(); }
Element conj(const Element& a) { return map(a, [](Scalar v) { return std::conj(v); }); }

Element abs(const Element& a) {
  std::vector<Scalar> out(a.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::abs(a[k]);
  return Element(a.owner(), std::move(out));
}

Element map(const Element& a, const std::function<Scalar(Scalar)>& fn) {
  std::vector<Scalar> out(a.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = fn(a[k]);
  return Element(a.owner(), std::move(out));
}

Element invert(const Element& a, std::optional<double> tol) {
  const double t = tol.value_or(default_tol(a));
  const std::size_t k = a.argmin_abs();
  const double m = std::abs(a[k]);
  if (!(m > t)) {
    nlohmann::ordered_json d{{"min_modulus", m}, {"point", k}, {"tol", t}};
    if (a.owner()->kind() == AlgebraKind::GridFunction) d["cell"] = a.owner()->cell_of(k);
    fail(ErrorKind::NotInvertible, "element is not invertible", d);
  }
  return map(a, [](Scalar v) { return 1.0 / v; });
}

Element exp_element(const Element& a) {
  return map(a, [](Scalar v) { return std::exp(v); });
}

namespace {

Element log_real(const Element& a) {
  std::vector<std::size_t> bad;
  for (std::size_t k = 0; k < a.size(); ++k)
    if (!(a[k].real() > 0.0)) bad.push_back(k);
  if (!bad.empty()) {
    ObstructionReport report{"nonpositive", {}, bad, 0};
    throw ObstructionError(ErrorKind::NonPositiveValue, "real logarithm of a non-positive value", report);
  }
  return map(a, [](Scalar v) { return Scalar(std::log(v.real()), 0.0); });
}

Element log_circle(const Element& a) {
  const std::size_t n = a.size();
  const double tol = default_tol(a);
  if (!(a.min_abs() > tol))
    fail(ErrorKind::NotInvertible, "logarithm of a non-invertible element", {{"min_modulus", a.min_abs()}});
  std::vector<double> theta(n);
  theta[0] = std::arg(a[0]);
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double step = std::arg(a[(k + 1) % n] / a[k]);
    if (std::abs(step) >= std::numbers::pi / 2)
      fail(ErrorKind::ResolutionError, "phase step too large to certify", {{"point", k}, {"step", step}});
    total += step;
    if (k + 1 < n) theta[k + 1] = theta[k] + step;
  }
  const int winding = static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
  if (winding != 0) {
    ObstructionReport report{"circle_winding", {}, {}, winding};
    throw ObstructionError(ErrorKind::LogObstruction, "no continuous logarithm on the circle", report);
  }
  std::vector<Scalar> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = {std::log(std::abs(a[k])), theta[k]};
  return Element(a.owner(), std::move(out));
}

}  // namespace

Element log_element(const Element& a) {
  const auto& owner = a.owner();
  if (owner->is_real()) return log_real(a);
  switch (owner->kind()) {
    case AlgebraKind::FiniteProduct: {
      if (!(a.min_abs() > default_tol(a)))
        fail(ErrorKind::NotInvertible, "logarithm of a non-invertible element", {{"min_modulus", a.min_abs()}});
      return map(a, [](Scalar v) { return std::log(v); });
    }
    case AlgebraKind::Circle: return log_circle(a);
    case AlgebraKind::GridFunction: {
      auto result = phase_unwrap_log(a, owner->domain());
      if (auto* report = std::get_if<ObstructionReport>(&result))
        throw ObstructionError(ErrorKind::LogObstruction, "no continuous logarithm on the domain", *report);
      return std::get<Element>(std::move(result));
    }
  }
  fail(ErrorKind::InvalidArgument, "unknown algebra kind");
}

// ---------------------------------------------------------------------------
// Tuple

Tuple::Tuple(std::vector<Element> coords) : coords_(std::move(coords)) {
  for (std::size_t j = 1; j < coords_.size(); ++j) require_same_owner(coords_[0], coords_[j]);
}

Tuple Tuple::zeros(const Instance& owner, std::size_t n) {
  return Tuple(std::vector<Element>(n, Element::zero(owner)));
}

Tuple Tuple::unit(const Instance& owner, std::size_t n, std::size_t j) {
  std::vector<Element> c(n, Element::zero(owner));
  c.at(j) = Element::one(owner);
  return Tuple(std::move(c));
}

const Instance& Tuple::owner() const {
  if (coords_.empty()) fail(ErrorKind::InvalidArgument, "empty tuple has no owner");
  return coords_[0].owner();
}

Element Tuple::pointwise_norm() const {
  const auto& own = owner();
  std::vector<Scalar> out(own->size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    double s = 0.0;
    for (const auto& c : coords_) s += std::norm(c[k]);
    out[k] = std::sqrt(s);
  }
  return Element(own, std::move(out));
}

double Tuple::min_modulus() const { return pointwise_norm().min_abs(); }
double Tuple::sup_norm() const { return pointwise_norm().sup_norm(); }

Tuple Tuple::with(std::size_t j, Element value) const {
  auto c = coords_;
  c.at(j) = std::move(value);
  return Tuple(std::move(c));
}

Tuple Tuple::append(Element value) const {
  auto c = coords_;
  c.push_back(std::move(value));
  return Tuple(std::move(c));
}

Tuple Tuple::head(std::size_t count) const {
  return Tuple(std::vector<Element>(coords_.begin(), coords_.begin() + static_cast<std::ptrdiff_t>(count)));
}

Tuple operator+(const Tuple& a, const Tuple& b) {
  if (a.size() != b.size()) fail(ErrorKind::DimensionMismatch, "tuple lengths differ");
  std::vector<Element> c;
  c.reserve(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) c.push_back(a[j] + b[j]);
  return Tuple(std::move(c));
}

Tuple operator-(const Tuple& a, const Tuple& b) {
  if (a.size() != b.size()) fail(ErrorKind::DimensionMismatch, "tuple lengths differ");
  std::vector<Element> c;
  c.reserve(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) c.push_back(a[j] - b[j]);
  return Tuple(std::move(c));
}

Tuple operator*(const Element& s, const Tuple& a) {
  std::vector<Element> c;
  c.reserve(a.size());
  for (const auto& x : a.coords()) c.push_back(s * x);
  return Tuple(std::move(c));
}

Element dot(const Tuple& f, const Tuple& g) {
  if (f.size() != g.size() || f.size() == 0) fail(ErrorKind::DimensionMismatch, "tuple lengths differ");
  Element acc = f[0] * g[0];
  for (std::size_t j = 1; j < f.size(); ++j) acc = acc + f[j] * g[j];
  return acc;
}

double sup_distance(const Tuple& a, const Tuple& b) { return (a - b).sup_norm(); }

double default_tol(const Tuple& f) { return 1e-8 * (1.0 + f.sup_norm()); }
double default_tol(const Element& a) { return 1e-8 * (1.0 + a.sup_norm()); }

}  // namespace banach
