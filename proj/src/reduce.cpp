#include "banach/reduce.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "banach/error.hpp"
#include "banach/parallel.hpp"

namespace banach {

namespace {

constexpr double kPi = std::numbers::pi;

Scalar phase(Scalar v) {
  const double m = std::abs(v);
  return m > 0.0 ? v / m : Scalar(1.0);
}

double resolve_tol(const Tuple& f, const Element& g, const ReduceOptions& options) {
  return options.tol.value_or(default_tol(f.append(g)));
}

void require_pair(const Tuple& f, const Element& g, double tol) {
  if (f.size() == 0) fail(ErrorKind::DimensionMismatch, "empty tuple");
  require_same_owner(f[0], g);
  const Tuple fg = f.append(g);
  const Element norm = fg.pointwise_norm();
  const std::size_t k = norm.argmin_abs();
  if (!(norm[k].real() > tol))
    fail(ErrorKind::NotInvertibleTuple, "(f, g) is not an invertible tuple",
         {{"point", k}, {"min_modulus", norm[k].real()}, {"tol", tol}});
}

// Cutoff χ: 0 where |g| <= eps/2, 1 where |g| >= eps, linear in |g| between.
std::vector<double> cutoff(const Element& g, double eps) {
  std::vector<double> chi(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) chi[k] = std::clamp((std::abs(g[k]) - 0.5 * eps) / (0.5 * eps), 0.0, 1.0);
  return chi;
}

// a = χ (F - f) / g, which makes f + a g = F wherever F = f on the eps-zero set.
Tuple cutoff_reduction(const Tuple& f, const Element& g, const Tuple& target, double eps) {
  const auto chi = cutoff(g, eps);
  std::vector<Element> a;
  a.reserve(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) {
    std::vector<Scalar> v(g.size(), 0.0);
    for (std::size_t k = 0; k < v.size(); ++k)
      if (chi[k] > 0.0) v[k] = chi[k] * (target[j][k] - f[j][k]) / g[k];
    a.emplace_back(g.owner(), std::move(v));
  }
  return Tuple(std::move(a));
}

double min_on(const Element& norm, const std::vector<bool>& on) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < norm.size(); ++k)
    if (on[k]) m = std::min(m, std::abs(norm[k]));
  return m;
}

bool any_of(const std::vector<bool>& v) { return std::find(v.begin(), v.end(), true) != v.end(); }
bool all_of(const std::vector<bool>& v) { return std::find(v.begin(), v.end(), false) == v.end(); }

nlohmann::ordered_json scope_detail(const Tuple& f, const Element& g, double eps) {
  const auto& owner = g.owner();
  nlohmann::ordered_json d{{"kind", to_string(owner->kind())}, {"field", to_string(owner->field())}, {"n", f.size()}};
  if (owner->kind() == AlgebraKind::GridFunction) {
    d["dim"] = owner->domain().dim();
    const auto decision = hole_condition(sublevel_zero_set(g, eps), owner->domain());
    d["hole_condition"] = decision.holds;
  }
  return d;
}

[[noreturn]] void scope_error(const Tuple& f, const Element& g, double eps) {
  fail(ErrorKind::ScopeError, "no constructive reduction for this algebra shape", scope_detail(f, g, eps));
}

// Replaces values off the marked points of a circle by linear interpolation
// (in the angle index) between the two neighbouring marked points.
void interpolate_circle_gaps(std::vector<Scalar>& v, const std::vector<bool>& on) {
  const std::size_t n = v.size();
  if (!any_of(on)) {
    std::fill(v.begin(), v.end(), Scalar(0.0));
    return;
  }
  if (all_of(on)) return;
  for (std::size_t e = 0; e < n; ++e) {
    if (!on[e] || on[(e + 1) % n]) continue;
    std::size_t d = 1;
    while (!on[(e + d) % n]) ++d;
    const Scalar left = v[e], right = v[(e + d) % n];
    for (std::size_t m = 1; m < d; ++m) {
      const double t = static_cast<double>(m) / static_cast<double>(d);
      v[(e + m) % n] = (1.0 - t) * left + t * right;
    }
  }
}

// Continuous logarithm on the marked arcs of a circle (unwrapped from the
// principal value at each arc start), interpolated across the gaps.
Element circle_log_extension(const Element& f, const std::vector<bool>& on) {
  const std::size_t n = f.size();
  std::vector<Scalar> h(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    if (!on[s] || on[(s + n - 1) % n]) continue;
    double theta = std::arg(f[s]);
    h[s] = {std::log(std::abs(f[s])), theta};
    for (std::size_t k = s; on[(k + 1) % n] && (k + 1) % n != s; ++k) {
      const std::size_t a = k % n, b = (k + 1) % n;
      const double step = std::arg(f[b] / f[a]);
      if (std::abs(step) >= kPi / 2)
        fail(ErrorKind::ResolutionError, "phase step too large to unwrap", {{"point", a}, {"turn", step}});
      theta += step;
      h[b] = {std::log(std::abs(f[b])), theta};
    }
  }
  interpolate_circle_gaps(h, on);
  return Element(f.owner(), std::move(h));
}

// Extends values given on the marked points to the whole spectrum.
Element extend_off(const Element& h, const std::vector<bool>& on) {
  const auto& owner = h.owner();
  switch (owner->kind()) {
    case AlgebraKind::GridFunction: {
      const auto& dom = owner->domain();
      std::vector<std::uint8_t> mask(dom.size(), 0);
      for (std::size_t k = 0; k < on.size(); ++k)
        if (on[k]) mask[owner->cell_of(k)] = 1;
      if (!any_of(on)) return Element::zero(owner);
      return tietze_extend(h, dom.with_mask(std::move(mask)));
    }
    case AlgebraKind::Circle: {
      std::vector<Scalar> v(h.values().begin(), h.values().end());
      interpolate_circle_gaps(v, on);
      return Element(owner, std::move(v));
    }
    case AlgebraKind::FiniteProduct: break;
  }
  std::vector<Scalar> v(h.size(), 0.0);
  for (std::size_t k = 0; k < v.size(); ++k)
    if (on[k]) v[k] = h[k];
  return Element(owner, std::move(v));
}

// Index of the hole of z containing `cell`.
std::size_t hole_index(const HoleReport& report, std::size_t cell) {
  for (std::size_t h = 0; h < report.holes.size(); ++h)
    if (std::binary_search(report.holes[h].cells.begin(), report.holes[h].cells.end(), cell)) return h;
  return 0;
}

// Zero-free extension over R on an interval grid: sign and log|f| are kept on
// z, held constant towards the ends of each interval of K and interpolated
// across gaps of z that lie inside K.
std::variant<ZeroFreeExtension, ObstructionReport> extend_interval_real(const Element& f, const RasterDomain& z) {
  const auto& owner = f.owner();
  const std::size_t m = f.size();
  std::vector<bool> on(m);
  for (std::size_t k = 0; k < m; ++k) on[k] = z.test(owner->cell_of(k));
  std::vector<Scalar> out(m, 1.0);
  ObstructionReport obstruction{"sign_change", {}, {}, 0};
  std::optional<HoleReport> holes;
  auto sign = [&](std::size_t k) { return f[k].real() > 0.0 ? 1.0 : -1.0; };
  auto logmod = [&](std::size_t k) { return std::log(std::abs(f[k].real())); };

  std::size_t s = 0;
  while (s < m) {
    std::size_t e = s + 1;
    while (e < m && owner->cell_of(e) == owner->cell_of(e - 1) + 1) ++e;
    // runs of z inside the interval [s, e)
    std::vector<std::pair<std::size_t, std::size_t>> runs;
    for (std::size_t k = s; k < e;) {
      if (!on[k]) {
        ++k;
        continue;
      }
      std::size_t b = k;
      while (b < e && on[b]) {
        if (sign(b) != sign(k))
          fail(ErrorKind::ResolutionError, "sign flips between adjacent cells", {{"point", b}});
        ++b;
      }
      runs.emplace_back(k, b);
      k = b;
    }
    if (!runs.empty()) {
      for (std::size_t k = s; k < runs.front().first; ++k) out[k] = f[runs.front().first];
      for (std::size_t k = runs.back().second; k < e; ++k) out[k] = f[runs.back().second - 1];
      for (std::size_t r = 0; r < runs.size(); ++r) {
        for (std::size_t k = runs[r].first; k < runs[r].second; ++k) out[k] = f[k];
        if (r + 1 == runs.size()) continue;
        const std::size_t p = runs[r].second - 1, q = runs[r + 1].first;
        if (sign(p) != sign(q)) {
          if (!holes) holes = complement_components(z);
          HoleWinding w;
          w.hole = hole_index(*holes, owner->cell_of(p) + 1);
          w.contour_winding = 1;
          w.charge = 1;
          w.inside_k = true;
          w.anchor_cell = owner->cell_of(p) + 1;
          obstruction.holes.push_back(w);
          obstruction.points.push_back(p);
          obstruction.points.push_back(q);
          continue;
        }
        for (std::size_t k = p + 1; k < q; ++k) {
          const double t = static_cast<double>(k - p) / static_cast<double>(q - p);
          out[k] = sign(p) * std::exp((1.0 - t) * logmod(p) + t * logmod(q));
        }
      }
    }
    s = e;
  }
  if (!obstruction.holes.empty()) return obstruction;
  return ZeroFreeExtension{Element(owner, std::move(out)), {{"method", "sign_log_interpolation"}}};
}

std::variant<ZeroFreeExtension, ObstructionReport> extend_planar(const Element& f, const RasterDomain& z) {
  const auto& owner = f.owner();
  const auto& k = owner->domain();
  const auto decision = hole_condition(z, k);
  const auto windings = hole_windings(f, decision.report);
  ObstructionReport obstruction{"winding", {}, {}, 0};
  nlohmann::ordered_json factors = nlohmann::ordered_json::array();
  std::vector<std::pair<Scalar, int>> poles;
  for (auto w : windings) {
    if (w.charge == 0) continue;
    const auto& verdict = decision.verdicts[w.hole];
    if (!verdict.escapes) {
      w.inside_k = true;
      obstruction.holes.push_back(w);
      continue;
    }
    const Scalar p = k.center(verdict.witness_cell);
    poles.emplace_back(p, w.charge);
    factors.push_back({{"hole", w.hole}, {"cell", verdict.witness_cell}, {"x", p.real()}, {"y", p.imag()}, {"power", w.charge}});
  }
  if (!obstruction.holes.empty()) return obstruction;

  // φ = ∏ ((z - p) / |z - p|)^q has unit modulus and cancels every winding
  std::vector<Scalar> phi(f.size());
  for (std::size_t j = 0; j < phi.size(); ++j) {
    double angle = 0.0;
    const Scalar pos = owner->position(j);
    for (const auto& [p, q] : poles) angle += q * std::arg(pos - p);
    phi[j] = std::polar(1.0, angle);
  }
  const Element phi_el(owner, std::move(phi));
  const Element ratio = f * conj(phi_el);
  auto unwrapped = phase_unwrap_log(ratio, z);
  if (auto* report = std::get_if<ObstructionReport>(&unwrapped)) return *report;
  const Element h = tietze_extend(std::get<Element>(unwrapped), z);
  return ZeroFreeExtension{phi_el * exp_element(h), {{"method", "winding_factors_nearest_cell_log"}, {"factors", factors}}};
}

// Pointwise target on a finite product: f where it is invertible (always on
// the eps-zero set), e_1 elsewhere.
Tuple pointwise_target(const Tuple& f, const std::vector<bool>& on, double tol, bool positive_first) {
  const Element norm = f.pointwise_norm();
  std::vector<std::vector<Scalar>> v(f.size(), std::vector<Scalar>(norm.size()));
  for (std::size_t k = 0; k < norm.size(); ++k) {
    bool keep = on[k] || norm[k].real() > tol;
    if (positive_first && !on[k]) keep = keep && f[0][k].real() > tol;
    for (std::size_t j = 0; j < f.size(); ++j) v[j][k] = keep ? f[j][k] : Scalar(j == 0 ? 1.0 : 0.0);
  }
  std::vector<Element> coords;
  for (auto& c : v) coords.emplace_back(f.owner(), std::move(c));
  return Tuple(std::move(coords));
}

struct Setup {
  double tol = 0.0;
  double eps = 0.0;
  std::vector<bool> on;
  double delta = std::numeric_limits<double>::infinity();
};

Setup prepare(const Tuple& f, const Element& g, const ReduceOptions& options) {
  Setup s;
  if (f.size() == 0) fail(ErrorKind::DimensionMismatch, "empty tuple");
  s.tol = resolve_tol(f, g, options);
  require_pair(f, g, s.tol);
  s.eps = options.eps.value_or(default_eps(g));
  if (!(s.eps > 0.0)) fail(ErrorKind::InvalidArgument, "eps must be positive", {{"eps", s.eps}});
  s.on = zero_points(g, s.eps);
  if (any_of(s.on)) {
    s.delta = min_on(f.pointwise_norm(), s.on);
    if (!(s.delta > s.tol))
      fail(ErrorKind::ResolutionError, "f vanishes on the eps-zero set of g; eps is too coarse",
           {{"eps", s.eps}, {"delta", s.delta}, {"tol", s.tol}});
  }
  return s;
}

RasterDomain zero_mask(const Element& g, const std::vector<bool>& on) {
  const auto& owner = g.owner();
  const auto& dom = owner->domain();
  std::vector<std::uint8_t> mask(dom.size(), 0);
  for (std::size_t k = 0; k < on.size(); ++k)
    if (on[k]) mask[owner->cell_of(k)] = 1;
  return dom.with_mask(std::move(mask));
}

ExpProduct single_log(const Element& h) {
  return exp_product(h.owner(), 1, {Matrix(h.owner(), 1, {h})});
}

double witness_scale(const Tuple& f, const Element& g, const Tuple& a) { return 1.0 + (f + g * a).sup_norm(); }

}  // namespace

// ---------------------------------------------------------------------------

Tuple bezout(const Tuple& f, std::optional<double> tol) {
  const Element norm = f.pointwise_norm();
  const double t = tol.value_or(default_tol(f));
  const std::size_t k = norm.argmin_abs();
  if (!(norm[k].real() > t))
    fail(ErrorKind::NotInvertibleTuple, "tuple is not invertible", {{"point", k}, {"min_modulus", norm[k].real()}});
  const Element inv2 = invert(norm * norm, 0.0);
  std::vector<Element> x;
  x.reserve(f.size());
  for (const auto& c : f.coords()) x.push_back(conj(c) * inv2);
  return Tuple(std::move(x));
}

std::variant<ZeroFreeExtension, ObstructionReport> zero_free_extension(const Element& f, const RasterDomain& z) {
  const auto& owner = f.owner();
  if (owner->kind() != AlgebraKind::GridFunction) fail(ErrorKind::ScopeError, "zero-free extension works on grids");
  const auto& dom = owner->domain();
  if (!z.same_grid(dom) || !z.subset_of(dom)) fail(ErrorKind::NotSubset, "zero set is not contained in K");
  if (z.empty()) return ZeroFreeExtension{Element::one(owner), {{"method", "constant"}}};
  const double tol = default_tol(f);
  for (auto c : z.cells()) {
    const auto k = static_cast<std::size_t>(owner->point_of(c));
    if (!(std::abs(f[k]) > tol))
      fail(ErrorKind::NotInvertible, "f vanishes on the zero set", {{"point", k}, {"cell", c}, {"modulus", std::abs(f[k])}});
  }
  if (owner->is_real() && dom.dim() == 1) return extend_interval_real(f, z);
  if (!owner->is_real() && dom.dim() == 2) return extend_planar(f, z);
  fail(ErrorKind::ScopeError, "zero-free extension needs C on a planar grid or R on an interval grid",
       {{"field", to_string(owner->field())}, {"dim", dom.dim()}});
}

Reduction reduce_tuple(const Tuple& f, const Element& g, const ReduceOptions& options) {
  const Setup s = prepare(f, g, options);
  const auto& owner = g.owner();
  const std::size_t n = f.size();
  Tuple target;
  nlohmann::ordered_json trace;
  if (!any_of(s.on)) {
    const bool keep = f.min_modulus() > s.tol;
    target = keep ? f : Tuple::unit(owner, n, 0);
    trace = {{"method", keep ? "identity" : "unit"}};
  } else {
    switch (owner->kind()) {
      case AlgebraKind::FiniteProduct:
        target = pointwise_target(f, s.on, s.tol, false);
        trace = {{"method", "pointwise"}};
        break;
      case AlgebraKind::Circle:
        if (owner->is_real() || n != 1) scope_error(f, g, s.eps);
        if (all_of(s.on)) {
          target = f;
          trace = {{"method", "identity"}};
        } else {
          target = Tuple({exp_element(circle_log_extension(f[0], s.on))});
          trace = {{"method", "arc_log_interpolation"}};
        }
        break;
      case AlgebraKind::GridFunction: {
        const int dim = owner->domain().dim();
        if (n != 1 || (owner->is_real() ? dim != 1 : dim != 2)) scope_error(f, g, s.eps);
        auto ext = zero_free_extension(f[0], zero_mask(g, s.on));
        if (auto* report = std::get_if<ObstructionReport>(&ext)) return *report;
        auto& zf = std::get<ZeroFreeExtension>(ext);
        target = Tuple({zf.F});
        trace = zf.trace;
        break;
      }
    }
  }
  trace["eps"] = s.eps;
  Tuple a = cutoff_reduction(f, g, target, s.eps);
  const double achieved = verify_reduction(f, g, a);
  if (!(achieved > s.tol))
    fail(ErrorKind::ResolutionError, "reduction lost invertibility at this resolution", {{"achieved_min", achieved}});
  return ReductionWitness{std::move(a), achieved, s.eps, std::move(trace)};
}

Principal reduce_to_principal(const Tuple& f, const Element& g, const ReduceOptions& options) {
  const Setup s = prepare(f, g, options);
  const auto& owner = g.owner();
  const std::size_t n = f.size();

  if (owner->kind() == AlgebraKind::FiniteProduct && n >= 2) {
    const Tuple target = any_of(s.on) || f.min_modulus() <= s.tol ? pointwise_target(f, s.on, s.tol, false) : f;
    // x with head + last x invertible, pointwise
    const Tuple head = target.head(n - 1);
    const Element& last = target[n - 1];
    const Element head_norm = head.pointwise_norm();
    std::vector<Scalar> x0(owner->size(), 0.0);
    for (std::size_t k = 0; k < x0.size(); ++k)
      if (head_norm[k].real() < std::abs(last[k])) x0[k] = phase(head[0][k]) / last[k];
    Tuple x = Tuple::zeros(owner, n - 1).with(0, Element(owner, std::move(x0)));
    const RowExtension ext = extend_row(target, x);
    Tuple a = cutoff_reduction(f, g, target, s.eps);
    return PrincipalWitness{std::move(a), ext.W.inverse(), std::nullopt, s.eps};
  }
  if (n != 1) scope_error(f, g, s.eps);

  const Element& f0 = f[0];
  Element h = Element::zero(owner);
  auto nonpositive = [&]() -> std::optional<ObstructionReport> {
    ObstructionReport report{"nonpositive", {}, {}, 0};
    for (std::size_t k = 0; k < s.on.size(); ++k)
      if (s.on[k] && !(f0[k].real() > 0.0)) report.points.push_back(k);
    if (report.points.empty()) return std::nullopt;
    return report;
  };

  switch (owner->kind()) {
    case AlgebraKind::FiniteProduct: {
      if (owner->is_real())
        if (auto report = nonpositive()) return *report;
      const Tuple target = pointwise_target(f, s.on, s.tol, owner->is_real());
      h = log_element(target[0]);
      break;
    }
    case AlgebraKind::Circle: {
      if (owner->is_real()) scope_error(f, g, s.eps);
      if (all_of(s.on)) {
        try {
          h = log_element(f0);
        } catch (const ObstructionError& e) {
          return e.report();
        }
      } else if (any_of(s.on)) {
        h = circle_log_extension(f0, s.on);
      }
      break;
    }
    case AlgebraKind::GridFunction: {
      const int dim = owner->domain().dim();
      if (owner->is_real() ? dim != 1 : dim != 2) scope_error(f, g, s.eps);
      if (!any_of(s.on)) break;
      const RasterDomain z = zero_mask(g, s.on);
      if (owner->is_real()) {
        if (auto report = nonpositive()) return *report;
        auto ext = zero_free_extension(f0, z);
        if (auto* report = std::get_if<ObstructionReport>(&ext)) return *report;
        h = log_element(std::get<ZeroFreeExtension>(ext).F);
      } else {
        auto unwrapped = phase_unwrap_log(f0, z);
        if (auto* report = std::get_if<ObstructionReport>(&unwrapped)) return *report;
        h = tietze_extend(std::get<Element>(unwrapped), z);
      }
      break;
    }
  }
  const Tuple target({exp_element(h)});
  Tuple a = cutoff_reduction(f, g, target, s.eps);
  return PrincipalWitness{std::move(a), single_log(h), h, s.eps};
}

RowExtension extend_row(const Tuple& u, const Tuple& x) {
  if (u.size() < 2) fail(ErrorKind::DimensionMismatch, "row needs at least two entries");
  const std::size_t n = u.size() - 1;
  if (x.size() != n) fail(ErrorKind::DimensionMismatch, "reduction vector has the wrong length");
  const auto& owner = u.owner();
  const Tuple f = u.head(n);
  const Element& g = u[n];
  const Tuple big_f = f + g * x;
  const double tol = default_tol(big_f);
  if (!(big_f.min_modulus() > tol))
    fail(ErrorKind::InvalidWitness, "f + g x is not invertible", {{"min_modulus", big_f.min_modulus()}});
  const Tuple y = (Element::one(owner) - g) * bezout(big_f, 0.0);

  const std::size_t dim = n + 1;
  auto elementary = [&](auto&& place) {
    std::vector<Element> e = Matrix::identity(owner, dim).entries();
    place(e);
    return Matrix(owner, dim, std::move(e));
  };
  const Matrix m1 = elementary([&](std::vector<Element>& e) {
    for (std::size_t j = 0; j < n; ++j) e[n * dim + j] = x[j];
  });
  const Matrix m2 = elementary([&](std::vector<Element>& e) {
    for (std::size_t j = 0; j < n; ++j) e[j * dim + n] = y[j];
  });
  const Matrix w2 = elementary([&](std::vector<Element>& e) {
    for (std::size_t j = 0; j < n; ++j) e[n * dim + j] = -big_f[j];
  });
  PointMatrix p3 = PointMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  p3(static_cast<Eigen::Index>(n), 0) = 1.0;
  p3(0, 1) = (n % 2 == 0) ? 1.0 : -1.0;
  for (std::size_t k = 2; k <= n; ++k) p3(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(k)) = 1.0;
  const Matrix w3 = Matrix::scalar(owner, p3);

  RowExtension ext;
  ext.W = exp_product(owner, dim, {log_unipotent(m1), log_unipotent(m2), log_unipotent(w2), so_log(w3)});
  ext.matrix = m1 * m2 * w2 * w3;
  ext.W.target = ext.matrix;
  ext.row_residual = sup_distance(row_times_matrix(u, ext.matrix), Tuple::unit(owner, dim, 0));
  ext.det_residual = (determinant(ext.matrix) - Element::one(owner)).sup_norm();
  ext.inverse_row_residual = sup_distance(mat_inverse(ext.matrix, 0.0).row(0), u);
  ext.product_residual = verify_exp_product(ext.W, ext.matrix, 0.0).residual;
  const double scale = 1.0 + ext.matrix.sup_norm();
  const double bound = 1e-7 * scale * scale * (1.0 + u.sup_norm());
  if (ext.row_residual > bound || ext.det_residual > bound || ext.inverse_row_residual > bound ||
      ext.product_residual > bound)
    fail(ErrorKind::InvalidWitness, "row extension failed its own certificate",
         {{"row", ext.row_residual}, {"det", ext.det_residual}, {"inverse_row", ext.inverse_row_residual},
          {"product", ext.product_residual}});
  return ext;
}

RowExtension extend_row(const Tuple& u, const ReductionWitness& reduction) { return extend_row(u, reduction.a); }

PrincipalWitness permute_principal_witness(const Tuple& f, const Element& g, const std::vector<std::size_t>& sigma,
                                           const PrincipalWitness& witness) {
  const std::size_t n = f.size();
  if (sigma.size() != n) fail(ErrorKind::DimensionMismatch, "permutation length differs from tuple length");
  std::vector<bool> hit(n, false);
  for (auto s : sigma) {
    if (s >= n || hit[s]) fail(ErrorKind::InvalidArgument, "not a permutation");
    hit[s] = true;
  }
  const double residual = verify_principal(f, g, witness);
  if (residual > 1e-7 * witness_scale(f, g, witness.a))
    fail(ErrorKind::InvalidWitness, "witness does not certify f", {{"residual", residual}});
  const auto& owner = g.owner();
  const auto dn = static_cast<Eigen::Index>(n);
  PointMatrix p = PointMatrix::Zero(dn, dn);
  for (std::size_t j = 0; j < n; ++j) p(static_cast<Eigen::Index>(sigma[j]), static_cast<Eigen::Index>(j)) = 1.0;
  const Matrix pm = Matrix::scalar(owner, p);

  PrincipalWitness out;
  out.a = row_times_matrix(witness.a, pm);
  out.eps = witness.eps;
  if (n == 1) {
    out.E = witness.E;
    out.h = witness.h;
    return out;
  }
  if (determinant(p).real() > 0.0) {
    out.E = concat(witness.E, exp_product(owner, n, {so_log(pm)}));
    return out;
  }
  // P = Q S with S the first/last swap; e_1 E Q S = e_n (S E Q S) and a
  // determinant-one cycle W moves e_1 to e_n.
  PointMatrix s = PointMatrix::Identity(dn, dn);
  s(0, 0) = s(dn - 1, dn - 1) = 0.0;
  s(0, dn - 1) = s(dn - 1, 0) = 1.0;
  const Matrix sm = Matrix::scalar(owner, s);
  const Matrix q = Matrix::scalar(owner, p * s);
  const ExpProduct eq = concat(witness.E, exp_product(owner, n, {so_log(q)}));
  PointMatrix wc = PointMatrix::Zero(dn, dn);
  wc(0, dn - 1) = 1.0;
  wc(1, 0) = (n % 2 == 0) ? -1.0 : 1.0;
  for (Eigen::Index k = 2; k < dn; ++k) wc(k, k - 1) = 1.0;
  out.E = concat(exp_product(owner, n, {so_log(Matrix::scalar(owner, wc))}), conjugate_exp_product(sm, eq));
  return out;
}

PrincipalWitness principal_from_exp_reducible(const Tuple& a, const Element& g, const ExpReducibilityWitness& witness) {
  const std::size_t n = a.size();
  if (witness.x.size() != n || witness.b.size() != n) fail(ErrorKind::DimensionMismatch, "witness length differs");
  const auto& owner = g.owner();
  const Tuple c = a + g * witness.b;
  double scale = 1.0;
  for (std::size_t j = 0; j < n; ++j) scale += (exp_element(witness.x[j]) * c[j]).sup_norm();
  const double residual = verify_exp_reducibility(a, g, witness);
  if (residual > 1e-8 * scale) fail(ErrorKind::InvalidWitness, "not an exponential reducibility witness", {{"residual", residual}});
  if (n == 1) {
    const Element h = -witness.x[0];
    return PrincipalWitness{witness.b, single_log(h), h, 0.0};
  }
  std::vector<Element> v;
  for (const auto& xj : witness.x.coords()) v.push_back(exp_element(xj));
  const RowExtension ext = extend_row(Tuple(v), Tuple::zeros(owner, n - 1));
  // c (W^-1)^T = (1, x'_2, ..., x'_n)
  const Tuple cp = row_times_matrix(c, mat_inverse(ext.matrix, 0.0).transpose());
  std::vector<Element> nil = Matrix::zero(owner, n).entries();
  for (std::size_t j = 1; j < n; ++j) nil[j] = cp[j];
  ExpProduct e = exp_product(owner, n, {Matrix(owner, n, std::move(nil))});
  for (auto it = ext.W.logs.rbegin(); it != ext.W.logs.rend(); ++it) e.logs.push_back(it->transpose());
  return PrincipalWitness{witness.b, std::move(e), std::nullopt, 0.0};
}

ExpReducibilityWitness exp_reduce_pair_bsr1(const Element& a, const Element& g, const ReduceOptions& options) {
  const Tuple f({a});
  const Reduction r = reduce_tuple(f, g, options);
  if (const auto* report = std::get_if<ObstructionReport>(&r))
    throw ObstructionError(ErrorKind::HoleConditionViolated, "pair is not reducible", *report);
  const Tuple& b = std::get<ReductionWitness>(r).a;
  const Element x = -log_element(a + g * b[0]);
  return ExpReducibilityWitness{Tuple({x}), b};
}

double verify_exp_reducibility(const Tuple& a, const Element& g, const ExpReducibilityWitness& witness) {
  if (witness.x.size() != a.size() || witness.b.size() != a.size())
    fail(ErrorKind::DimensionMismatch, "witness length differs");
  Element sum = Element::zero(g.owner());
  for (std::size_t j = 0; j < a.size(); ++j) sum = sum + exp_element(witness.x[j]) * (a[j] + witness.b[j] * g);
  return (sum - Element::one(g.owner())).sup_norm();
}

double verify_reduction(const Tuple& f, const Element& g, const Tuple& a) {
  if (a.size() != f.size()) fail(ErrorKind::DimensionMismatch, "reduction vector has the wrong length");
  return (f + g * a).min_modulus();
}

double verify_principal(const Tuple& f, const Element& g, const PrincipalWitness& witness) {
  if (witness.a.size() != f.size() || witness.E.n != f.size())
    fail(ErrorKind::DimensionMismatch, "witness size differs from tuple length");
  const Tuple reduced = f + g * witness.a;
  double residual = sup_distance(witness.E.evaluate().row(0), reduced);
  if (witness.h) residual = std::max(residual, (exp_element(*witness.h) - reduced[0]).sup_norm());
  return residual;
}

EquivalenceWitness equivalence_reflexive(const Tuple& f) {
  return {Tuple::zeros(f.owner(), f.size()), exp_product(f.owner(), f.size())};
}

EquivalenceWitness equivalence_symmetric(const Element& g, const EquivalenceWitness& w) {
  (void)g;
  ExpProduct inv = w.E.inverse();
  const Tuple x = Element::constant(w.x.owner(), -1.0) * row_times_matrix(w.x, inv.evaluate());
  return {x, std::move(inv)};
}

EquivalenceWitness equivalence_transitive(const Element& g, const EquivalenceWitness& w1, const EquivalenceWitness& w2) {
  (void)g;
  return {w1.x + row_times_matrix(w2.x, w1.E.evaluate()), concat(w2.E, w1.E)};
}

double verify_equivalence(const Tuple& f, const Element& g, const Tuple& target, const EquivalenceWitness& w) {
  return sup_distance(f + g * w.x, row_times_matrix(target, w.E.evaluate()));
}

PathReport exp_class_path(const Tuple& f, const Element& g, const Tuple& target, const EquivalenceWitness& w,
                          std::size_t samples, std::optional<double> tol) {
  const std::size_t n = f.size();
  if (target.size() != n || w.x.size() != n || w.E.n != n) fail(ErrorKind::DimensionMismatch, "path data sizes differ");
  if (samples < 2) fail(ErrorKind::InvalidArgument, "a path needs at least two samples");
  const double t_inv = tol.value_or(default_tol(f.append(g)));
  const std::size_t points = g.size();
  const auto dn = static_cast<Eigen::Index>(n);

  auto h_at = [&](double t, std::size_t k) {
    PointMatrix m = PointMatrix::Identity(dn, dn);
    for (const auto& l : w.E.logs) m = m * expm(t * l.at(k));
    Eigen::RowVectorXcd row(dn);
    for (Eigen::Index j = 0; j < dn; ++j) row(j) = target[static_cast<std::size_t>(j)][k];
    Eigen::RowVectorXcd h = row * m;
    for (Eigen::Index j = 0; j < dn; ++j) h(j) -= t * g[k] * w.x[static_cast<std::size_t>(j)][k];
    return h;
  };

  PathReport report;
  report.min_modulus = std::numeric_limits<double>::infinity();
  std::vector<double> mins(points), ends(points);
  for (std::size_t s = 0; s < samples; ++s) {
    const double t = static_cast<double>(s) / static_cast<double>(samples - 1);
    parallel_for(points, [&](std::size_t k) {
      const Eigen::RowVectorXcd h = h_at(t, k);
      mins[k] = std::sqrt(h.squaredNorm() + std::norm(g[k]));
      if (s + 1 == samples) {
        double d = 0.0;
        for (Eigen::Index j = 0; j < dn; ++j) d = std::max(d, std::abs(h(j) - f[static_cast<std::size_t>(j)][k]));
        ends[k] = d;
      }
    });
    const double m = *std::min_element(mins.begin(), mins.end());
    report.samples.push_back({t, m});
    report.min_modulus = std::min(report.min_modulus, m);
    if (!(m > t_inv))
      fail(ErrorKind::PathLeavesI_n, "path leaves the invertible pairs", {{"t", t}, {"min_modulus", m}, {"tol", t_inv}});
  }
  report.endpoint_residual = *std::max_element(ends.begin(), ends.end());
  const double end_tol = 1e-7 * (1.0 + f.sup_norm());
  if (report.endpoint_residual > end_tol)
    fail(ErrorKind::PathLeavesI_n, "path does not end at f",
         {{"t", 1.0}, {"endpoint_residual", report.endpoint_residual}, {"tol", end_tol}});
  return report;
}

TransferResult perturb_transfer(const Tuple& f, const Element& g, const Tuple& b, const ReductionWitness& witness,
                                const ReduceOptions& options) {
  const Setup s = prepare(f, g, options);
  const auto& owner = g.owner();
  const std::size_t n = f.size();
  if (b.size() != n || witness.a.size() != n) fail(ErrorKind::DimensionMismatch, "candidate sizes differ");
  TransferResult result;
  const Element gap_el = (f - b).pointwise_norm();
  result.delta = s.delta;
  result.gap = 0.0;
  for (std::size_t k = 0; k < s.on.size(); ++k)
    if (s.on[k]) result.gap = std::max(result.gap, gap_el[k].real());
  result.accepted = result.gap <= 0.5 * s.delta;
  if (!result.accepted) return result;

  const Tuple u = b + g * witness.a;
  if (!(u.min_modulus() > s.tol)) fail(ErrorKind::InvalidWitness, "b + a g is not invertible", {{"min_modulus", u.min_modulus()}});

  // rank-one logarithm: b (I + N) = f with N = conj(b)^T (f - b) / |b|^2
  const auto dn = static_cast<Eigen::Index>(n);
  const Matrix local = Matrix::from_points(owner, n, [&](std::size_t k) {
    PointMatrix l = PointMatrix::Zero(dn, dn);
    if (!s.on[k]) return l;
    Eigen::VectorXcd bv(dn), dv(dn);
    for (Eigen::Index j = 0; j < dn; ++j) {
      bv(j) = b[static_cast<std::size_t>(j)][k];
      dv(j) = f[static_cast<std::size_t>(j)][k] - bv(j);
    }
    const double b2 = bv.squaredNorm();
    const PointMatrix nil = bv.conjugate() * dv.transpose() / b2;
    const Scalar sv = bv.dot(dv) / b2;  // Σ conj(b_j) (f - b)_j / |b|²
    const Scalar factor = std::abs(sv) < 1e-12 ? Scalar(1.0) - sv / 2.0 : std::log(1.0 + sv) / sv;
    return PointMatrix(nil * factor);
  });
  std::vector<Element> entries;
  for (const auto& e : local.entries()) entries.push_back(extend_off(e, s.on));
  const Matrix l_ext(owner, n, std::move(entries));
  const Matrix e_ext = mat_exp(l_ext);
  const Tuple big_f = row_times_matrix(u, e_ext);
  const Tuple moved = row_times_matrix(witness.a, e_ext);
  const Tuple correction = big_f - f - g * moved;
  const Tuple chi_part = cutoff_reduction(Tuple::zeros(owner, n), g, correction, s.eps);
  const Tuple a_f = moved + chi_part;

  ReductionWitness transferred{a_f, verify_reduction(f, g, a_f), s.eps, {{"method", "rank_one_transfer"}, {"eps", s.eps}}};
  EquivalenceWitness link{a_f, exp_product(owner, n, {l_ext})};
  result.path = exp_class_path(f, g, u, link, 64, s.tol);
  result.witness = std::move(transferred);
  result.link = std::move(link);
  return result;
}

}  // namespace banach
