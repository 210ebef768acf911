#include "banach/topology.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>

#include "banach/parallel.hpp"

namespace banach {

namespace {

constexpr double kPi = std::numbers::pi;

// Moore neighbourhood, counterclockwise with y pointing up.
constexpr int kDi[8] = {1, 1, 0, -1, -1, -1, 0, 1};
constexpr int kDj[8] = {0, 1, 1, 1, 0, -1, -1, -1};

int direction_of(const RasterDomain& g, std::size_t from, std::size_t to) {
  const int di = g.col(to) - g.col(from), dj = g.row(to) - g.row(from);
  for (int d = 0; d < 8; ++d)
    if (kDi[d] == di && kDj[d] == dj) return d;
  fail(ErrorKind::InvalidArgument, "cells are not adjacent");
}

void remove_spurs(std::vector<std::size_t>& cells) {
  bool changed = true;
  while (changed && cells.size() > 2) {
    changed = false;
    const std::size_t n = cells.size();
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t prev = cells[(i + n - 1) % n], next = cells[(i + 1) % n];
      if (prev == next) {
        // a -> b -> a: drop b and the repeated a
        const std::size_t b = i, a2 = (i + 1) % n;
        if (a2 > b) {
          cells.erase(cells.begin() + static_cast<std::ptrdiff_t>(a2));
          cells.erase(cells.begin() + static_cast<std::ptrdiff_t>(b));
        } else {
          cells.erase(cells.begin() + static_cast<std::ptrdiff_t>(b));
          cells.erase(cells.begin() + static_cast<std::ptrdiff_t>(a2));
        }
        changed = true;
        break;
      }
    }
  }
}

// Traces the foreground cells around the background component containing
// `seed`, the first cell of that component in raster order.
Cycle trace_hole_boundary(const RasterDomain& z, std::size_t seed) {
  const std::size_t start = z.index(z.col(seed) - 1, z.row(seed));
  std::size_t p = start, b = seed;
  std::vector<std::size_t> cells{start};
  const std::size_t cap = 8 * z.size() + 16;
  for (std::size_t steps = 0; steps < cap; ++steps) {
    const int d0 = direction_of(z, p, b);
    std::size_t prev = b, next = p;
    bool found = false;
    for (int r = 1; r <= 8; ++r) {
      const int d = (d0 + r) % 8;
      const std::size_t c = z.index(z.col(p) + kDi[d], z.row(p) + kDj[d]);
      if (z.test(c)) {
        next = c;
        found = true;
        break;
      }
      prev = c;
    }
    if (!found) break;  // isolated cell
    p = next;
    b = prev;
    if (p == start && b == seed) break;
    cells.push_back(p);
  }
  remove_spurs(cells);
  Cycle cycle{std::move(cells)};
  if (cycle.signed_area(z) < 0.0) std::reverse(cycle.cells.begin() + 1, cycle.cells.end());
  return cycle;
}

double principal_step(Scalar a, Scalar b) { return std::arg(b / a); }

}  // namespace

// ---------------------------------------------------------------------------

ObstructionError::ObstructionError(ErrorKind kind, const std::string& message, ObstructionReport report)
    : Error(kind, message, banach::to_json(report)), report_(std::move(report)) {}

nlohmann::ordered_json to_json(const ObstructionReport& report) {
  nlohmann::ordered_json holes = nlohmann::ordered_json::array();
  for (const auto& h : report.holes)
    holes.push_back({{"hole", h.hole},
                     {"contour_winding", h.contour_winding},
                     {"charge", h.charge},
                     {"punctured", h.punctured},
                     {"inside_k", h.inside_k},
                     {"anchor_cell", h.anchor_cell}});
  return {{"reason", report.reason}, {"holes", holes}, {"points", report.points}, {"winding", report.winding}};
}

double Cycle::signed_area(const RasterDomain& grid) const {
  double a = 0.0;
  const std::size_t n = cells.size();
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t p = cells[k], q = cells[(k + 1) % n];
    a += static_cast<double>(grid.col(p)) * grid.row(q) - static_cast<double>(grid.col(q)) * grid.row(p);
  }
  return 0.5 * a;
}

bool Cycle::encloses(const RasterDomain& grid, double x, double y) const {
  int wn = 0;
  const std::size_t n = cells.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double x1 = grid.center_x(cells[k]), y1 = grid.center_y(cells[k]);
    const double x2 = grid.center_x(cells[(k + 1) % n]), y2 = grid.center_y(cells[(k + 1) % n]);
    const double side = (x2 - x1) * (y - y1) - (x - x1) * (y2 - y1);
    if (y1 <= y) {
      if (y2 > y && side > 0) ++wn;
    } else if (y2 <= y && side < 0) {
      --wn;
    }
  }
  return wn != 0;
}

std::size_t HoleReport::unbounded_count() const noexcept {
  return static_cast<std::size_t>(std::count(bounded.begin(), bounded.end(), false));
}

RasterDomain sublevel_zero_set(const Element& g, double eps) {
  const auto& owner = g.owner();
  const auto& dom = owner->domain();
  std::vector<std::uint8_t> mask(dom.size(), 0);
  for (std::size_t k = 0; k < g.size(); ++k)
    if (std::abs(g[k]) <= eps) mask[owner->cell_of(k)] = 1;
  return dom.with_mask(std::move(mask));
}

HoleReport complement_components(const RasterDomain& z) {
  HoleReport rep;
  rep.labels.assign(z.size(), -1);
  std::vector<std::vector<std::size_t>> members;
  std::deque<std::size_t> queue;
  for (std::size_t s = 0; s < z.size(); ++s) {
    if (z.test(s) || rep.labels[s] >= 0) continue;
    const int label = static_cast<int>(members.size());
    members.emplace_back();
    bool touches = false;
    rep.labels[s] = label;
    queue.push_back(s);
    while (!queue.empty()) {
      const std::size_t c = queue.front();
      queue.pop_front();
      members.back().push_back(c);
      const int i = z.col(c), j = z.row(c);
      if (i == 0 || i == z.nx() - 1 || (z.dim() == 2 && (j == 0 || j == z.ny() - 1))) touches = true;
      for_each_neighbor4(z, c, [&](std::size_t nb) {
        if (!z.test(nb) && rep.labels[nb] < 0) {
          rep.labels[nb] = label;
          queue.push_back(nb);
        }
      });
    }
    rep.bounded.push_back(!touches);
  }
  for (std::size_t c = 0; c < members.size(); ++c) {
    if (!rep.bounded[c]) continue;
    Hole hole;
    hole.component = static_cast<int>(c);
    hole.cells = std::move(members[c]);
    std::sort(hole.cells.begin(), hole.cells.end());
    const std::size_t first = hole.cells.front();
    if (z.dim() == 1) {
      hole.boundary.cells = {first - 1, hole.cells.back() + 1};
    } else {
      hole.boundary = trace_hole_boundary(z, first);
    }
    rep.holes.push_back(std::move(hole));
  }
  return rep;
}

HoleConditionResult hole_condition(const RasterDomain& z, const RasterDomain& k) {
  if (!z.same_grid(k) || !z.subset_of(k)) fail(ErrorKind::NotSubset, "zero set is not contained in K");
  HoleConditionResult result;
  result.report = complement_components(z);
  std::vector<std::uint8_t> outside(z.size(), 0);
  for (const auto& hole : result.report.holes)
    for (auto c : hole.cells)
      if (!k.test(c)) outside[c] = 1;
  const RasterDomain escape = z.with_mask(outside);
  std::optional<NearestSource> dist;
  if (!escape.empty()) dist = nearest_source(k, escape);
  for (std::size_t h = 0; h < result.report.holes.size(); ++h) {
    const auto& hole = result.report.holes[h];
    HoleVerdict verdict{h, false, hole.cells.front()};
    std::int64_t best = -1;
    for (auto c : hole.cells)
      if (outside[c] && dist->dist2[c] > best) best = dist->dist2[c], verdict.witness_cell = c, verdict.escapes = true;
    if (!verdict.escapes) result.holds = false;
    result.verdicts.push_back(verdict);
  }
  return result;
}

std::optional<RasterDomain> b1_falsify(const Element& g, const RasterDomain& k, double eps) {
  const auto& owner = g.owner();
  const auto& dom = owner->domain();
  if (!k.same_grid(dom) || !k.subset_of(dom)) fail(ErrorKind::NotSubset, "K is not contained in the domain of g");
  auto small = [&](std::size_t cell) { return std::abs(g[static_cast<std::size_t>(owner->point_of(cell))]) <= eps; };
  const std::size_t n = k.size();
  std::vector<std::uint8_t> interior(n, 0);
  for (std::size_t c = 0; c < n; ++c) {
    if (!k.test(c)) continue;
    bool all = true;
    for_each_neighbor4(k, c, [&](std::size_t nb) { all = all && k.test(nb); });
    interior[c] = all && !small(c);
  }
  std::vector<std::uint8_t> seen(n, 0);
  std::deque<std::size_t> queue;
  for (std::size_t s = 0; s < n; ++s) {
    if (!interior[s] || seen[s]) continue;
    std::vector<std::uint8_t> u(n, 0);
    bool violation = true;
    seen[s] = 1;
    queue.push_back(s);
    while (!queue.empty()) {
      const std::size_t c = queue.front();
      queue.pop_front();
      u[c] = 1;
      for_each_neighbor4(k, c, [&](std::size_t nb) {
        if (interior[nb]) {
          if (!seen[nb]) seen[nb] = 1, queue.push_back(nb);
        } else if (!k.test(nb) || !small(nb)) {
          violation = false;
        }
      });
    }
    if (violation) return dom.with_mask(std::move(u));
  }
  return std::nullopt;
}

std::optional<RasterDomain> b1_falsify(const Element& g, double eps) {
  return b1_falsify(g, g.owner()->domain(), eps);
}

int winding_number(std::span<const Scalar> values) {
  const std::size_t n = values.size();
  if (n < 2) return 0;
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Scalar a = values[k], b = values[(k + 1) % n];
    if (a == 0.0 || b == 0.0) fail(ErrorKind::NotInvertible, "winding of a curve through zero", {{"step", k}});
    const double step = principal_step(a, b);
    if (std::abs(step) >= kPi / 2)
      fail(ErrorKind::ResolutionError, "phase step too large to certify a winding", {{"step", k}, {"turn", step}});
    total += step;
  }
  return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

std::vector<Scalar> values_along(const Element& f, const Cycle& cycle) {
  const auto& owner = f.owner();
  std::vector<Scalar> out;
  out.reserve(cycle.cells.size());
  for (auto c : cycle.cells) {
    const auto k = owner->point_of(c);
    if (k < 0) fail(ErrorKind::NotSubset, "cycle leaves the domain of f", {{"cell", c}});
    out.push_back(f[static_cast<std::size_t>(k)]);
  }
  return out;
}

std::vector<HoleWinding> hole_windings(const Element& f, const HoleReport& report) {
  const auto& grid = f.owner()->domain();
  const std::size_t n = report.holes.size();
  std::vector<HoleWinding> out(n);
  for (std::size_t h = 0; h < n; ++h) {
    out[h].hole = h;
    out[h].anchor_cell = report.holes[h].cells.front();
    if (grid.dim() == 2) out[h].contour_winding = winding_number(values_along(f, report.holes[h].boundary));
  }
  if (grid.dim() != 2) return out;
  // enclosed[h] lists the other holes whose anchor lies inside h's contour
  std::vector<std::vector<std::size_t>> enclosed(n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (a != b && report.holes[a].boundary.encloses(grid, grid.center_x(out[b].anchor_cell),
                                                      grid.center_y(out[b].anchor_cell)))
        enclosed[a].push_back(b);
  std::vector<std::size_t> order(n);
  for (std::size_t h = 0; h < n; ++h) order[h] = h;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return enclosed[a].size() < enclosed[b].size(); });
  for (auto h : order) {
    int charge = out[h].contour_winding;
    for (auto b : enclosed[h]) charge -= out[b].charge;
    out[h].charge = charge;
  }
  return out;
}

UnwrapResult phase_unwrap_log(const Element& f, const RasterDomain& region, std::span<const std::size_t> puncture_cells) {
  const auto& owner = f.owner();
  if (owner->kind() != AlgebraKind::GridFunction) fail(ErrorKind::InvalidArgument, "phase unwrapping needs a grid element");
  const auto& dom = owner->domain();
  if (!region.same_grid(dom) || !region.subset_of(dom)) fail(ErrorKind::NotSubset, "region is not contained in the domain");

  auto value = [&](std::size_t cell) { return f[static_cast<std::size_t>(owner->point_of(cell))]; };
  const double tol = default_tol(f);
  std::vector<Scalar> out(f.size(), 0.0);

  for (std::size_t k = 0; k < f.size(); ++k) {
    const std::size_t c = owner->cell_of(k);
    if (!region.test(c)) continue;
    if (owner->is_real() ? !(f[k].real() > 0.0) : !(std::abs(f[k]) > tol)) {
      if (owner->is_real()) {
        ObstructionReport report{"nonpositive", {}, {k}, 0};
        throw ObstructionError(ErrorKind::NonPositiveValue, "real logarithm of a non-positive value", report);
      }
      fail(ErrorKind::NotInvertible, "logarithm of a function vanishing on the region",
           {{"point", k}, {"cell", c}, {"modulus", std::abs(f[k])}});
    }
    if (owner->is_real()) out[k] = std::log(f[k].real());
  }
  if (owner->is_real()) return Element(owner, std::move(out));

  // step check on every adjacent pair of region cells
  for (auto c : region.cells())
    for_each_neighbor8(region, c, [&](std::size_t nb) {
      if (nb > c && region.test(nb)) {
        const double step = principal_step(value(c), value(nb));
        if (std::abs(step) >= kPi / 2)
          fail(ErrorKind::ResolutionError, "phase step too large to unwrap", {{"cell", c}, {"neighbor", nb}, {"turn", step}});
      }
    });

  bool branch_cut = false;
  if (region.dim() == 2) {
    const auto report = complement_components(region);
    auto windings = hole_windings(f, report);
    ObstructionReport obstruction{"winding", {}, {}, 0};
    for (auto& w : windings) {
      const auto& cells = report.holes[w.hole].cells;
      for (auto p : puncture_cells)
        if (std::binary_search(cells.begin(), cells.end(), p)) w.punctured = true;
      if (w.charge == 0) continue;
      if (w.punctured) {
        branch_cut = true;
      } else {
        obstruction.holes.push_back(w);
      }
    }
    if (!obstruction.holes.empty()) return obstruction;
  }

  // phase propagation along a BFS forest
  std::vector<double> theta(region.size(), 0.0);
  std::vector<std::uint8_t> seen(region.size(), 0);
  std::deque<std::size_t> queue;
  for (auto root : region.cells()) {
    if (seen[root]) continue;
    seen[root] = 1;
    theta[root] = std::arg(value(root));
    queue.push_back(root);
    while (!queue.empty()) {
      const std::size_t c = queue.front();
      queue.pop_front();
      for_each_neighbor8(region, c, [&](std::size_t nb) {
        if (region.test(nb) && !seen[nb]) {
          seen[nb] = 1;
          theta[nb] = theta[c] + principal_step(value(c), value(nb));
          queue.push_back(nb);
        }
      });
    }
  }
  if (!branch_cut) {
    for (auto c : region.cells())
      for_each_neighbor8(region, c, [&](std::size_t nb) {
        if (nb > c && region.test(nb)) {
          const double defect = theta[nb] - theta[c] - principal_step(value(c), value(nb));
          if (std::abs(defect) > 1e-9)
            fail(ErrorKind::ResolutionError, "unattributed phase defect", {{"cell", c}, {"neighbor", nb}, {"defect", defect}});
        }
      });
  }
  for (std::size_t k = 0; k < f.size(); ++k) {
    const std::size_t c = owner->cell_of(k);
    if (region.test(c)) out[k] = {std::log(std::abs(f[k])), theta[c]};
  }
  return Element(owner, std::move(out));
}

NearestSource nearest_source(const RasterDomain& source, const RasterDomain& targets) {
  if (!source.same_grid(targets)) fail(ErrorKind::InvalidArgument, "source and targets live on different grids");
  if (source.empty()) fail(ErrorKind::EmptySource, "no source cells to extend from");
  const int nx = source.nx(), ny = source.ny();
  // pass 1: nearest source row per column (ties go to the lower row)
  constexpr int kNone = std::numeric_limits<int>::min();
  std::vector<int> near_row(static_cast<std::size_t>(nx) * ny, kNone);
  for (int i = 0; i < nx; ++i) {
    int last = kNone;
    for (int j = 0; j < ny; ++j) {
      if (source.test(i, j)) last = j;
      near_row[source.index(i, j)] = last;
    }
    int next = kNone;
    for (int j = ny - 1; j >= 0; --j) {
      if (source.test(i, j)) next = j;
      int& r = near_row[source.index(i, j)];
      if (next != kNone && (r == kNone || next - j < j - r)) r = next;
    }
  }
  NearestSource out;
  out.source.assign(source.size(), -1);
  out.dist2.assign(source.size(), -1);
  // pass 2: scan columns outward while they can still improve
  parallel_for(targets.size(), [&](std::size_t t) {
    if (!targets.test(t)) return;
    const int i = targets.col(t), j = targets.row(t);
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    std::size_t best_idx = 0;
    auto consider = [&](int ci) {
      const int r = near_row[source.index(ci, j)];
      if (r == kNone) return;
      const std::int64_t dx = ci - i, dy = r - j;
      const std::int64_t d2 = dx * dx + dy * dy;
      const std::size_t idx = source.index(ci, r);
      if (d2 < best || (d2 == best && idx < best_idx)) best = d2, best_idx = idx;
    };
    for (int dx = 0; dx < nx; ++dx) {
      if (static_cast<std::int64_t>(dx) * dx > best) break;
      if (i - dx >= 0) consider(i - dx);
      if (dx > 0 && i + dx < nx) consider(i + dx);
    }
    out.source[t] = static_cast<std::ptrdiff_t>(best_idx);
    out.dist2[t] = best;
  });
  return out;
}

Element tietze_extend(const Element& h, const RasterDomain& source) {
  const auto& owner = h.owner();
  const auto& dom = owner->domain();
  if (!source.same_grid(dom) || !source.subset_of(dom)) fail(ErrorKind::NotSubset, "source is not contained in the domain");
  const auto nearest = nearest_source(source, dom);
  std::vector<Scalar> out(h.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto s = nearest.source[owner->cell_of(k)];
    out[k] = h[static_cast<std::size_t>(owner->point_of(static_cast<std::size_t>(s)))];
  }
  return Element(owner, std::move(out));
}

double lipschitz_estimate(const Element& g) {
  const auto& owner = g.owner();
  double lip = 0.0;
  switch (owner->kind()) {
    case AlgebraKind::FiniteProduct: return 0.0;
    case AlgebraKind::Circle: {
      const double step = 2.0 * kPi / static_cast<double>(g.size());
      for (std::size_t k = 0; k < g.size(); ++k) lip = std::max(lip, std::abs(g[(k + 1) % g.size()] - g[k]) / step);
      return lip;
    }
    case AlgebraKind::GridFunction: {
      const auto& dom = owner->domain();
      for (std::size_t k = 0; k < g.size(); ++k) {
        const std::size_t c = owner->cell_of(k);
        for_each_neighbor8(dom, c, [&](std::size_t nb) {
          if (nb <= c || !dom.test(nb)) return;
          const bool diagonal = dom.col(nb) != dom.col(c) && dom.row(nb) != dom.row(c);
          const double dist = dom.h() * (diagonal ? std::numbers::sqrt2 : 1.0);
          lip = std::max(lip, std::abs(g[static_cast<std::size_t>(owner->point_of(nb))] - g[k]) / dist);
        });
      }
      return lip;
    }
  }
  return lip;
}

double default_eps(const Element& g) {
  const auto& owner = g.owner();
  const double fallback = 1e-8 * (1.0 + g.sup_norm());
  const double lip = lipschitz_estimate(g);
  double eps = 0.0;
  if (owner->kind() == AlgebraKind::GridFunction) eps = 2.0 * owner->domain().h() * lip;
  if (owner->kind() == AlgebraKind::Circle) eps = 2.0 * (2.0 * kPi / static_cast<double>(g.size())) * lip;
  return eps > 0.0 ? eps : fallback;
}

std::vector<bool> zero_points(const Element& g, double eps) {
  std::vector<bool> out(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) out[k] = std::abs(g[k]) <= eps;
  return out;
}

}  // namespace banach
