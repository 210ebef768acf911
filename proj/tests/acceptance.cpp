// Acceptance run: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "banach/error.hpp"
#include "banach/reduce.hpp"
#include "support.hpp"

using namespace banach;
using fixtures::Rng;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Tuple random_tuple(const Instance& owner, std::size_t n, Rng& rng, double scale = 1.0) {
  std::vector<Element> c;
  for (std::size_t j = 0; j < n; ++j) c.push_back(fixtures::random_element(owner, rng, scale));
  return Tuple(std::move(c));
}

// Leibniz determinant, independent of the library's cofactor/Bareiss code.
Scalar leibniz(const PointMatrix& m) {
  const int n = static_cast<int>(m.rows());
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  Scalar total = 0.0;
  do {
    int inv = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) inv += p[i] > p[j];
    Scalar t = inv % 2 ? -1.0 : 1.0;
    for (int i = 0; i < n; ++i) t *= m(i, p[i]);
    total += t;
  } while (std::next_permutation(p.begin(), p.end()));
  return total;
}

// ---------------------------------------------------------------------------
// Annulus and disk pipelines, shared by criteria 1, 2 and 9.

struct AnnulusRun {
  bool hole_condition = false;
  double reduce_min = 0.0;
  bool not_principal = false;
  int winding = 0;
  double principal_residual = 1e300;
};

AnnulusRun annulus_run(double h) {
  AnnulusRun r;
  const auto owner = fixtures::grid(Field::Complex, fixtures::annulus(h));
  const Element g = fixtures::radial(owner, 1.5);
  const Tuple z({fixtures::z_of(owner)});
  r.hole_condition = hole_condition(sublevel_zero_set(g, default_eps(g)), owner->domain()).holds;
  const auto red = reduce_tuple(z, g);
  if (const auto* w = std::get_if<ReductionWitness>(&red)) r.reduce_min = verify_reduction(z, g, w->a);
  const auto pz = reduce_to_principal(z, g);
  if (const auto* rep = std::get_if<ObstructionReport>(&pz)) {
    r.not_principal = rep->reason == "winding" && rep->holes.size() == 1;
    if (!rep->holes.empty()) r.winding = rep->holes[0].contour_winding;
  }
  const Tuple ez({exp_element(abs(fixtures::z_of(owner)))});
  const auto pe = reduce_to_principal(ez, g);
  if (const auto* w = std::get_if<PrincipalWitness>(&pe)) {
    // independent check: e^h against f + a g, computed here
    const Element target = ez[0] + g * w->a[0];
    r.principal_residual = (exp_element(*w->h) - target).sup_norm();
  }
  return r;
}

struct DiskRun {
  bool hole_condition = true;
  bool violating_certificate = false;
  bool irreducible_winding = false;
  bool b1_inner_disk = false;
};

DiskRun disk_run(double h) {
  DiskRun r;
  const auto owner = fixtures::grid(Field::Complex, fixtures::disk(h));
  const Element g = fixtures::radial(owner, 1.0);
  const double eps = default_eps(g);
  const RasterDomain& k = owner->domain();
  const auto hc = hole_condition(sublevel_zero_set(g, eps), k);
  r.hole_condition = hc.holds;
  for (const auto& v : hc.verdicts) {
    const auto& hole = hc.report.holes[v.hole];
    bool inside = true;
    for (const auto c : hole.cells) inside = inside && k.test(c);
    r.violating_certificate = r.violating_certificate || (!v.escapes && inside);
  }
  const auto red = reduce_tuple(Tuple({fixtures::z_of(owner)}), g);
  if (const auto* rep = std::get_if<ObstructionReport>(&red))
    r.irreducible_winding = rep->reason == "winding" && rep->holes.size() == 1 && rep->holes[0].inside_k &&
                            rep->holes[0].charge == 1;
  if (const auto u = b1_falsify(g, eps)) {
    // every cell of U lies inside |z| < 1 and U contains the center
    bool inner = true;
    for (const auto c : u->cells()) inner = inner && std::abs(u->center(c)) < 1.0;
    const std::size_t origin = k.index(static_cast<int>(std::floor((0.0 - k.x0()) / h)),
                                       static_cast<int>(std::floor((0.0 - k.y0()) / h)));
    r.b1_inner_disk = inner && u->test(origin);
  }
  return r;
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
  Outcome o;
  const AnnulusRun r = annulus_run(1.0 / 128);
  o.require(r.hole_condition, "hole condition not TRUE");
  o.require(r.reduce_min >= 0.1, "min |f + a g| = " + fmt(r.reduce_min));
  o.require(r.not_principal && r.winding == 1, "z not reported NotPrincipal with winding 1");
  o.require(r.principal_residual <= 1e-6, "e^h residual " + fmt(r.principal_residual));
  if (o.pass)
    o.detail = "min|f+ag| = " + fmt(r.reduce_min) + ", winding 1, e^h residual " + fmt(r.principal_residual);
  return o;
}

Outcome criterion2() {
  Outcome o;
  const DiskRun r = disk_run(1.0 / 128);
  o.require(!r.hole_condition, "hole condition not FALSE");
  o.require(r.violating_certificate, "no violating hole certificate");
  o.require(r.irreducible_winding, "reduce_tuple(z, g) not irreducible by winding");
  o.require(r.b1_inner_disk, "b1_falsify did not return the inner disk");
  o.require(r.hole_condition == !r.b1_inner_disk, "decisions disagree");
  if (o.pass) o.detail = "hole condition FALSE, inner-disk counterexample, winding obstruction";
  return o;
}

Outcome criterion3() {
  Outcome o;
  Rng rng(2024);
  const double h = 1.0 / 64;
  int agree = 0, violated = 0;
  for (int trial = 0; trial < 200; ++trial) {
    struct Disk { double cx, cy, r; };
    struct Rect { double x0, x1, y0, y1; };
    std::vector<Disk> disks, cuts;
    std::vector<Rect> rects;
    const int nd = rng.integer(1, 3), nr = rng.integer(0, 2), nc = rng.integer(0, 2);
    for (int i = 0; i < nd; ++i) disks.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0.5, 1.0)});
    for (int i = 0; i < nr; ++i) {
      const double x = rng.uniform(-1.8, 0.8), y = rng.uniform(-1.8, 0.8);
      rects.push_back({x, x + rng.uniform(0.4, 1.0), y, y + rng.uniform(0.4, 1.0)});
    }
    for (int i = 0; i < nc; ++i) cuts.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0.1, 0.35)});
    const auto dom = RasterDomain::rasterize(2, {-2, 2, -2, 2}, h, [&](double x, double y) {
      bool in = false;
      for (const auto& d : disks) in = in || std::hypot(x - d.cx, y - d.cy) <= d.r;
      for (const auto& r : rects) in = in || (x >= r.x0 && x <= r.x1 && y >= r.y0 && y <= r.y1);
      for (const auto& c : cuts) in = in && std::hypot(x - c.cx, y - c.cy) > c.r;
      return in;
    });
    if (dom.empty()) {
      --trial;
      continue;
    }
    const auto owner = fixtures::grid(Field::Complex, dom);
    // g vanishes on one or two random circles, optionally times a line
    const int circles = rng.integer(1, 2);
    std::vector<Disk> zeros;
    for (int i = 0; i < circles; ++i) {
      const Disk& host = disks[static_cast<std::size_t>(rng.integer(0, nd - 1))];
      zeros.push_back({host.cx + rng.uniform(-0.3, 0.3), host.cy + rng.uniform(-0.3, 0.3), rng.uniform(0.15, 0.7)});
    }
    const bool line = rng.integer(0, 3) == 0;
    const double lx = rng.uniform(-1, 1);
    const Element g = Element::from_position(owner, [&](Scalar z) {
      Scalar v = 1.0;
      for (const auto& c : zeros) v *= std::abs(z - Scalar(c.cx, c.cy)) - c.r;
      if (line) v *= z.real() - lx;
      return v;
    });
    const double eps = default_eps(g);
    const bool hc = hole_condition(sublevel_zero_set(g, eps), dom).holds;
    const bool b1_none = !b1_falsify(g, eps).has_value();
    agree += hc == b1_none;
    violated += !hc;
  }
  o.require(agree == 200, std::to_string(200 - agree) + " disagreements");
  o.require(violated > 20 && violated < 180, "unbalanced sample: " + std::to_string(violated) + " violations");
  if (o.pass) o.detail = "200/200 agree (" + std::to_string(violated) + " hole-condition violations)";
  return o;
}

Outcome criterion4() {
  Outcome o;
  Rng rng(4);
  double worst = 0.0;
  int done = 0;
  while (done < 200) {
    const int m = rng.integer(1, 8);
    const std::size_t n = static_cast<std::size_t>(rng.integer(1, 4));
    const auto owner = AlgebraInstance::finite_product(Field::Complex, m);
    const Tuple f = random_tuple(owner, n, rng);
    const Element g = fixtures::random_element(owner, rng);
    const Tuple u = f.append(g);
    if (u.min_modulus() < 0.05) continue;
    const auto red = reduce_tuple(f, g);
    const auto* w = std::get_if<ReductionWitness>(&red);
    if (!w) {
      o.require(false, "complex finite product reported irreducible");
      break;
    }
    const RowExtension ext = extend_row(u, *w);
    const Matrix direct = ext.W.evaluate();
    for (int k = 0; k < m; ++k) {
      const PointMatrix wk = direct.at(static_cast<std::size_t>(k));
      const PointMatrix assembled = ext.matrix.at(static_cast<std::size_t>(k));
      Eigen::RowVectorXcd uk(static_cast<Eigen::Index>(n + 1)), e1 = Eigen::RowVectorXcd::Zero(static_cast<Eigen::Index>(n + 1));
      for (std::size_t j = 0; j <= n; ++j) uk(static_cast<Eigen::Index>(j)) = u[j][static_cast<std::size_t>(k)];
      e1(0) = 1.0;
      const double row = (uk * wk - e1).cwiseAbs().maxCoeff();
      const double det = std::abs(leibniz(wk) - 1.0);
      const double product = (wk - assembled).cwiseAbs().maxCoeff();
      const double inv_row = (wk.fullPivLu().inverse().row(0) - uk).cwiseAbs().maxCoeff();
      worst = std::max({worst, row, det, product, inv_row});
    }
    ++done;
  }
  o.require(worst <= 1e-8, "worst residual " + fmt(worst));
  if (o.pass) o.detail = "200 tuples, worst residual " + fmt(worst);
  return o;
}

Outcome criterion5() {
  Outcome o;
  Rng rng(5);
  double worst = 0.0;
  int paths_ok = 0, flagged = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto owner = AlgebraInstance::finite_product(Field::Complex, rng.integer(1, 8));
    const std::size_t n = static_cast<std::size_t>(rng.integer(1, 4));
    const Element g = fixtures::random_element(owner, rng);
    auto link = [&](const Tuple& target) {
      std::vector<Matrix> logs;
      for (int k = 0; k < rng.integer(1, 3); ++k)
        logs.push_back(Matrix::from_points(owner, n, [&](std::size_t) {
          PointMatrix p(n, n);
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) p(i, j) = rng.complex(0.5);
          return p;
        }));
      EquivalenceWitness w{random_tuple(owner, n, rng, 0.5), exp_product(owner, n, std::move(logs))};
      return std::pair{row_times_matrix(target, w.E.evaluate()) - g * w.x, w};
    };
    Tuple t0 = random_tuple(owner, n, rng);
    if (t0.min_modulus() < 0.1) t0 = t0.with(0, t0[0] + Element::constant(owner, 2.0));
    if (t0.min_modulus() < 0.1) continue;
    const auto [f1, w01] = link(t0);
    const auto [f2, w12] = link(f1);
    worst = std::max(worst, verify_equivalence(f1, g, f1, equivalence_reflexive(f1)));
    worst = std::max(worst, verify_equivalence(t0, g, f1, equivalence_symmetric(g, w01)));
    worst = std::max(worst, verify_equivalence(f2, g, t0, equivalence_transitive(g, w12, w01)));
    try {
      exp_class_path(f1, g, t0, w01, 64);
      exp_class_path(f2, g, t0, equivalence_transitive(g, w12, w01), 64);
      ++paths_ok;
    } catch (const Error&) {
    }
    // corruption of either the shift or one logarithm
    EquivalenceWitness bad = w01;
    if (trial % 2) {
      bad.x = bad.x.with(0, bad.x[0] + Element::constant(owner, rng.complex(1.0) + 0.5));
    } else {
      bad.E.logs[0] = bad.E.logs[0] + Matrix::scalar(owner, PointMatrix::Identity(n, n) * 0.3);
    }
    try {
      exp_class_path(f1, g, t0, bad, 64);
    } catch (const Error& e) {
      flagged += e.kind() == ErrorKind::PathLeavesI_n;
    }
  }
  o.require(worst <= 1e-8, "worst equivalence residual " + fmt(worst));
  o.require(paths_ok == 50, std::to_string(50 - paths_ok) + " valid paths flagged");
  o.require(flagged == 50, std::to_string(50 - flagged) + " corrupted witnesses accepted");
  if (o.pass) o.detail = "worst residual " + fmt(worst) + ", 50/50 valid paths, 50/50 corruptions flagged";
  return o;
}

Outcome criterion6() {
  Outcome o;
  Rng rng(6);
  long cases = 0, agree = 0;
  for (int m = 1; m <= 10; ++m) {
    const auto owner = AlgebraInstance::finite_product(Field::Real, m);
    const Element zero = Element::zero(owner);
    for (unsigned pattern = 0; pattern < (1u << m); ++pattern) {
      std::vector<Scalar> v(static_cast<std::size_t>(m));
      for (int k = 0; k < m; ++k) v[static_cast<std::size_t>(k)] = ((pattern >> k) & 1u ? 1.0 : -1.0) * rng.uniform(0.1, 3.0);
      const Tuple f({Element(owner, v)});
      const bool positive = pattern == (1u << m) - 1;
      const bool reducible = std::holds_alternative<ReductionWitness>(reduce_tuple(f, zero));
      const auto p = reduce_to_principal(f, zero);
      const bool principal = std::holds_alternative<PrincipalWitness>(p) &&
                             verify_principal(f, zero, std::get<PrincipalWitness>(p)) <= 1e-10;
      // a zero coordinate makes the pair non-invertible
      v[static_cast<std::size_t>(rng.integer(0, m - 1))] = 0.0;
      bool rejected = false;
      try {
        reduce_tuple(Tuple({Element(owner, v)}), zero);
      } catch (const Error& e) {
        rejected = e.kind() == ErrorKind::NotInvertibleTuple;
      }
      ++cases;
      agree += reducible && principal == positive && rejected;
    }
  }
  o.require(agree == cases, std::to_string(cases - agree) + " of " + std::to_string(cases) + " disagree");
  if (o.pass) o.detail = std::to_string(cases) + " sign patterns, 100% agreement";
  return o;
}

Outcome criterion7() {
  Outcome o;
  const auto owner = AlgebraInstance::circle(Field::Complex, 1024);
  for (int k = -20; k <= 20; ++k) {
    const Element f = Element::from_function(owner, [&](std::size_t j) { return std::polar(1.0, k * owner->angle(j)); });
    const int w = winding_number(f.values());
    o.require(w == k, "winding of e^{" + std::to_string(k) + "i theta} is " + std::to_string(w));
    bool logged = true;
    try {
      log_element(f);
    } catch (const Error&) {
      logged = false;
    }
    o.require(logged == (k == 0), "log_element for k = " + std::to_string(k));
  }
  const Element e1 = Element::from_position(owner, [](Scalar z) { return z; });
  bool obstruction = false;
  try {
    exp_reduce_pair_bsr1(e1, Element::zero(owner));
  } catch (const Error& e) {
    obstruction = e.kind() == ErrorKind::LogObstruction;
  }
  o.require(obstruction, "exp_reduce_pair_bsr1(e^{i theta}, 0) did not raise LogObstruction");
  if (o.pass) o.detail = "windings -20..20 exact, log only at k = 0, LogObstruction raised";
  return o;
}

Outcome criterion8() {
  Outcome o;
  Rng rng(8);
  int passing = 0, implied = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto owner = AlgebraInstance::finite_product(Field::Complex, rng.integer(1, 8));
    const std::size_t n = static_cast<std::size_t>(rng.integer(1, 4));
    Element g = fixtures::random_element(owner, rng);
    if (trial % 3 == 0) g = g * Element::from_function(owner, [](std::size_t k) { return Scalar(k % 2 ? 1.0 : 0.0); });
    const Tuple x = random_tuple(owner, n, rng, 0.5), b = random_tuple(owner, n, rng);
    std::vector<Element> a;
    for (std::size_t j = 0; j < n; ++j) a.push_back(fixtures::random_element(owner, rng));
    // solve Σ e^{x_j}(a_j + b_j g) = 1 for a_1
    Element rest = Element::one(owner);
    for (std::size_t j = 1; j < n; ++j) rest = rest - exp_element(x[j]) * (a[j] + b[j] * g);
    a[0] = rest * exp_element(Element::zero(owner) - x[0]) - b[0] * g;
    const Tuple at(a);
    const ExpReducibilityWitness w{x, b};
    const double identity = verify_exp_reducibility(at, g, w);
    const PrincipalWitness p = principal_from_exp_reducible(at, g, w);
    const double residual = verify_principal(at, g, p);
    worst = std::max({worst, identity, residual});
    if (residual <= 1e-8) {
      ++passing;
      implied += verify_reduction(at, g, p.a) > default_tol(at.append(g));
    }
  }
  o.require(passing == 100, std::to_string(100 - passing) + " principal witnesses failed");
  o.require(implied == passing, "principal witness without reduction");
  if (o.pass) o.detail = "100/100 witnesses, worst residual " + fmt(worst);
  return o;
}

Outcome criterion9() {
  Outcome o;
  const double hs[] = {1.0 / 64, 1.0 / 128, 1.0 / 256};
  std::vector<AnnulusRun> ann;
  std::vector<DiskRun> disk;
  for (const double h : hs) {
    ann.push_back(annulus_run(h));
    disk.push_back(disk_run(h));
  }
  std::string trail;
  for (std::size_t i = 0; i < 3; ++i) {
    o.require(ann[i].hole_condition && ann[i].reduce_min >= 0.1 && ann[i].not_principal && ann[i].winding == 1 &&
                  ann[i].principal_residual <= 1e-6,
              "annulus decisions differ at level " + std::to_string(i));
    o.require(!disk[i].hole_condition && disk[i].violating_certificate && disk[i].irreducible_winding &&
                  disk[i].b1_inner_disk,
              "disk decisions differ at level " + std::to_string(i));
    trail += (i ? " -> " : "") + fmt(ann[i].reduce_min) + "/" + fmt(ann[i].principal_residual);
    if (i == 0) continue;
    o.require(ann[i].reduce_min >= ann[i - 1].reduce_min - 1e-12, "min |f + a g| decreased");
    o.require(ann[i].principal_residual <= std::max(ann[i - 1].principal_residual, 1e-12), "e^h residual grew");
  }
  if (o.pass) o.detail = "decisions stable; min|f+ag| / e^h residual: " + trail;
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"annulus fixture", criterion1},        {"disk fixture", criterion2},
      {"hole condition vs boundary principle", criterion3}, {"row extension suite", criterion4},
      {"equivalence and class paths", criterion5},          {"real sign-pattern oracle", criterion6},
      {"circle algebra", criterion7},         {"exponential reducibility", criterion8},
      {"resolution stability", criterion9}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %zu (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
