#include "banach/certificate.hpp"

#include <cmath>

#include "banach/error.hpp"

namespace banach {

namespace {

constexpr const char* kFormat = "banach-certificate";
constexpr const char* kVersion = "v1";

Json header(const std::string& claim, const Instance& owner) {
  Json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["claim"] = claim;
  j["instance"] = to_json(owner);
  return j;
}

Json seal(Json j) {
  j["payload_hash"] = payload_hash(j);
  return j;
}

double row_extension_check(const Tuple& u, const ExpProduct& w_product, Json& residuals) {
  const Instance& owner = u.owner();
  const std::size_t n = u.size();
  const Matrix w = w_product.evaluate();
  const double row = sup_distance(row_times_matrix(u, w), Tuple::unit(owner, n, 0));
  const double det = (determinant(w) - Element::one(owner)).sup_norm();
  const double inv_row = sup_distance(mat_inverse(w).row(0), u);
  residuals["row"] = row;
  residuals["det"] = det;
  residuals["inverse_row"] = inv_row;
  return std::max({row, det, inv_row});
}

// Report comparison on the recorded fields.
bool same_report(const ObstructionReport& a, const Json& recorded) {
  const Json now = to_json(a);
  return now["reason"] == recorded.at("reason") && now["holes"] == recorded.at("holes") &&
         now["winding"] == recorded.at("winding");
}

}  // namespace

std::string payload_hash(const Json& certificate) {
  Json body = certificate;
  body.erase("payload_hash");
  return "fnv1a64:" + hex64(fnv1a(body.dump()));
}

Json reduction_certificate(const Tuple& f, const Element& g, const ReductionWitness& w, double tol) {
  Json j = header("reducible", g.owner());
  j["input"] = Json{{"f", to_json(f)}, {"g", to_json(g)}};
  j["witness"] = to_json(w);
  j["tolerance"] = tol;
  j["residuals"] = Json{{"min_modulus", verify_reduction(f, g, w.a)}};
  return seal(std::move(j));
}

Json principal_certificate(const Tuple& f, const Element& g, const PrincipalWitness& w, double tol) {
  Json j = header("principal", g.owner());
  j["input"] = Json{{"f", to_json(f)}, {"g", to_json(g)}};
  j["witness"] = to_json(w);
  j["tolerance"] = tol;
  j["residuals"] = Json{{"factorization", verify_principal(f, g, w)}};
  return seal(std::move(j));
}

Json row_extension_certificate(const Tuple& u, const Tuple& x, const RowExtension& ext, double tol) {
  Json j = header("row_extension", u.owner());
  j["input"] = Json{{"u", to_json(u)}};
  j["witness"] = Json{{"x", to_json(x)}, {"W", to_json(ext.W)}};
  j["tolerance"] = tol;
  j["residuals"] = Json{{"row", ext.row_residual},
                        {"det", ext.det_residual},
                        {"inverse_row", ext.inverse_row_residual},
                        {"product", ext.product_residual}};
  return seal(std::move(j));
}

Json exp_reducibility_certificate(const Tuple& a, const Element& g, const ExpReducibilityWitness& w, double tol) {
  Json j = header("exp_reducible", g.owner());
  j["input"] = Json{{"a", to_json(a)}, {"g", to_json(g)}};
  j["witness"] = to_json(w);
  j["tolerance"] = tol;
  j["residuals"] = Json{{"identity", verify_exp_reducibility(a, g, w)}};
  return seal(std::move(j));
}

Json obstruction_certificate(const std::string& decision, const Tuple& f, const Element& g, double eps, double tol,
                             const ObstructionReport& report) {
  if (decision != "reduce" && decision != "principal")
    fail(ErrorKind::InvalidArgument, "decision must be 'reduce' or 'principal'");
  Json j = header("obstruction", g.owner());
  j["decision"] = decision;
  j["input"] = Json{{"f", to_json(f)}, {"g", to_json(g)}, {"eps", eps}};
  j["tolerance"] = tol;
  j["obstruction"] = to_json(report);
  return seal(std::move(j));
}

Json hole_condition_certificate(const Element& g, double eps, const HoleConditionResult& result,
                                const std::optional<RasterDomain>& counterexample) {
  const RasterDomain& grid = g.owner()->domain();
  Json j = header("hole_condition", g.owner());
  j["input"] = Json{{"g", to_json(g)}, {"eps", eps}};
  j["decision"] = to_json(result, grid);
  j["boundary_principle"] = counterexample ? Json{{"holds", false}, {"counterexample", to_json(*counterexample)}}
                                           : Json{{"holds", true}};
  return seal(std::move(j));
}

CertifyResult certify(const Json& cert) {
  CertifyResult out;
  try {
    if (!cert.is_object() || cert.value("format", "") != kFormat)
      fail(ErrorKind::ParseError, "not a certificate document");
    if (cert.value("version", "") != kVersion) fail(ErrorKind::ParseError, "unsupported certificate version");
    out.hash_ok = cert.contains("payload_hash") && cert["payload_hash"] == payload_hash(cert);
    if (!out.hash_ok) out.failures.push_back("payload hash mismatch");

    const Instance owner = instance_from_json(cert.at("instance"));
    const std::string claim = cert.at("claim").get<std::string>();
    const Json& input = cert.at("input");
    Json& res = out.residuals;
    bool ok = true;
    auto require = [&](bool cond, const std::string& what) {
      if (!cond) {
        ok = false;
        out.failures.push_back(what);
      }
    };

    if (claim == "reducible") {
      const Tuple f = tuple_from_json(input.at("f"), owner);
      const Element g = element_from_json(input.at("g"), owner);
      const Tuple a = tuple_from_json(cert.at("witness").at("a"), owner);
      const double tol = cert.at("tolerance").get<double>();
      const double m = verify_reduction(f, g, a);
      res["min_modulus"] = m;
      require(m > tol, "f + a g is not invertible");
      require(std::abs(m - cert.at("residuals").at("min_modulus").get<double>()) <= tol,
              "recorded minimum modulus differs");
    } else if (claim == "principal") {
      const Tuple f = tuple_from_json(input.at("f"), owner);
      const Element g = element_from_json(input.at("g"), owner);
      const Json& wj = cert.at("witness");
      PrincipalWitness w{tuple_from_json(wj.at("a"), owner), exp_product_from_json(wj.at("E"), owner), std::nullopt,
                         wj.value("eps", 0.0)};
      if (!wj.at("h").is_null()) w.h = element_from_json(wj["h"], owner);
      const double r = verify_principal(f, g, w);
      res["factorization"] = r;
      require(r <= cert.at("tolerance").get<double>(), "factorization residual exceeds tolerance");
    } else if (claim == "row_extension") {
      const Tuple u = tuple_from_json(input.at("u"), owner);
      const ExpProduct w = exp_product_from_json(cert.at("witness").at("W"), owner);
      if (w.n != u.size()) fail(ErrorKind::DimensionMismatch, "W does not match the row length");
      const Tuple x = tuple_from_json(cert.at("witness").at("x"), owner);
      const double r = row_extension_check(u, w, res);
      require(r <= cert.at("tolerance").get<double>(), "row extension residual exceeds tolerance");
      // the recorded reduction must still reduce the row
      const double m = verify_reduction(u.head(u.size() - 1), u[u.size() - 1], x);
      res["reduction_min_modulus"] = m;
      require(m > 0.0, "recorded reduction vector does not reduce the row");
    } else if (claim == "exp_reducible") {
      const Tuple a = tuple_from_json(input.at("a"), owner);
      const Element g = element_from_json(input.at("g"), owner);
      const ExpReducibilityWitness w{tuple_from_json(cert.at("witness").at("x"), owner),
                                     tuple_from_json(cert.at("witness").at("b"), owner)};
      const double r = verify_exp_reducibility(a, g, w);
      res["identity"] = r;
      require(r <= cert.at("tolerance").get<double>(), "exponential identity residual exceeds tolerance");
    } else if (claim == "obstruction") {
      const Tuple f = tuple_from_json(input.at("f"), owner);
      const Element g = element_from_json(input.at("g"), owner);
      const ReduceOptions opts{input.at("eps").get<double>(), cert.at("tolerance").get<double>()};
      const std::string decision = cert.at("decision").get<std::string>();
      std::optional<ObstructionReport> report;
      if (decision == "reduce") {
        auto r = reduce_tuple(f, g, opts);
        if (auto* rep = std::get_if<ObstructionReport>(&r)) report = *rep;
      } else {
        auto r = reduce_to_principal(f, g, opts);
        if (auto* rep = std::get_if<ObstructionReport>(&r)) report = *rep;
      }
      require(report.has_value(), "a witness exists; the obstruction does not hold");
      if (report) {
        res["obstruction"] = to_json(*report);
        require(same_report(*report, cert.at("obstruction")), "recomputed obstruction differs");
      }
    } else if (claim == "hole_condition") {
      const Element g = element_from_json(input.at("g"), owner);
      const double eps = input.at("eps").get<double>();
      const RasterDomain z = sublevel_zero_set(g, eps);
      const auto hc = hole_condition(z, owner->domain());
      const auto b1 = b1_falsify(g, eps);
      res["hole_condition"] = hc.holds;
      res["boundary_principle"] = !b1.has_value();
      require(hc.holds == cert.at("decision").at("holds").get<bool>(), "hole-condition decision differs");
      require(!b1.has_value() == cert.at("boundary_principle").at("holds").get<bool>(),
              "boundary-principle decision differs");
      if (b1) require(*b1 == domain_from_json(cert.at("boundary_principle").at("counterexample")),
                      "boundary-principle counterexample differs");
    } else {
      fail(ErrorKind::ParseError, "unknown claim '" + claim + "'");
    }
    out.checks_ok = ok;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::ParseError, std::string("malformed certificate: ") + e.what());
  } catch (const Error& e) {
    // data that parses but cannot be evaluated is a failed check
    if (e.kind() == ErrorKind::ParseError) throw;
    out.checks_ok = false;
    out.failures.push_back(std::string(to_string(e.kind())) + ": " + e.what());
  }
  out.accepted = out.hash_ok && out.checks_ok;
  return out;
}

}  // namespace banach
