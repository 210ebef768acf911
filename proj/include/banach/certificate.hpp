#pragma once

#include <optional>
#include <string>
#include <vector>

#include "banach/serialize.hpp"

namespace banach {

// Certificates are self-contained JSON documents: the instance, the inputs,
// the witness, a tolerance, the residuals achieved when issued and a payload
// hash. Field order is fixed, so equal inputs give byte-identical output.

Json reduction_certificate(const Tuple& f, const Element& g, const ReductionWitness& w, double tol);
Json principal_certificate(const Tuple& f, const Element& g, const PrincipalWitness& w, double tol);
Json row_extension_certificate(const Tuple& u, const Tuple& x, const RowExtension& ext, double tol);
Json exp_reducibility_certificate(const Tuple& a, const Element& g, const ExpReducibilityWitness& w, double tol);
/// decision is "reduce" or "principal"; tol is the invertibility threshold.
Json obstruction_certificate(const std::string& decision, const Tuple& f, const Element& g, double eps, double tol,
                             const ObstructionReport& report);
/// Records both the hole-condition decision and the boundary-principle search.
Json hole_condition_certificate(const Element& g, double eps, const HoleConditionResult& result,
                                const std::optional<RasterDomain>& counterexample);

struct CertifyResult {
  bool accepted = false;
  bool hash_ok = false;  ///< the payload hash matches
  bool checks_ok = false;  ///< every recomputed residual is within tolerance
  Json residuals;  ///< recomputed values
  std::vector<std::string> failures;
};

/// Recomputes every residual from the serialized data alone. Malformed
/// documents throw ParseError.
CertifyResult certify(const Json& certificate);

/// Hash of the document without its "payload_hash" field.
std::string payload_hash(const Json& certificate);

}  // namespace banach
