#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

#include "banach/algebra.hpp"
#include "banach/matrices.hpp"
#include "banach/raster.hpp"
#include "banach/reduce.hpp"
#include "banach/topology.hpp"

namespace banach {

using Json = nlohmann::ordered_json;

/// Masks are stored as alternating run lengths, starting with unset cells.
Json to_json(const RasterDomain& domain);
RasterDomain domain_from_json(const Json& j);

Json to_json(const Instance& owner);
Instance instance_from_json(const Json& j);

/// Real values as numbers, complex values as [re, im] pairs.
Json to_json(const Element& a);
Element element_from_json(const Json& j, const Instance& owner);

Json to_json(const Tuple& t);
Tuple tuple_from_json(const Json& j, const Instance& owner);

/// {"n", "entries"} with entries in row-major order.
Json to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, const Instance& owner);

Json to_json(const ExpProduct& e);
ExpProduct exp_product_from_json(const Json& j, const Instance& owner);

Json to_json(const HoleReport& report, const RasterDomain& grid);
Json to_json(const HoleConditionResult& result, const RasterDomain& grid);

Json to_json(const ReductionWitness& w);
Json to_json(const PrincipalWitness& w);
Json to_json(const ExpReducibilityWitness& w);
Json to_json(const EquivalenceWitness& w);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t value);

}  // namespace banach
