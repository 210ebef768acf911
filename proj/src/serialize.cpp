#include "banach/serialize.hpp"

#include <cstdio>

#include "banach/error.hpp"

namespace banach {

namespace {

Field field_from(const Json& j) {
  const std::string f = j.at("field").get<std::string>();
  if (f == "R") return Field::Real;
  if (f == "C") return Field::Complex;
  fail(ErrorKind::ParseError, "unknown field '" + f + "'");
}

Json field_json(Field f) { return f == Field::Real ? "R" : "C"; }

template <typename Fn>
auto parsing(const char* what, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::ParseError, std::string("malformed ") + what + ": " + e.what());
  }
}

}  // namespace

Json to_json(const RasterDomain& d) {
  Json j;
  j["dim"] = d.dim();
  j["x0"] = d.x0();
  j["y0"] = d.y0();
  j["h"] = d.h();
  j["nx"] = d.nx();
  j["ny"] = d.ny();
  j["margin"] = d.margin();
  Json runs = Json::array();
  std::uint8_t current = 0;
  std::size_t run = 0;
  for (const auto bit : d.bits()) {
    const std::uint8_t b = bit ? 1 : 0;
    if (b != current) {
      runs.push_back(run);
      current = b;
      run = 0;
    }
    ++run;
  }
  runs.push_back(run);
  j["runs"] = std::move(runs);
  return j;
}

RasterDomain domain_from_json(const Json& j) {
  return parsing("domain", [&] {
    const int nx = j.at("nx").get<int>(), ny = j.at("ny").get<int>();
    if (nx <= 0 || ny <= 0) fail(ErrorKind::ParseError, "domain extents must be positive");
    std::vector<std::uint8_t> bits;
    bits.reserve(static_cast<std::size_t>(nx) * ny);
    std::uint8_t current = 0;
    for (const auto& run : j.at("runs")) {
      const auto len = run.get<std::size_t>();
      if (bits.size() + len > static_cast<std::size_t>(nx) * ny) fail(ErrorKind::ParseError, "mask runs overflow the grid");
      bits.insert(bits.end(), len, current);
      current ^= 1u;
    }
    if (bits.size() != static_cast<std::size_t>(nx) * ny) fail(ErrorKind::ParseError, "mask runs do not cover the grid");
    return RasterDomain(j.at("dim").get<int>(), j.at("x0").get<double>(), j.at("y0").get<double>(),
                        j.at("h").get<double>(), nx, ny, std::move(bits), j.value("margin", 2));
  });
}

Json to_json(const Instance& owner) {
  Json j;
  j["kind"] = std::string(to_string(owner->kind()));
  j["field"] = field_json(owner->field());
  switch (owner->kind()) {
    case AlgebraKind::GridFunction:
      j["domain"] = to_json(owner->domain());
      break;
    case AlgebraKind::FiniteProduct:
      j["m"] = owner->size();
      break;
    case AlgebraKind::Circle:
      j["N"] = owner->size();
      break;
  }
  j["bsr1_connected"] = owner->bsr1_connected();
  return j;
}

Instance instance_from_json(const Json& j) {
  return parsing("instance", [&] {
    const std::string kind = j.at("kind").get<std::string>();
    const Field field = field_from(j);
    Instance inst;
    if (kind == "GridFunction") inst = AlgebraInstance::grid(field, domain_from_json(j.at("domain")));
    else if (kind == "FiniteProduct") inst = AlgebraInstance::finite_product(field, j.at("m").get<int>());
    else if (kind == "Circle") inst = AlgebraInstance::circle(field, j.at("N").get<int>());
    else fail(ErrorKind::ParseError, "unknown algebra kind '" + kind + "'");
    if (j.contains("bsr1_connected") && j["bsr1_connected"].get<bool>() != inst->bsr1_connected())
      inst = inst->annotated(j["bsr1_connected"].get<bool>());
    return inst;
  });
}

Json to_json(const Element& a) {
  Json values = Json::array();
  const bool real = a.owner()->is_real();
  for (const Scalar v : a.values()) {
    if (real) values.push_back(v.real());
    else values.push_back(Json::array({v.real(), v.imag()}));
  }
  return values;
}

Element element_from_json(const Json& j, const Instance& owner) {
  return parsing("element", [&] {
    if (!j.is_array()) fail(ErrorKind::ParseError, "element values must be an array");
    std::vector<Scalar> values;
    values.reserve(j.size());
    for (const auto& v : j) {
      if (v.is_array()) {
        if (v.size() != 2) fail(ErrorKind::ParseError, "complex values are [re, im] pairs");
        values.emplace_back(v[0].get<double>(), v[1].get<double>());
      } else {
        values.emplace_back(v.get<double>(), 0.0);
      }
    }
    return Element(owner, std::move(values));
  });
}

Json to_json(const Tuple& t) {
  Json j = Json::array();
  for (const auto& c : t.coords()) j.push_back(to_json(c));
  return j;
}

Tuple tuple_from_json(const Json& j, const Instance& owner) {
  if (!j.is_array()) fail(ErrorKind::ParseError, "a tuple is an array of elements");
  std::vector<Element> coords;
  for (const auto& c : j) coords.push_back(element_from_json(c, owner));
  return Tuple(std::move(coords));
}

Json to_json(const Matrix& m) {
  Json entries = Json::array();
  for (std::size_t i = 0; i < m.n(); ++i) {
    const Tuple row = m.row(i);
    for (const auto& e : row.coords()) entries.push_back(to_json(e));
  }
  return Json{{"n", m.n()}, {"entries", std::move(entries)}};
}

Matrix matrix_from_json(const Json& j, const Instance& owner) {
  return parsing("matrix", [&] {
    const auto n = j.at("n").get<std::size_t>();
    std::vector<Element> entries;
    for (const auto& e : j.at("entries")) entries.push_back(element_from_json(e, owner));
    return Matrix(owner, n, std::move(entries));
  });
}

Json to_json(const ExpProduct& e) {
  Json logs = Json::array();
  for (const auto& l : e.logs) logs.push_back(to_json(l));
  return Json{{"n", e.n}, {"logs", std::move(logs)}};
}

ExpProduct exp_product_from_json(const Json& j, const Instance& owner) {
  return parsing("exponential product", [&] {
    std::vector<Matrix> logs;
    for (const auto& l : j.at("logs")) logs.push_back(matrix_from_json(l, owner));
    return exp_product(owner, j.at("n").get<std::size_t>(), std::move(logs));
  });
}

Json to_json(const HoleReport& report, const RasterDomain& grid) {
  Json holes = Json::array();
  for (std::size_t i = 0; i < report.holes.size(); ++i) {
    const Hole& h = report.holes[i];
    Json cycle = Json::array();
    for (const auto c : h.boundary.cells) cycle.push_back(Json::array({grid.col(c), grid.row(c)}));
    holes.push_back(Json{{"hole", i},
                         {"component", h.component},
                         {"cells", h.cells.size()},
                         {"anchor", Json::array({grid.col(h.cells.front()), grid.row(h.cells.front())})},
                         {"boundary", std::move(cycle)}});
  }
  return Json{{"components", report.component_count()},
              {"unbounded", report.unbounded_count()},
              {"holes", std::move(holes)}};
}

Json to_json(const HoleConditionResult& result, const RasterDomain& grid) {
  Json verdicts = Json::array();
  for (const auto& v : result.verdicts) {
    Json j{{"hole", v.hole}, {"escapes", v.escapes}};
    j["witness_cell"] = Json::array({grid.col(v.witness_cell), grid.row(v.witness_cell)});
    j["witness_point"] = Json::array({grid.center_x(v.witness_cell), grid.center_y(v.witness_cell)});
    verdicts.push_back(std::move(j));
  }
  return Json{{"holds", result.holds}, {"holes", to_json(result.report, grid)}, {"verdicts", std::move(verdicts)}};
}

Json to_json(const ReductionWitness& w) {
  return Json{{"a", to_json(w.a)}, {"achieved_min", w.achieved_min}, {"eps", w.eps}, {"extension", w.extension_trace}};
}

Json to_json(const PrincipalWitness& w) {
  Json j{{"a", to_json(w.a)}, {"E", to_json(w.E)}};
  j["h"] = w.h ? to_json(*w.h) : Json(nullptr);
  j["eps"] = w.eps;
  return j;
}

Json to_json(const ExpReducibilityWitness& w) { return Json{{"x", to_json(w.x)}, {"b", to_json(w.b)}}; }

Json to_json(const EquivalenceWitness& w) { return Json{{"x", to_json(w.x)}, {"E", to_json(w.E)}}; }

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (const unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace banach
