#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "banach/algebra.hpp"
#include "banach/error.hpp"
#include "banach/raster.hpp"

namespace banach {

/// Closed walk of grid cells (the last cell is adjacent to the first),
/// oriented counterclockwise. Consecutive cells are 8-adjacent.
struct Cycle {
  std::vector<std::size_t> cells;

  /// Shoelace area of the polygon through the cell centers, in cell units.
  double signed_area(const RasterDomain& grid) const;
  /// True when the polygon through the cell centers winds around (x, y).
  bool encloses(const RasterDomain& grid, double x, double y) const;
};

struct Hole {
  int component = -1;
  std::vector<std::size_t> cells;
  /// Foreground cells hugging the hole's outer border.
  Cycle boundary;
};

/// Labeling of the complement of a raster set. Foreground is 8-connected,
/// background 4-connected (d = 2); d = 1 uses left/right adjacency.
struct HoleReport {
  std::vector<int> labels;  ///< per grid cell, -1 on foreground cells
  std::vector<bool> bounded;  ///< per component
  std::vector<Hole> holes;  ///< bounded components in label order

  std::size_t component_count() const noexcept { return bounded.size(); }
  std::size_t unbounded_count() const noexcept;
};

/// Winding data of a function around one hole of a region.
struct HoleWinding {
  std::size_t hole = 0;  ///< index into HoleReport::holes
  int contour_winding = 0;  ///< winding along the traced boundary cycle
  int charge = 0;  ///< contour winding minus the charges of holes nested inside it
  bool punctured = false;
  bool inside_k = false;  ///< set by callers that know the ambient compact set
  std::size_t anchor_cell = 0;  ///< some cell of the hole
};

/// Why a logarithm, extension or reduction does not exist.
struct ObstructionReport {
  std::string reason;  ///< "winding", "sign_change", "nonpositive", "circle_winding"
  std::vector<HoleWinding> holes;
  std::vector<std::size_t> points;  ///< offending spectrum points for non-hole reasons
  int winding = 0;  ///< circle winding
};

class ObstructionError : public Error {
 public:
  ObstructionError(ErrorKind kind, const std::string& message, ObstructionReport report);
  const ObstructionReport& report() const noexcept { return report_; }

 private:
  ObstructionReport report_;
};

nlohmann::ordered_json to_json(const ObstructionReport& report);

/// {cells of the owner's domain : |g| <= eps}.
RasterDomain sublevel_zero_set(const Element& g, double eps);

HoleReport complement_components(const RasterDomain& z);

struct HoleVerdict {
  std::size_t hole = 0;
  bool escapes = false;  ///< the hole contains a cell outside K
  /// Escaping cell farthest from K, or (for a violation) the hole's first cell.
  std::size_t witness_cell = 0;
};

struct HoleConditionResult {
  bool holds = true;
  HoleReport report;
  std::vector<HoleVerdict> verdicts;
};

/// Every hole of Z must contain a cell outside K. Throws NotSubset if Z ⊄ K.
HoleConditionResult hole_condition(const RasterDomain& z, const RasterDomain& k);

/// Searches the components U of {cells of int K : |g| > eps} (4-connected) for
/// one whose whole cell boundary lies in the eps-zero set. Returns the first
/// such U, or nullopt when g passes the boundary principle at this resolution.
std::optional<RasterDomain> b1_falsify(const Element& g, const RasterDomain& k, double eps);
std::optional<RasterDomain> b1_falsify(const Element& g, double eps);

/// (1/2π) Σ principal phase increments along a closed sequence of values.
/// Throws ResolutionError when a single step turns by π/2 or more.
int winding_number(std::span<const Scalar> values);

/// Values of f (a grid element) along a cycle.
std::vector<Scalar> values_along(const Element& f, const Cycle& cycle);

/// Contour windings and net charges of f around each hole of `report` (which
/// must label the complement of `region`). d = 2 and complex f only.
std::vector<HoleWinding> hole_windings(const Element& f, const HoleReport& report);

using UnwrapResult = std::variant<Element, ObstructionReport>;

/// Continuous logarithm of f on `region` built by propagating the phase along
/// a BFS spanning tree of the 8-connected cell graph. Values off the region are
/// zero. Holes containing one of `puncture_cells` may carry winding (the
/// result then has a branch cut); any other hole with nonzero charge yields an
/// ObstructionReport. Throws ResolutionError on steps of π/2 or more.
UnwrapResult phase_unwrap_log(const Element& f, const RasterDomain& region,
                              std::span<const std::size_t> puncture_cells = {});

/// Exact nearest source cell (squared distance in cell units, ties broken by
/// the smaller cell index) for every target cell; -1 elsewhere.
struct NearestSource {
  std::vector<std::ptrdiff_t> source;
  std::vector<std::int64_t> dist2;
};
NearestSource nearest_source(const RasterDomain& source, const RasterDomain& targets);

/// Extends h from `source` to the whole owner domain: each cell takes the value
/// of its nearest source cell.
Element tietze_extend(const Element& h, const RasterDomain& source);

/// Finite-difference Lipschitz estimate over adjacent spectrum points.
double lipschitz_estimate(const Element& g);
/// 2 h Lip(g) on grids (2 Δθ Lip on the circle); 1e-8 (1 + ‖g‖) on finite
/// products or when g is constant.
double default_eps(const Element& g);

/// Spectrum points with |g| <= eps.
std::vector<bool> zero_points(const Element& g, double eps);

}  // namespace banach
