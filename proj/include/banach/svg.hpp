#pragma once

#include <optional>
#include <string>
#include <vector>

#include "banach/raster.hpp"
#include "banach/topology.hpp"

namespace banach {

struct SvgScene {
  RasterDomain k;
  std::optional<RasterDomain> zero_set;
  std::optional<HoleReport> holes;  ///< holes of the zero set when present, else of K
  std::vector<HoleWinding> windings;  ///< drawn as labels at the hole anchors
  std::optional<RasterDomain> highlight;  ///< e.g. a boundary-principle counterexample
};

/// Masks become filled paths (one subpath per horizontal run), hole boundaries
/// stroked closed polylines through cell centers, windings text labels.
std::string render_svg(const SvgScene& scene);

}  // namespace banach
