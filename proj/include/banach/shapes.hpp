#pragma once

#include <string>
#include <string_view>

#include "banach/algebra.hpp"
#include "banach/raster.hpp"

namespace banach {

/// Parses a shape description into an algebra instance.
///
///   disk(r[, cx, cy])  annulus(r1, r2[, cx, cy])  rect(x0, x1, y0, y1)
///   interval(a, b)     mask:<path to a domain JSON file>
///   product(m)         circle(N)
///
/// Planar and interval primitives combine with + (union) and - (difference),
/// evaluated left to right, and are rasterized with cell size h. mask, product
/// and circle stand alone. Throws ParseError with detail {offset}.
Instance instance_from_shape(std::string_view text, Field field, double h);

/// The raster set of a planar or interval shape expression.
RasterDomain rasterize_shape(std::string_view text, double h);

}  // namespace banach
