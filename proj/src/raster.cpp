#include "banach/raster.hpp"

#include <algorithm>
#include <cmath>

#include "banach/error.hpp"

namespace banach {

RasterDomain::RasterDomain(int dim, double x0, double y0, double h, int nx, int ny,
                           std::vector<std::uint8_t> mask, int margin)
    : dim_(dim), x0_(x0), y0_(dim == 1 ? 0.0 : y0), h_(h), nx_(nx), ny_(ny), margin_(margin),
      mask_(std::move(mask)) {
  validate();
}

void RasterDomain::validate() const {
  if (dim_ != 1 && dim_ != 2) fail(ErrorKind::InvalidArgument, "raster dimension must be 1 or 2");
  if (!(h_ > 0.0) || !std::isfinite(h_)) fail(ErrorKind::InvalidArgument, "cell size must be positive");
  if (nx_ <= 0 || ny_ <= 0) fail(ErrorKind::InvalidArgument, "grid must have at least one cell");
  if (dim_ == 1 && ny_ != 1) fail(ErrorKind::InvalidArgument, "a 1-d raster has exactly one row");
  if (margin_ < 1) fail(ErrorKind::InvalidArgument, "margin must be at least one cell");
  if (mask_.size() != static_cast<std::size_t>(nx_) * ny_)
    fail(ErrorKind::InvalidArgument, "mask size does not match grid shape");
  for (std::size_t idx = 0; idx < mask_.size(); ++idx) {
    if (!mask_[idx]) continue;
    const int i = col(idx), j = row(idx);
    const bool x_ok = i >= margin_ && i < nx_ - margin_;
    const bool y_ok = dim_ == 1 || (j >= margin_ && j < ny_ - margin_);
    if (!x_ok || !y_ok)
      fail(ErrorKind::InvalidArgument, "mask touches the grid margin",
           {{"cell", idx}, {"margin", margin_}});
  }
}

RasterDomain RasterDomain::rasterize(int dim, const Box& roi, double h,
                                     const std::function<bool(double, double)>& inside, int margin) {
  if (!(h > 0.0)) fail(ErrorKind::InvalidArgument, "cell size must be positive");
  if (roi.xmax < roi.xmin || (dim == 2 && roi.ymax < roi.ymin))
    fail(ErrorKind::InvalidArgument, "empty bounding box");
  auto cells_along = [h](double lo, double hi) {
    return std::max(1, static_cast<int>(std::ceil((hi - lo) / h - 1e-9)));
  };
  const int inner_x = cells_along(roi.xmin, roi.xmax);
  const int inner_y = dim == 1 ? 1 : cells_along(roi.ymin, roi.ymax);
  const int nx = inner_x + 2 * margin;
  const int ny = dim == 1 ? 1 : inner_y + 2 * margin;
  const double x0 = roi.xmin - margin * h;
  const double y0 = dim == 1 ? 0.0 : roi.ymin - margin * h;
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(nx) * ny, 0);
  for (int j = 0; j < ny; ++j) {
    if (dim == 2 && (j < margin || j >= ny - margin)) continue;
    const double y = dim == 1 ? 0.0 : y0 + (j + 0.5) * h;
    for (int i = margin; i < nx - margin; ++i) {
      const double x = x0 + (i + 0.5) * h;
      if (inside(x, y)) mask[static_cast<std::size_t>(j) * nx + i] = 1;
    }
  }
  return RasterDomain(dim, x0, y0, h, nx, ny, std::move(mask), margin);
}

std::size_t RasterDomain::count() const noexcept {
  return static_cast<std::size_t>(std::count_if(mask_.begin(), mask_.end(), [](auto b) { return b != 0; }));
}

std::vector<std::size_t> RasterDomain::cells() const {
  std::vector<std::size_t> out;
  out.reserve(count());
  for (std::size_t idx = 0; idx < mask_.size(); ++idx)
    if (mask_[idx]) out.push_back(idx);
  return out;
}

RasterDomain RasterDomain::with_mask(std::vector<std::uint8_t> mask) const {
  return RasterDomain(dim_, x0_, y0_, h_, nx_, ny_, std::move(mask), margin_);
}

RasterDomain RasterDomain::empty_like() const {
  return with_mask(std::vector<std::uint8_t>(mask_.size(), 0));
}

bool RasterDomain::same_grid(const RasterDomain& other) const noexcept {
  return dim_ == other.dim_ && nx_ == other.nx_ && ny_ == other.ny_ && h_ == other.h_ && x0_ == other.x0_ &&
         y0_ == other.y0_;
}

bool RasterDomain::subset_of(const RasterDomain& other) const {
  if (!same_grid(other)) fail(ErrorKind::InvalidArgument, "rasters live on different grids");
  for (std::size_t idx = 0; idx < mask_.size(); ++idx)
    if (mask_[idx] && !other.mask_[idx]) return false;
  return true;
}

namespace {
template <typename Op>
RasterDomain combine(const RasterDomain& a, const RasterDomain& b, Op op) {
  if (!a.same_grid(b)) fail(ErrorKind::InvalidArgument, "rasters live on different grids");
  std::vector<std::uint8_t> out(a.size());
  for (std::size_t idx = 0; idx < out.size(); ++idx) out[idx] = op(a.test(idx), b.test(idx)) ? 1 : 0;
  return a.with_mask(std::move(out));
}
}  // namespace

RasterDomain RasterDomain::operator&(const RasterDomain& other) const {
  return combine(*this, other, [](bool x, bool y) { return x && y; });
}
RasterDomain RasterDomain::operator|(const RasterDomain& other) const {
  return combine(*this, other, [](bool x, bool y) { return x || y; });
}
RasterDomain RasterDomain::operator-(const RasterDomain& other) const {
  return combine(*this, other, [](bool x, bool y) { return x && !y; });
}

bool RasterDomain::operator==(const RasterDomain& other) const noexcept {
  return same_grid(other) && margin_ == other.margin_ && mask_ == other.mask_;
}

}  // namespace banach
