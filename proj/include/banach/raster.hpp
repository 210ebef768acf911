#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace banach {

// Axis-aligned region of interest. For d = 1 only [xmin, xmax] is used.
struct Box {
  double xmin = 0.0;
  double xmax = 0.0;
  double ymin = 0.0;
  double ymax = 0.0;
};

/// A compact set sampled on a uniform grid of square cells.
///
/// Cells are stored row-major (index = j * nx + i, j is the y-row). Cell
/// centers sit at (x0 + (i + 1/2) h, y0 + (j + 1/2) h). For d = 1 the grid has
/// a single row and y is ignored. Set cells never come closer than `margin`
/// cells to the grid border, so the unbounded complement component is always
/// the one touching the border.
class RasterDomain {
 public:
  RasterDomain() = default;
  RasterDomain(int dim, double x0, double y0, double h, int nx, int ny, std::vector<std::uint8_t> mask,
               int margin = 2);

  /// Grid covering `roi` plus `margin` empty cells on every side; a cell is set
  /// when `inside(x, y)` holds at its center.
  static RasterDomain rasterize(int dim, const Box& roi, double h,
                                const std::function<bool(double, double)>& inside, int margin = 2);

  int dim() const noexcept { return dim_; }
  double x0() const noexcept { return x0_; }
  double y0() const noexcept { return y0_; }
  double h() const noexcept { return h_; }
  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  int margin() const noexcept { return margin_; }
  std::size_t size() const noexcept { return mask_.size(); }

  std::size_t index(int i, int j) const noexcept { return static_cast<std::size_t>(j) * nx_ + i; }
  int col(std::size_t idx) const noexcept { return static_cast<int>(idx % nx_); }
  int row(std::size_t idx) const noexcept { return static_cast<int>(idx / nx_); }
  bool in_grid(int i, int j) const noexcept { return i >= 0 && j >= 0 && i < nx_ && j < ny_; }

  bool test(std::size_t idx) const noexcept { return mask_[idx] != 0; }
  bool test(int i, int j) const noexcept { return in_grid(i, j) && mask_[index(i, j)] != 0; }

  double center_x(std::size_t idx) const noexcept { return x0_ + (col(idx) + 0.5) * h_; }
  double center_y(std::size_t idx) const noexcept { return dim_ == 1 ? 0.0 : y0_ + (row(idx) + 0.5) * h_; }
  std::complex<double> center(std::size_t idx) const noexcept { return {center_x(idx), center_y(idx)}; }

  std::size_t count() const noexcept;
  bool empty() const noexcept { return count() == 0; }
  std::vector<std::size_t> cells() const;

  const std::vector<std::uint8_t>& bits() const noexcept { return mask_; }

  /// Same geometry, different mask (margin is re-validated).
  RasterDomain with_mask(std::vector<std::uint8_t> mask) const;
  RasterDomain empty_like() const;

  bool same_grid(const RasterDomain& other) const noexcept;
  bool subset_of(const RasterDomain& other) const;

  RasterDomain operator&(const RasterDomain& other) const;
  RasterDomain operator|(const RasterDomain& other) const;
  RasterDomain operator-(const RasterDomain& other) const;
  bool operator==(const RasterDomain& other) const noexcept;

 private:
  int dim_ = 2;
  double x0_ = 0.0;
  double y0_ = 0.0;
  double h_ = 1.0;
  int nx_ = 0;
  int ny_ = 0;
  int margin_ = 2;
  std::vector<std::uint8_t> mask_;

  void validate() const;
};

// Grid neighbours. For d = 1 only left/right are produced.
template <typename Fn>
void for_each_neighbor4(const RasterDomain& grid, std::size_t idx, Fn&& fn) {
  const int i = grid.col(idx), j = grid.row(idx);
  constexpr int di[4] = {1, 0, -1, 0};
  constexpr int dj[4] = {0, 1, 0, -1};
  for (int k = 0; k < 4; ++k) {
    if (grid.dim() == 1 && dj[k] != 0) continue;
    if (grid.in_grid(i + di[k], j + dj[k])) fn(grid.index(i + di[k], j + dj[k]));
  }
}

template <typename Fn>
void for_each_neighbor8(const RasterDomain& grid, std::size_t idx, Fn&& fn) {
  const int i = grid.col(idx), j = grid.row(idx);
  for (int dj = -1; dj <= 1; ++dj) {
    if (grid.dim() == 1 && dj != 0) continue;
    for (int di = -1; di <= 1; ++di) {
      if (di == 0 && dj == 0) continue;
      if (grid.in_grid(i + di, j + dj)) fn(grid.index(i + di, j + dj));
    }
  }
}

}  // namespace banach
