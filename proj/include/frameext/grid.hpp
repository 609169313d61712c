#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "frameext/errors.hpp"

namespace frameext {

/// Multi-dimensional integer index; size equals the grid dimension.
using MultiIndex = std::vector<int>;

/// Discretization parameters shared by all operators: an axis-aligned box
/// [-T, T]^D carrying n_r equispaced samples per dimension and a centered
/// window of n_lambda integer frequencies per dimension.
struct GridSpec {
  int n_r = 0;              ///< samples per dimension
  int n_lambda = 0;         ///< frequencies per dimension
  double half_width = 2.0;  ///< T; the box is [-T, T]^dim
  int dim = 2;

  GridSpec(int n_r_, int n_lambda_, double half_width_ = 2.0, int dim_ = 2)
      : n_r(n_r_), n_lambda(n_lambda_), half_width(half_width_), dim(dim_) {
    if (dim < 1) throw std::invalid_argument("GridSpec: dim must be >= 1");
    if (n_r < 1) throw std::invalid_argument("GridSpec: n_r must be >= 1");
    if (n_lambda < 1) throw std::invalid_argument("GridSpec: n_lambda must be >= 1");
    if (n_lambda > n_r)
      throw std::invalid_argument("GridSpec: n_lambda must not exceed n_r");
    if (!(half_width > 0.0))
      throw std::invalid_argument("GridSpec: half_width must be positive");
  }

  /// N_R = n_r^dim
  std::size_t grid_point_count() const {
    std::size_t n = 1;
    for (int d = 0; d < dim; ++d) n *= static_cast<std::size_t>(n_r);
    return n;
  }

  /// N_Lambda = n_lambda^dim
  std::size_t freq_count() const {
    std::size_t n = 1;
    for (int d = 0; d < dim; ++d) n *= static_cast<std::size_t>(n_lambda);
    return n;
  }

  double cell_size() const { return 2.0 * half_width / n_r; }
};

/// The ordered list of D-dimensional integer frequencies l in P_Lambda.
struct FreqWindow {
  std::vector<MultiIndex> indices;  ///< lexicographically sorted, size N_Lambda

  std::size_t size() const { return indices.size(); }
};

/// Centered 1D window: odd n gives {-(n-1)/2, ..., (n-1)/2}, even n gives
/// {-n/2, ..., n/2 - 1}.
inline std::pair<int, int> freq_range_1d(int n_lambda) {
  if (n_lambda < 1) throw std::invalid_argument("freq_range_1d: n_lambda must be >= 1");
  if (n_lambda % 2 == 1) return {-(n_lambda - 1) / 2, (n_lambda - 1) / 2};
  return {-n_lambda / 2, n_lambda / 2 - 1};
}

/// Row-major flat index of a spatial multi-index; the first component varies
/// slowest. Throws std::out_of_range for indices outside [0, n_r)^dim.
inline std::size_t flat_index(const MultiIndex& k, const GridSpec& spec) {
  if (static_cast<int>(k.size()) != spec.dim)
    throw std::out_of_range("flat_index: index dimension mismatch");
  std::size_t flat = 0;
  for (int d = 0; d < spec.dim; ++d) {
    if (k[d] < 0 || k[d] >= spec.n_r)
      throw std::out_of_range("flat_index: component " + std::to_string(d) +
                              " out of range");
    flat = flat * static_cast<std::size_t>(spec.n_r) + static_cast<std::size_t>(k[d]);
  }
  return flat;
}

/// Inverse of flat_index.
inline MultiIndex unflatten(std::size_t flat, const GridSpec& spec) {
  if (flat >= spec.grid_point_count())
    throw std::out_of_range("unflatten: flat index out of range");
  MultiIndex k(static_cast<std::size_t>(spec.dim));
  for (int d = spec.dim - 1; d >= 0; --d) {
    k[static_cast<std::size_t>(d)] = static_cast<int>(flat % spec.n_r);
    flat /= static_cast<std::size_t>(spec.n_r);
  }
  return k;
}

/// Physical coordinate of grid point k: per dimension -T + 2T * k_d / n_r.
inline std::vector<double> physical_coordinate(const MultiIndex& k, const GridSpec& spec) {
  std::vector<double> x(k.size());
  for (std::size_t d = 0; d < k.size(); ++d)
    x[d] = -spec.half_width + (2.0 * spec.half_width * k[d]) / spec.n_r;
  return x;
}

/// Unit-box coordinate of grid point k: per dimension k_d / n_r.
inline std::vector<double> unit_coordinate(const MultiIndex& k, const GridSpec& spec) {
  std::vector<double> u(k.size());
  for (std::size_t d = 0; d < k.size(); ++d)
    u[d] = static_cast<double>(k[d]) / spec.n_r;
  return u;
}

/// Map a physical point to unit-box coordinates u = (x + T) / (2T).
inline std::vector<double> to_unit_box(const std::vector<double>& x, const GridSpec& spec) {
  std::vector<double> u(x.size());
  for (std::size_t d = 0; d < x.size(); ++d)
    u[d] = (x[d] + spec.half_width) / (2.0 * spec.half_width);
  return u;
}

struct GridPoint {
  MultiIndex index;
  std::vector<double> coordinate;
};

/// All N_R grid points in row-major lexicographic order.
inline std::vector<GridPoint> build_spatial_grid(const GridSpec& spec) {
  const std::size_t total = spec.grid_point_count();
  std::vector<GridPoint> points;
  points.reserve(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    MultiIndex k = unflatten(flat, spec);
    std::vector<double> x = physical_coordinate(k, spec);
    points.push_back({std::move(k), std::move(x)});
  }
  return points;
}

/// The centered frequency window as a lexicographically sorted tensor product
/// of identical 1D ranges.
inline FreqWindow build_freq_window(const GridSpec& spec) {
  const auto [lo, hi] = freq_range_1d(spec.n_lambda);
  FreqWindow window;
  window.indices.reserve(spec.freq_count());
  MultiIndex l(static_cast<std::size_t>(spec.dim), lo);
  while (true) {
    window.indices.push_back(l);
    int d = spec.dim - 1;
    while (d >= 0) {
      if (++l[static_cast<std::size_t>(d)] <= hi) break;
      l[static_cast<std::size_t>(d)] = lo;
      --d;
    }
    if (d < 0) break;
  }
  return window;
}

/// Flat grid position of a frequency index, wrapping each component modulo
/// n_r so negative frequencies land in the upper half of the FFT grid.
inline std::size_t freq_grid_position(const MultiIndex& l, const GridSpec& spec) {
  std::size_t flat = 0;
  for (int d = 0; d < spec.dim; ++d) {
    int m = l[static_cast<std::size_t>(d)] % spec.n_r;
    if (m < 0) m += spec.n_r;
    flat = flat * static_cast<std::size_t>(spec.n_r) + static_cast<std::size_t>(m);
  }
  return flat;
}

}  // namespace frameext
