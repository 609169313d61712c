#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <queue>
#include <utility>
#include <vector>

#include "frameext/domain.hpp"
#include "frameext/grid.hpp"

namespace frameext {

/// L-infinity distance layers of a mask: sizes |S_1|, |S_2|, ..., the per-cell
/// distance map, and the 8-connected component / hole counts of P_Omega.
struct LayerDecomposition {
  std::vector<int> distance;              ///< per grid cell; 0 outside, >= 1 inside
  std::vector<std::size_t> layer_sizes;   ///< layer_sizes[i-1] = |S_i|
  int component_count = 0;                ///< c, 8-connected
  int hole_count = 0;                     ///< h, 4-connected complement components

  /// N_deltaOmega = |S_1|
  std::size_t boundary_count() const {
    return layer_sizes.empty() ? 0 : layer_sizes.front();
  }
};

namespace detail {

inline void require_2d(const GridSpec& spec, const char* who) {
  if (spec.dim != 2) throw std::invalid_argument(std::string(who) + ": requires dim == 2");
}

}  // namespace detail

/// Chessboard distance transform to the complement of P_Omega. Cells outside
/// the grid box count as exterior. Two chamfer passes with the eight-neighbour
/// mask are exact for the L-infinity metric.
inline std::vector<int> distance_map(const DomainMask& mask) {
  detail::require_2d(mask.spec, "distance_map");
  const int n = mask.spec.n_r;
  const int big = std::numeric_limits<int>::max() / 4;
  std::vector<int> d(mask.inside.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = mask.inside[i] ? big : 0;

  auto at = [&](int i, int j) -> int {
    if (i < 0 || j < 0 || i >= n || j >= n) return 0;  // outside the grid box
    return d[static_cast<std::size_t>(i) * n + j];
  };

  // forward: W, NW, N, NE
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      auto& v = d[static_cast<std::size_t>(i) * n + j];
      if (v == 0) continue;
      int m = std::min(std::min(at(i, j - 1), at(i - 1, j - 1)),
                       std::min(at(i - 1, j), at(i - 1, j + 1)));
      v = std::min(v, m + 1);
    }
  // backward: E, SE, S, SW
  for (int i = n - 1; i >= 0; --i)
    for (int j = n - 1; j >= 0; --j) {
      auto& v = d[static_cast<std::size_t>(i) * n + j];
      if (v == 0) continue;
      int m = std::min(std::min(at(i, j + 1), at(i + 1, j + 1)),
                       std::min(at(i + 1, j), at(i + 1, j - 1)));
      v = std::min(v, m + 1);
    }
  return d;
}

/// c = number of 8-connected components of P_Omega; h = number of 4-connected
/// components of the complement that do not touch the grid border.
inline std::pair<int, int> components_and_holes(const DomainMask& mask) {
  detail::require_2d(mask.spec, "components_and_holes");
  const int n = mask.spec.n_r;
  std::vector<std::uint8_t> seen(mask.inside.size(), 0);
  auto idx = [n](int i, int j) { return static_cast<std::size_t>(i) * n + j; };

  int components = 0;
  for (int si = 0; si < n; ++si)
    for (int sj = 0; sj < n; ++sj) {
      if (!mask.inside[idx(si, sj)] || seen[idx(si, sj)]) continue;
      ++components;
      std::queue<std::pair<int, int>> q;
      q.push({si, sj});
      seen[idx(si, sj)] = 1;
      while (!q.empty()) {
        auto [i, j] = q.front();
        q.pop();
        for (int di = -1; di <= 1; ++di)
          for (int dj = -1; dj <= 1; ++dj) {
            if (di == 0 && dj == 0) continue;
            const int ii = i + di, jj = j + dj;
            if (ii < 0 || jj < 0 || ii >= n || jj >= n) continue;
            if (!mask.inside[idx(ii, jj)] || seen[idx(ii, jj)]) continue;
            seen[idx(ii, jj)] = 1;
            q.push({ii, jj});
          }
      }
    }

  // Complement components, 4-connected; those reaching the border are not holes.
  std::fill(seen.begin(), seen.end(), 0);
  int holes = 0;
  for (int si = 0; si < n; ++si)
    for (int sj = 0; sj < n; ++sj) {
      if (mask.inside[idx(si, sj)] || seen[idx(si, sj)]) continue;
      bool touches_border = false;
      std::queue<std::pair<int, int>> q;
      q.push({si, sj});
      seen[idx(si, sj)] = 1;
      while (!q.empty()) {
        auto [i, j] = q.front();
        q.pop();
        if (i == 0 || j == 0 || i == n - 1 || j == n - 1) touches_border = true;
        constexpr int di[4] = {-1, 1, 0, 0};
        constexpr int dj[4] = {0, 0, -1, 1};
        for (int t = 0; t < 4; ++t) {
          const int ii = i + di[t], jj = j + dj[t];
          if (ii < 0 || jj < 0 || ii >= n || jj >= n) continue;
          if (mask.inside[idx(ii, jj)] || seen[idx(ii, jj)]) continue;
          seen[idx(ii, jj)] = 1;
          q.push({ii, jj});
        }
      }
      if (!touches_border) ++holes;
    }
  return {components, holes};
}

/// Distance map, layer sizes enumerated until empty, and (c, h).
inline LayerDecomposition distance_layers(const DomainMask& mask) {
  LayerDecomposition out;
  out.distance = distance_map(mask);
  int max_d = 0;
  for (int v : out.distance) max_d = std::max(max_d, v);
  out.layer_sizes.assign(static_cast<std::size_t>(max_d), 0);
  for (int v : out.distance)
    if (v > 0) ++out.layer_sizes[static_cast<std::size_t>(v - 1)];
  auto [c, h] = components_and_holes(mask);
  out.component_count = c;
  out.hole_count = h;
  return out;
}

/// 8-connected component labels of P_Omega, 0-based; -1 outside.
inline std::pair<std::vector<int>, int> label_components(const DomainMask& mask) {
  detail::require_2d(mask.spec, "label_components");
  const int n = mask.spec.n_r;
  std::vector<int> labels(mask.inside.size(), -1);
  auto idx = [n](int i, int j) { return static_cast<std::size_t>(i) * n + j; };
  int next = 0;
  for (int si = 0; si < n; ++si)
    for (int sj = 0; sj < n; ++sj) {
      if (!mask.inside[idx(si, sj)] || labels[idx(si, sj)] >= 0) continue;
      const int label = next++;
      std::queue<std::pair<int, int>> q;
      q.push({si, sj});
      labels[idx(si, sj)] = label;
      while (!q.empty()) {
        auto [i, j] = q.front();
        q.pop();
        for (int di = -1; di <= 1; ++di)
          for (int dj = -1; dj <= 1; ++dj) {
            const int ii = i + di, jj = j + dj;
            if ((di == 0 && dj == 0) || ii < 0 || jj < 0 || ii >= n || jj >= n) continue;
            if (!mask.inside[idx(ii, jj)] || labels[idx(ii, jj)] >= 0) continue;
            labels[idx(ii, jj)] = label;
            q.push({ii, jj});
          }
      }
    }
  return {std::move(labels), next};
}

/// Check the layer shrink bound |S_{i+1}| <= |S_i| - 4(c - h). The counting
/// argument behind it applies to each 8-connected component while that
/// component still has nonempty layers, so the check runs componentwise with
/// each hole credited to the component surrounding it; exhausted components
/// stop contributing. For a connected mask this is exactly the global bound.
struct LayerBoundReport {
  std::vector<std::size_t> layer_sizes;  ///< global |S_i|
  int component_count = 0;
  int hole_count = 0;
  bool holds = true;
  int first_violation = 0;            ///< layer index i of the first violated pair
  int first_violation_component = -1;
};

inline LayerBoundReport verify_layer_bound(const DomainMask& mask) {
  const std::vector<int> dist = distance_map(mask);
  const auto [labels, n_components] = label_components(mask);
  const int n = mask.spec.n_r;

  LayerBoundReport report;
  int max_d = 0;
  for (int v : dist) max_d = std::max(max_d, v);
  report.layer_sizes.assign(static_cast<std::size_t>(max_d), 0);
  for (int v : dist)
    if (v > 0) ++report.layer_sizes[static_cast<std::size_t>(v - 1)];
  report.component_count = n_components;

  // holes per component: 4-connected complement components away from the
  // border, credited to an adjacent foreground component
  std::vector<int> holes_of(static_cast<std::size_t>(n_components), 0);
  {
    std::vector<std::uint8_t> seen(mask.inside.size(), 0);
    auto idx = [n](int i, int j) { return static_cast<std::size_t>(i) * n + j; };
    for (int si = 0; si < n; ++si)
      for (int sj = 0; sj < n; ++sj) {
        if (mask.inside[idx(si, sj)] || seen[idx(si, sj)]) continue;
        bool touches_border = false;
        int neighbour_label = -1;
        std::queue<std::pair<int, int>> q;
        q.push({si, sj});
        seen[idx(si, sj)] = 1;
        while (!q.empty()) {
          auto [i, j] = q.front();
          q.pop();
          if (i == 0 || j == 0 || i == n - 1 || j == n - 1) touches_border = true;
          for (int di = -1; di <= 1; ++di)
            for (int dj = -1; dj <= 1; ++dj) {
              const int ii = i + di, jj = j + dj;
              if ((di == 0 && dj == 0) || ii < 0 || jj < 0 || ii >= n || jj >= n) continue;
              if (mask.inside[idx(ii, jj)]) {
                neighbour_label = labels[idx(ii, jj)];
                continue;
              }
              if (std::abs(di) + std::abs(dj) != 1) continue;  // complement is 4-connected
              if (seen[idx(ii, jj)]) continue;
              seen[idx(ii, jj)] = 1;
              q.push({ii, jj});
            }
        }
        if (!touches_border && neighbour_label >= 0) {
          ++holes_of[static_cast<std::size_t>(neighbour_label)];
          ++report.hole_count;
        }
      }
  }

  // per-component layer sizes from the global distance map (distances within
  // a component never depend on the other components)
  std::vector<std::vector<std::size_t>> comp_layers(
      static_cast<std::size_t>(n_components));
  for (std::size_t cell = 0; cell < dist.size(); ++cell) {
    if (dist[cell] <= 0) continue;
    auto& sizes = comp_layers[static_cast<std::size_t>(labels[cell])];
    if (sizes.size() < static_cast<std::size_t>(dist[cell]))
      sizes.resize(static_cast<std::size_t>(dist[cell]), 0);
    ++sizes[static_cast<std::size_t>(dist[cell] - 1)];
  }
  for (int comp = 0; comp < n_components && report.holds; ++comp) {
    const auto& sizes = comp_layers[static_cast<std::size_t>(comp)];
    const long shrink = 4L * (1 - holes_of[static_cast<std::size_t>(comp)]);
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
      if (static_cast<long>(sizes[i + 1]) > static_cast<long>(sizes[i]) - shrink) {
        report.holds = false;
        report.first_violation = static_cast<int>(i + 1);
        report.first_violation_component = comp;
        break;
      }
    }
  }
  return report;
}

/// Least-squares slope of log N_deltaOmega(n) versus log n over the given grid
/// resolutions; the box-counting estimate of the boundary dimension.
inline double boundary_dimension_estimate(const DomainSpec& domain,
                                          const std::vector<int>& resolutions,
                                          double half_width = 2.0) {
  if (resolutions.size() < 3)
    throw std::invalid_argument("boundary_dimension_estimate: need at least 3 resolutions");
  std::vector<double> lx, ly;
  for (int n : resolutions) {
    const GridSpec spec(n, 1, half_width, 2);
    const DomainMask mask = rasterize(domain, spec);
    const LayerDecomposition layers = distance_layers(mask);
    if (layers.boundary_count() == 0)
      throw std::invalid_argument("boundary_dimension_estimate: empty boundary layer");
    lx.push_back(std::log(static_cast<double>(n)));
    ly.push_back(std::log(static_cast<double>(layers.boundary_count())));
  }
  const std::size_t m = lx.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

/// CSV rows (i, |S_i|).
inline void write_layer_csv(std::ostream& out, const LayerDecomposition& layers) {
  out << "i,layer_size\n";
  for (std::size_t i = 0; i < layers.layer_sizes.size(); ++i)
    out << (i + 1) << ',' << layers.layer_sizes[i] << '\n';
}

}  // namespace frameext
