#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "frameext/errors.hpp"
#include "frameext/grid.hpp"

namespace frameext {

namespace shapes {

// All builtin shapes are normalized to area 4.
inline constexpr double square_half_side = 1.0;
inline const double diamond_half_diagonal = std::sqrt(2.0);
inline const double disk_radius = 2.0 / std::sqrt(std::numbers::pi);
inline const double ring_outer_radius = std::sqrt(4.0 / std::numbers::pi + 0.25);
inline constexpr double ring_inner_radius = 0.5;
inline constexpr double star_scale = 1.449;

/// Eight-spiked "double asteroid": two four-cusped curves |x'|^(1/2) + |y'|^(1/2)
/// = scale, rotated against each other by 45 degrees and joined sector-wise.
/// Even 45-degree sectors use a -22.5 degree frame, odd sectors +22.5 degrees.
inline bool star_contains(double x, double y, double scale) {
  const double r = std::hypot(x, y);
  if (r == 0.0) return true;
  double theta = std::atan2(y, x);
  if (theta < 0.0) theta += 2.0 * std::numbers::pi;
  const double sector_width = std::numbers::pi / 4.0;
  const int sector = std::min(7, static_cast<int>(theta / sector_width));
  const double offset = (sector % 2 == 0) ? -sector_width / 2.0 : sector_width / 2.0;
  const double t = theta + offset;
  const double c = std::abs(std::cos(t));
  const double s = std::abs(std::sin(t));
  const double denom = c + s + 2.0 * std::sqrt(std::abs(std::sin(2.0 * t)) / 2.0);
  return r * denom <= scale * scale;
}

}  // namespace shapes

/// Spatial domain Omega: a builtin test shape, an arbitrary predicate, or a
/// raster mask file. Builtin predicates treat boundary points as inside.
class DomainSpec {
 public:
  using Predicate = std::function<bool(double, double)>;

  static DomainSpec square(double half_side = shapes::square_half_side) {
    return DomainSpec("square", [half_side](double x, double y) {
      return std::abs(x) <= half_side && std::abs(y) <= half_side;
    });
  }

  static DomainSpec diamond(double half_diagonal = shapes::diamond_half_diagonal) {
    return DomainSpec("diamond", [half_diagonal](double x, double y) {
      return std::abs(x) + std::abs(y) <= half_diagonal;
    });
  }

  static DomainSpec disk(double radius = shapes::disk_radius) {
    return DomainSpec("disk", [r2 = radius * radius](double x, double y) {
      return x * x + y * y <= r2;
    });
  }

  static DomainSpec ring(double outer = shapes::ring_outer_radius,
                         double inner = shapes::ring_inner_radius) {
    return DomainSpec("ring", [o2 = outer * outer, i2 = inner * inner](double x, double y) {
      const double r2 = x * x + y * y;
      return r2 >= i2 && r2 <= o2;
    });
  }

  static DomainSpec star(double scale = shapes::star_scale) {
    return DomainSpec("star", [scale](double x, double y) {
      return shapes::star_contains(x, y, scale);
    });
  }

  /// The whole grid box; valid in any dimension.
  static DomainSpec all() { return DomainSpec("box", Predicate{}, /*is_all=*/true); }

  static DomainSpec from_predicate(Predicate p, std::string name = "custom") {
    return DomainSpec(std::move(name), std::move(p));
  }

  static DomainSpec from_mask_file(std::string path) {
    DomainSpec d("mask", Predicate{});
    d.mask_path_ = std::move(path);
    return d;
  }

  /// Builtin shape by name at its area-4 default parameters.
  static DomainSpec builtin(const std::string& name) {
    if (name == "square") return square();
    if (name == "diamond") return diamond();
    if (name == "disk") return disk();
    if (name == "ring") return ring();
    if (name == "star") return star();
    if (name == "box") return all();
    throw std::invalid_argument("unknown builtin domain: " + name);
  }

  static const std::vector<std::string>& builtin_names() {
    static const std::vector<std::string> names = {"square", "diamond", "disk", "ring",
                                                   "star"};
    return names;
  }

  bool is_mask_file() const { return !mask_path_.empty(); }
  bool is_all() const { return is_all_; }
  const std::string& mask_path() const { return mask_path_; }
  const std::string& name() const { return name_; }

  bool contains(double x, double y) const {
    if (is_all_) return true;
    if (!predicate_)
      throw std::logic_error("DomainSpec: no predicate available (mask-file domain)");
    return predicate_(x, y);
  }

  bool has_predicate() const { return is_all_ || static_cast<bool>(predicate_); }

 private:
  DomainSpec(std::string name, Predicate p, bool is_all = false)
      : name_(std::move(name)), predicate_(std::move(p)), is_all_(is_all) {}

  std::string name_;
  Predicate predicate_;
  bool is_all_ = false;
  std::string mask_path_;
};

/// Rasterized characteristic set P_Omega = P_R intersected with Omega, plus the
/// ascending list of flat sample indices I_Omega.
struct DomainMask {
  GridSpec spec;
  std::vector<std::uint8_t> inside;  ///< length N_R
  std::vector<std::size_t> samples;  ///< flat indices with inside != 0, ascending

  std::size_t sample_count() const { return samples.size(); }  ///< N_Omega
};

namespace detail {

inline void warn_if_undersampled(const DomainMask& mask) {
  if (mask.samples.size() < mask.spec.freq_count())
    std::cerr << "frameext: warning: N_omega = " << mask.samples.size()
              << " < N_lambda = " << mask.spec.freq_count()
              << "; least squares is not oversampled\n";
}

inline DomainMask finalize_mask(GridSpec spec, std::vector<std::uint8_t> inside) {
  DomainMask mask{std::move(spec), std::move(inside), {}};
  for (std::size_t i = 0; i < mask.inside.size(); ++i)
    if (mask.inside[i]) mask.samples.push_back(i);
  if (mask.samples.empty()) throw MaskError("rasterize: empty mask, no grid point in domain");
  warn_if_undersampled(mask);
  return mask;
}

}  // namespace detail

DomainMask load_mask(const std::string& path, const GridSpec& spec);

/// Evaluate the domain predicate on every grid point. Throws MaskError when no
/// point lands inside.
inline DomainMask rasterize(const DomainSpec& domain, const GridSpec& spec) {
  if (domain.is_mask_file()) return load_mask(domain.mask_path(), spec);
  const std::size_t total = spec.grid_point_count();
  std::vector<std::uint8_t> inside(total, 0);
  if (domain.is_all()) {
    std::fill(inside.begin(), inside.end(), std::uint8_t{1});
  } else {
    if (spec.dim != 2)
      throw std::invalid_argument("rasterize: predicate domains require dim == 2");
    for (int k1 = 0; k1 < spec.n_r; ++k1) {
      const double x = -spec.half_width + (2.0 * spec.half_width * k1) / spec.n_r;
      for (int k2 = 0; k2 < spec.n_r; ++k2) {
        const double y = -spec.half_width + (2.0 * spec.half_width * k2) / spec.n_r;
        inside[static_cast<std::size_t>(k1) * spec.n_r + k2] =
            domain.contains(x, y) ? 1 : 0;
      }
    }
  }
  return detail::finalize_mask(spec, std::move(inside));
}

/// Plain-text mask format: header "MASK n_r n_r" followed by n_r rows of n_r
/// characters in {0,1}, row-major in grid order. 2D only.
inline void save_mask(const DomainMask& mask, const std::string& path) {
  if (mask.spec.dim != 2) throw MaskError("save_mask: only 2D masks are supported");
  std::ofstream out(path);
  if (!out) throw MaskError("save_mask: cannot open " + path);
  const int n = mask.spec.n_r;
  out << "MASK " << n << ' ' << n << '\n';
  for (int k1 = 0; k1 < n; ++k1) {
    for (int k2 = 0; k2 < n; ++k2)
      out << (mask.inside[static_cast<std::size_t>(k1) * n + k2] ? '1' : '0');
    out << '\n';
  }
  if (!out) throw MaskError("save_mask: write failed for " + path);
}

inline DomainMask load_mask(const std::string& path, const GridSpec& spec) {
  if (spec.dim != 2) throw MaskError("load_mask: only 2D masks are supported");
  std::ifstream in(path);
  if (!in) throw MaskError("load_mask: cannot open " + path);
  std::string magic;
  int rows = 0, cols = 0;
  if (!(in >> magic >> rows >> cols) || magic != "MASK")
    throw MaskError("load_mask: malformed header in " + path);
  if (rows != spec.n_r || cols != spec.n_r)
    throw MaskError("load_mask: dimension mismatch, file is " + std::to_string(rows) +
                    "x" + std::to_string(cols) + " but grid expects " +
                    std::to_string(spec.n_r) + "x" + std::to_string(spec.n_r));
  std::vector<std::uint8_t> inside(spec.grid_point_count(), 0);
  std::string line;
  std::getline(in, line);  // consume end of header line
  for (int k1 = 0; k1 < rows; ++k1) {
    if (!std::getline(in, line) || static_cast<int>(line.size()) < cols)
      throw MaskError("load_mask: truncated row " + std::to_string(k1) + " in " + path);
    for (int k2 = 0; k2 < cols; ++k2) {
      const char c = line[static_cast<std::size_t>(k2)];
      if (c != '0' && c != '1')
        throw MaskError("load_mask: invalid character in row " + std::to_string(k1));
      inside[static_cast<std::size_t>(k1) * cols + k2] = (c == '1') ? 1 : 0;
    }
  }
  return detail::finalize_mask(spec, std::move(inside));
}

/// Physical coordinates of every sample point, in I_Omega order.
inline std::vector<std::vector<double>> sample_coordinates(const DomainMask& mask) {
  std::vector<std::vector<double>> coords;
  coords.reserve(mask.samples.size());
  for (std::size_t flat : mask.samples)
    coords.push_back(physical_coordinate(unflatten(flat, mask.spec), mask.spec));
  return coords;
}

}  // namespace frameext
