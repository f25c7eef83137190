#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "renyi/errors.hpp"
#include "renyi/special.hpp"

namespace renyi {

enum class Geometry { cartesian1d, radial };

inline const char* to_string(Geometry g) { return g == Geometry::cartesian1d ? "cartesian1d" : "radial"; }

/// Uniform cell-centred discretisation of R (cartesian1d) or of the radial
/// half-line of a radially symmetric function on R^n. Radial nodes sit at
/// r_i = (i + 1/2) h and carry the volume weight |S^{n-1}| r_i^{n-1} h.
class Grid {
 public:
  /// Nodes x_i = origin + i h.
  static Grid cartesian(std::size_t nodes, double spacing, double origin) {
    return Grid(Geometry::cartesian1d, 1, nodes, spacing, origin);
  }

  /// Cell centres of [-half_width, half_width].
  static Grid cartesian_symmetric(std::size_t nodes, double half_width) {
    detail::require(nodes > 0 && half_width > 0.0, "functionals: grid needs nodes > 0 and a positive half width");
    const double h = 2.0 * half_width / static_cast<double>(nodes);
    return cartesian(nodes, h, -half_width + 0.5 * h);
  }

  static Grid radial_spacing(int n, std::size_t nodes, double spacing) {
    return Grid(Geometry::radial, n, nodes, spacing, 0.0);
  }

  /// Cell centres of [0, radius].
  static Grid radial(int n, std::size_t nodes, double radius) {
    detail::require(nodes > 0 && radius > 0.0, "functionals: grid needs nodes > 0 and a positive radius");
    return radial_spacing(n, nodes, radius / static_cast<double>(nodes));
  }

  Geometry geometry() const { return geometry_; }
  bool is_radial() const { return geometry_ == Geometry::radial; }
  int dimension() const { return n_; }
  std::size_t size() const { return nodes_; }
  double spacing() const { return spacing_; }
  double origin_offset() const { return origin_; }

  /// x_i for cartesian grids, r_i for radial grids.
  double coordinate(std::size_t i) const {
    return is_radial() ? (static_cast<double>(i) + 0.5) * spacing_ : origin_ + static_cast<double>(i) * spacing_;
  }
  double radius(std::size_t i) const { return std::abs(coordinate(i)); }

  double weight(std::size_t i) const { return weights_[i]; }
  std::span<const double> weights() const { return weights_; }

  /// Largest |x| covered by the cells.
  double extent() const {
    if (is_radial()) return static_cast<double>(nodes_) * spacing_;
    return std::max(std::abs(origin_ - 0.5 * spacing_), std::abs(coordinate(nodes_ - 1) + 0.5 * spacing_));
  }

  /// Grid with spacing a h (and origin a x_0), as used by R_a.
  Grid dilated(double a) const {
    detail::require(a > 0.0 && std::isfinite(a), "functionals: dilation factor must be > 0");
    return Grid(geometry_, n_, nodes_, a * spacing_, a * origin_);
  }

  bool operator==(const Grid& other) const {
    return geometry_ == other.geometry_ && n_ == other.n_ && nodes_ == other.nodes_ &&
           spacing_ == other.spacing_ && origin_ == other.origin_;
  }

 private:
  Grid(Geometry geometry, int n, std::size_t nodes, double spacing, double origin)
      : geometry_(geometry), n_(n), nodes_(nodes), spacing_(spacing), origin_(origin) {
    detail::require(nodes >= 4, "functionals: grid needs at least 4 nodes");
    detail::require(spacing > 0.0 && std::isfinite(spacing), "functionals: grid spacing must be positive");
    detail::require(n >= 1, "functionals: grid dimension must be >= 1");
    detail::require(geometry == Geometry::radial || n == 1, "functionals: cartesian grids are one-dimensional");
    weights_.resize(nodes);
    if (is_radial()) {
      const double sphere = unit_sphere_area(n);
      for (std::size_t i = 0; i < nodes; ++i) weights_[i] = sphere * std::pow(coordinate(i), n - 1) * spacing;
    } else {
      std::fill(weights_.begin(), weights_.end(), spacing);
    }
  }

  Geometry geometry_;
  int n_;
  std::size_t nodes_;
  double spacing_;
  double origin_;
  std::vector<double> weights_;
};

/// Nonnegative samples of a density on a grid.
class DensityField {
 public:
  DensityField(Grid grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
    detail::require(values_.size() == grid_.size(), "functionals: field size does not match its grid");
    double total = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      const double v = values_[i];
      detail::require(std::isfinite(v) && v >= 0.0, "functionals: density values must be finite and nonnegative");
      total += grid_.weight(i) * v;
    }
    detail::require(total > 0.0 && std::isfinite(total), "functionals: density mass must be finite and positive");
  }

  /// Samples `density(r_or_x)` at every node.
  template <class F>
  static DensityField sample(const Grid& grid, F&& density) {
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) values[i] = density(grid.coordinate(i));
    return DensityField(grid, std::move(values));
  }

  const Grid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }
  double max_value() const { return *std::max_element(values_.begin(), values_.end()); }

  /// Copy scaled so that the discrete mass is one.
  DensityField normalized() const {
    double total = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) total += grid_.weight(i) * values_[i];
    std::vector<double> v(values_);
    for (double& x : v) x /= total;
    return DensityField(grid_, std::move(v));
  }

 private:
  Grid grid_;
  std::vector<double> values_;
};

}  // namespace renyi
