#pragma once

/// Initial densities for solver runs and test classes for the inequalities:
/// source-type solutions at a positive time, seeded Gaussian mixtures and
/// compactly supported bumps. All generators return unit grid mass.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "renyi/analytic_profiles.hpp"
#include "renyi/grid.hpp"

namespace renyi {

/// Deterministic uniform draws: mt19937_64 is fully specified by the
/// standard, and the 53-bit mantissa conversion below is done by hand, so a
/// seed reproduces bit-for-bit on any conforming toolchain.
class SeededUniform {
 public:
  explicit SeededUniform(std::uint64_t seed) : engine_(seed) {}
  double operator()(double lo, double hi) {
    const double unit = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * unit;
  }
  int integer(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::mt19937_64 engine_;
};

inline DensityField barenblatt_initial(const Grid& grid, double p, double t) {
  const BarenblattSpec spec = barenblatt_spec(p, grid.dimension(), BarenblattConvention::section2);
  return DensityField::sample(grid, [&](double x) { return barenblatt_self_similar(std::abs(x), t, spec); })
      .normalized();
}

inline DensityField gaussian_initial(const Grid& grid, double t) {
  const HeatKernelSpec spec{grid.dimension(), t};
  return DensityField::sample(grid, [&](double x) { return gaussian_density(std::abs(x), spec); }).normalized();
}

struct MixtureOptions {
  int min_components = 2;
  int max_components = 5;
  double max_center = 2.0;    ///< |mean| (cartesian) or shell radius (radial) upper bound
  double min_width = 0.3;
  double max_width = 1.0;
  double min_weight = 0.2;
  double max_weight = 1.0;
  double floor = 0.0;         ///< uniform background, relative to the peak
};

struct MixtureComponent {
  double weight;
  double center;
  double width;
};

inline std::vector<MixtureComponent> draw_components(std::uint64_t seed, const MixtureOptions& opts, bool radial) {
  SeededUniform draw(seed);
  const int count = draw.integer(opts.min_components, opts.max_components);
  std::vector<MixtureComponent> comps;
  for (int k = 0; k < count; ++k) {
    MixtureComponent c;
    c.weight = draw(opts.min_weight, opts.max_weight);
    c.center = radial ? draw(0.0, opts.max_center) : draw(-opts.max_center, opts.max_center);
    c.width = draw(opts.min_width, opts.max_width);
    comps.push_back(c);
  }
  return comps;
}

/// Sum of Gaussians. On radial grids each component is the even shell
/// exp(-(r-m)^2/2s^2) + exp(-(r+m)^2/2s^2), smooth at the origin.
inline DensityField gaussian_mixture(const Grid& grid, std::uint64_t seed, const MixtureOptions& opts = {}) {
  const auto comps = draw_components(seed, opts, grid.is_radial());
  auto bump = [](double z) { return std::exp(-0.5 * z * z); };
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.coordinate(i);
    double sum = 0.0;
    for (const auto& c : comps) {
      double b = bump((x - c.center) / c.width);
      if (grid.is_radial()) b += bump((x + c.center) / c.width);
      sum += c.weight * b / c.width;
    }
    values[i] = sum;
  }
  if (opts.floor > 0.0) {
    const double peak = *std::max_element(values.begin(), values.end());
    for (double& v : values) v += opts.floor * peak;
  }
  return DensityField(grid, std::move(values)).normalized();
}

/// Two Gaussian bumps.
inline DensityField two_bump_mixture(const Grid& grid, std::uint64_t seed, MixtureOptions opts = {}) {
  opts.min_components = opts.max_components = 2;
  return gaussian_mixture(grid, seed, opts);
}

/// Two compactly supported bumps (1 - ((x-m)/w)^2)_+^2. Cartesian centres are
/// shifted so that the centre of mass sits at the origin.
inline DensityField compact_two_bump(const Grid& grid, std::uint64_t seed, double max_center = 1.5) {
  SeededUniform draw(seed);
  MixtureComponent c[2];
  for (auto& comp : c) {
    comp.weight = draw(0.4, 1.0);
    comp.center = grid.is_radial() ? draw(0.0, max_center) : draw(-max_center, max_center);
    comp.width = draw(0.5, 1.2);
  }
  if (!grid.is_radial()) {
    // bump mass is proportional to weight * width
    const double m0 = c[0].weight * c[0].width, m1 = c[1].weight * c[1].width;
    const double shift = (m0 * c[0].center + m1 * c[1].center) / (m0 + m1);
    c[0].center -= shift;
    c[1].center -= shift;
  }
  auto bump = [](double z) {
    const double s = 1.0 - z * z;
    return s > 0.0 ? s * s : 0.0;
  };
  return DensityField::sample(grid,
                              [&](double x) {
                                double sum = 0.0;
                                for (const auto& comp : c) {
                                  double b = bump((x - comp.center) / comp.width);
                                  if (grid.is_radial()) b += bump((x + comp.center) / comp.width);
                                  sum += comp.weight * b;
                                }
                                return sum;
                              })
      .normalized();
}

}  // namespace renyi
