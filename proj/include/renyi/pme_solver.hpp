#pragma once

/// Explicit conservative finite-volume solver for du/dt = Lap u^p on a
/// cartesian line or in radial symmetry, with zero-flux outer boundary.
///
/// Cell i exchanges the face flux A_{i+1/2} (v_{i+1} - v_i) / h, v = u^p, with
/// its neighbour; A is r^{n-1} on radial grids and 1 on cartesian ones. The
/// update divides by the cell volume r_i^{n-1} h, so the grid mass
/// sum_i w_i u_i telescopes exactly. The face at the radial origin carries no
/// flux (symmetry).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "renyi/analytic_profiles.hpp"
#include "renyi/errors.hpp"
#include "renyi/functionals.hpp"
#include "renyi/grid.hpp"

namespace renyi {

struct DiffusionParams {
  double p = 2.0;
  int n = 1;
  double cfl_safety = 0.9;
  double t_start = 1.0;
  double t_end = 2.0;
  std::vector<double> snapshot_times;  ///< ascending, within [t_start, t_end]
  bool compute_dissipation = false;     ///< include D_p in every snapshot
  int max_rejections = 40;
  double leak_warning_threshold = 1e-6;
  double fixed_dt = 0.0;  ///< > 0 replaces the CFL bound (stability diagnostics only)
};

/// n + 1 equally spaced times covering [t_start, t_end].
inline std::vector<double> uniform_times(double t_start, double t_end, std::size_t intervals) {
  std::vector<double> times(intervals + 1);
  for (std::size_t k = 0; k <= intervals; ++k)
    times[k] = t_start + (t_end - t_start) * static_cast<double>(k) / static_cast<double>(intervals);
  times.back() = t_end;
  return times;
}

/// Logarithmically spaced times covering [t_start, t_end].
inline std::vector<double> geometric_times(double t_start, double t_end, std::size_t intervals) {
  std::vector<double> times(intervals + 1);
  const double ratio = std::log(t_end / t_start);
  for (std::size_t k = 0; k <= intervals; ++k)
    times[k] = t_start * std::exp(ratio * static_cast<double>(k) / static_cast<double>(intervals));
  times.front() = t_start;
  times.back() = t_end;
  return times;
}

inline void validate(const DiffusionParams& params) {
  detail::require(params.n >= 1, "pme_solver: dimension n must be >= 1");
  detail::require(std::isfinite(params.p) && params.p > 0.0, "pme_solver: p must be positive");
  if (!(2.0 + params.n * (params.p - 1.0) > 1e-12))
    throw DomainError("pme_solver: p must exceed 1 - 2/n");
  detail::require(params.cfl_safety > 0.0 && params.cfl_safety < 1.0, "pme_solver: cfl_safety must lie in (0, 1)");
  detail::require(params.t_start >= 0.0 && params.t_end > params.t_start,
                  "pme_solver: need t_end > t_start >= 0");
  double previous = params.t_start;
  for (double t : params.snapshot_times) {
    detail::require(t >= previous && t <= params.t_end,
                    "pme_solver: snapshot times must be ascending within [t_start, t_end]");
    previous = t;
  }
  detail::require(params.max_rejections >= 0, "pme_solver: max_rejections must be >= 0");
  detail::require(params.fixed_dt >= 0.0 && std::isfinite(params.fixed_dt), "pme_solver: fixed_dt must be >= 0");
}

struct SolverState {
  double t = 0.0;
  std::vector<double> u;
  std::size_t step_count = 0;
  std::size_t rejections = 0;
  double initial_mass = 0.0;
  /// Mass that crossed the outer boundary. Zero-flux walls keep this at 0.
  double boundary_flux = 0.0;
  /// Mass that would have left through the outer face into an empty exterior.
  double leak_estimate = 0.0;
  double min_relative_value = 0.0;  ///< most negative min(u)/max(u) accepted (0 if none)
};

struct SnapshotRecord {
  DensityField field;
  FunctionalSnapshot functionals;
};

struct EvolveResult {
  std::vector<SnapshotRecord> records;
  SolverState final_state;
  std::vector<std::string> warnings;
};

class PorousMediumSolver {
 public:
  PorousMediumSolver(Grid grid, DiffusionParams params) : grid_(std::move(grid)), params_(std::move(params)) {
    validate(params_);
    detail::require(grid_.dimension() == params_.n, "pme_solver: grid dimension does not match n");
    const std::size_t N = grid_.size();
    const double h = grid_.spacing();
    face_.assign(N, 0.0);
    inv_volume_.assign(N, 0.0);
    const int n = grid_.dimension();
    for (std::size_t i = 0; i < N; ++i) {
      if (grid_.is_radial()) {
        const double r = grid_.coordinate(i);
        inv_volume_[i] = 1.0 / (std::pow(r, n - 1) * h);
        face_[i] = std::pow(r + 0.5 * h, n - 1) / h;  // face i+1/2
      } else {
        inv_volume_[i] = 1.0 / h;
        face_[i] = 1.0 / h;
      }
    }
    outer_face_ = face_[N - 1];
    face_[N - 1] = 0.0;  // zero-flux wall
    // D_geom: n for radial grids (1 on a line), raised if a cell's stencil is heavier
    double heaviest = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double left = i == 0 ? 0.0 : face_[i - 1];
      heaviest = std::max(heaviest, 0.5 * (left + face_[i]) * inv_volume_[i] * h * h);
    }
    geometry_factor_ = std::max(grid_.is_radial() ? static_cast<double>(n) : 1.0, heaviest);
  }

  const Grid& grid() const { return grid_; }
  const DiffusionParams& params() const { return params_; }
  double geometry_factor() const { return geometry_factor_; }

  /// Largest stable step: cfl_safety h^2 / (2 D_geom max_i diffusivity_i) with
  /// diffusivity p max(u)^{p-1} for p >= 1 and min(u)^{p-1} for p < 1.
  double cfl_dt(std::span<const double> u) const {
    const double p = params_.p;
    const double umax = *std::max_element(u.begin(), u.end());
    if (!(umax > 0.0)) throw DomainError("pme_solver: cfl_dt needs a field with positive maximum");
    double diffusivity;
    if (p >= 1.0) {
      diffusivity = p * detail::fast_pow(umax, p - 1.0);
    } else {
      const double umin = *std::min_element(u.begin(), u.end());
      if (!(umin > 0.0)) throw DomainError("pme_solver: fast diffusion (p < 1) needs strictly positive data");
      diffusivity = std::pow(umin, p - 1.0);
    }
    const double h = grid_.spacing();
    return params_.cfl_safety * h * h / (2.0 * geometry_factor_ * diffusivity);
  }

  /// Step size for the next step towards `target`: the CFL bound, shortened so
  /// that the remaining interval is covered by equal steps.
  double cfl_dt(std::span<const double> u, double t, double target) const {
    const double dt = params_.fixed_dt > 0.0 ? params_.fixed_dt : cfl_dt(u);
    const double remaining = target - t;
    if (dt >= remaining) return remaining;
    return remaining / std::ceil(remaining / dt);
  }

  SolverState initial_state(const DensityField& f0) const {
    detail::require(f0.grid() == grid_, "pme_solver: initial field lives on a different grid");
    SolverState s;
    s.t = params_.t_start;
    s.u.assign(f0.values().begin(), f0.values().end());
    s.initial_mass = mass(f0);
    s.min_relative_value = 0.0;
    return s;
  }

  /// One explicit step towards `target` (never past it). Rejected updates
  /// halve dt; throws StabilityError after max_rejections halvings.
  void step(SolverState& state, double target) {
    detail::require(target > state.t, "pme_solver: step target must lie ahead of the current time");
    double dt = cfl_dt(state.u, state.t, target);
    bool lands = state.t + dt >= target;
    const std::size_t N = state.u.size();
    const double p = params_.p;
    v_.resize(N);
    next_.resize(N);
    for (std::size_t i = 0; i < N; ++i) v_[i] = detail::fast_pow(std::max(state.u[i], 0.0), p);
    flux_.resize(N);
    for (std::size_t i = 0; i + 1 < N; ++i) flux_[i] = face_[i] * (v_[i + 1] - v_[i]);
    flux_[N - 1] = 0.0;
    const double umax = *std::max_element(state.u.begin(), state.u.end());

    for (int attempt = 0;; ++attempt) {
      double lowest = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < N; ++i) {
        const double in = i == 0 ? 0.0 : flux_[i - 1];
        next_[i] = state.u[i] + dt * inv_volume_[i] * (flux_[i] - in);
        lowest = std::min(lowest, next_[i]);
      }
      if (lowest >= -1e-14 * umax) {
        state.u.swap(next_);
        state.t = lands ? target : state.t + dt;
        ++state.step_count;
        double edge = v_[N - 1];
        if (!grid_.is_radial()) edge += v_[0];
        state.leak_estimate += dt * outer_face_ * edge * weight_scale();
        state.min_relative_value = std::min(state.min_relative_value, lowest / umax);
        return;
      }
      if (attempt >= params_.max_rejections)
        throw StabilityError("pme_solver: negative density after " + std::to_string(attempt) +
                             " step halvings at t = " + std::to_string(state.t));
      ++state.rejections;
      dt *= 0.5;
      lands = false;
    }
  }

  /// Advances the state to `target`.
  void advance(SolverState& state, double target) {
    while (state.t < target) step(state, target);
  }

  /// Runs from t_start to t_end recording functionals at every snapshot time.
  EvolveResult evolve(const DensityField& f0) {
    const double m0 = mass(f0);
    detail::require(std::abs(m0 - 1.0) <= 1e-6, "pme_solver: initial data must have unit mass within 1e-6");
    EvolveResult result;
    SolverState state = initial_state(f0);
    auto record = [&](double t) {
      DensityField field(grid_, state.u);
      FunctionalSnapshot s = snapshot(field, params_.p, t, params_.compute_dissipation);
      result.records.push_back({std::move(field), s});
    };
    for (double t : params_.snapshot_times) {
      advance(state, t);
      record(t);
    }
    advance(state, params_.t_end);
    if (state.leak_estimate > params_.leak_warning_threshold)
      result.warnings.push_back("BoundaryLeakWarning: accumulated outer-boundary flux estimate " +
                                std::to_string(state.leak_estimate) + " exceeds " +
                                std::to_string(params_.leak_warning_threshold) + "; enlarge the domain");
    result.final_state = std::move(state);
    return result;
  }

 private:
  /// Converts face-flux units to grid mass units.
  double weight_scale() const { return grid_.is_radial() ? unit_sphere_area(grid_.dimension()) : 1.0; }

  Grid grid_;
  DiffusionParams params_;
  std::vector<double> face_;
  std::vector<double> inv_volume_;
  double outer_face_ = 0.0;
  double geometry_factor_ = 1.0;
  std::vector<double> v_, next_, flux_;  // scratch
};

/// Grid mass of a raw state vector.
inline double state_mass(const Grid& grid, std::span<const double> u) {
  double total = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) total += grid.weight(i) * u[i];
  return total;
}

// ---------------------------------------------------------------------------
// Domain sizing for fast diffusion

struct DomainSizingReport {
  bool compact_support = false;
  double support_radius = 0.0;      ///< p > 1 only
  double tail_exponent = 0.0;       ///< envelope decays like r^{tail_exponent}
  double tail_mass_outside = 0.0;   ///< mass of the envelope beyond the grid extent
  double recommended_radius = 0.0;  ///< smallest radius with tail mass below the target
  bool sufficient = false;
};

namespace detail {

/// Mass of the unit-mass section2 profile scaled to time t outside radius R.
inline double barenblatt_tail_mass(const BarenblattSpec& spec, double R, double t) {
  const int n = spec.coeffs.n;
  const double sphere = unit_sphere_area(n);
  const double scale = std::pow(t, 1.0 / spec.coeffs.mu);
  const double Rs = R / scale;  // tail mass is dilation invariant in rescaled radius
  const double rate = n + 2.0 / (spec.coeffs.p - 1.0);
  // r = Rs e^s, integrand |S| r^n profile(r) decays like e^{rate s}
  const double span = 60.0 / std::abs(rate);
  const std::size_t M = 4000;
  const double ds = span / M;
  double total = 0.0;
  for (std::size_t k = 0; k <= M; ++k) {
    const double r = Rs * std::exp(k * ds);
    const double value = sphere * std::pow(r, n) * barenblatt_profile(r, spec);
    const double w = (k == 0 || k == M) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    total += w * value;
  }
  return total * ds / 3.0;
}

}  // namespace detail

/// Estimates how much of the Barenblatt-like envelope at time t falls outside
/// the grid and which radius would keep that tail below `tail_target`.
inline DomainSizingReport fast_diffusion_guard(double p, const Grid& grid, double t = 1.0,
                                               double tail_target = 1e-6, bool second_moment_checks = false) {
  const int n = grid.dimension();
  detail::require(p != 1.0, "pme_solver: the sizing guard applies to p != 1");
  if (second_moment_checks && !(p > static_cast<double>(n) / (n + 2)))
    throw DomainError("pme_solver: second-moment checks need p > n/(n+2)");
  const BarenblattSpec spec = barenblatt_spec(p, n, BarenblattConvention::section2);
  DomainSizingReport report;
  const double extent = grid.extent();
  if (p > 1.0) {
    report.compact_support = true;
    report.support_radius = barenblatt_support_radius(spec) * std::pow(t, 1.0 / spec.coeffs.mu);
    report.recommended_radius = report.support_radius;
    report.tail_mass_outside = 0.0;
    report.sufficient = extent >= report.support_radius;
    return report;
  }
  report.tail_exponent = 2.0 / (p - 1.0);
  report.tail_mass_outside = detail::barenblatt_tail_mass(spec, extent, t);
  double lo = 0.0;
  double hi = std::pow(t, 1.0 / spec.coeffs.mu);
  while (detail::barenblatt_tail_mass(spec, hi, t) > tail_target) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (detail::barenblatt_tail_mass(spec, mid, t) > tail_target ? lo : hi) = mid;
  }
  report.recommended_radius = hi;
  report.sufficient = report.tail_mass_outside <= tail_target;
  return report;
}

}  // namespace renyi
