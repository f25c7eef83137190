#pragma once

/// Pass/fail evaluators for the claims about the Renyi entropy power along
/// the nonlinear heat flow: concavity of N_p, monotonicity of Upsilon_p, the
/// DeBruijn-type and dissipation identities, the concavity condition chain,
/// the isoperimetric bound, convergence to the Barenblatt profile and the
/// Sobolev inequality.
///
/// Time derivatives of recorded series use three-point formulas on the
/// recorded (possibly non-uniform) snapshot times.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "renyi/analytic_profiles.hpp"
#include "renyi/errors.hpp"
#include "renyi/functionals.hpp"
#include "renyi/grid.hpp"
#include "renyi/pme_solver.hpp"

namespace renyi {

using Series = std::vector<FunctionalSnapshot>;

struct Tolerances {
  double concavity = 1e-6;      ///< relative curvature units
  double upsilon = 1e-5;        ///< relative increase of Upsilon_p between snapshots
  double debruijn = 1e-2;       ///< relative residual
  double dissipation = 5e-2;    ///< relative residual
  double isoperimetric = 1e-3;  ///< margin relative to gamma_{n,p}
  double convergence = 1e-2;    ///< final rescaled L1 distance
  double convergence_slack = 1e-6;
  double sobolev = 1e-3;        ///< deficit relative to the larger side
};

struct Verdict {
  std::string check;
  double value = 0.0;      ///< the measured quantity compared against the tolerance
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

namespace detail {

/// Second-order derivative estimate at interior node k of (t, y).
inline double central_rate(std::span<const double> t, std::span<const double> y, std::size_t k) {
  const double hm = t[k] - t[k - 1];
  const double hp = t[k + 1] - t[k];
  return (hm * hm * y[k + 1] - hp * hp * y[k - 1] - (hm * hm - hp * hp) * y[k]) / (hm * hp * (hm + hp));
}

inline double second_derivative(std::span<const double> t, std::span<const double> y, std::size_t k) {
  const double hm = t[k] - t[k - 1];
  const double hp = t[k + 1] - t[k];
  return 2.0 * ((y[k + 1] - y[k]) / hp - (y[k] - y[k - 1]) / hm) / (hm + hp);
}

template <class Member>
std::vector<double> column(const Series& s, Member m) {
  std::vector<double> out;
  out.reserve(s.size());
  for (const auto& snap : s) out.push_back(snap.*m);
  return out;
}

inline void require_snapshots(const Series& s, std::size_t count, const char* who) {
  if (s.size() < count)
    throw InsufficientData(std::string("verification: ") + who + " needs at least " + std::to_string(count) +
                           " snapshots");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// concavity of t -> N_p

struct ConcavityReport {
  bool pass = false;
  double max_violation = 0.0;  ///< largest relative curvature (positive means convex)
  std::size_t worst_index = 0;
  double tolerance = 0.0;
  /// N_p''(t_k) h_k / max|N_p'| for interior k, h_k the local snapshot spacing.
  std::vector<double> relative_curvature;
};

inline ConcavityReport concavity_report(std::span<const double> t, std::span<const double> N, double tol) {
  if (t.size() < 3 || N.size() != t.size())
    throw InsufficientData("verification: concavity needs at least 3 snapshots");
  double slope = 0.0;
  for (std::size_t k = 0; k + 1 < t.size(); ++k) slope = std::max(slope, std::abs((N[k + 1] - N[k]) / (t[k + 1] - t[k])));
  ConcavityReport r;
  r.tolerance = tol;
  r.max_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k + 1 < t.size(); ++k) {
    const double local = 0.5 * (t[k + 1] - t[k - 1]);
    const double curv = slope > 0.0 ? detail::second_derivative(t, N, k) * local / slope : 0.0;
    r.relative_curvature.push_back(curv);
    if (curv > r.max_violation) {
      r.max_violation = curv;
      r.worst_index = k;
    }
  }
  r.pass = r.max_violation <= tol;
  return r;
}

inline ConcavityReport concavity_report(const Series& s, double tol) {
  detail::require_snapshots(s, 3, "concavity_report");
  const auto t = detail::column(s, &FunctionalSnapshot::t);
  const auto N = detail::column(s, &FunctionalSnapshot::N_p);
  return concavity_report(t, N, tol);
}

// ---------------------------------------------------------------------------
// Upsilon_p nonincreasing

struct MonotoneReport {
  bool pass = false;
  double max_increase = 0.0;  ///< largest (Y_{k+1} - Y_k)/|Y_k|
  std::size_t worst_index = 0;
  std::vector<double> relative_increments;
};

inline MonotoneReport upsilon_monotone(const Series& s, double tol) {
  detail::require_snapshots(s, 2, "upsilon_monotone");
  MonotoneReport r;
  r.max_increase = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < s.size(); ++k) {
    const double inc = (s[k + 1].upsilon - s[k].upsilon) / std::abs(s[k].upsilon);
    r.relative_increments.push_back(inc);
    if (inc > r.max_increase) {
      r.max_increase = inc;
      r.worst_index = k;
    }
  }
  r.pass = r.max_increase <= tol;
  return r;
}

// ---------------------------------------------------------------------------
// identity residuals

struct ResidualReport {
  std::vector<double> times;      ///< interior snapshot times
  std::vector<double> residuals;  ///< relative residual at each interior time
  double max_residual = 0.0;
};

/// |dH_p/dt - I_p| / I_p at interior snapshots (Shannon H and I when p = 1).
inline ResidualReport debruijn_check(const Series& s) {
  detail::require_snapshots(s, 3, "debruijn_check");
  const auto t = detail::column(s, &FunctionalSnapshot::t);
  const auto H = detail::column(s, &FunctionalSnapshot::H_p);
  ResidualReport r;
  for (std::size_t k = 1; k + 1 < s.size(); ++k) {
    const double rate = detail::central_rate(t, H, k);
    const double res = std::abs(rate - s[k].I_p) / std::abs(s[k].I_p);
    r.times.push_back(t[k]);
    r.residuals.push_back(res);
    r.max_residual = std::max(r.max_residual, res);
  }
  return r;
}

/// |-dF_p/dt - D_p| / D_p at interior snapshots.
inline ResidualReport dissipation_check(const Series& s) {
  detail::require_snapshots(s, 3, "dissipation_check");
  for (const auto& snap : s)
    if (!snap.D_p) throw InsufficientData("verification: dissipation_check needs D_p in every snapshot");
  const auto t = detail::column(s, &FunctionalSnapshot::t);
  const auto F = detail::column(s, &FunctionalSnapshot::F_p);
  ResidualReport r;
  for (std::size_t k = 1; k + 1 < s.size(); ++k) {
    const double D = *s[k].D_p;
    if (std::abs(D) < 1e-300) throw DegenerateError("verification: D_p vanishes at t = " + std::to_string(t[k]));
    const double res = std::abs(-detail::central_rate(t, F, k) - D) / std::abs(D);
    r.times.push_back(t[k]);
    r.residuals.push_back(res);
    r.max_residual = std::max(r.max_residual, res);
  }
  return r;
}

/// Largest residual over the times two reports share (refinement studies).
inline double max_residual_at_shared_times(const ResidualReport& a, const ResidualReport& b,
                                           double time_tol = 1e-12) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.times.size(); ++i)
    for (std::size_t j = 0; j < b.times.size(); ++j)
      if (std::abs(a.times[i] - b.times[j]) <= time_tol * std::max(1.0, std::abs(a.times[i])))
        worst = std::max(worst, a.residuals[i]);
  return worst;
}

// ---------------------------------------------------------------------------
// condition chain for d^2/dt^2 exp(sigma H_p) <= 0

struct ConcavityChain {
  double sigma = 0.0;
  double p_integral = 0.0;        ///< int u^p
  double F = 0.0;                 ///< F_p, gradient form
  double D = 0.0;
  double laplacian_moment = 0.0;  ///< int u^p (Lap e')^2
  /// D int u^p - (sigma + p - 1) F^2, relative to D int u^p.
  double chain_margin = 0.0;
  /// int u^p int u^p (Lap e')^2 - F^2, relative to the product.
  double cauchy_schwarz_margin = 0.0;
  /// D - 2 (1/n + p - 1) int u^p (Lap e')^2, relative to D.
  double trace_margin = 0.0;
  /// nu - sigma
  double sigma_margin = 0.0;

  bool holds(double tol = 1e-8) const {
    return chain_margin >= -tol && cauchy_schwarz_margin >= -tol && trace_margin >= -tol;
  }
};

inline ConcavityChain concavity_condition_chain(const DensityField& f, double p, double sigma) {
  const Coefficients c = coefficients(p, f.grid().dimension());
  detail::require(sigma > 0.0, "verification: sigma must be positive");
  ConcavityChain r;
  r.sigma = sigma;
  r.p_integral = power_integral(f, p);
  r.F = fisher_p(f, p).F;
  const Dissipation d = d_p(f, p);
  r.D = d.D;
  r.laplacian_moment = d.laplacian_moment;
  const double lhs = r.D * r.p_integral;
  const double rhs = (sigma + p - 1.0) * r.F * r.F;
  r.chain_margin = (lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs));
  const double product = r.p_integral * r.laplacian_moment;
  r.cauchy_schwarz_margin = (product - r.F * r.F) / product;
  r.trace_margin = (r.D - d.trace_lower_bound) / std::abs(r.D);
  r.sigma_margin = c.nu - sigma;
  return r;
}

inline ConcavityChain concavity_condition_chain(const DensityField& f, double p) {
  return concavity_condition_chain(f, p, coefficients(p, f.grid().dimension()).nu);
}

/// Sign predicate equivalent to d^2/dt^2 N_p <= 0 at one snapshot.
inline bool chain_predicts_concave(const FunctionalSnapshot& s, double p, int n) {
  const Coefficients c = coefficients(p, n);
  detail::require(s.D_p.has_value(), "verification: chain predicate needs D_p");
  const double integral = s.F_p / s.I_p;
  return *s.D_p * integral - (c.nu + p - 1.0) * s.F_p * s.F_p >= 0.0;
}

// ---------------------------------------------------------------------------
// isoperimetric bound Upsilon_p >= gamma_{n,p}

struct IsoperimetricReport {
  double upsilon = 0.0;
  double gamma = 0.0;
  double margin = 0.0;           ///< upsilon - gamma
  double relative_margin = 0.0;  ///< margin / gamma
  bool pass = false;
};

inline IsoperimetricReport isoperimetric_check(const DensityField& f, double p, double rel_tol) {
  const int n = f.grid().dimension();
  if (!(p > static_cast<double>(n) / (n + 2)))
    throw DomainError("verification: the isoperimetric bound needs p > n/(n+2)");
  IsoperimetricReport r;
  r.gamma = gamma_const(p, n);
  r.upsilon = upsilon(f, p);
  r.margin = r.upsilon - r.gamma;
  r.relative_margin = r.margin / r.gamma;
  r.pass = r.relative_margin >= -rel_tol;
  return r;
}

// ---------------------------------------------------------------------------
// convergence of the rescaled solution to the Barenblatt profile

struct ConvergenceReport {
  std::vector<double> times;
  std::vector<double> distances;  ///< L1(U(t), M_p), U = R_{t^{-1/mu}} u(t)
  std::vector<double> upsilon;
  double gamma = 0.0;
  double final_distance = 0.0;
  double max_increase = 0.0;
  double final_upsilon_gap = 0.0;  ///< (Upsilon(t_end) - gamma) / gamma
  bool monotone = false;
  bool pass = false;
};

inline double l1_distance_to_profile(const DensityField& U, const BarenblattSpec& profile) {
  double total = 0.0;
  for (std::size_t i = 0; i < U.size(); ++i)
    total += U.grid().weight(i) * std::abs(U[i] - barenblatt_profile(U.grid().radius(i), profile));
  return total;
}

inline ConvergenceReport barenblatt_convergence(const std::vector<SnapshotRecord>& run, double p, double target,
                                                double slack, double min_horizon = 100.0) {
  if (run.size() < 2) throw InsufficientData("verification: convergence needs at least 2 snapshots");
  const double t0 = run.front().functionals.t, t1 = run.back().functionals.t;
  if (!(t0 > 0.0) || t1 / t0 < min_horizon)
    throw InsufficientData("verification: convergence needs t_end / t_start >= " + std::to_string(min_horizon));
  const int n = run.front().field.grid().dimension();
  const BarenblattSpec profile = barenblatt_spec(p, n, BarenblattConvention::section2);
  ConvergenceReport r;
  if (p > static_cast<double>(n) / (n + 2)) r.gamma = gamma_const(p, n);
  for (const auto& rec : run) {
    const double t = rec.functionals.t;
    r.times.push_back(t);
    r.distances.push_back(l1_distance_to_profile(self_similar_rescale(rec.field, t, p), profile));
    r.upsilon.push_back(rec.functionals.upsilon);
  }
  r.final_distance = r.distances.back();
  r.max_increase = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < r.distances.size(); ++k)
    r.max_increase = std::max(r.max_increase, r.distances[k + 1] - r.distances[k]);
  r.monotone = r.max_increase <= slack;
  r.final_upsilon_gap = r.gamma > 0.0 ? (r.upsilon.back() - r.gamma) / r.gamma : std::nan("");
  r.pass = r.monotone && r.final_distance < target;
  return r;
}

// ---------------------------------------------------------------------------
// Sobolev inequality

struct SobolevReport {
  SobolevPair pair;
  double deficit = 0.0;           ///< int |grad g|^2 - S_n (int g^{2*})^{2/2*}
  double relative_deficit = 0.0;  ///< deficit / max(sides)
  bool pass = false;
};

inline SobolevReport sobolev_check(const DensityField& g, int n, double rel_tol) {
  SobolevReport r;
  r.pair = sobolev_pair(g, n);
  r.deficit = r.pair.dirichlet - r.pair.sobolev_rhs;
  r.relative_deficit = r.deficit / std::max(r.pair.dirichlet, r.pair.sobolev_rhs);
  r.pass = r.relative_deficit >= -rel_tol;
  return r;
}

// ---------------------------------------------------------------------------
// experiment report over a recorded series

struct CheckSelection {
  bool concavity = true;
  bool upsilon = true;
  bool debruijn = false;
  bool dissipation = false;
};

struct ExperimentReport {
  Series series;
  std::vector<double> relative_curvature;
  std::vector<double> upsilon_increments;
  std::vector<double> debruijn_residuals;
  std::vector<double> dissipation_residuals;
  std::vector<double> isoperimetric_margins;  ///< (Upsilon - gamma)/gamma per snapshot, when defined
  std::vector<Verdict> verdicts;

  bool all_pass() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
  }
};

inline ExperimentReport build_report(const Series& series, double p, int n, const Tolerances& tol,
                                     const CheckSelection& checks) {
  ExperimentReport rep;
  rep.series = series;
  if (checks.concavity) {
    const auto c = concavity_report(series, tol.concavity);
    rep.relative_curvature = c.relative_curvature;
    rep.verdicts.push_back({"concavity", c.max_violation, tol.concavity, c.pass,
                            "max relative curvature of N_p at t = " +
                                std::to_string(series[c.worst_index].t)});
  }
  if (checks.upsilon) {
    const auto m = upsilon_monotone(series, tol.upsilon);
    rep.upsilon_increments = m.relative_increments;
    rep.verdicts.push_back({"upsilon_monotone", m.max_increase, tol.upsilon, m.pass,
                            "largest relative increase of Upsilon_p"});
  }
  if (checks.debruijn) {
    const auto d = debruijn_check(series);
    rep.debruijn_residuals = d.residuals;
    rep.verdicts.push_back({"debruijn", d.max_residual, tol.debruijn, d.max_residual < tol.debruijn,
                            "max |dH_p/dt - I_p| / I_p"});
  }
  if (checks.dissipation) {
    const auto d = dissipation_check(series);
    rep.dissipation_residuals = d.residuals;
    rep.verdicts.push_back({"dissipation", d.max_residual, tol.dissipation, d.max_residual < tol.dissipation,
                            "max |-dF_p/dt - D_p| / D_p"});
  }
  if (p != 1.0 && p > static_cast<double>(n) / (n + 2)) {
    const double gamma = gamma_const(p, n);
    for (const auto& s : series) rep.isoperimetric_margins.push_back((s.upsilon - gamma) / gamma);
  }
  return rep;
}

}  // namespace renyi
