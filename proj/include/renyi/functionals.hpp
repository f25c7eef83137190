#pragma once

/// Discrete quadrature of the entropy-type functionals of a density sampled
/// on a Grid: Renyi entropy H_p and entropy power N_p, the p-Fisher
/// information F_p / I_p, E_p, the dissipation D_p, the dilation-invariant
/// product Upsilon_p = N_p I_p and their Shannon (p = 1) counterparts.
///
/// Integrals are weighted sums over the grid nodes. Derivatives are
/// second-order central differences with second-order one-sided stencils at
/// the domain ends; radial grids use the even reflection g(-r) = g(r) at the
/// origin. Nodes below kSupportThreshold * max(u) are treated as outside the
/// support and contribute nothing to integrands with negative powers of u.
/// For p < 1 there is no free boundary and the cut is kFastDiffusionThreshold.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "renyi/analytic_profiles.hpp"
#include "renyi/errors.hpp"
#include "renyi/grid.hpp"

namespace renyi {

inline constexpr double kSupportThreshold = 1e-12;
inline constexpr double kFastDiffusionThreshold = 1e-100;

struct FisherInfo {
  double F = 0.0;  ///< int |grad u^p|^2 / u
  double I = 0.0;  ///< F / int u^p
};

struct Dissipation {
  double D = 0.0;                  ///< 2 int u^p (|D^2 e'|^2 + (p-1)(Lap e')^2)
  double laplacian_moment = 0.0;   ///< int u^p (Lap e')^2
  double laplacian_fisher = 0.0;   ///< -int u^p Lap e', the integrated-by-parts F_p
  double trace_lower_bound = 0.0;  ///< 2 (1/n + p - 1) int u^p (Lap e')^2
};

struct FunctionalSnapshot {
  double t = 0.0;
  double mass = 0.0;
  double E_p = 0.0;  ///< NaN at p = 1
  double H_p = 0.0;
  double N_p = 0.0;
  double F_p = 0.0;
  double I_p = 0.0;
  std::optional<double> D_p;
  double upsilon = 0.0;
};

namespace detail {

inline double fast_pow(double x, double p) {
  if (p == 2.0) return x * x;
  if (p == 1.0) return x;
  if (p == 1.5) return x * std::sqrt(x);
  if (p == 3.0) return x * x * x;
  if (p == 0.5) return std::sqrt(x);
  return std::pow(x, p);
}

inline double support_threshold(const DensityField& f, double p) {
  return (p < 1.0 ? kFastDiffusionThreshold : kSupportThreshold) * f.max_value();
}

struct Derivatives {
  std::vector<double> first;
  std::vector<double> second;
};

inline Derivatives derivatives(const Grid& grid, std::span<const double> g) {
  const std::size_t N = g.size();
  const double h = grid.spacing();
  const double inv2h = 0.5 / h;
  const double invh2 = 1.0 / (h * h);
  Derivatives d{std::vector<double>(N), std::vector<double>(N)};
  for (std::size_t i = 1; i + 1 < N; ++i) {
    d.first[i] = (g[i + 1] - g[i - 1]) * inv2h;
    d.second[i] = (g[i + 1] - 2.0 * g[i] + g[i - 1]) * invh2;
  }
  if (grid.is_radial()) {
    // ghost node g(-h/2) = g(h/2): g'(0) = 0
    d.first[0] = (g[1] - g[0]) * inv2h;
    d.second[0] = (g[1] - g[0]) * invh2;
  } else {
    d.first[0] = (-3.0 * g[0] + 4.0 * g[1] - g[2]) * inv2h;
    d.second[0] = (2.0 * g[0] - 5.0 * g[1] + 4.0 * g[2] - g[3]) * invh2;
  }
  const std::size_t L = N - 1;
  d.first[L] = (3.0 * g[L] - 4.0 * g[L - 1] + g[L - 2]) * inv2h;
  d.second[L] = (2.0 * g[L] - 5.0 * g[L - 1] + 4.0 * g[L - 2] - g[L - 3]) * invh2;
  return d;
}

inline void require_renyi_index(double p) {
  require(p > 0.0 && std::isfinite(p), "functionals: Renyi index p must be positive");
  require(p != 1.0, "functionals: p = 1 is the Shannon case; use shannon_entropy / shannon_fisher");
}

/// e'_p(u) = q u^{p-1} with q = p/(p-1); log u at p = 1. Below the support
/// threshold the argument is clamped where the power would blow up.
inline std::vector<double> first_variation(const DensityField& f, double p) {
  const double floor = support_threshold(f, p);
  std::vector<double> g(f.size());
  if (p == 1.0) {
    for (std::size_t i = 0; i < f.size(); ++i) g[i] = std::log(std::max(f[i], floor));
    return g;
  }
  const double q = p / (p - 1.0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double u = p < 1.0 ? std::max(f[i], floor) : f[i];
    g[i] = q * fast_pow(u, p - 1.0);
  }
  return g;
}

/// Derivatives of g = e'_p(u), differenced directly (the pressure is smooth
/// across a free boundary and exact for source-type profiles). For p < 1 g
/// blows up where u vanishes, so at nodes whose stencil reaches a
/// below-threshold cell the chain rule g' = p u^{p-2} u',
/// g'' = p u^{p-2} (u'' + (p-2) u'^2 / u) is applied to differences of u.
inline Derivatives variation_derivatives(const DensityField& f, double p) {
  Derivatives d = derivatives(f.grid(), first_variation(f, p));
  if (p >= 1.0) return d;
  const double floor = support_threshold(f, p);
  const std::size_t N = f.size();
  auto below = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t j = lo; j <= hi; ++j)
      if (f[j] <= floor) return true;
    return false;
  };
  std::optional<Derivatives> du;
  for (std::size_t i = 0; i < N; ++i) {
    std::size_t lo = i == 0 ? 0 : i - 1, hi = std::min(i + 1, N - 1);
    if (i == 0 && !f.grid().is_radial()) hi = 3;
    if (i == N - 1) lo = N - 4;
    if (!below(lo, hi)) continue;
    const double u = f[i];
    if (u <= floor) {
      d.first[i] = d.second[i] = 0.0;
      continue;
    }
    if (!du) du = derivatives(f.grid(), f.values());
    const double scale = p * std::pow(u, p - 2.0);
    const double u1 = du->first[i];
    d.first[i] = scale * u1;
    d.second[i] = scale * (du->second[i] + (p - 2.0) * u1 * u1 / u);
  }
  return d;
}

}  // namespace detail

inline double mass(const DensityField& f) {
  double total = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) total += f.grid().weight(i) * f[i];
  return total;
}

/// int f^p.
inline double power_integral(const DensityField& f, double p) {
  double total = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) total += f.grid().weight(i) * detail::fast_pow(f[i], p);
  return total;
}

inline double shannon_entropy(const DensityField& f) {
  const double floor = detail::support_threshold(f, 1.0);
  double total = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f[i] > floor) total -= f.grid().weight(i) * f[i] * std::log(f[i]);
  return total;
}

/// int |grad f|^2 / f, evaluated as int f |grad log f|^2 on the support.
inline double shannon_fisher(const DensityField& f) {
  const double floor = detail::support_threshold(f, 1.0);
  const auto g = detail::first_variation(f, 1.0);
  const auto d = detail::derivatives(f.grid(), g);
  double total = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f[i] > floor) total += f.grid().weight(i) * f[i] * d.first[i] * d.first[i];
  return total;
}

inline double renyi_entropy(const DensityField& f, double p) {
  detail::require_renyi_index(p);
  const double integral = power_integral(f, p);
  detail::require(integral > 0.0, "functionals: int f^p must be positive");
  return std::log(integral) / (1.0 - p);
}

/// exp(nu H_p); Shannon entropy power exp(2H/n) at p = 1.
inline double entropy_power(const DensityField& f, double p) {
  const Coefficients c = coefficients(p, f.grid().dimension());
  if (p == 1.0) return std::exp(c.nu * shannon_entropy(f));
  return std::exp(c.nu * renyi_entropy(f, p));
}

/// F_p = q^2 int |grad u^{p-1}|^2 u (equal to int |grad u^p|^2 / u for smooth
/// positive u; see variation_derivatives) and I_p = F_p / int u^p. At p = 1 this is the Shannon Fisher
/// information normalised by the mass.
inline FisherInfo fisher_p(const DensityField& f, double p) {
  detail::require(p > 0.0 && std::isfinite(p), "functionals: p must be positive");
  const double floor = detail::support_threshold(f, p);
  const auto d = detail::variation_derivatives(f, p);
  double F = 0.0;
  std::size_t support = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] <= floor) continue;
    ++support;
    F += f.grid().weight(i) * f[i] * d.first[i] * d.first[i];
  }
  if (support == 0) throw DomainError("functionals: empty support in fisher_p");
  const double integral = p == 1.0 ? mass(f) : power_integral(f, p);
  detail::require(integral > 0.0, "functionals: int f^p must be positive");
  return {F, F / integral};
}

/// E_p = int u^p / (p - 1).
inline double e_p_integral(const DensityField& f, double p) {
  detail::require_renyi_index(p);
  const double E = power_integral(f, p) / (p - 1.0);
  if (!((p - 1.0) * E > 0.0)) throw DomainError("functionals: (p-1) E_p must be positive");
  return E;
}

/// D_p = -dF_p/dt along the flow, evaluated from its closed integrand with
/// g = e'_p(u). Radial: |D^2 g|^2 = g''^2 + (n-1)(g'/r)^2, Lap g = g'' + (n-1) g'/r.
inline Dissipation d_p(const DensityField& f, double p) {
  detail::require(p > 0.0 && std::isfinite(p), "functionals: p must be positive");
  const Grid& grid = f.grid();
  const int n = grid.dimension();
  const double floor = detail::support_threshold(f, p);
  const auto d = detail::variation_derivatives(f, p);
  Dissipation out;
  double hessian_term = 0.0;
  std::size_t support = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] <= floor) continue;
    ++support;
    double lap = d.second[i];
    double hess2 = d.second[i] * d.second[i];
    if (grid.is_radial() && n > 1) {
      const double slope = d.first[i] / grid.coordinate(i);
      lap += (n - 1) * slope;
      hess2 += (n - 1) * slope * slope;
    }
    const double up = grid.weight(i) * detail::fast_pow(f[i], p);
    hessian_term += up * hess2;
    out.laplacian_moment += up * lap * lap;
    out.laplacian_fisher -= up * lap;
  }
  if (support == 0) throw DomainError("functionals: empty support in d_p");
  out.D = 2.0 * (hessian_term + (p - 1.0) * out.laplacian_moment);
  out.trace_lower_bound = 2.0 * (1.0 / n + p - 1.0) * out.laplacian_moment;
  return out;
}

/// Upsilon_p = N_p I_p.
inline double upsilon(const DensityField& f, double p) { return entropy_power(f, p) * fisher_p(f, p).I; }

/// (R_a f)(x) = a^{-n} f(x/a): the same samples on the grid dilated by a.
inline DensityField rescale(const DensityField& f, double a) {
  detail::require(a > 0.0 && std::isfinite(a), "functionals: dilation factor must be > 0");
  const double factor = std::pow(a, -f.grid().dimension());
  std::vector<double> v(f.values().begin(), f.values().end());
  for (double& x : v) x *= factor;
  return DensityField(f.grid().dilated(a), std::move(v));
}

/// Removes the self-similar spreading of u(., t): U = R_{t^{-1/mu}} u, so that
/// the source-type solution M_p(., t) is mapped back onto its profile.
inline DensityField self_similar_rescale(const DensityField& f, double t, double p) {
  detail::require(t > 0.0 && std::isfinite(t), "functionals: self-similar time must be > 0");
  const Coefficients c = coefficients(p, f.grid().dimension());
  return rescale(f, std::pow(t, -1.0 / c.mu));
}

struct GagliardoNirenbergPair {
  double lhs = 0.0;  ///< int |grad f^p|^2 / f
  double rhs = 0.0;  ///< gamma (int f^p)^{(2 + 2n(p-1))/(n(p-1))}
  double upsilon = 0.0;
  double gamma = 0.0;
  bool forms_agree = true;  ///< sign(lhs - rhs) == sign(upsilon - gamma)
};

inline GagliardoNirenbergPair gn_lhs_rhs(const DensityField& f, double p) {
  const int n = f.grid().dimension();
  detail::require_renyi_index(p);
  GagliardoNirenbergPair out;
  out.gamma = gamma_const(p, n);
  const double integral = power_integral(f, p);
  const double np1 = n * (p - 1.0);
  // the exponent vanishes at p = (n-1)/n, where the right side is gamma itself
  const double exponent = (2.0 + 2.0 * np1) / np1;
  out.rhs = std::abs(2.0 + 2.0 * np1) < 1e-12 ? out.gamma : out.gamma * std::pow(integral, exponent);
  const FisherInfo fi = fisher_p(f, p);
  out.lhs = fi.F;
  out.upsilon = entropy_power(f, p) * fi.I;
  out.forms_agree = (out.lhs >= out.rhs) == (out.upsilon >= out.gamma);
  return out;
}

struct SobolevPair {
  double dirichlet = 0.0;     ///< int |grad g|^2
  double sobolev_rhs = 0.0;   ///< S_n (int g^{2*})^{2/2*}
  double substituted = 0.0;   ///< int |grad f^{(n-1)/n}|^2 / f with f = g^{2*}
  double substitution_factor = 0.0;  ///< ((2n-2)/(n-2))^2
  double identity_mismatch = 0.0;    ///< |substituted - factor * dirichlet| / substituted
};

inline SobolevPair sobolev_pair(const DensityField& g, int n) {
  detail::require(n > 2, "functionals: the Sobolev pair needs n > 2");
  detail::require(g.grid().dimension() == n, "functionals: Sobolev field dimension mismatch");
  const double two_star = sobolev_exponent(n);
  const auto d = detail::derivatives(g.grid(), g.values());
  SobolevPair out;
  for (std::size_t i = 0; i < g.size(); ++i) out.dirichlet += g.grid().weight(i) * d.first[i] * d.first[i];
  out.sobolev_rhs = sobolev_constant(n) * std::pow(power_integral(g, two_star), 2.0 / two_star);

  std::vector<double> fv(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) fv[i] = std::pow(g[i], two_star);
  const DensityField f(g.grid(), std::move(fv));
  out.substituted = fisher_p(f, (n - 1.0) / n).F;
  const double ratio = (2.0 * n - 2.0) / (n - 2.0);
  out.substitution_factor = ratio * ratio;
  out.identity_mismatch = std::abs(out.substituted - out.substitution_factor * out.dirichlet) / out.substituted;
  return out;
}

/// All functionals of one density at time t. At p = 1 the entropy slots hold
/// the Shannon quantities and E_p is NaN.
inline FunctionalSnapshot snapshot(const DensityField& f, double p, double t, bool with_dissipation = false) {
  const Coefficients c = coefficients(p, f.grid().dimension());
  FunctionalSnapshot s;
  s.t = t;
  s.mass = mass(f);
  if (p == 1.0) {
    s.E_p = std::nan("");
    s.H_p = shannon_entropy(f);
  } else {
    s.E_p = e_p_integral(f, p);
    s.H_p = std::log((p - 1.0) * s.E_p) / (1.0 - p);
  }
  s.N_p = std::exp(c.nu * s.H_p);
  const FisherInfo fi = fisher_p(f, p);
  s.F_p = fi.F;
  s.I_p = fi.I;
  if (with_dissipation) s.D_p = d_p(f, p).D;
  s.upsilon = s.N_p * s.I_p;
  return s;
}

}  // namespace renyi
