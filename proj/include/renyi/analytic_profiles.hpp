#pragma once

/// Closed-form source solutions of the linear and nonlinear heat equations
/// together with their entropies, Fisher informations and the sharp
/// isoperimetric and Sobolev constants.
///
/// Two unit-mass Barenblatt conventions are supported:
///   - appendix:  B_p(x) = (C_p - |x|^2)_+^{1/(p-1)}   (p > 1)
///                B_p(x) = (C_p + |x|^2)^{1/(p-1)}     (p < 1)
///   - section2:  M_p(x) = (C - kappa |x|^2)_+^{1/(p-1)},  kappa = (p-1)/(2 mu p)
/// The section2 profile is the one that generates the self-similar solution
/// t^{-n/mu} M_p(x t^{-1/mu}) of du/dt = Lap u^p. The two are related by the
/// mass-preserving dilation M_p = R_a B_p with a = |kappa|^{-1/mu}.

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "renyi/errors.hpp"
#include "renyi/special.hpp"

namespace renyi {

struct Coefficients {
  double p = 0.0;
  int n = 0;
  double mu = 0.0;  ///< 2 + n (p - 1)
  double nu = 0.0;  ///< mu / n = 2/n + (p - 1)
};

enum class BarenblattConvention { appendix, section2 };

inline const char* to_string(BarenblattConvention c) {
  return c == BarenblattConvention::appendix ? "appendix" : "section2";
}

struct BarenblattSpec {
  Coefficients coeffs;
  double kappa = 0.0;  ///< (p-1)/(2 mu p); negative for p < 1
  double A_p = 0.0;    ///< integral of (1 -+ |x|^2)^{1/(p-1)}
  double C_p = 0.0;    ///< appendix unit-mass constant
  BarenblattConvention convention = BarenblattConvention::appendix;
  double constant = 0.0;  ///< bracket constant of the stored convention (C_p or C)
  double dilation = 1.0;  ///< a such that profile = R_a B_p
};

struct HeatKernelSpec {
  int n = 1;
  double t = 1.0;
};

// ---------------------------------------------------------------------------
// coefficients

inline Coefficients coefficients(double p, int n) {
  detail::require(n >= 1, "analytic_profiles: dimension n must be a positive integer");
  detail::require(std::isfinite(p), "analytic_profiles: p must be finite");
  const double mu = 2.0 + n * (p - 1.0);
  // mu = 0 exactly at p = 1 - 2/n, which rounding can move by an ulp
  if (!(mu > 1e-12))
    throw DomainError("analytic_profiles: p must exceed 1 - 2/n (mu = 2 + n(p-1) is not positive)");
  return {p, n, mu, mu / n};
}

// ---------------------------------------------------------------------------
// Gaussian heat kernel

inline void validate(const HeatKernelSpec& spec) {
  detail::require(spec.n >= 1, "analytic_profiles: heat kernel dimension must be >= 1");
  detail::require(spec.t > 0.0 && std::isfinite(spec.t), "analytic_profiles: heat kernel time must be > 0");
}

/// (4 pi t)^{-n/2} exp(-|x|^2 / 4t), evaluated at radius r = |x|.
inline double gaussian_density(double r, const HeatKernelSpec& spec) {
  validate(spec);
  return std::pow(4.0 * std::numbers::pi * spec.t, -0.5 * spec.n) * std::exp(-r * r / (4.0 * spec.t));
}

struct ShannonPair {
  double entropy = 0.0;
  double power = 0.0;
};

inline ShannonPair shannon_heat_entropy_power(const HeatKernelSpec& spec) {
  validate(spec);
  const double N = 4.0 * std::numbers::pi * std::numbers::e * spec.t;
  return {0.5 * spec.n * std::log(N), N};
}

/// Fisher information of the heat kernel, n / (2t).
inline double heat_kernel_fisher(const HeatKernelSpec& spec) {
  validate(spec);
  return 0.5 * spec.n / spec.t;
}

// ---------------------------------------------------------------------------
// Barenblatt normalisation

namespace detail {

inline void require_not_linear(double p) {
  require(p != 1.0, "analytic_profiles: p = 1 is the linear heat equation; use the Gaussian routines");
}

/// (n+2)p - n, positive iff the second moment is finite.
inline double moment_denominator(double p, int n) {
  const double d = (n + 2) * p - n;
  if (!(d > 0.0))
    throw DomainError("analytic_profiles: need p > n/(n+2) for finite second moment");
  return d;
}

}  // namespace detail

/// A_p = int (1 - |x|^2)_+^{1/(p-1)} (p > 1) or int (1 + |x|^2)^{1/(p-1)} (p < 1).
inline double barenblatt_A(double p, int n) {
  detail::require(n >= 1, "analytic_profiles: dimension n must be a positive integer");
  detail::require_not_linear(p);
  const double half_n = 0.5 * n;
  const double log_pi_part = half_n * std::log(std::numbers::pi);
  if (p > 1.0) {
    // Beta-function representation with exponent a = 1/(p-1): Gamma(a+1)/Gamma(n/2+a+1)
    const double a = 1.0 / (p - 1.0);
    return std::exp(log_pi_part + log_gamma(a + 1.0) - log_gamma(half_n + a + 1.0));
  }
  detail::require(p > 0.0, "analytic_profiles: p must be positive");
  const double b = 1.0 / (1.0 - p);
  if (!(b - half_n > 0.0))
    throw DomainError("analytic_profiles: 1/(1-p) - n/2 must be positive (p > 1 - 2/n) for integrable tails");
  return std::exp(log_pi_part + log_gamma(b - half_n) - log_gamma(b));
}

/// C_p = A_p^{-2(p-1)/(n(p-1)+2)}.
inline double barenblatt_C(double p, int n) {
  const double A = barenblatt_A(p, n);
  return std::pow(A, -2.0 * (p - 1.0) / (n * (p - 1.0) + 2.0));
}

inline BarenblattSpec barenblatt_spec(double p, int n,
                                      BarenblattConvention convention = BarenblattConvention::appendix) {
  detail::require_not_linear(p);
  BarenblattSpec spec;
  spec.coeffs = coefficients(p, n);
  spec.kappa = (p - 1.0) / (2.0 * spec.coeffs.mu * p);
  spec.A_p = barenblatt_A(p, n);
  spec.C_p = barenblatt_C(p, n);
  spec.convention = convention;
  if (convention == BarenblattConvention::appendix) {
    spec.constant = spec.C_p;
    spec.dilation = 1.0;
  } else {
    const double abs_kappa = std::abs(spec.kappa);
    spec.dilation = std::pow(abs_kappa, -1.0 / spec.coeffs.mu);
    spec.constant = spec.C_p * std::pow(abs_kappa, 1.0 - 2.0 / spec.coeffs.mu);
  }
  return spec;
}

/// Profile value at radius r = |x| under the stored convention.
inline double barenblatt_profile(double r, const BarenblattSpec& spec) {
  const double p = spec.coeffs.p;
  double base;
  if (spec.convention == BarenblattConvention::appendix)
    base = p > 1.0 ? spec.constant - r * r : spec.constant + r * r;
  else
    base = spec.constant - spec.kappa * r * r;
  if (base <= 0.0) return 0.0;
  return std::pow(base, 1.0 / (p - 1.0));
}

/// Radius of the support (infinity for p < 1).
inline double barenblatt_support_radius(const BarenblattSpec& spec) {
  if (spec.coeffs.p < 1.0) return std::numeric_limits<double>::infinity();
  return spec.convention == BarenblattConvention::appendix ? std::sqrt(spec.constant)
                                                           : std::sqrt(spec.constant / spec.kappa);
}

/// t^{-n/mu} profile(r t^{-1/mu}); with the section2 convention this is the
/// source-type solution at time t.
inline double barenblatt_self_similar(double r, double t, const BarenblattSpec& spec) {
  detail::require(t > 0.0 && std::isfinite(t), "analytic_profiles: self-similar time must be > 0");
  const double mu = spec.coeffs.mu;
  return std::pow(t, -spec.coeffs.n / mu) * barenblatt_profile(r * std::pow(t, -1.0 / mu), spec);
}

// ---------------------------------------------------------------------------
// Barenblatt functionals (closed form). Computed for B_p and carried to the
// stored convention through the dilation laws of R_a.

inline double barenblatt_second_moment(const BarenblattSpec& spec) {
  const double p = spec.coeffs.p;
  const int n = spec.coeffs.n;
  const double base = n * std::abs(p - 1.0) / detail::moment_denominator(p, n) * spec.C_p;
  return base * spec.dilation * spec.dilation;
}

/// int profile^p.
inline double barenblatt_p_integral(const BarenblattSpec& spec) {
  const double p = spec.coeffs.p;
  const int n = spec.coeffs.n;
  const double base = 2.0 * p / detail::moment_denominator(p, n) * spec.C_p;
  return base * std::pow(spec.dilation, n * (1.0 - p));
}

inline double barenblatt_entropy(const BarenblattSpec& spec) {
  return std::log(barenblatt_p_integral(spec)) / (1.0 - spec.coeffs.p);
}

inline double barenblatt_fisher(const BarenblattSpec& spec) {
  const double p = spec.coeffs.p;
  const int n = spec.coeffs.n;
  detail::moment_denominator(p, n);
  return 2.0 * n * p / std::abs(p - 1.0) * std::pow(spec.dilation, -spec.coeffs.mu);
}

inline double barenblatt_entropy_power(const BarenblattSpec& spec) {
  return std::exp(spec.coeffs.nu * barenblatt_entropy(spec));
}

// ---------------------------------------------------------------------------
// Sharp constants

/// gamma_{n,p} = N_p(B_p) I_p(B_p), evaluated from its explicit Gamma-function form.
inline double gamma_const(double p, int n) {
  detail::require(n >= 1, "analytic_profiles: dimension n must be a positive integer");
  detail::require_not_linear(p);
  const double d = detail::moment_denominator(p, n);
  const double half_n = 0.5 * n;
  double log_gamma_ratio;
  double fisher_factor;
  if (p > 1.0) {
    const double a1 = p / (p - 1.0);
    log_gamma_ratio = log_gamma(a1) - log_gamma(half_n + a1);
    fisher_factor = 2.0 * p / (p - 1.0);
  } else {
    const double b = 1.0 / (1.0 - p);
    log_gamma_ratio = log_gamma(b - half_n) - log_gamma(b);
    fisher_factor = 2.0 * p / (1.0 - p);
  }
  const double exponent = (2.0 + n * (p - 1.0)) / (n * (p - 1.0));
  return n * std::numbers::pi * fisher_factor * std::exp(2.0 / n * log_gamma_ratio) *
         std::pow(d / (2.0 * p), exponent);
}

/// S_n = n(n-2) pi (Gamma(n/2)/Gamma(n))^{2/n}.
inline double sobolev_constant(int n) {
  detail::require(n > 2, "analytic_profiles: the Sobolev constant needs n > 2");
  const double log_ratio = log_gamma(0.5 * n) - log_gamma(static_cast<double>(n));
  return n * (n - 2.0) * std::numbers::pi * std::exp(2.0 / n * log_ratio);
}

/// 2* = 2n/(n-2).
inline double sobolev_exponent(int n) {
  detail::require(n > 2, "analytic_profiles: the Sobolev exponent needs n > 2");
  return 2.0 * n / (n - 2.0);
}

}  // namespace renyi
