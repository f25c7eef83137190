#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "renyi/functionals.hpp"
#include "renyi/initial_data.hpp"

using namespace renyi;
using std::numbers::pi;

namespace {

DensityField sampled_barenblatt(double p, int n, std::size_t nodes, double radius = 0.0) {
  const auto s = barenblatt_spec(p, n);
  const double R = radius > 0.0 ? radius : barenblatt_support_radius(s);
  return DensityField::sample(Grid::radial(n, nodes, R), [&](double r) { return barenblatt_profile(r, s); });
}

DensityField uniform_field(double L, std::size_t nodes) {
  return DensityField::sample(Grid::cartesian_symmetric(nodes, L), [&](double) { return 1.0 / (2.0 * L); });
}

std::vector<DensityField> random_fields(const Grid& grid, int count, std::uint64_t seed0 = 100) {
  std::vector<DensityField> out;
  MixtureOptions opts;
  opts.floor = 1e-8;
  for (int k = 0; k < count; ++k) out.push_back(gaussian_mixture(grid, seed0 + k, opts));
  return out;
}

}  // namespace

TEST(Grid, WeightsAndGeometry) {
  const Grid r = Grid::radial(3, 100, 2.0);
  EXPECT_DOUBLE_EQ(r.spacing(), 0.02);
  EXPECT_DOUBLE_EQ(r.coordinate(0), 0.01);
  EXPECT_NEAR(r.weight(5), 4.0 * pi * std::pow(5.5 * 0.02, 2) * 0.02, 1e-15);
  EXPECT_DOUBLE_EQ(r.extent(), 2.0);
  const Grid c = Grid::cartesian_symmetric(10, 1.0);
  EXPECT_DOUBLE_EQ(c.coordinate(0), -0.9);
  EXPECT_DOUBLE_EQ(c.extent(), 1.0);
  EXPECT_DOUBLE_EQ(c.weight(3), 0.2);
  EXPECT_THROW(Grid::radial(3, 3, 1.0), DomainError);
  EXPECT_THROW(Grid::cartesian(10, -1.0, 0.0), DomainError);
  EXPECT_THROW(DensityField(c, std::vector<double>(10, -1.0)), DomainError);
  EXPECT_THROW(DensityField(c, std::vector<double>(10, 0.0)), DomainError);
  EXPECT_THROW(DensityField(c, std::vector<double>(9, 1.0)), DomainError);
}

TEST(Mass, Examples) {
  EXPECT_NEAR(mass(uniform_field(3.0, 64)), 1.0, 1e-14);
  const auto g = DensityField::sample(Grid::cartesian_symmetric(4096, 20.0),
                                      [](double x) { return gaussian_density(std::abs(x), {1, 1.0}); });
  EXPECT_NEAR(mass(g), 1.0, 1e-10);
  const auto spec = barenblatt_spec(2.0, 1);
  const double R = barenblatt_support_radius(spec);
  // the support boundary sits on a cell face
  const auto b = DensityField::sample(Grid::cartesian_symmetric(8192, R),
                                      [&](double x) { return barenblatt_profile(std::abs(x), spec); });
  EXPECT_NEAR(mass(b), 1.0, 1e-8);
}

TEST(RenyiEntropy, UniformIsLogLength) {
  const double L = 1.7;
  const auto f = uniform_field(L, 128);
  for (double p : {0.5, 0.9, 1.5, 2.0, 3.0}) EXPECT_NEAR(renyi_entropy(f, p), std::log(2.0 * L), 1e-12);
  EXPECT_THROW(renyi_entropy(f, 1.0), DomainError);
  EXPECT_THROW(renyi_entropy(f, 0.0), DomainError);
  EXPECT_THROW(renyi_entropy(f, -1.0), DomainError);
}

TEST(RenyiEntropy, BarenblattClosedForm) {
  const auto spec = barenblatt_spec(2.0, 1);
  const auto f = sampled_barenblatt(2.0, 1, 8192);
  EXPECT_NEAR(renyi_entropy(f, 2.0), barenblatt_entropy(spec), 1e-6);
}

TEST(EntropyPower, GaussianHeatKernel) {
  for (double t : {0.25, 1.0}) {
    const auto f = DensityField::sample(Grid::cartesian_symmetric(4096, 20.0),
                                        [&](double x) { return gaussian_density(std::abs(x), {1, t}); });
    EXPECT_NEAR(entropy_power(f, 1.0) / (4.0 * pi * std::exp(1.0) * t), 1.0, 1e-3);
    EXPECT_NEAR(shannon_entropy(f), 0.5 * std::log(4.0 * pi * std::exp(1.0) * t), 1e-6);
    EXPECT_NEAR(shannon_fisher(f), 1.0 / (2.0 * t), 1e-3 / (2.0 * t));
  }
}

TEST(EntropyPower, BarenblattDefinition) {
  const auto f = sampled_barenblatt(2.0, 1, 1024);
  EXPECT_NEAR(entropy_power(f, 2.0), std::exp(3.0 * renyi_entropy(f, 2.0)), 1e-12 * entropy_power(f, 2.0));
}

TEST(Fisher, BarenblattValue) {
  EXPECT_NEAR(fisher_p(sampled_barenblatt(2.0, 1, 4096), 2.0).I, 4.0, 4e-3);
}

TEST(Fisher, TranslationByOneCell) {
  const Grid g = Grid::cartesian_symmetric(1024, 12.0);
  const auto f = two_bump_mixture(g, 3);
  std::vector<double> shifted(f.size(), 0.0);
  for (std::size_t i = 0; i + 1 < f.size(); ++i) shifted[i + 1] = f[i];
  const DensityField fs(g, shifted);
  for (double p : {0.8, 1.0, 1.5, 2.0}) EXPECT_NEAR(fisher_p(fs, p).I / fisher_p(f, p).I, 1.0, 1e-10) << "p = " << p;
}

TEST(Fisher, EmptySupportThrows) {
  const Grid g = Grid::cartesian_symmetric(8, 1.0);
  std::vector<double> v(8, 0.0);
  v[3] = 1.0;
  const DensityField spike(g, v);
  EXPECT_NO_THROW(fisher_p(spike, 2.0));
  EXPECT_THROW(fisher_p(spike, -2.0), DomainError);
}

TEST(Shannon, LimitOfRenyi) {
  const Grid g = Grid::cartesian_symmetric(2048, 15.0);
  const auto f = gaussian_mixture(g, 11);
  const double H = shannon_entropy(f);
  double K = 0.0;
  for (double d : {1e-3, 1e-4}) {
    const double diff = std::max(std::abs(renyi_entropy(f, 1.0 + d) - H), std::abs(renyi_entropy(f, 1.0 - d) - H));
    EXPECT_LT(diff, 1e-3);
    if (d == 1e-3) K = 1.01 * diff / d;
    else EXPECT_LE(diff, K * d);
  }
}

TEST(EpIntegral, ExamplesAndConsistency) {
  EXPECT_NEAR(e_p_integral(uniform_field(2.5, 128), 2.0), 1.0 / 5.0, 1e-14);
  const auto spec = barenblatt_spec(2.0, 1);
  // int B^2 = 2p/((n+2)p-n) C_p = (4/5) C_p at p = 2, n = 1
  EXPECT_NEAR(e_p_integral(sampled_barenblatt(2.0, 1, 8192), 2.0), 0.8 * spec.C_p, 1e-6);
  const Grid g = Grid::cartesian_symmetric(512, 10.0);
  for (const auto& f : random_fields(g, 50))
    for (double p : {0.7, 1.5, 2.0}) {
      const double E = e_p_integral(f, p);
      EXPECT_NEAR(std::log((p - 1.0) * E) / (1.0 - p), renyi_entropy(f, p), 1e-12);
    }
  EXPECT_THROW(e_p_integral(uniform_field(1.0, 16), 1.0), DomainError);
}

TEST(Dissipation, NonnegativeAndTraceBound) {
  const Grid line = Grid::cartesian_symmetric(512, 10.0);
  const Grid ball = Grid::radial(3, 512, 8.0);
  for (const Grid& g : {line, ball})
    for (const auto& f : random_fields(g, 10)) {
      for (double p : {1.0, 1.5, 2.0}) EXPECT_GE(d_p(f, p).D, 0.0);
      for (double p : {0.8, 0.9, 1.5, 2.0}) {
        const auto d = d_p(f, p);
        EXPECT_GE(d.D - d.trace_lower_bound, -1e-12 * std::abs(d.D)) << "p = " << p;
      }
    }
}

TEST(Dissipation, NodewiseTraceInequality) {
  // |D^2 g|^2 = g''^2 + (n-1) s^2 >= (g'' + (n-1) s)^2 / n for any pair (g'', s)
  SeededUniform draw(5);
  for (int n = 2; n <= 6; ++n)
    for (int k = 0; k < 1000; ++k) {
      const double a = draw(-10.0, 10.0), s = draw(-10.0, 10.0);
      const double hess2 = a * a + (n - 1) * s * s;
      const double lap = a + (n - 1) * s;
      EXPECT_GE(hess2 - lap * lap / n, -1e-12 * hess2);
    }
}

TEST(Upsilon, DilationInvariance) {
  const Grid g = Grid::radial(2, 1024, 10.0);
  const auto f = gaussian_mixture(g, 21);
  for (double p : {0.8, 1.5, 2.0})
    for (double a : {0.5, 2.0, 10.0}) EXPECT_NEAR(upsilon(rescale(f, a), p) / upsilon(f, p), 1.0, 1e-6);
}

TEST(Upsilon, BarenblattEqualsGamma) {
  EXPECT_NEAR(upsilon(sampled_barenblatt(2.0, 1, 4096), 2.0) / gamma_const(2.0, 1), 1.0, 1e-4);
  EXPECT_NEAR(upsilon(sampled_barenblatt(1.5, 2, 4096), 1.5) / gamma_const(1.5, 2), 1.0, 1e-4);
}

TEST(Upsilon, MixturesAboveGamma) {
  const Grid g = Grid::cartesian_symmetric(2048, 15.0);
  for (const auto& f : random_fields(g, 10))
    for (double p : {0.8, 1.5, 2.0}) EXPECT_GE(upsilon(f, p), gamma_const(p, 1) * (1.0 - 1e-3));
}

TEST(Rescale, IdentityMassAndShift) {
  const Grid g = Grid::radial(3, 256, 6.0);
  const auto f = gaussian_mixture(g, 4);
  const auto same = rescale(f, 1.0);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(same[i], f[i]);
  EXPECT_NEAR(mass(rescale(f, 3.0)), mass(f), 1e-12);
  EXPECT_NEAR(renyi_entropy(rescale(f, 3.0), 1.5) - renyi_entropy(f, 1.5), 3.0 * std::log(3.0), 1e-8);
  EXPECT_THROW(rescale(f, 0.0), DomainError);
  EXPECT_THROW(rescale(f, -2.0), DomainError);
}

TEST(Rescale, DilationSuite) {
  const Grid line = Grid::cartesian_symmetric(512, 10.0);
  const Grid ball = Grid::radial(3, 512, 8.0);
  for (const Grid& g : {line, ball}) {
    const int n = g.dimension();
    for (const auto& f : random_fields(g, 20))
      for (double p : {0.8, 1.5, 2.0}) {
        const double mu = coefficients(p, n).mu;
        for (double a : {0.25, 0.5, 2.0, 4.0}) {
          const auto fa = rescale(f, a);
          EXPECT_NEAR(renyi_entropy(fa, p) - renyi_entropy(f, p), n * std::log(a), 1e-8);
          EXPECT_NEAR(entropy_power(fa, p) / entropy_power(f, p) / std::pow(a, mu), 1.0, 1e-6);
          EXPECT_NEAR(fisher_p(fa, p).I / fisher_p(f, p).I / std::pow(a, -mu), 1.0, 1e-6);
          EXPECT_NEAR(upsilon(fa, p) / upsilon(f, p), 1.0, 1e-6);
        }
      }
  }
}

TEST(SelfSimilarRescale, InvertsTheSourceSolution) {
  const auto spec = barenblatt_spec(2.0, 1, BarenblattConvention::section2);
  const double t = 8.0;
  const Grid g = Grid::cartesian_symmetric(1000, 10.0);
  const auto u = DensityField::sample(g, [&](double x) { return barenblatt_self_similar(std::abs(x), t, spec); });
  const auto U = self_similar_rescale(u, t, 2.0);
  for (std::size_t i = 0; i < U.size(); i += 37)
    EXPECT_NEAR(U[i], barenblatt_profile(U.grid().radius(i), spec), 1e-12);
  EXPECT_NEAR(upsilon(U, 2.0) / upsilon(u, 2.0), 1.0, 1e-10);
  const auto same = self_similar_rescale(u, 1.0, 2.0);
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_EQ(same[i], u[i]);
  EXPECT_THROW(self_similar_rescale(u, 0.0, 2.0), DomainError);
}

TEST(GagliardoNirenberg, FormsAgree) {
  const Grid g = Grid::cartesian_symmetric(1024, 12.0);
  for (const auto& f : random_fields(g, 50))
    for (double p : {0.8, 1.5, 2.0}) {
      const auto gn = gn_lhs_rhs(f, p);
      EXPECT_TRUE(gn.forms_agree);
      EXPECT_EQ(gn.lhs >= gn.rhs, upsilon(f, p) >= gamma_const(p, 1));
    }
}

TEST(GagliardoNirenberg, BarenblattEquality) {
  const auto gn = gn_lhs_rhs(sampled_barenblatt(2.0, 1, 4096), 2.0);
  EXPECT_NEAR(gn.lhs / gn.rhs, 1.0, 1e-4);
}

TEST(GagliardoNirenberg, SobolevIndexRightSideIsConstant) {
  const Grid g = Grid::radial(3, 512, 10.0);
  const double gamma = gamma_const(2.0 / 3.0, 3);
  for (const auto& f : random_fields(g, 3)) EXPECT_DOUBLE_EQ(gn_lhs_rhs(f, 2.0 / 3.0).rhs, gamma);
}

TEST(SobolevPair, ExtremalAndBumps) {
  const int n = 3;
  const auto s = barenblatt_spec((n - 1.0) / n, n);
  const Grid g = Grid::radial(n, 1 << 18, 4000.0 * std::sqrt(s.C_p));
  const auto ext = DensityField::sample(g, [&](double r) { return std::pow(barenblatt_profile(r, s), 1.0 / 6.0); });
  const auto pair = sobolev_pair(ext, n);
  EXPECT_NEAR(pair.dirichlet / pair.sobolev_rhs, 1.0, 1e-3);
  EXPECT_LT(pair.identity_mismatch, 1e-4);
  EXPECT_NEAR(pair.substitution_factor, 16.0, 1e-14);

  const Grid gb = Grid::radial(n, 4096, 8.0);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto bump = gaussian_mixture(gb, seed);
    const auto b = sobolev_pair(bump, n);
    EXPECT_GE(b.dirichlet, b.sobolev_rhs);
    EXPECT_LT(b.identity_mismatch, 1e-3);
    // g -> 2g scales both sides by 4
    std::vector<double> doubled(bump.values().begin(), bump.values().end());
    for (double& v : doubled) v *= 2.0;
    const auto b2 = sobolev_pair(DensityField(gb, doubled), n);
    EXPECT_NEAR(b2.dirichlet / b.dirichlet, 4.0, 1e-12);
    EXPECT_NEAR(b2.sobolev_rhs / b.sobolev_rhs, 4.0, 1e-12);
  }
  EXPECT_THROW(sobolev_pair(DensityField(Grid::radial(2, 16, 1.0), std::vector<double>(16, 1.0)), 2), DomainError);
}

TEST(Snapshot, InternalConsistency) {
  const Grid g = Grid::radial(2, 512, 10.0);
  for (const auto& f : random_fields(g, 5))
    for (double p : {0.8, 1.0, 1.5, 2.0}) {
      const auto s = snapshot(f, p, 0.5, true);
      const double nu = coefficients(p, 2).nu;
      EXPECT_NEAR(s.N_p, std::exp(nu * s.H_p), 1e-12 * s.N_p);
      const double integral = p == 1.0 ? mass(f) : power_integral(f, p);
      EXPECT_NEAR(s.I_p, s.F_p / integral, 1e-12 * s.I_p);
      EXPECT_NEAR(s.upsilon, s.N_p * s.I_p, 1e-12 * s.upsilon);
      EXPECT_TRUE(s.D_p.has_value());
      EXPECT_EQ(std::isnan(s.E_p), p == 1.0);
    }
}

TEST(Quadrature, ConvergesUnderRefinement) {
  // support boundary on a cell face: radius 2 sqrt(C) on a symmetric grid, N multiple of 4
  for (double p : {1.5, 2.0}) {
    const auto spec = barenblatt_spec(p, 1);
    const double L = 2.0 * std::sqrt(spec.C_p);
    double prev_H = 0.0, prev_I = 0.0;
    for (std::size_t N : {256u, 512u, 1024u}) {
      const auto f = DensityField::sample(Grid::cartesian_symmetric(N, L),
                                          [&](double x) { return barenblatt_profile(std::abs(x), spec); });
      const double eH = std::abs(renyi_entropy(f, p) - barenblatt_entropy(spec));
      const double eI = std::abs(fisher_p(f, p).I - barenblatt_fisher(spec));
      if (N > 256) {
        EXPECT_GE(prev_H / eH, 2.0) << "p = " << p << " N = " << N;
        EXPECT_GE(prev_I / eI, 2.0) << "p = " << p << " N = " << N;
      }
      prev_H = eH;
      prev_I = eI;
    }
  }
}
