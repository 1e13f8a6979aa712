#include <gtest/gtest.h>

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <limits>
#include <cmath>

#include "boundstate/spectral_analysis.hpp"

namespace bs = boundstate;

namespace {
const bs::PhysicalConstants pc;
}

TEST(GammaZ, FrozenValues) {
  EXPECT_NEAR(bs::gamma_Z(118.0), 0.508457, 5e-7);
  EXPECT_NEAR(bs::gamma_Z(1.0), 0.9999733732, 1e-9);
  EXPECT_NEAR(bs::gamma_Z(1e-8), 1.0, 1e-15);
  EXPECT_THROW(bs::gamma_Z(pc.c), std::invalid_argument);
  EXPECT_THROW(bs::gamma_Z(0.0), std::invalid_argument);
}

TEST(GammaZ, MonotoneDecreasing) {
  double prev = 1.0;
  for (double Z = 1.0; Z < 137.0; Z += 4.0) {
    const double g = bs::gamma_Z(Z);
    EXPECT_LT(g, prev);
    EXPECT_GT(g, 0.0);
    prev = g;
  }
}

TEST(CuspFourier, GammaOneIsTransformOfExponential) {
  for (double p : {1e-3, 0.1, 0.5, 1.0, 2.0, 10.0, 1e3}) {
    const double exact = 8.0 * bs::kPi / std::pow(1.0 + p * p, 2);
    // sin(2 atan p) loses a few digits to cancellation at large p
    EXPECT_NEAR(bs::cusp_fourier_gamma(p, 1.0), exact, 1e-12 * exact) << p;
  }
  EXPECT_THROW(bs::cusp_fourier_gamma(0.0, 1.0), std::invalid_argument);
}

TEST(CuspFourier, LargeMomentumLeadingTerm) {
  const double g = bs::gamma_Z(118.0);
  const double p = 1e3;
  const double scaled = bs::cusp_fourier(p, 118.0) * p * std::pow(1.0 + p * p, (1.0 + g) / 2.0);
  const double limit = 4.0 * bs::kPi * std::tgamma(1.0 + g) * std::sin((1.0 + g) * bs::kPi / 2.0);
  EXPECT_NEAR(scaled / limit, 1.0, 1e-2);
}

TEST(CuspFourier, MatchesRadialQuadrature) {
  const double Z = 118.0;
  const double g = bs::gamma_Z(Z);
  const double p = 2.0;
  // (4 pi / p) int_0^inf e^{-r} r^gamma sin(p r) dr, on panels of one period
  boost::math::quadrature::exp_sinh<double> integrator;
  const double period = 2.0 * bs::kPi / p;
  double acc = 0.0;
  for (int k = 0; k < 40; ++k) {
    const double a = k * period;
    acc += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double r) { return std::exp(-r) * std::pow(r, g) * std::sin(p * r); }, a, a + period, 15, 1e-14);
  }
  acc += integrator.integrate([&](double r) { return std::exp(-r) * std::pow(r, g) * std::sin(p * r); },
                              40.0 * period, std::numeric_limits<double>::infinity());
  const double oracle = 4.0 * bs::kPi / p * acc;
  EXPECT_NEAR(bs::cusp_fourier(p, Z), oracle, 1e-6 * std::abs(oracle));
}

TEST(HsNorm, AnalyticFrozenValue) {
  EXPECT_NEAR(bs::hs_norm_analytic(0.5, 1.0), 2.0 * std::sqrt(2.0) * bs::kPi, 1e-12);
  EXPECT_NEAR(bs::hs_norm_analytic(0.5, 1.0), 8.885766, 1e-6);
  EXPECT_THROW(bs::hs_norm_analytic(0.0, 1.0), std::invalid_argument);
}

TEST(HsNorm, AnalyticKappaScaling) {
  for (double d : {0.125, 0.25, 0.5}) {
    for (double k : {0.5, 2.0, 7.0}) {
      EXPECT_NEAR(bs::hs_norm_analytic(d, k) / bs::hs_norm_analytic(d, 1.0), std::pow(k, -2.0 * d), 1e-14);
    }
  }
}

TEST(HsNorm, AnalyticSmallDeltaDivergence) {
  // sqrt(delta) * value -> pi^2 as delta -> 0
  double prev_gap = std::numeric_limits<double>::infinity();
  for (double d : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const double scaled = std::sqrt(d) * bs::hs_norm_analytic(d, 1.0);
    const double gap = std::abs(scaled - bs::kPi * bs::kPi);
    EXPECT_LT(gap, prev_gap);
    prev_gap = gap;
  }
  EXPECT_LT(prev_gap, 1e-2);
}

TEST(HsNorm, NumericMatchesAnalyticOnGrid) {
  for (double d : {0.125, 0.25, 0.5}) {
    for (double k : {0.5, 1.0, 2.0}) {
      const auto q = bs::hs_norm_numeric(d, k);
      EXPECT_TRUE(q.converged) << d << " " << k;
      EXPECT_NEAR(q.value / bs::hs_norm_analytic(d, k), 1.0, 1e-3) << d << " " << k;
    }
  }
}

TEST(HsNorm, NumericKappaScaling) {
  const double ratio = bs::hs_norm_numeric(0.25, 2.0).value / bs::hs_norm_numeric(0.25, 1.0).value;
  EXPECT_NEAR(ratio, std::pow(2.0, -0.5), 1e-3);
}

TEST(HsNorm, MonteCarloAgreesWithAngularReduction) {
  const double reduced = std::pow(bs::hs_norm_numeric(0.5, 1.0).value, 2);
  const auto mc = bs::hs_norm_squared_monte_carlo(0.5, 1.0, 2000000, 12345);
  EXPECT_LT(std::abs(mc.mean - reduced), 3.0 * mc.standard_error);
  EXPECT_LT(mc.standard_error, 1e-2 * reduced);
}

TEST(OperatorBounds, RandomSpinorsRespectBounds) {
  const double kappa = 0.99999334;
  const double E = pc.rest_energy() - 0.5;
  const auto samples = bs::random_momentum_spinors(1000, 8, kappa, 2024);
  const auto rep = bs::operator_bounds_check(kappa, E, samples);
  EXPECT_EQ(rep.samples, 1000u);
  EXPECT_TRUE(rep.ok());
  EXPECT_LE(rep.off_diagonal_max_ratio, rep.off_diagonal_bound * (1.0 + 1e-12));
  EXPECT_GT(rep.off_diagonal_max_ratio, 0.9 * rep.off_diagonal_bound);
  EXPECT_LE(rep.diagonal_max_ratio, rep.diagonal_bound * (1.0 + 1e-12));
  EXPECT_THROW(bs::operator_bounds_check(0.0, E, samples), std::invalid_argument);
}

TEST(OperatorBounds, OffDiagonalVanishesAtZeroMomentum) {
  bs::MomentumSpinor u;
  u.momenta.push_back({0.0, 0.0, 0.0});
  u.values.push_back({1.0, 0.5, -0.25, 2.0});
  const auto rep = bs::operator_bounds_check(1.0, pc.rest_energy() - 0.5, {u});
  EXPECT_EQ(rep.off_diagonal_max_ratio, 0.0);
  EXPECT_EQ(bs::off_diagonal_ratio_at(0.0, 1.0), 0.0);
}

TEST(OperatorBounds, OffDiagonalSaturatesAtLargeMomentum) {
  const double bound = 1.0 / (pc.hbar * pc.c);
  double prev = 0.0;
  for (double p : {1.0, 1e2, 1e4, 1e8}) {
    const double r = bs::off_diagonal_ratio_at(p, 1.0);
    EXPECT_GT(r, prev);
    EXPECT_LE(r, bound);
    prev = r;
  }
  EXPECT_NEAR(prev / bound, 1.0, 1e-15);

  bs::MomentumSpinor u;
  u.momenta.push_back({0.0, 6e7, 8e7});
  u.values.push_back(std::array<std::complex<double>, 4>{{{0.3, 0.1}, {-1.0, 0.0}, {0.0, 0.7}, {0.2, -0.2}}});
  const auto rep = bs::operator_bounds_check(1.0, pc.rest_energy() - 0.5, {u});
  EXPECT_NEAR(rep.off_diagonal_max_ratio / bound, 1.0, 1e-15);
}

TEST(ProductSpectrum, ReferenceExamples) {
  const auto rep = bs::product_spectrum_examples();
  ASSERT_EQ(rep.two_by_two.eigenvalues.size(), 2u);
  double im_sum = 0.0;
  for (const auto& z : rep.two_by_two.eigenvalues) {
    EXPECT_EQ(z.real(), 0.0);
    EXPECT_EQ(std::abs(z.imag()), 1.0);
    im_sum += z.imag();
  }
  EXPECT_EQ(im_sum, 0.0);
  for (double b : rep.two_by_two.b_form_min) EXPECT_LT(b, 1e-14);

  std::vector<double> re;
  for (const auto& z : rep.three_by_three.eigenvalues) {
    EXPECT_EQ(z.imag(), 0.0);
    re.push_back(z.real());
  }
  std::sort(re.begin(), re.end());
  EXPECT_NEAR(re[0], -1.0, 1e-15);
  EXPECT_NEAR(re[1], -1.0, 1e-15);
  EXPECT_NEAR(re[2], 1.0, 1e-15);
  for (double b : rep.three_by_three.b_form_min) EXPECT_GT(b, 0.5);
}

TEST(ProductSpectrum, PositiveDefiniteBGivesRealSpectrum) {
  const auto s = bs::product_spectrum({2.0, -3.0, -3.0, 0.5}, {1.0, 0.0, 0.0, 1.0}, 2, "identity");
  for (const auto& z : s.eigenvalues) EXPECT_EQ(z.imag(), 0.0);
  const auto t = bs::product_spectrum({2.0, -3.0, -3.0, 0.5}, {4.0, 1.0, 1.0, 3.0}, 2, "spd");
  for (const auto& z : t.eigenvalues) EXPECT_EQ(z.imag(), 0.0);
  EXPECT_THROW(bs::product_spectrum({1.0}, {1.0, 0.0}, 1, "bad"), std::invalid_argument);
}

TEST(Integrability, ThresholdAtGammaMinusHalf) {
  const auto below = bs::integrability_trend(1.0, 0.25, 1.0);
  EXPECT_TRUE(below.converges);
  EXPECT_LT(below.final_ratio, 0.9);
  const auto above = bs::integrability_trend(1.0, 0.75, 1.0);
  EXPECT_FALSE(above.converges);
  EXPECT_GT(above.final_ratio, 1.0);
  for (std::size_t k = 1; k < above.partial_integrals.size(); ++k) {
    EXPECT_GT(above.partial_integrals[k], above.partial_integrals[k - 1]);
  }
}

TEST(Integrability, PartialIntegralsAreAdditive) {
  const double whole = bs::weighted_tail_integral(1.0, 0.25, 1.0, 1.0, 1e6);
  const double split =
      bs::weighted_tail_integral(1.0, 0.25, 1.0, 1.0, 1e3) + bs::weighted_tail_integral(1.0, 0.25, 1.0, 1e3, 1e6);
  EXPECT_NEAR(whole, split, 1e-12 * whole);
  EXPECT_THROW(bs::weighted_tail_integral(1.0, 0.25, 1.0, 2.0, 1.0), std::invalid_argument);
}
