#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "boundstate/constants.hpp"
#include "boundstate/kernel_expansion.hpp"

namespace bs = boundstate;

namespace {

// Independent evaluation of the step bound.
double step_oracle(double alpha, double eps) {
  return 2.0 * bs::kPi / (std::log(3.0) + 0.5 * alpha * std::log(1.0 / std::cos(1.0)) + std::log(1.0 / eps));
}

}  // namespace

TEST(StepSize, FrozenValues) {
  EXPECT_NEAR(bs::step_size(1.0, 1.0), 4.4676, 1e-3);
  EXPECT_NEAR(bs::step_size(1.0, 1e-3), 0.7557, 1e-3);
  EXPECT_NEAR(bs::step_size(1.0, 1e-6), step_oracle(1.0, 1e-6), 1e-14);
}

TEST(StepSize, MonotoneInAlphaAndPrecision) {
  for (double eps : {1.0, 1e-3, 1e-8}) {
    EXPECT_LT(bs::step_size(2.0, eps), bs::step_size(1.0, eps));
    EXPECT_LT(bs::step_size(1.0, eps * 1e-2), bs::step_size(1.0, eps));
  }
}

TEST(StepSize, RejectsBadDomain) {
  EXPECT_THROW(bs::step_size(0.0, 1e-3), std::invalid_argument);
  EXPECT_THROW(bs::step_size(1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(bs::step_size(1.0, 1.5), std::invalid_argument);
}

TEST(PowerSum, CertifiedOnWideRange) {
  const auto sum = bs::build_power_sum(1.0, 1e-6, 1e-6, 1e6);
  EXPECT_LE(bs::max_relative_error(sum, 20000), 1e-6);
  EXPECT_NEAR(bs::evaluate_sum(sum, 1.0), 1.0, 1e-6);
  EXPECT_NEAR(bs::evaluate_sum(sum, 1e-6) * 1e-6, 1.0, 1e-6);
}

TEST(PowerSum, TermInvariants) {
  const auto sum = bs::build_power_sum(1.0, 1e-8, 1e-4, 1e3);
  ASSERT_FALSE(sum.terms.empty());
  for (std::size_t k = 0; k < sum.terms.size(); ++k) {
    EXPECT_GT(sum.terms[k].weight, 0.0);
    EXPECT_GT(sum.terms[k].exponent, 0.0);
    if (k > 0) EXPECT_GT(sum.terms[k].exponent, sum.terms[k - 1].exponent);
  }
}

TEST(PowerSum, OtherExponents) {
  for (double alpha : {0.5, 2.0}) {
    const auto sum = bs::build_power_sum(alpha, 1e-6, 1e-3, 1e3);
    EXPECT_LE(bs::max_relative_error(sum), 1e-6) << alpha;
  }
}

TEST(PowerSum, TermCountLinearInRangeDecades) {
  const double eps = 1e-6;
  const auto base = bs::build_power_sum(1.0, eps, 1e-1, 1e1);
  const auto wide = bs::build_power_sum(1.0, eps, 1e-6, 1e6);
  const double per_decade = 2.0 / bs::step_size(1.0, eps) * std::log(10.0);
  const auto extra = static_cast<double>(wide.terms.size()) - static_cast<double>(base.terms.size());
  EXPECT_GT(extra, 0.0);
  EXPECT_LE(extra, 1.5 * per_decade * 10.0);
}

TEST(PowerSum, DeletingEdgeTermsBreaksCertificate) {
  const auto sum = bs::build_power_sum(1.0, 1e-6, 1e-6, 1e6);
  // smallest exponent carries the large-r tail
  auto no_wide = sum;
  no_wide.terms.erase(no_wide.terms.begin());
  EXPECT_GT(bs::max_relative_error(no_wide), 1e-6);
  auto no_narrow = sum;
  no_narrow.terms.pop_back();
  EXPECT_GT(bs::max_relative_error(no_narrow), 1e-6);
}

TEST(PowerSum, EmptySumHasUnitError) {
  auto sum = bs::build_power_sum(1.0, 1e-3, 1e-2, 1e2);
  sum.terms.clear();
  EXPECT_DOUBLE_EQ(bs::max_relative_error(sum), 1.0);
}

TEST(PowerSum, SinglePointRange) {
  auto sum = bs::build_power_sum(1.0, 1e-6, 1e-2, 1e2);
  const double r = 3.7;
  sum.d_lo = r;
  sum.d_hi = r;
  EXPECT_NEAR(bs::max_relative_error(sum), std::abs(bs::evaluate_sum(sum, r) * r - 1.0), 1e-15);
}

TEST(EvaluateSum, OriginAndMonotone) {
  const auto sum = bs::build_power_sum(1.0, 1e-6, 1e-3, 1e3);
  double total = 0.0;
  for (const auto& t : sum.terms) total += t.weight;
  EXPECT_DOUBLE_EQ(bs::evaluate_sum(sum, 0.0), total);
  double prev = bs::evaluate_sum(sum, 1e-4);
  for (double r = 2e-4; r < 1e4; r *= 1.7) {
    const double v = bs::evaluate_sum(sum, r);
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(HelmholtzSum, KappaOne) {
  const auto sum = bs::build_helmholtz_sum(1.0, 1e-6, 1e-6, 200.0);
  EXPECT_LE(bs::max_relative_error(sum, 20000), 1e-6);
  EXPECT_NEAR(bs::evaluate_sum(sum, 1.0), std::exp(-1.0) / (4.0 * bs::kPi), 1e-6 * 0.0293);
}

TEST(HelmholtzSum, KappaZeroMatchesCoulomb) {
  const double eps = 1e-6;
  const auto h = bs::build_helmholtz_sum(0.0, eps, 1e-4, 1e4);
  const auto p = bs::build_power_sum(1.0, eps, 1e-4, 1e4);
  EXPECT_NEAR(bs::evaluate_sum(h, 2.0), 1.0 / (8.0 * bs::kPi), eps / (8.0 * bs::kPi));
  for (double r = 1e-4; r <= 1e4; r *= 1.3) {
    const double hv = bs::evaluate_sum(h, r) * 4.0 * bs::kPi;
    const double pv = bs::evaluate_sum(p, r);
    EXPECT_LE(std::abs(hv - pv) / pv, 2.0 * eps) << r;
  }
}

TEST(HelmholtzSum, RadialSymmetry) {
  const auto sum = bs::build_helmholtz_sum(0.7, 1e-8, 1e-3, 50.0);
  const double a = bs::evaluate_sum(sum, std::hypot(1.0, 2.0, 2.0));
  const double b = bs::evaluate_sum(sum, std::hypot(3.0, 0.0, 0.0));
  EXPECT_DOUBLE_EQ(a, b);
}

TEST(GaussianSumIO, RoundTripIsExact) {
  const auto sum = bs::build_helmholtz_sum(1.3, 1e-6, 1e-3, 40.0);
  std::stringstream ss;
  bs::write_gaussian_sum(ss, sum);
  EXPECT_EQ(ss.str().rfind("# target=helmholtz", 0), 0u);
  const auto back = bs::read_gaussian_sum(ss);
  ASSERT_EQ(back.terms.size(), sum.terms.size());
  for (std::size_t k = 0; k < sum.terms.size(); ++k) {
    EXPECT_EQ(back.terms[k].weight, sum.terms[k].weight);
    EXPECT_EQ(back.terms[k].exponent, sum.terms[k].exponent);
  }
  EXPECT_EQ(back.epsilon, sum.epsilon);
  EXPECT_EQ(back.d_lo, sum.d_lo);
  EXPECT_EQ(back.d_hi, sum.d_hi);
}
