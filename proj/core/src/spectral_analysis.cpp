#include "boundstate/spectral_analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <random>
#include <stdexcept>

namespace boundstate {

namespace {

using boost::math::quadrature::gauss_kronrod;
using boost::math::quadrature::tanh_sinh;

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::array<double, 3> unit_vector(std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::array<double, 3> v{};
  double n2 = 0.0;
  while (n2 < 1e-24) {
    for (auto& x : v) x = normal(rng);
    n2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
  }
  const double s = 1.0 / std::sqrt(n2);
  for (auto& x : v) x *= s;
  return v;
}

}  // namespace

double gamma_Z(double Z, const PhysicalConstants& pc) {
  if (!(Z > 0.0 && Z < pc.c)) throw std::invalid_argument("gamma(Z) needs 0 < Z < c");
  const double x = Z / pc.c;
  return std::sqrt((1.0 - x) * (1.0 + x));
}

double cusp_fourier_gamma(double p, double gamma) {
  if (!(p > 0.0)) throw std::invalid_argument("cusp transform needs p > 0");
  return 4.0 * kPi / p * std::tgamma(1.0 + gamma) * std::sin((1.0 + gamma) * std::atan(p)) /
         std::pow(1.0 + p * p, 0.5 + gamma / 2.0);
}

double cusp_fourier(double p, double Z, const PhysicalConstants& pc) {
  return cusp_fourier_gamma(p, gamma_Z(Z, pc));
}

double hs_norm_analytic(double delta, double kappa) {
  if (!(delta > 0.0 && kappa > 0.0)) throw std::invalid_argument("hs_norm_analytic needs delta, kappa > 0");
  return std::pow(kappa, -2.0 * delta) * std::tgamma(0.5 + delta) / std::tgamma(1.0 + delta) *
         std::pow(kPi, 1.5) / std::sqrt(delta);
}

QuadratureResult hs_norm_numeric(double delta, double kappa, double tolerance) {
  if (!(delta > 0.0 && kappa > 0.0)) throw std::invalid_argument("hs_norm_numeric needs delta, kappa > 0");
  const auto f = [&](double p) { return std::pow(kappa * kappa + p * p, -1.0 - delta); };
  tanh_sinh<double> integrator;

  // Symmetric in (p, p'): twice the region p' = t p with t < 1.
  const auto squared_norm = [&](double tol) {
    const auto inner = [&](double p) {
      const auto g = [&](double t, double tc) {
        const double one_minus_t = (t > 0.5 && tc > 0.0) ? tc : 1.0 - t;
        return t * f(p * t) * std::log((1.0 + t) / one_minus_t);
      };
      return integrator.integrate(g, 0.0, 1.0, tol);
    };
    // p = kappa u / (1 - u)
    const auto outer = [&](double u, double uc) {
      const double one_minus_u = (u > 0.5 && uc > 0.0) ? uc : 1.0 - u;
      if (!(one_minus_u > 0.0)) return 0.0;
      const double p = kappa * u / one_minus_u;
      const double jac = kappa / (one_minus_u * one_minus_u);
      const double weight = jac * p * p * p * f(p);
      if (!(weight > 0.0) || !std::isfinite(weight)) return 0.0;
      return weight * inner(p);
    };
    return 2.0 * 8.0 * kPi * kPi * integrator.integrate(outer, 0.0, 1.0, tol);
  };
  // error estimate from a second pass at a looser tolerance
  const double fine = std::sqrt(squared_norm(tolerance));
  const double coarse = std::sqrt(squared_norm(std::sqrt(tolerance)));
  const double err = std::abs(fine - coarse);
  return {fine, err, err < 1e-6 * fine};
}

MonteCarloEstimate hs_norm_squared_monte_carlo(double delta, double kappa, std::uint64_t samples,
                                               std::uint64_t seed) {
  if (samples < 2) throw std::invalid_argument("Monte-Carlo needs at least two samples");
  // p / kappa has radial density proportional to p^2 (1 + p^2)^{-2}; the
  // offset s = p' - p has |s| / kappa Pareto distributed with index 1/2 so
  // that its density cancels the 1/|p - p'|^2 singularity.
  constexpr double kRadialNorm = kPi * kPi;  // int d^3x (1 + x^2)^{-2}
  constexpr double kPareto = 0.5;
  std::mt19937_64 rng(seed);
  std::gamma_distribution<double> g_a(1.5, 1.0);
  std::gamma_distribution<double> g_b(0.5, 1.0);
  const auto f = [&](double p2) { return std::pow(kappa * kappa + p2, -1.0 - delta); };
  const double k3 = kappa * kappa * kappa;

  double mean = 0.0;
  double m2 = 0.0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const double ga = g_a(rng);
    const double gb = g_b(rng);
    const double x = ga / (ga + gb);
    const double pm = std::sqrt(x / (1.0 - x));
    const auto up = unit_vector(rng);
    const double u = uniform01(rng);
    const double sm = std::pow(1.0 - u, -1.0 / kPareto) - 1.0;
    const auto us = unit_vector(rng);
    if (!(sm > 0.0) || !std::isfinite(pm)) {
      --i;
      continue;
    }
    std::array<double, 3> p{};
    std::array<double, 3> q{};
    for (int d = 0; d < 3; ++d) {
      p[d] = kappa * pm * up[d];
      q[d] = p[d] + kappa * sm * us[d];
    }
    const double p2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
    const double q2 = q[0] * q[0] + q[1] * q[1] + q[2] * q[2];
    const double s2 = kappa * kappa * sm * sm;
    const double density_p = std::pow(1.0 + pm * pm, -2.0) / kRadialNorm / k3;
    const double density_s = kPareto * std::pow(1.0 + sm, -1.0 - kPareto) / (4.0 * kPi * sm * sm) / k3;
    const double w = f(p2) * f(q2) / s2 / (density_p * density_s);
    const double delta_mean = w - mean;
    mean += delta_mean / static_cast<double>(i + 1);
    m2 += delta_mean * (w - mean);
  }
  const double var = m2 / static_cast<double>(samples - 1);
  return {mean, std::sqrt(var / static_cast<double>(samples))};
}

std::vector<MomentumSpinor> random_momentum_spinors(std::size_t count, std::size_t nodes_per_spinor,
                                                    double kappa, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<MomentumSpinor> out(count);
  for (auto& s : out) {
    for (std::size_t k = 0; k < nodes_per_spinor; ++k) {
      // |p| log-uniform over 1e-3 .. 1e8 kappa
      const double mag = kappa * std::pow(10.0, -3.0 + 11.0 * uniform01(rng));
      const auto dir = unit_vector(rng);
      s.momenta.push_back({mag * dir[0], mag * dir[1], mag * dir[2]});
      std::array<std::complex<double>, 4> v{};
      for (auto& c : v) c = {normal(rng), normal(rng)};
      s.values.push_back(v);
    }
  }
  return out;
}

double off_diagonal_ratio_at(double p, double kappa, const PhysicalConstants& pc) {
  return p / (pc.hbar * pc.c * std::sqrt(kappa * kappa + p * p));
}

OperatorBoundsReport operator_bounds_check(double kappa, double E, const std::vector<MomentumSpinor>& samples,
                                           const PhysicalConstants& pc) {
  if (!(kappa > 0.0)) throw std::invalid_argument("operator bounds need kappa > 0");
  const double hc = pc.hbar * pc.c;
  const double dL = pc.m / (pc.hbar * pc.hbar) + E / (hc * hc);
  const double dS = -pc.m / (pc.hbar * pc.hbar) + E / (hc * hc);
  constexpr double kSlack = 1e-12;

  OperatorBoundsReport rep;
  rep.samples = samples.size();
  rep.off_diagonal_bound = 1.0 / hc;
  rep.diagonal_bound = std::max(std::abs(dL), std::abs(dS)) / kappa;
  rep.printed_diagonal_bound = std::sqrt(E / (hc * hc * kappa * kappa) + pc.m / (pc.c * pc.c * kappa * kappa));

  for (const auto& s : samples) {
    double u2 = 0.0;
    double o2 = 0.0;
    double d2 = 0.0;
    for (std::size_t k = 0; k < s.momenta.size(); ++k) {
      const auto& p = s.momenta[k];
      const auto& v = s.values[k];
      const double pn2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
      const double g = 1.0 / std::sqrt(kappa * kappa + pn2);
      const std::complex<double> pm(p[0], -p[1]);
      const std::complex<double> pp(p[0], p[1]);
      const std::array<std::complex<double>, 4> ov{
          g / hc * (p[2] * v[2] + pm * v[3]), g / hc * (pp * v[2] - p[2] * v[3]),
          g / hc * (p[2] * v[0] + pm * v[1]), g / hc * (pp * v[0] - p[2] * v[1])};
      const std::array<std::complex<double>, 4> dv{g * dL * v[0], g * dL * v[1], g * dS * v[2], g * dS * v[3]};
      for (int c = 0; c < 4; ++c) {
        u2 += std::norm(v[c]);
        o2 += std::norm(ov[c]);
        d2 += std::norm(dv[c]);
      }
    }
    if (!(u2 > 0.0)) continue;
    const double ro = std::sqrt(o2 / u2);
    const double rd = std::sqrt(d2 / u2);
    rep.off_diagonal_max_ratio = std::max(rep.off_diagonal_max_ratio, ro);
    rep.diagonal_max_ratio = std::max(rep.diagonal_max_ratio, rd);
    if (ro > rep.off_diagonal_bound * (1.0 + kSlack)) ++rep.off_diagonal_violations;
    if (rd > rep.diagonal_bound * (1.0 + kSlack)) ++rep.diagonal_violations;
    if (rd > rep.printed_diagonal_bound * (1.0 + kSlack)) ++rep.printed_diagonal_exceedances;
  }
  return rep;
}

ProductSpectrum product_spectrum(const std::vector<double>& A, const std::vector<double>& B, std::size_t n,
                                 const std::string& name) {
  if (A.size() != n * n || B.size() != n * n) throw std::invalid_argument("matrix size mismatch");
  const auto dim = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd a(dim, dim);
  Eigen::MatrixXd b(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      a(i, j) = A[static_cast<std::size_t>(i * dim + j)];
      b(i, j) = B[static_cast<std::size_t>(i * dim + j)];
    }
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(a * b);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed for " + name);
  const Eigen::VectorXcd vals = es.eigenvalues();
  const Eigen::MatrixXcd vecs = es.eigenvectors();
  const Eigen::MatrixXcd bc = b.cast<std::complex<double>>();

  ProductSpectrum out;
  out.name = name;
  std::vector<bool> used(n, false);
  for (std::size_t i = 0; i < n; ++i) out.eigenvalues.push_back(vals(static_cast<Eigen::Index>(i)));
  for (std::size_t i = 0; i < n; ++i) {
    if (used[i]) continue;
    std::vector<Eigen::Index> group;
    for (std::size_t j = i; j < n; ++j) {
      if (!used[j] && std::abs(vals(static_cast<Eigen::Index>(j)) - vals(static_cast<Eigen::Index>(i))) < 1e-10) {
        used[j] = true;
        group.push_back(static_cast<Eigen::Index>(j));
      }
    }
    Eigen::MatrixXcd X(dim, static_cast<Eigen::Index>(group.size()));
    for (std::size_t g = 0; g < group.size(); ++g) X.col(static_cast<Eigen::Index>(g)) = vecs.col(group[g]).normalized();
    const Eigen::MatrixXcd gram = X.adjoint() * bc * X;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(gram);
    out.b_form_min.push_back(svd.singularValues().minCoeff());
  }
  return out;
}

ProductSpectrumReport product_spectrum_examples() {
  ProductSpectrumReport rep{
      product_spectrum({0, 1, 1, 0}, {1, 0, 0, -1}, 2, "2x2"),
      product_spectrum({0, 1, 0, 1, 0, 0, 0, 0, 1}, {1, 0, 0, 0, 1, 0, 0, 0, -1}, 3, "3x3"),
  };
  return rep;
}

double weighted_tail_integral(double Z, double delta, double kappa, double p_lo, double p_hi,
                              const PhysicalConstants& pc) {
  if (!(p_lo > 0.0 && p_lo < p_hi)) throw std::invalid_argument("tail integral needs 0 < p_lo < p_hi");
  const double gamma = gamma_Z(Z, pc);
  // in log p, one Gauss-Kronrod panel per decade
  const auto integrand = [&](double s) {
    const double p = std::exp(s);
    const double psi = cusp_fourier_gamma(p, gamma);
    return psi * psi * std::pow(kappa * kappa + p * p, 1.0 + delta) * p * p * p;
  };
  const double lo = std::log(p_lo);
  const double hi = std::log(p_hi);
  const auto panels = static_cast<int>(std::ceil((hi - lo) / std::log(10.0)));
  const double width = (hi - lo) / panels;
  double acc = 0.0;
  for (int k = 0; k < panels; ++k) {
    acc += gauss_kronrod<double, 61>::integrate(integrand, lo + k * width, lo + (k + 1) * width, 10, 1e-12);
  }
  return acc;
}

TailTrend integrability_trend(double Z, double delta, double kappa, int decades, const PhysicalConstants& pc) {
  if (decades < 4) throw std::invalid_argument("integrability trend needs at least four decades");
  TailTrend t;
  double total = 0.0;
  double lower = 1.0;
  for (int k = 1; k <= decades; ++k) {
    const double upper = std::pow(10.0, k);
    total += weighted_tail_integral(Z, delta, kappa, lower, upper, pc);
    t.upper_limits.push_back(upper);
    t.partial_integrals.push_back(total);
    lower = upper;
  }
  const std::size_t n = t.partial_integrals.size();
  // an increment below roundoff of the total counts as a zero ratio
  const double floor = 1e-14 * std::abs(t.partial_integrals.back());
  std::vector<double> ratios;
  for (std::size_t k = n - 3; k < n; ++k) {
    const double inc = t.partial_integrals[k] - t.partial_integrals[k - 1];
    const double prev = t.partial_integrals[k - 1] - t.partial_integrals[k - 2];
    ratios.push_back(std::abs(inc) <= floor ? 0.0 : inc / std::max(prev, floor));
  }
  t.final_ratio = ratios.back();
  t.converges = std::all_of(ratios.begin(), ratios.end(), [](double r) { return r < 0.9; });
  return t;
}

}  // namespace boundstate
