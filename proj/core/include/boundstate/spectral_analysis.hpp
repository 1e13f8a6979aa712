#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "boundstate/constants.hpp"

namespace boundstate {

/// sqrt(1 - (Z/c)^2) for 0 < Z < c.
double gamma_Z(double Z, const PhysicalConstants& pc = {});

/// Fourier transform of e^{-r} r^{gamma-1}:
/// (4 pi / p) Gamma(1+gamma) sin[(1+gamma) atan p] / (1+p^2)^{(1+gamma)/2}.
double cusp_fourier_gamma(double p, double gamma);
double cusp_fourier(double p, double Z, const PhysicalConstants& pc = {});

/// Hilbert-Schmidt norm of the weighted Green's operator:
/// kappa^{-2 delta} Gamma(1/2+delta) / Gamma(1+delta) pi^{3/2} / sqrt(delta).
double hs_norm_analytic(double delta, double kappa);

struct QuadratureResult {
  double value;
  double error_estimate;
  bool converged;
};

/// Squared norm from the angle-reduced 2D radial integral
/// 8 pi^2 int int p p' f(p) f(p') log|(p+p')/(p-p')| dp dp',
/// f(p) = (kappa^2 + p^2)^{-1-delta}; value is the norm (square root).
QuadratureResult hs_norm_numeric(double delta, double kappa, double tolerance = 1e-10);

struct MonteCarloEstimate {
  double mean;
  double standard_error;
};

/// Importance-sampled estimate of the squared norm as the full 6D integral
/// int int f(p) f(p') / |p - p'|^2 d^3p d^3p'.
MonteCarloEstimate hs_norm_squared_monte_carlo(double delta, double kappa, std::uint64_t samples,
                                               std::uint64_t seed);

/// A momentum-space spinor sampled on a finite set of momentum nodes.
struct MomentumSpinor {
  std::vector<std::array<double, 3>> momenta;
  std::vector<std::array<std::complex<double>, 4>> values;
};

std::vector<MomentumSpinor> random_momentum_spinors(std::size_t count, std::size_t nodes_per_spinor,
                                                    double kappa, std::uint64_t seed);

struct OperatorBoundsReport {
  std::size_t samples = 0;
  double off_diagonal_bound = 0.0;
  double off_diagonal_max_ratio = 0.0;
  std::size_t off_diagonal_violations = 0;
  /// sup over p of the diagonal symbol: max(|m/hbar^2 +- E/(hbar c)^2|) / kappa
  double diagonal_bound = 0.0;
  double diagonal_max_ratio = 0.0;
  std::size_t diagonal_violations = 0;
  /// (E/(hbar^2 c^2 kappa^2) + m/(c^2 kappa^2))^{1/2} as printed with the
  /// boundedness proof; not a valid upper bound (see README).
  double printed_diagonal_bound = 0.0;
  std::size_t printed_diagonal_exceedances = 0;

  bool ok() const { return off_diagonal_violations == 0 && diagonal_violations == 0; }
};

/// Ratios |O u| / |u| and |D u| / |u| for the split
/// (H0 + E) G^{1/2} / (hbar c)^2 = D + O, with slack 1e-12.
OperatorBoundsReport operator_bounds_check(double kappa, double E, const std::vector<MomentumSpinor>& samples,
                                           const PhysicalConstants& pc = {});

/// |O u| / |u| for u supported at a single momentum of magnitude p.
double off_diagonal_ratio_at(double p, double kappa, const PhysicalConstants& pc = {});

struct ProductSpectrum {
  std::string name;
  std::vector<std::complex<double>> eigenvalues;
  /// For each distinct eigenvalue, the smallest singular value of the Gram
  /// matrix X^H B X over its eigenvectors X; zero when the B-form vanishes.
  std::vector<double> b_form_min;
};

struct ProductSpectrumReport {
  ProductSpectrum two_by_two;
  ProductSpectrum three_by_three;
};

ProductSpectrumReport product_spectrum_examples();

/// Spectrum of A B for real square matrices given row-major.
ProductSpectrum product_spectrum(const std::vector<double>& A, const std::vector<double>& B, std::size_t n,
                                 const std::string& name);

/// int_{p_lo}^{p_hi} |cusp_fourier(p, Z)|^2 (kappa^2 + p^2)^{1+delta} p^2 dp.
double weighted_tail_integral(double Z, double delta, double kappa, double p_lo, double p_hi,
                              const PhysicalConstants& pc = {});

struct TailTrend {
  std::vector<double> upper_limits;
  std::vector<double> partial_integrals;
  /// Increment over the last decade divided by the one before it.
  double final_ratio = 0.0;
  bool converges = false;
};

/// Partial integrals over expanding upper limits 10^k, k = 1..decades.
TailTrend integrability_trend(double Z, double delta, double kappa, int decades = 30,
                              const PhysicalConstants& pc = {});

// Dense s-wave oracle for lambda u = -2 int g_mu(r, r') V(r') u(r') dr'.

struct RadialOracle {
  double r_max;
  std::size_t n_points;
  double mu;
  std::vector<double> r;
  std::vector<double> weights;
  std::vector<double> potential;

  RadialOracle(double r_max, std::size_t n_points, double mu, const std::function<double(double)>& V);
};

struct RadialSolution {
  double lambda_max;
  std::vector<double> eigenvalues;  ///< sorted descending by real part
  std::vector<double> eigvec;       ///< u(r) = r psi(r) at the oracle nodes
  double drift = 0.0;               ///< |lambda_max(n) - lambda_max(2n)| when checked
  bool coarse = false;
};

/// Full eigendecomposition; optionally compares lambda_max against a 2n grid.
RadialSolution solve_radial(const RadialOracle& oracle, bool check_drift = false);

RadialSolution radial_oracle_lambda(double mu, double Z, double r_max = 40.0, std::size_t n_points = 2000,
                                    bool check_drift = false);

/// max |(-d^2/dr^2 + mu^2) int g_mu u - u| / max |u| on interior nodes for
/// a smooth test function; sanity check of the reduced kernel.
double radial_kernel_identity_error(double mu, double r_max, std::size_t n_points);

}  // namespace boundstate
