#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace boundstate {

/// r^{-alpha}
struct PowerKernel {
  double alpha = 1.0;
};

/// e^{-kappa r} / (4 pi r)
struct HelmholtzKernel {
  double kappa = 0.0;
};

using KernelTarget = std::variant<PowerKernel, HelmholtzKernel>;

double kernel_value(const KernelTarget& target, double r);

struct GaussianTerm {
  double weight;
  double exponent;
};

/// Sum_k w_k exp(-e_k r^2), certified against `target` on [d_lo, d_hi].
/// Terms are stored by increasing exponent.
struct GaussianSum {
  KernelTarget target;
  double epsilon = 0.0;
  double d_lo = 0.0;
  double d_hi = 0.0;
  std::vector<GaussianTerm> terms;
};

class CertificationError : public std::runtime_error {
 public:
  CertificationError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

/// Largest trapezoid step h for which the infinite sum approximates
/// r^{-alpha} to relative accuracy epsilon on (0, inf).
double step_size(double alpha, double epsilon);

GaussianSum build_power_sum(double alpha, double epsilon, double d_lo, double d_hi);
GaussianSum build_helmholtz_sum(double kappa, double epsilon, double d_lo, double d_hi);

double evaluate_sum(const GaussianSum& sum, double r);

/// Number of log-spaced samples used by the default certification.
std::size_t default_sample_count(double d_lo, double d_hi);

/// Max relative deviation from the target over log-uniform samples of
/// [d_lo, d_hi]; a collapsed range gives the pointwise error.
double max_relative_error(const GaussianSum& sum);
double max_relative_error(const GaussianSum& sum, std::size_t samples);

void write_gaussian_sum(std::ostream& os, const GaussianSum& sum);
GaussianSum read_gaussian_sum(std::istream& is);

}  // namespace boundstate
