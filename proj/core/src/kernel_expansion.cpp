#include "boundstate/kernel_expansion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "boundstate/constants.hpp"

namespace boundstate {

namespace {

constexpr std::size_t kMaxTerms = 600;
constexpr double kSamplesPerDecade = 64.0;
constexpr std::size_t kMinSamples = 1000;

void check_range(double epsilon, double d_lo, double d_hi) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("epsilon must lie in (0, 1]");
  }
  if (!(d_lo > 0.0 && d_lo < d_hi) || !std::isfinite(d_hi)) {
    throw std::invalid_argument("valid range requires 0 < d_lo < d_hi < inf");
  }
}

std::vector<double> sample_points(double d_lo, double d_hi, std::size_t samples) {
  if (d_lo == d_hi || samples < 2) return {d_lo};
  std::vector<double> r(samples);
  const double log_lo = std::log(d_lo);
  const double step = (std::log(d_hi) - log_lo) / static_cast<double>(samples - 1);
  for (std::size_t i = 0; i < samples; ++i) {
    r[i] = std::exp(log_lo + step * static_cast<double>(i));
  }
  r.front() = d_lo;
  r.back() = d_hi;
  return r;
}

struct Sampler {
  std::vector<double> r;
  std::vector<double> target;

  Sampler(const KernelTarget& kernel, double d_lo, double d_hi)
      : r(sample_points(d_lo, d_hi, default_sample_count(d_lo, d_hi))) {
    target.reserve(r.size());
    for (double x : r) {
      const double k = kernel_value(kernel, x);
      if (!(k > std::numeric_limits<double>::min())) {
        throw std::invalid_argument("target kernel underflows on the requested range");
      }
      target.push_back(k);
    }
  }

  double max_error(const std::vector<GaussianTerm>& terms, std::size_t first,
                   std::size_t last) const {
    double worst = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double r2 = r[i] * r[i];
      double s = 0.0;
      for (std::size_t k = first; k < last; ++k) {
        s += terms[k].weight * std::exp(-terms[k].exponent * r2);
      }
      worst = std::max(worst, std::abs(s - target[i]) / target[i]);
    }
    return worst;
  }

  double max_contribution(const GaussianTerm& term) const {
    double worst = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      worst = std::max(worst, term.weight * std::exp(-term.exponent * r[i] * r[i]) / target[i]);
    }
    return worst;
  }
};

GaussianTerm power_term(double alpha, double h, long n) {
  const double nh = static_cast<double>(n) * h;
  return {h / std::tgamma(alpha / 2.0) * std::exp(alpha * nh / 2.0), std::exp(nh)};
}

GaussianTerm helmholtz_term(double kappa, double dt, long n) {
  const double t = static_cast<double>(n) * dt;
  const double scale = dt * (2.0 / std::sqrt(kPi)) / (4.0 * kPi);
  return {scale * std::exp(t - kappa * kappa * std::exp(-2.0 * t) / 4.0), std::exp(2.0 * t)};
}

// Grows [n_lo, n_hi] by one index at each end per round until the sum is
// certified, then trims each end while certification still holds.
template <class TermFn>
GaussianSum certify_window(GaussianSum sum, long n_lo, long n_hi, const TermFn& term_at) {
  const Sampler sampler(sum.target, sum.d_lo, sum.d_hi);
  std::vector<GaussianTerm> terms;
  for (long n = n_lo; n <= n_hi; ++n) terms.push_back(term_at(n));

  double err = sampler.max_error(terms, 0, terms.size());
  while (err > sum.epsilon) {
    if (terms.size() + 2 > kMaxTerms) {
      throw CertificationError("Gaussian sum did not certify within the term cap", err);
    }
    --n_lo;
    ++n_hi;
    terms.insert(terms.begin(), term_at(n_lo));
    terms.push_back(term_at(n_hi));
    err = sampler.max_error(terms, 0, terms.size());
  }

  std::size_t first = 0;
  std::size_t last = terms.size();
  while (last - first > 1 && sampler.max_error(terms, first + 1, last) <= sum.epsilon) ++first;
  while (last - first > 1 && sampler.max_error(terms, first, last - 1) <= sum.epsilon) --last;
  sum.terms.assign(terms.begin() + static_cast<std::ptrdiff_t>(first),
                   terms.begin() + static_cast<std::ptrdiff_t>(last));
  return sum;
}

}  // namespace

double kernel_value(const KernelTarget& target, double r) {
  if (const auto* p = std::get_if<PowerKernel>(&target)) return std::pow(r, -p->alpha);
  const double kappa = std::get<HelmholtzKernel>(target).kappa;
  return std::exp(-kappa * r) / (4.0 * kPi * r);
}

double step_size(double alpha, double epsilon) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1]");
  const double denom =
      std::log(3.0) + alpha * std::log(1.0 / std::cos(1.0)) / 2.0 + std::log(1.0 / epsilon);
  return 2.0 * kPi / denom;
}

GaussianSum build_power_sum(double alpha, double epsilon, double d_lo, double d_hi) {
  check_range(epsilon, d_lo, d_hi);
  const double h = step_size(alpha, epsilon);
  GaussianSum sum{PowerKernel{alpha}, epsilon, d_lo, d_hi, {}};
  // exponents spanning 1/d_hi^2 .. 1/d_lo^2
  const long n_lo = static_cast<long>(std::floor(-2.0 * std::log(d_hi) / h));
  const long n_hi = static_cast<long>(std::ceil(-2.0 * std::log(d_lo) / h));
  return certify_window(std::move(sum), n_lo, n_hi,
                        [&](long n) { return power_term(alpha, h, n); });
}

GaussianSum build_helmholtz_sum(double kappa, double epsilon, double d_lo, double d_hi) {
  if (!(kappa >= 0.0)) throw std::invalid_argument("kappa must be non-negative");
  check_range(epsilon, d_lo, d_hi);
  // s = e^t; the alpha=1 step in the exponent variable is twice the step in t.
  // For kappa > 0 the integrand off the real t axis grows like
  // exp(2 kappa r y^2) relative to the kernel, so the step also shrinks with
  // kappa d_hi to keep the relative error at the far end of the range.
  double dt = step_size(1.0, epsilon) / 2.0;
  if (kappa > 0.0) {
    const double far = kappa * d_hi;
    dt = std::min(dt, 0.9 * kPi / std::sqrt(2.0 * far * std::log(3.0 / epsilon)));
  }
  GaussianSum sum{HelmholtzKernel{kappa}, epsilon, d_lo, d_hi, {}};
  const Sampler sampler(sum.target, d_lo, d_hi);
  const double tail = 0.01 * epsilon;

  long n_lo = static_cast<long>(std::floor(-std::log(d_hi) / dt));
  long n_hi = static_cast<long>(std::ceil(-std::log(d_lo) / dt));
  while (n_hi - n_lo < static_cast<long>(kMaxTerms) &&
         sampler.max_contribution(helmholtz_term(kappa, dt, n_lo - 1)) >= tail) {
    --n_lo;
  }
  while (n_hi - n_lo < static_cast<long>(kMaxTerms) &&
         sampler.max_contribution(helmholtz_term(kappa, dt, n_hi + 1)) >= tail) {
    ++n_hi;
  }
  while (n_lo < n_hi && sampler.max_contribution(helmholtz_term(kappa, dt, n_lo)) < tail) ++n_lo;
  while (n_hi > n_lo && sampler.max_contribution(helmholtz_term(kappa, dt, n_hi)) < tail) --n_hi;

  std::vector<GaussianTerm> terms;
  for (long n = n_lo; n <= n_hi; ++n) terms.push_back(helmholtz_term(kappa, dt, n));
  double err = sampler.max_error(terms, 0, terms.size());
  while (err > epsilon) {
    if (terms.size() + 2 > kMaxTerms) {
      throw CertificationError("Helmholtz sum did not certify within the term cap", err);
    }
    --n_lo;
    ++n_hi;
    terms.insert(terms.begin(), helmholtz_term(kappa, dt, n_lo));
    terms.push_back(helmholtz_term(kappa, dt, n_hi));
    err = sampler.max_error(terms, 0, terms.size());
  }
  sum.terms = std::move(terms);
  return sum;
}

double evaluate_sum(const GaussianSum& sum, double r) {
  const double r2 = r * r;
  double s = 0.0;
  for (const auto& t : sum.terms) s += t.weight * std::exp(-t.exponent * r2);
  return s;
}

std::size_t default_sample_count(double d_lo, double d_hi) {
  if (d_lo == d_hi) return 1;
  const double decades = std::log10(d_hi / d_lo);
  const auto dense = static_cast<std::size_t>(std::ceil(decades * kSamplesPerDecade)) + 1;
  return std::max(dense, kMinSamples);
}

double max_relative_error(const GaussianSum& sum) {
  return max_relative_error(sum, default_sample_count(sum.d_lo, sum.d_hi));
}

double max_relative_error(const GaussianSum& sum, std::size_t samples) {
  double worst = 0.0;
  for (double r : sample_points(sum.d_lo, sum.d_hi, samples)) {
    const double k = kernel_value(sum.target, r);
    worst = std::max(worst, std::abs(evaluate_sum(sum, r) - k) / k);
  }
  return worst;
}

void write_gaussian_sum(std::ostream& os, const GaussianSum& sum) {
  const bool power = std::holds_alternative<PowerKernel>(sum.target);
  const double param = power ? std::get<PowerKernel>(sum.target).alpha
                             : std::get<HelmholtzKernel>(sum.target).kappa;
  char line[256];
  std::snprintf(line, sizeof line, "# target=%s param=%.17g eps=%.17g dlo=%.17g dhi=%.17g\n",
                power ? "power" : "helmholtz", param, sum.epsilon, sum.d_lo, sum.d_hi);
  os << line;
  for (const auto& t : sum.terms) {
    std::snprintf(line, sizeof line, "%.17g %.17g\n", t.weight, t.exponent);
    os << line;
  }
}

GaussianSum read_gaussian_sum(std::istream& is) {
  std::string header;
  if (!std::getline(is, header) || header.rfind("# ", 0) != 0) {
    throw std::runtime_error("Gaussian sum: missing header line");
  }
  std::istringstream fields(header.substr(2));
  std::string token;
  std::string kind;
  double param = 0.0;
  GaussianSum sum;
  int seen = 0;
  while (fields >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw std::runtime_error("Gaussian sum: malformed header token " + token);
    const std::string key = token.substr(0, eq);
    const std::string value = token.substr(eq + 1);
    if (key == "target") {
      kind = value;
    } else if (key == "param") {
      param = std::stod(value);
    } else if (key == "eps") {
      sum.epsilon = std::stod(value);
    } else if (key == "dlo") {
      sum.d_lo = std::stod(value);
    } else if (key == "dhi") {
      sum.d_hi = std::stod(value);
    } else {
      throw std::runtime_error("Gaussian sum: unknown header key " + key);
    }
    ++seen;
  }
  if (seen != 5) throw std::runtime_error("Gaussian sum: incomplete header");
  if (kind == "power") {
    sum.target = PowerKernel{param};
  } else if (kind == "helmholtz") {
    sum.target = HelmholtzKernel{param};
  } else {
    throw std::runtime_error("Gaussian sum: unknown target " + kind);
  }
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    GaussianTerm t{};
    if (!(row >> t.weight >> t.exponent)) throw std::runtime_error("Gaussian sum: malformed term line");
    sum.terms.push_back(t);
  }
  return sum;
}

}  // namespace boundstate
