#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "boundstate/spectral_analysis.hpp"

namespace boundstate {

namespace {

double reduced_kernel(double r, double rp, double mu) {
  return (std::exp(-mu * std::abs(r - rp)) - std::exp(-mu * (r + rp))) / (2.0 * mu);
}

// Largest eigenvalue by power iteration on the symmetrised matrix.
double power_lambda(const RadialOracle& o) {
  const auto n = static_cast<Eigen::Index>(o.n_points);
  Eigen::VectorXd d(n);
  for (Eigen::Index j = 0; j < n; ++j) d(j) = std::sqrt(o.weights[j] * -o.potential[j]);
  Eigen::MatrixXd S(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) S(i, j) = 2.0 * d(i) * reduced_kernel(o.r[i], o.r[j], o.mu) * d(j);
  Eigen::VectorXd v = d.normalized();
  double lambda = 0.0;
  for (int it = 0; it < 5000; ++it) {
    Eigen::VectorXd w = S * v;
    const double next = v.dot(w);
    v = w.normalized();
    if (std::abs(next - lambda) < 1e-15 * std::abs(next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return lambda;
}

}  // namespace

RadialOracle::RadialOracle(double r_max_, std::size_t n_points_, double mu_, const std::function<double(double)>& V)
    : r_max(r_max_), n_points(n_points_), mu(mu_) {
  if (!(r_max > 0.0 && mu > 0.0) || n_points < 200) throw std::invalid_argument("radial oracle needs r_max, mu > 0 and n_points >= 200");
  const double h = r_max / static_cast<double>(n_points);
  r.resize(n_points);
  weights.assign(n_points, h);
  potential.resize(n_points);
  for (std::size_t j = 0; j < n_points; ++j) {
    r[j] = h * static_cast<double>(j + 1);
    potential[j] = V(r[j]);
  }
  weights.back() = h / 2.0;
}

RadialSolution solve_radial(const RadialOracle& o, bool check_drift) {
  const auto n = static_cast<Eigen::Index>(o.n_points);
  const bool negative = std::all_of(o.potential.begin(), o.potential.end(), [](double v) { return v < 0.0; });
  RadialSolution out{};
  if (negative) {
    Eigen::VectorXd d(n);
    for (Eigen::Index j = 0; j < n; ++j) d(j) = std::sqrt(o.weights[j] * -o.potential[j]);
    Eigen::MatrixXd S(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) S(i, j) = 2.0 * d(i) * reduced_kernel(o.r[i], o.r[j], o.mu) * d(j);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    if (es.info() != Eigen::Success) throw std::runtime_error("radial eigensolver failed");
    const Eigen::VectorXd& vals = es.eigenvalues();
    for (Eigen::Index i = n - 1; i >= 0; --i) out.eigenvalues.push_back(vals(i));
    const Eigen::VectorXd y = es.eigenvectors().col(n - 1);
    out.eigvec.resize(o.n_points);
    for (Eigen::Index j = 0; j < n; ++j) out.eigvec[j] = y(j) / d(j);
  } else {
    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        K(i, j) = -2.0 * reduced_kernel(o.r[i], o.r[j], o.mu) * o.weights[j] * o.potential[j];
    Eigen::EigenSolver<Eigen::MatrixXd> es(K);
    if (es.info() != Eigen::Success) throw std::runtime_error("radial eigensolver failed");
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) order[i] = i;
    const Eigen::VectorXcd vals = es.eigenvalues();
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return vals(a).real() > vals(b).real(); });
    for (auto i : order) out.eigenvalues.push_back(vals(i).real());
    const Eigen::VectorXcd y = es.eigenvectors().col(order.front());
    out.eigvec.resize(o.n_points);
    for (Eigen::Index j = 0; j < n; ++j) out.eigvec[j] = y(j).real();
  }
  out.lambda_max = out.eigenvalues.front();
  double peak = 0.0;
  for (double v : out.eigvec) peak = std::abs(v) > std::abs(peak) ? v : peak;
  if (peak != 0.0)
    for (double& v : out.eigvec) v /= peak;
  if (check_drift) {
    if (!negative) throw std::invalid_argument("drift check needs a negative potential");
    const std::size_t n2 = 2 * o.n_points;
    std::vector<double> r2(n2);
    const double h2 = o.r_max / static_cast<double>(n2);
    RadialOracle fine(o.r_max, n2, o.mu, [&](double) { return -1.0; });
    // resample the potential: linear interpolation on the coarse nodes
    for (std::size_t j = 0; j < n2; ++j) {
      const double x = h2 * static_cast<double>(j + 1);
      const double s = x / (o.r_max / static_cast<double>(o.n_points)) - 1.0;
      if (s <= 0.0) {
        fine.potential[j] = o.potential.front();
        continue;
      }
      const auto k = static_cast<std::size_t>(s);
      if (k + 1 >= o.n_points) {
        fine.potential[j] = o.potential.back();
        continue;
      }
      const double t = s - static_cast<double>(k);
      fine.potential[j] = (1.0 - t) * o.potential[k] + t * o.potential[k + 1];
    }
    out.drift = std::abs(out.lambda_max - power_lambda(fine));
    out.coarse = out.drift > 1e-4;
  }
  return out;
}

RadialSolution radial_oracle_lambda(double mu, double Z, double r_max, std::size_t n_points, bool check_drift) {
  if (!(Z > 0.0)) throw std::invalid_argument("radial oracle needs Z > 0");
  const RadialOracle o(r_max, n_points, mu, [Z](double r) { return -Z / r; });
  if (!check_drift) return solve_radial(o, false);
  RadialSolution s = solve_radial(o, false);
  const RadialOracle fine(r_max, 2 * n_points, mu, [Z](double r) { return -Z / r; });
  s.drift = std::abs(s.lambda_max - power_lambda(fine));
  s.coarse = s.drift > 1e-4;
  return s;
}

double radial_kernel_identity_error(double mu, double r_max, std::size_t n_points) {
  const RadialOracle o(r_max, n_points, mu, [](double) { return -1.0; });
  const std::size_t n = o.n_points;
  const double h = r_max / static_cast<double>(n);
  std::vector<double> u(n);
  std::vector<double> w(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) u[j] = o.r[j] * std::exp(-o.r[j]);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) w[i] += reduced_kernel(o.r[i], o.r[j], mu) * o.weights[j] * u[j];
  double peak = 0.0;
  double err = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double lap = (w[i + 1] - 2.0 * w[i] + w[i - 1]) / (h * h);
    err = std::max(err, std::abs(-lap + mu * mu * w[i] - u[i]));
    peak = std::max(peak, std::abs(u[i]));
  }
  return err / peak;
}

}  // namespace boundstate
