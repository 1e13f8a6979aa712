#include "boundstate/schrodinger_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace boundstate {

namespace {

// sum_p w(p^2) |raw psi(p)|^2 scaled to the unitary inner product.
template <class W>
double momentum_form(const ScalarField& psi, W&& weight) {
  ScalarField hat = psi;
  raw_fft_in_place(hat, Direction::Forward);
  const Grid& g = psi.grid();
  const std::size_t n = g.n();
  const auto p = axis_wavenumbers(g);
  double acc = 0.0;
  for (std::size_t iz = 0; iz < n; ++iz) {
    for (std::size_t iy = 0; iy < n; ++iy) {
      const double pyz = p[iy] * p[iy] + p[iz] * p[iz];
      const cplx* row = hat.data() + g.index(0, iy, iz);
      for (std::size_t ix = 0; ix < n; ++ix) acc += weight(pyz + p[ix] * p[ix]) * std::norm(row[ix]);
    }
  }
  return acc * g.cell_volume() / static_cast<double>(hat.size());
}

void check_grids(const ScalarField& psi, const ScalarField& V) {
  if (!(psi.grid() == V.grid())) throw GridMismatch("wavefunction and potential grids differ");
  if (psi.space() != Space::Real || V.space() != Space::Real) {
    throw std::invalid_argument("solver fields must be in real space");
  }
}

ScalarField times(const ScalarField& V, const ScalarField& psi) {
  ScalarField out = psi;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= V[i];
  return out;
}

double potential_form(const ScalarField& psi, const ScalarField& V) {
  double acc = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) acc += V[i].real() * std::norm(psi[i]);
  return acc * psi.grid().cell_volume();
}

// |t - lam psi|
double residual_norm(const ScalarField& t, cplx lam, const ScalarField& psi) {
  double acc = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) acc += std::norm(t[i] - lam * psi[i]);
  return std::sqrt(acc * t.grid().cell_volume());
}

}  // namespace

SchrodingerState::SchrodingerState(ScalarField psi0, double mu0, double tau0)
    : mu(mu0), psi(std::move(psi0)), tau(tau0) {
  if (!(mu > 0.0)) throw std::invalid_argument("mu must be positive");
}

ScalarField hydrogenic_guess(const Grid& grid, const Nucleus& nucleus) {
  const auto& R = nucleus.position;
  return normalize(sample(grid, [&](double x, double y, double z) {
    const double r = std::sqrt((x - R[0]) * (x - R[0]) + (y - R[1]) * (y - R[1]) + (z - R[2]) * (z - R[2]));
    return cplx(std::exp(-nucleus.Z * r), 0.0);
  }));
}

ScalarField apply_T(const ScalarField& psi, double mu, const ScalarField& V, GreensBoundary boundary) {
  check_grids(psi, V);
  ScalarField out = times(V, psi);
  if (boundary == GreensBoundary::Periodic) {
    apply_greens_periodic_in_place(out, mu);
  } else {
    out = apply_greens_scalar(out, mu, boundary);
  }
  out *= -2.0;
  return out;
}

double greens_inverse_form(const ScalarField& psi, double mu) {
  return momentum_form(psi, [mu](double p2) { return mu * mu + p2; });
}

double energy_expectation(const ScalarField& psi, const ScalarField& V) {
  check_grids(psi, V);
  const double nrm2 = inner_product(psi, psi).real();
  if (!(nrm2 > 0.0)) throw std::invalid_argument("energy of a zero field");
  const double kinetic = momentum_form(psi, [](double p2) { return 0.5 * p2; });
  const double potential = potential_form(psi, V);
  return (kinetic + potential) / nrm2;
}

SchrodingerState power_iterate(SchrodingerState state, const ScalarField& V, const PowerOptions& options) {
  check_grids(state.psi, V);
  if (options.max_iters < 1 || !(options.tol > 0.0)) throw std::invalid_argument("invalid iteration controls");

  std::vector<ScalarField> v_deflate;
  std::vector<double> v_norms;
  for (const auto& phi : options.deflate) {
    v_deflate.push_back(times(V, phi));
    v_norms.push_back(inner_product(phi, v_deflate.back()).real());
  }
  auto deflate = [&](ScalarField& f) {
    for (std::size_t j = 0; j < v_deflate.size(); ++j) {
      ScalarField proj = options.deflate[j];
      proj *= inner_product(v_deflate[j], f) / v_norms[j];
      f -= proj;
    }
  };

  ScalarField psi = std::move(state.psi);
  deflate(psi);
  psi = normalize(psi);
  const double ref_norm = options.reference ? norm(*options.reference) : 1.0;
  const int first_iter = state.history.empty() ? 1 : state.history.back().iter + 1;
  state.converged = false;

  for (int k = 0; k < options.max_iters; ++k) {
    ScalarField t = apply_T(psi, state.mu, V, options.boundary);
    const cplx lam = inner_product(psi, t);
    const double residual = residual_norm(t, lam, psi);
    const double tnorm = norm(t);

    IterationRecord rec;
    rec.iter = first_iter + k;
    rec.lambda = lam.real();
    rec.lambda_im = lam.imag();
    rec.residual = residual;
    rec.energy = options.record_energy ? energy_expectation(psi, V) + state.tau
                                       : std::numeric_limits<double>::quiet_NaN();
    rec.projection = options.reference ? std::abs(inner_product(*options.reference, psi)) / ref_norm
                                       : std::numeric_limits<double>::quiet_NaN();
    state.history.push_back(rec);
    state.lambda = lam.real();
    state.lambda_im = lam.imag();
    state.residual = residual;
    state.energy = rec.energy;
    ++state.iterations;

    if (tnorm < 1e-14) {
      throw BreakdownError("power iteration broke down: |T psi| below 1e-14, restart with a perturbed guess");
    }
    if (residual < options.tol) {
      state.converged = true;
      break;
    }
    t *= 1.0 / tnorm;
    deflate(t);
    psi = std::move(t);
    psi *= 1.0 / norm(psi);
  }
  state.psi = std::move(psi);
  if (!options.record_energy) state.energy = energy_expectation(state.psi, V) + state.tau;
  return state;
}

double dlambda_dmu(const SchrodingerState& state, const ScalarField& V, double max_residual) {
  check_grids(state.psi, V);
  if (!(state.residual <= max_residual)) {
    throw std::invalid_argument("dlambda_dmu needs a converged eigenpair (residual " +
                                std::to_string(state.residual) + ")");
  }
  const double nrm2 = inner_product(state.psi, state.psi).real();
  return -2.0 * state.mu * state.lambda * nrm2 / greens_inverse_form(state.psi, state.mu);
}

SchrodingerState newton_mu(SchrodingerState state, const ScalarField& V, double tol_lambda,
                           const PowerOptions& options, int max_outer) {
  if (!(tol_lambda > 0.0)) throw std::invalid_argument("tol_lambda must be positive");
  PowerOptions inner = options;
  inner.tol = std::min(options.tol, 0.1 * tol_lambda);
  // Inexact Newton: far from the root the eigenpair only needs to be
  // resolved to the square of |lambda - 1|, which keeps quadratic convergence.
  PowerOptions loose = inner;
  const auto solve_at = [&](SchrodingerState s, double defect) {
    loose.tol = std::max(inner.tol, std::min(1e-4, 0.1 * defect * defect));
    return power_iterate(std::move(s), V, loose);
  };
  if (!state.converged) state = solve_at(std::move(state), 1.0);

  bool done = false;
  for (int outer = 0; outer <= max_outer; ++outer) {
    if (!state.converged) break;
    if (std::abs(state.lambda - 1.0) <= tol_lambda) {
      if (state.residual <= inner.tol) {
        done = true;
        break;
      }
      state = power_iterate(std::move(state), V, inner);
      continue;
    }
    if (outer == max_outer) break;
    const double d = dlambda_dmu(state, V, std::max(inner.tol, state.residual));
    state.newton.push_back({state.mu, state.lambda, d});
    const double mu_next = state.mu - (state.lambda - 1.0) / d;
    if (!(mu_next > 0.0)) {
      throw NewtonError("Newton step drove mu to " + std::to_string(mu_next) +
                        "; no bound state reachable on this branch");
    }
    const double defect = std::abs(state.lambda - 1.0);
    state.mu = mu_next;
    state = solve_at(std::move(state), defect);
  }
  state.converged = done;
  if (done) state.energy = -state.mu * state.mu / 2.0 + state.tau;
  return state;
}

}  // namespace boundstate
