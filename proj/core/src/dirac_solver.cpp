#include "boundstate/dirac_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

namespace boundstate {

namespace {

constexpr cplx kI(0.0, 1.0);

void check_spinor(const SpinorField& psi, const ScalarField& V) {
  if (!(psi.grid() == V.grid())) throw GridMismatch("spinor and potential grids differ");
  if (psi.space() != Space::Real || V.space() != Space::Real) {
    throw std::invalid_argument("Dirac solver fields must be in real space");
  }
}

// Calls f(i, px, py, pz) for every FFT-ordered momentum node.
template <class F>
void for_each_node(const Grid& g, F&& f) {
  const std::size_t n = g.n();
  const auto p = axis_wavenumbers(g);
  for (std::size_t iz = 0; iz < n; ++iz) {
    for (std::size_t iy = 0; iy < n; ++iy) {
      const std::size_t base = g.index(0, iy, iz);
      for (std::size_t ix = 0; ix < n; ++ix) f(base + ix, p[ix], p[iy], p[iz]);
    }
  }
}

struct Node {
  cplx l1, l2, s1, s2;
};

// [[dL, o s.p], [o s.p, dS]] applied to one node.
inline Node dirac_block(const Node& v, double dL, double dS, double o, double px, double py,
                        double pz) {
  const cplx pm(px, -py);
  const cplx pp(px, py);
  const cplx sp_s1 = pz * v.s1 + pm * v.s2;
  const cplx sp_s2 = pp * v.s1 - pz * v.s2;
  const cplx sp_l1 = pz * v.l1 + pm * v.l2;
  const cplx sp_l2 = pp * v.l1 - pz * v.l2;
  return {dL * v.l1 + o * sp_s1, dL * v.l2 + o * sp_s2, o * sp_l1 + dS * v.s1, o * sp_l2 + dS * v.s2};
}

inline Node load(const SpinorField& s, std::size_t i) { return {s[0][i], s[1][i], s[2][i], s[3][i]}; }

inline void store(SpinorField& s, std::size_t i, const Node& v) {
  s[0][i] = v.l1;
  s[1][i] = v.l2;
  s[2][i] = v.s1;
  s[3][i] = v.s2;
}

void raw_fft(SpinorField& s, Direction d) {
  for (auto& comp : s.c) raw_fft_in_place(comp, d);
}

// <psi, (H0 - m c^2) psi> from a raw-transformed spinor, unitary scaling.
double rest_subtracted_form(const SpinorField& hat, const PhysicalConstants& pc) {
  const double mc2 = pc.rest_energy();
  const double o = pc.c * pc.hbar;
  double acc = 0.0;
  for_each_node(hat.grid(), [&](std::size_t i, double px, double py, double pz) {
    const Node v = load(hat, i);
    const Node hv = dirac_block(v, 0.0, -2.0 * mc2, o, px, py, pz);
    acc += (std::conj(v.l1) * hv.l1 + std::conj(v.l2) * hv.l2 + std::conj(v.s1) * hv.s1 +
            std::conj(v.s2) * hv.s2)
               .real();
  });
  return acc * hat.grid().cell_volume() / static_cast<double>(hat[0].size());
}

double potential_form(const SpinorField& psi, const ScalarField& V) {
  double acc = 0.0;
  for (std::size_t c = 0; c < 4; ++c) {
    for (std::size_t i = 0; i < V.size(); ++i) acc += V[i].real() * std::norm(psi[c][i]);
  }
  return acc * V.grid().cell_volume();
}

// Energy of psi using `scratch` as the transform buffer.
double energy_with_scratch(const SpinorField& psi, const ScalarField& V, SpinorField& scratch,
                           const PhysicalConstants& pc) {
  for (std::size_t c = 0; c < 4; ++c) {
    std::copy_n(psi[c].data(), psi[c].size(), scratch[c].data());
    scratch[c].set_space(Space::Real);
  }
  raw_fft(scratch, Direction::Forward);
  const double nrm2 = inner_product(psi, psi).real();
  return (rest_subtracted_form(scratch, pc) + potential_form(psi, V)) / nrm2;
}

// out = A psi, reusing out's storage.
void apply_A_into(const SpinorField& psi, SpinorField& out, double kappa, const ScalarField& V,
                  const PhysicalConstants& pc) {
  const double E = E_from_kappa(kappa, pc);
  const double hc2 = pc.hbar * pc.hbar * pc.c * pc.c;
  const double mc2 = pc.rest_energy();
  const double kappa2 = kappa * kappa;
  for (std::size_t c = 0; c < 4; ++c) {
    const cplx* src = psi[c].data();
    cplx* dst = out[c].data();
    for (std::size_t i = 0; i < V.size(); ++i) dst[i] = V[i].real() * src[i];
    out[c].set_space(Space::Real);
    raw_fft_in_place(out[c], Direction::Forward);
  }
  const double s = -1.0 / static_cast<double>(V.size());
  for_each_node(V.grid(), [&](std::size_t i, double px, double py, double pz) {
    const double g = s / (kappa2 + px * px + py * py + pz * pz);
    const Node v = load(out, i);
    store(out, i, dirac_block(v, g * (mc2 + E) / hc2, g * (E - mc2) / hc2, g * pc.c * pc.hbar / hc2,
                              px, py, pz));
  });
  raw_fft(out, Direction::Inverse);
}

double residual_norm(const SpinorField& t, cplx lam, const SpinorField& psi) {
  double acc = 0.0;
  for (std::size_t c = 0; c < 4; ++c) {
    for (std::size_t i = 0; i < t[c].size(); ++i) acc += std::norm(t[c][i] - lam * psi[c][i]);
  }
  return std::sqrt(acc * t.grid().cell_volume());
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

double kappa_from_binding(double binding, double tau, const PhysicalConstants& pc) {
  const double b = binding - tau;
  const double mc2 = pc.rest_energy();
  if (b > 0.0) throw std::invalid_argument("E - tau must not exceed m c^2 for a bound state");
  if (b < -2.0 * mc2) throw std::invalid_argument("E - tau lies below -m c^2");
  return std::sqrt(-b * (2.0 * mc2 + b)) / (pc.c * pc.hbar);
}

double kappa_from_E(double E, double tau, const PhysicalConstants& pc) {
  return kappa_from_binding(E - pc.rest_energy(), tau, pc);
}

double binding_from_kappa(double kappa, const PhysicalConstants& pc) {
  const double mc2 = pc.rest_energy();
  const double q = kappa * pc.c * pc.hbar;
  if (!(kappa >= 0.0) || q > mc2) throw std::invalid_argument("kappa must lie in [0, m c / hbar]");
  return -q * q / (mc2 + std::sqrt((mc2 - q) * (mc2 + q)));
}

double E_from_kappa(double kappa, const PhysicalConstants& pc) {
  return pc.rest_energy() + binding_from_kappa(kappa, pc);
}

DiracState::DiracState(SpinorField psi0, double kappa0, double tau0, const PhysicalConstants& pc)
    : psi(std::move(psi0)), tau(tau0), constants(pc) {
  set_kappa(kappa0);
}

void DiracState::set_kappa(double k) {
  if (!(k > 0.0)) throw std::invalid_argument("kappa must be positive");
  kappa = k;
  E = E_from_kappa(k, constants) + tau;
}

SpinorField apply_H0_shifted(const SpinorField& psi_hat, double shift, double scale,
                             const PhysicalConstants& pc) {
  if (psi_hat.space() != Space::Momentum) throw std::invalid_argument("H0 acts on momentum-space spinors");
  SpinorField out = psi_hat;
  const double mc2 = pc.rest_energy();
  for_each_node(out.grid(), [&](std::size_t i, double px, double py, double pz) {
    store(out, i,
          dirac_block(load(out, i), scale * (mc2 + shift), scale * (shift - mc2), scale * pc.c * pc.hbar,
                      px, py, pz));
  });
  return out;
}

SpinorField apply_H0_plus_E(const SpinorField& psi_hat, double E, const PhysicalConstants& pc) {
  return apply_H0_shifted(psi_hat, E, 1.0 / (pc.hbar * pc.hbar * pc.c * pc.c), pc);
}

SpinorField apply_A(const SpinorField& psi, double kappa, const ScalarField& V, const PhysicalConstants& pc) {
  check_spinor(psi, V);
  if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
  SpinorField out(psi.grid());
  apply_A_into(psi, out, kappa, V, pc);
  return out;
}

SpinorField kinetic_balance_guess(ScalarField large1, ScalarField large2, const PhysicalConstants& pc) {
  if (!(large1.grid() == large2.grid())) throw GridMismatch("large components on different grids");
  if (large1.space() != Space::Real || large2.space() != Space::Real) {
    throw std::invalid_argument("kinetic balance needs real-space large components");
  }
  if (!(norm(large1) > 0.0 || norm(large2) > 0.0)) {
    throw std::invalid_argument("kinetic balance of a zero large component");
  }
  const Grid grid = large1.grid();
  SpinorField hat(std::move(large1), std::move(large2), ScalarField(grid), ScalarField(grid));
  raw_fft(hat, Direction::Forward);
  const double o = pc.hbar / (2.0 * pc.m * pc.c);
  for_each_node(hat.grid(), [&](std::size_t i, double px, double py, double pz) {
    const Node v = load(hat, i);
    const Node s = dirac_block({v.l1, v.l2, 0.0, 0.0}, 0.0, 0.0, o, px, py, pz);
    hat[2][i] = s.s1;
    hat[3][i] = s.s2;
  });
  raw_fft(hat, Direction::Inverse);
  hat *= 1.0 / norm(hat);
  return hat;
}

SpinorField standard_dirac_guess(const Grid& grid, const Nucleus& nucleus, const PhysicalConstants& pc) {
  return kinetic_balance_guess(hydrogenic_guess(grid, nucleus), ScalarField(grid), pc);
}

SpinorField swap_large_small(const SpinorField& psi) { return SpinorField(psi[2], psi[3], psi[0], psi[1]); }

SpinorField random_dirac_guess(const Grid& grid, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t n = grid.n();
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = std::sin(kPi * (grid.coordinate(i) + grid.box() / 2.0) / grid.box());
    w[i] = s * s;
  }
  SpinorField out(grid);
  for (std::size_t c = 0; c < 4; ++c) {
    for (std::size_t iz = 0; iz < n; ++iz) {
      for (std::size_t iy = 0; iy < n; ++iy) {
        for (std::size_t ix = 0; ix < n; ++ix) {
          out[c][grid.index(ix, iy, iz)] = 10.0 * uniform01(rng) * w[ix] * w[iy] * w[iz];
        }
      }
    }
  }
  return normalize(out);
}

SpinorField gaussian_dirac_guess(const Grid& grid, const Nucleus& nucleus, double exponent,
                                 const PhysicalConstants& pc) {
  if (!(exponent > 0.0)) throw std::invalid_argument("Gaussian exponent must be positive");
  const std::size_t n = grid.n();
  const double h = grid.spacing();
  std::array<std::vector<double>, 3> g;
  for (int axis = 0; axis < 3; ++axis) {
    g[axis].resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      g[axis][i] = band_limited_gaussian(exponent, grid.coordinate(i) - nucleus.position[axis], h);
    }
  }
  ScalarField large(grid);
  for (std::size_t iz = 0; iz < n; ++iz) {
    for (std::size_t iy = 0; iy < n; ++iy) {
      for (std::size_t ix = 0; ix < n; ++ix) large[grid.index(ix, iy, iz)] = g[0][ix] * g[1][iy] * g[2][iz];
    }
  }
  return kinetic_balance_guess(std::move(large), ScalarField(grid), pc);
}

SpinorField time_reverse(const SpinorField& psi) {
  SpinorField out(psi.grid(), psi.space());
  for (std::size_t i = 0; i < psi[0].size(); ++i) {
    out[0][i] = -std::conj(psi[1][i]);
    out[1][i] = std::conj(psi[0][i]);
    out[2][i] = -std::conj(psi[3][i]);
    out[3][i] = std::conj(psi[2][i]);
  }
  return out;
}

double kramers_projection(const SpinorField& reference, const SpinorField& psi) {
  const cplx direct = inner_product(reference, psi);
  // <T ref, psi> without materialising T ref
  cplx partner(0.0, 0.0);
  for (std::size_t i = 0; i < psi[0].size(); ++i) {
    partner += -reference[1][i] * psi[0][i] + reference[0][i] * psi[1][i] - reference[3][i] * psi[2][i] +
               reference[2][i] * psi[3][i];
  }
  partner *= psi.grid().cell_volume();
  return std::sqrt(std::norm(direct) + std::norm(partner)) / (norm(reference) * norm(psi));
}

DiracState power_iterate_dirac(DiracState state, const ScalarField& V, const DiracPowerOptions& options) {
  check_spinor(state.psi, V);
  if (options.max_iters < 1 || !(options.tol > 0.0)) throw std::invalid_argument("invalid iteration controls");
  const PhysicalConstants& pc = state.constants;

  SpinorField psi = std::move(state.psi);
  psi *= 1.0 / norm(psi);
  SpinorField work(psi.grid());
  const int first_iter = state.history.empty() ? 1 : state.history.back().iter + 1;
  state.converged = false;

  for (int k = 0; k < options.max_iters; ++k) {
    IterationRecord rec;
    rec.iter = first_iter + k;
    rec.energy = options.record_energy ? energy_with_scratch(psi, V, work, pc) + state.tau
                                       : std::numeric_limits<double>::quiet_NaN();
    rec.projection = options.reference ? kramers_projection(*options.reference, psi)
                                       : std::numeric_limits<double>::quiet_NaN();

    apply_A_into(psi, work, state.kappa, V, pc);
    const cplx lam = inner_product(psi, work);
    rec.lambda = lam.real();
    rec.lambda_im = lam.imag();
    rec.residual = residual_norm(work, lam, psi);
    state.history.push_back(rec);
    state.lambda = rec.lambda;
    state.lambda_im = rec.lambda_im;
    state.residual = rec.residual;
    state.energy = rec.energy;
    ++state.iterations;

    const double wnorm = norm(work);
    if (wnorm < 1e-14) {
      throw BreakdownError("Dirac power iteration broke down: |A psi| below 1e-14, restart with a perturbed guess");
    }
    if (rec.residual < options.tol) {
      state.converged = true;
      break;
    }
    std::swap(psi, work);
    psi *= 1.0 / wnorm;
  }
  if (!options.record_energy) state.energy = energy_with_scratch(psi, V, work, pc) + state.tau;
  state.psi = std::move(psi);
  return state;
}

double dlambda_dkappa_fd(const DiracState& state, const ScalarField& V, double h,
                         const DiracPowerOptions& options) {
  if (!(h > 0.0 && h < state.kappa)) throw std::invalid_argument("finite-difference step must lie in (0, kappa)");
  DiracPowerOptions opts = options;
  opts.reference.reset();
  opts.record_energy = false;
  opts.max_iters = std::max(options.max_iters, 200);
  auto solve_at = [&](double k) {
    DiracState s(state.psi, k, state.tau, state.constants);
    s = power_iterate_dirac(std::move(s), V, opts);
    if (!s.converged) throw std::runtime_error("finite-difference solve did not converge");
    return s.lambda;
  };
  const double up = solve_at(state.kappa + h);
  const double down = solve_at(state.kappa - h);
  return (up - down) / (2.0 * h);
}

DerivativeResult dlambda_dkappa(const DiracState& state, const ScalarField& V, const DiracPowerOptions& options,
                                double max_residual) {
  check_spinor(state.psi, V);
  if (!(state.residual <= max_residual)) {
    throw std::invalid_argument("dlambda_dkappa needs a converged eigenpair (residual " +
                                std::to_string(state.residual) + ")");
  }
  const PhysicalConstants& pc = state.constants;
  const double kappa = state.kappa;
  const double E = E_from_kappa(kappa, pc);
  const double mc2 = pc.rest_energy();
  const double b = binding_from_kappa(kappa, pc);

  SpinorField hat = state.psi;
  raw_fft(hat, Direction::Forward);
  const double unit = hat.grid().cell_volume() / static_cast<double>(hat[0].size());
  double g_h0 = 0.0;   // |G^{1/2} H0 psi|^2
  double g_psi = 0.0;  // |G^{1/2} psi|^2
  for_each_node(hat.grid(), [&](std::size_t i, double px, double py, double pz) {
    const Node v = load(hat, i);
    const Node hv = dirac_block(v, mc2, -mc2, pc.c * pc.hbar, px, py, pz);
    const double g = 1.0 / (kappa * kappa + px * px + py * py + pz * pz);
    g_h0 += g * (std::norm(hv.l1) + std::norm(hv.l2) + std::norm(hv.s1) + std::norm(hv.s2));
    g_psi += g * (std::norm(v.l1) + std::norm(v.l2) + std::norm(v.s1) + std::norm(v.s2));
  });
  g_h0 *= unit;
  g_psi *= unit;
  const double nrm2 = inner_product(state.psi, state.psi).real();
  // <psi, (H0 - E) psi> = <psi, (H0 - m c^2) psi> - b |psi|^2
  const double form = rest_subtracted_form(hat, pc) - b * nrm2;
  if (std::abs(form) < 1e-12 * nrm2) {
    return {dlambda_dkappa_fd(state, V, 1e-4 * kappa, options), true};
  }
  return {kappa * state.lambda * (-g_h0 / E + E * g_psi) / form, false};
}

DiracState newton_kappa(DiracState state, const ScalarField& V, double tol_lambda,
                        const DiracPowerOptions& options, int max_outer) {
  if (!(tol_lambda > 0.0)) throw std::invalid_argument("tol_lambda must be positive");
  DiracPowerOptions inner = options;
  inner.tol = std::min(options.tol, 0.1 * tol_lambda);
  DiracPowerOptions loose = inner;
  const auto solve_at = [&](DiracState s, double defect) {
    loose.tol = std::max(inner.tol, std::min(1e-4, 0.1 * defect * defect));
    return power_iterate_dirac(std::move(s), V, loose);
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
      state = power_iterate_dirac(std::move(state), V, inner);
      continue;
    }
    if (outer == max_outer) break;
    const DerivativeResult d = dlambda_dkappa(state, V, inner, std::max(inner.tol, state.residual));
    state.newton.push_back({state.kappa, state.lambda, d.value});
    double step = -(state.lambda - 1.0) / d.value;
    const double cap = 0.5 * state.kappa;
    step = std::clamp(step, -cap, cap);
    const double next = state.kappa + step;
    if (!(next > 0.0)) {
      throw NewtonError("Newton step drove kappa to " + std::to_string(next) + "; no bound state on this branch");
    }
    const double defect = std::abs(state.lambda - 1.0);
    state.set_kappa(next);
    const double relock = kappa_from_binding(binding_from_kappa(state.kappa, state.constants), 0.0, state.constants);
    if (std::abs(relock - state.kappa) > 1e-14 * state.kappa) {
      throw std::logic_error("kappa and E fell out of lock");
    }
    state = solve_at(std::move(state), defect);
  }
  state.converged = done;
  return state;
}

double dirac_energy_expectation(const SpinorField& psi, const ScalarField& V, const PhysicalConstants& pc) {
  check_spinor(psi, V);
  SpinorField scratch(psi.grid());
  return energy_with_scratch(psi, V, scratch, pc);
}

}  // namespace boundstate
