#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "boundstate/constants.hpp"
#include "boundstate/fields.hpp"
#include "boundstate/potential.hpp"
#include "boundstate/schrodinger_solver.hpp"

namespace boundstate {

// kappa = sqrt(m^2 c^4 - (E - tau)^2) / (c hbar), evaluated through the
// binding energy b = E - tau - m c^2 to avoid cancellation near m c^2.

/// kappa for a relativistic energy E; E - tau = m c^2 gives 0.
double kappa_from_E(double E, double tau = 0.0, const PhysicalConstants& pc = {});
/// kappa for a binding energy b = E - m c^2.
double kappa_from_binding(double binding, double tau = 0.0, const PhysicalConstants& pc = {});
/// Positive-branch relativistic energy for kappa in [0, m c / hbar].
double E_from_kappa(double kappa, const PhysicalConstants& pc = {});
/// E_from_kappa(kappa) - m c^2 without cancellation.
double binding_from_kappa(double kappa, const PhysicalConstants& pc = {});

struct DiracState {
  double kappa = 1.0;
  /// Relativistic energy E_from_kappa(kappa) + tau.
  double E = 0.0;
  double lambda = 0.0;
  double lambda_im = 0.0;
  SpinorField psi;
  /// Energy expectation with m c^2 subtracted and tau added back.
  double energy = 0.0;
  double residual = 0.0;
  double tau = 0.0;
  bool converged = false;
  int iterations = 0;
  std::vector<IterationRecord> history;
  std::vector<NewtonStep> newton;
  PhysicalConstants constants;

  DiracState(SpinorField psi0, double kappa0, double tau0 = 0.0, const PhysicalConstants& pc = {});

  /// E - m c^2.
  double binding() const { return binding_from_kappa(kappa, constants) + tau; }
  void set_kappa(double k);
};

struct DiracPowerOptions {
  int max_iters = 100;
  double tol = 1e-8;
  /// Projection is measured onto span{reference, time-reversed reference}.
  std::optional<SpinorField> reference;
  bool record_energy = true;
};

/// scale * (H0 + shift) per momentum node; H0 has m c^2 on the large block,
/// -m c^2 on the small block and c sigma.(hbar p) off the diagonal.
SpinorField apply_H0_shifted(const SpinorField& psi_hat, double shift, double scale,
                             const PhysicalConstants& pc = {});

/// (H0 + E) / (hbar^2 c^2) on a momentum-space spinor.
SpinorField apply_H0_plus_E(const SpinorField& psi_hat, double E, const PhysicalConstants& pc = {});

/// -(H0 + E(kappa)) G(kappa) V psi / (hbar^2 c^2) on a real-space spinor.
SpinorField apply_A(const SpinorField& psi, double kappa, const ScalarField& V,
                    const PhysicalConstants& pc = {});

/// Small components sigma.(hbar p) psi_L / (2 m c), then normalised.
SpinorField kinetic_balance_guess(ScalarField large1, ScalarField large2, const PhysicalConstants& pc = {});

SpinorField standard_dirac_guess(const Grid& grid, const Nucleus& nucleus,
                                 const PhysicalConstants& pc = {});
/// Exchanges (large1, large2) with (small1, small2).
SpinorField swap_large_small(const SpinorField& psi);
/// Uniform [0, 10] per point and component times a sin^2 box window.
SpinorField random_dirac_guess(const Grid& grid, std::uint64_t seed);
/// Band-limited exp(-a |r - R|^2) in large1 with kinetically balanced small part.
SpinorField gaussian_dirac_guess(const Grid& grid, const Nucleus& nucleus, double exponent,
                                 const PhysicalConstants& pc = {});

/// Kramers partner (-psi2*, psi1*, -psi4*, psi3*).
SpinorField time_reverse(const SpinorField& psi);

/// Norm of the projection of psi onto span{ref, T ref}, relative to |psi| |ref|.
double kramers_projection(const SpinorField& reference, const SpinorField& psi);

DiracState power_iterate_dirac(DiracState state, const ScalarField& V, const DiracPowerOptions& options);

struct DerivativeResult {
  double value;
  bool finite_difference;
};

/// Eigenvalue derivative with respect to kappa from the quadratic-form
/// identity; falls back to a centred difference when <psi, (H0 - E) psi>
/// is numerically zero.
DerivativeResult dlambda_dkappa(const DiracState& state, const ScalarField& V,
                                const DiracPowerOptions& options = {}, double max_residual = 1e-6);

/// Centred difference (lambda(kappa + h) - lambda(kappa - h)) / 2h from warm
/// started solves.
double dlambda_dkappa_fd(const DiracState& state, const ScalarField& V, double h,
                         const DiracPowerOptions& options);

DiracState newton_kappa(DiracState state, const ScalarField& V, double tol_lambda,
                        const DiracPowerOptions& options, int max_outer = 50);

/// <psi, (H0 + V) psi> / <psi, psi> - m c^2.
double dirac_energy_expectation(const SpinorField& psi, const ScalarField& V,
                                const PhysicalConstants& pc = {});

}  // namespace boundstate
