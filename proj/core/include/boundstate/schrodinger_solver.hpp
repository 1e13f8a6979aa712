#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "boundstate/fields.hpp"
#include "boundstate/potential.hpp"

namespace boundstate {

struct IterationRecord {
  int iter = 0;
  double lambda = 0.0;
  double lambda_im = 0.0;
  double energy = 0.0;
  double residual = 0.0;
  /// Overlap with the reference state, or NaN when no reference was given.
  double projection = 0.0;
};

struct NewtonStep {
  double parameter;
  double lambda;
  double derivative;
};

struct SchrodingerState {
  double mu = 1.0;
  double lambda = 0.0;
  double lambda_im = 0.0;
  ScalarField psi;
  /// Energy expectation of psi plus tau; -mu^2/2 + tau after a Newton solve.
  double energy = 0.0;
  double residual = 0.0;
  double tau = 0.0;
  bool converged = false;
  int iterations = 0;
  std::vector<IterationRecord> history;
  std::vector<NewtonStep> newton;

  SchrodingerState(ScalarField psi0, double mu0, double tau0 = 0.0);
};

struct PowerOptions {
  int max_iters = 200;
  double tol = 1e-8;
  GreensBoundary boundary = GreensBoundary::Periodic;
  /// Converged eigenfunctions to deflate against each sweep.
  std::vector<ScalarField> deflate;
  std::optional<ScalarField> reference;
  bool record_energy = true;
};

class BreakdownError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NewtonError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Normalised e^{-Z|r - R|} centred on the nucleus.
ScalarField hydrogenic_guess(const Grid& grid, const Nucleus& nucleus);

/// -2 G_mu (V psi).
ScalarField apply_T(const ScalarField& psi, double mu, const ScalarField& V,
                    GreensBoundary boundary = GreensBoundary::Periodic);

SchrodingerState power_iterate(SchrodingerState state, const ScalarField& V,
                               const PowerOptions& options);

/// -2 mu lambda |psi|^2 / <psi, (mu^2 + p^2) psi>. Rejects states whose
/// residual exceeds max_residual.
double dlambda_dmu(const SchrodingerState& state, const ScalarField& V, double max_residual = 1e-6);

/// Newton iteration on mu towards lambda = 1, re-solving at each step.
SchrodingerState newton_mu(SchrodingerState state, const ScalarField& V, double tol_lambda,
                           const PowerOptions& options, int max_outer = 50);

/// <psi, (-Laplacian/2 + V) psi> / <psi, psi>.
double energy_expectation(const ScalarField& psi, const ScalarField& V);

/// <psi, (mu^2 + p^2) psi> via the momentum symbol.
double greens_inverse_form(const ScalarField& psi, double mu);

}  // namespace boundstate
