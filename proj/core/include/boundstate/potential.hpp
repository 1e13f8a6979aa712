#pragma once

#include <array>
#include <vector>

#include "boundstate/constants.hpp"
#include "boundstate/fields.hpp"
#include "boundstate/kernel_expansion.hpp"

namespace boundstate {

struct Nucleus {
  double Z = 1.0;
  std::array<double, 3> position{0.0, 0.0, 0.0};
};

struct PotentialSpec {
  std::vector<Nucleus> nuclei;
  double epsilon_reg = 1e-6;
  double shift_tau = 0.0;
};

enum class PotentialSampling {
  /// Gaussian-sum Coulomb tail sampled at grid points.
  Pointwise,
  /// Each Gaussian term projected onto the grid's momentum band before
  /// sampling; narrow terms keep their weight instead of vanishing between
  /// grid points.
  BandLimited,
};

/// Throws std::invalid_argument when a nucleus has Z outside (0, c), lies
/// outside the box, or epsilon_reg is outside (0, 1e-2].
void validate(const PotentialSpec& spec, const Grid& grid, const PhysicalConstants& pc = {});

/// Gaussian expansion of 1/r used for the regularised Coulomb attraction.
GaussianSum coulomb_expansion(const PotentialSpec& spec, const Grid& grid);

/// V(r) = -sum_a Z_a S(|r - R_a|) - tau.
ScalarField assemble(const PotentialSpec& spec, const Grid& grid,
                     PotentialSampling sampling = PotentialSampling::BandLimited);

/// Smallest shift that leaves V - tau strictly negative on the grid:
/// zero when V is already negative, max V + 1e-12 otherwise.
double required_shift(const ScalarField& V);

PotentialSpec make_negative_definite(const PotentialSpec& spec, const Grid& grid,
                                     PotentialSampling sampling = PotentialSampling::BandLimited);

double max_real(const ScalarField& f);

}  // namespace boundstate
