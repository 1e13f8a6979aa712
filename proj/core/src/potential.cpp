#include "boundstate/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace boundstate {

void validate(const PotentialSpec& spec, const Grid& grid, const PhysicalConstants& pc) {
  if (!(spec.epsilon_reg > 0.0 && spec.epsilon_reg <= 1e-2)) {
    throw std::invalid_argument("epsilon_reg must lie in (0, 1e-2]");
  }
  if (!(spec.shift_tau >= 0.0)) throw std::invalid_argument("shift_tau must be non-negative");
  const double half = grid.box() / 2.0;
  for (std::size_t a = 0; a < spec.nuclei.size(); ++a) {
    const Nucleus& nuc = spec.nuclei[a];
    if (!(nuc.Z > 0.0 && nuc.Z < pc.c)) {
      throw std::invalid_argument("nucleus " + std::to_string(a) + ": charge must lie in (0, c)");
    }
    for (double x : nuc.position) {
      if (!(std::abs(x) < half)) {
        throw std::invalid_argument("nucleus " + std::to_string(a) + " lies outside the box");
      }
    }
  }
}

GaussianSum coulomb_expansion(const PotentialSpec& spec, const Grid& grid) {
  const double diagonal = std::sqrt(3.0) * grid.box();
  return build_power_sum(1.0, spec.epsilon_reg, 1e-6, 2.0 * diagonal);
}

ScalarField assemble(const PotentialSpec& spec, const Grid& grid, PotentialSampling sampling) {
  validate(spec, grid);
  ScalarField V(grid);
  const std::size_t n = grid.n();
  if (!spec.nuclei.empty()) {
    const GaussianSum sum = coulomb_expansion(spec, grid);
    const double h = grid.spacing();
    for (const Nucleus& nuc : spec.nuclei) {
      if (sampling == PotentialSampling::Pointwise) {
        for (std::size_t iz = 0; iz < n; ++iz) {
          const double dz = grid.coordinate(iz) - nuc.position[2];
          for (std::size_t iy = 0; iy < n; ++iy) {
            const double dy = grid.coordinate(iy) - nuc.position[1];
            for (std::size_t ix = 0; ix < n; ++ix) {
              const double dx = grid.coordinate(ix) - nuc.position[0];
              V[grid.index(ix, iy, iz)] -= nuc.Z * evaluate_sum(sum, std::sqrt(dx * dx + dy * dy + dz * dz));
            }
          }
        }
        continue;
      }
      std::array<std::vector<double>, 3> g;
      for (const auto& term : sum.terms) {
        for (int axis = 0; axis < 3; ++axis) {
          g[axis].resize(n);
          for (std::size_t i = 0; i < n; ++i) {
            g[axis][i] = band_limited_gaussian(term.exponent, grid.coordinate(i) - nuc.position[axis], h);
          }
        }
        const double scale = nuc.Z * term.weight;
        for (std::size_t iz = 0; iz < n; ++iz) {
          for (std::size_t iy = 0; iy < n; ++iy) {
            const double gyz = scale * g[1][iy] * g[2][iz];
            cplx* row = V.data() + grid.index(0, iy, iz);
            for (std::size_t ix = 0; ix < n; ++ix) row[ix] -= gyz * g[0][ix];
          }
        }
      }
    }
  }
  if (spec.shift_tau != 0.0) {
    for (auto& v : V.values()) v -= spec.shift_tau;
  }
  return V;
}

double max_real(const ScalarField& f) {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& v : f.values()) m = std::max(m, v.real());
  return m;
}

double required_shift(const ScalarField& V) {
  const double top = max_real(V);
  return top < 0.0 ? 0.0 : top + 1e-12;
}

PotentialSpec make_negative_definite(const PotentialSpec& spec, const Grid& grid,
                                     PotentialSampling sampling) {
  PotentialSpec unshifted = spec;
  unshifted.shift_tau = 0.0;
  PotentialSpec out = spec;
  out.shift_tau = required_shift(assemble(unshifted, grid, sampling));
  return out;
}

}  // namespace boundstate
