#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <new>
#include <span>
#include <stdexcept>
#include <vector>

namespace boundstate {

using cplx = std::complex<double>;

/// Uniform cell-centred cubic grid on [-L/2, L/2)^3. Point i sits at
/// -L/2 + (i + 1/2) h, so the box centre is never a grid point.
class Grid {
 public:
  Grid(std::size_t n, double box);

  std::size_t n() const { return n_; }
  double box() const { return box_; }
  double spacing() const { return box_ / static_cast<double>(n_); }
  std::size_t size() const { return n_ * n_ * n_; }
  double cell_volume() const;
  double coordinate(std::size_t i) const;
  /// Signed frequency index for FFT-ordered position i: k in [-n/2, n/2).
  long frequency_index(std::size_t i) const;
  /// Angular wavenumber 2 pi k / L for FFT-ordered position i.
  double wavenumber(std::size_t i) const;
  std::size_t index(std::size_t ix, std::size_t iy, std::size_t iz) const {
    return ix + n_ * (iy + n_ * iz);
  }

  bool operator==(const Grid& other) const { return n_ == other.n_ && box_ == other.box_; }

 private:
  std::size_t n_;
  double box_;
};

/// Accepted axis lengths: even, at least 16, and 2/3/5/7-smooth.
bool is_valid_axis_length(std::size_t n);

enum class Space : std::uint8_t { Real = 0, Momentum = 1 };
enum class Direction { Forward, Inverse };

template <class T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlign{64};

  AlignedAllocator() = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) {}

  T* allocate(std::size_t count) {
    return static_cast<T*>(::operator new(count * sizeof(T), kAlign));
  }
  void deallocate(T* p, std::size_t) { ::operator delete(p, kAlign); }

  template <class U>
  bool operator==(const AlignedAllocator<U>&) const { return true; }
};

using FieldBuffer = std::vector<cplx, AlignedAllocator<cplx>>;

/// Complex samples on a Grid, x-fastest. Momentum-space values are stored
/// in FFT order along each axis.
class ScalarField {
 public:
  explicit ScalarField(const Grid& grid, Space space = Space::Real);

  const Grid& grid() const { return grid_; }
  Space space() const { return space_; }
  void set_space(Space s) { space_ = s; }

  std::size_t size() const { return values_.size(); }
  cplx* data() { return values_.data(); }
  const cplx* data() const { return values_.data(); }
  std::span<cplx> values() { return values_; }
  std::span<const cplx> values() const { return values_; }
  cplx& operator[](std::size_t i) { return values_[i]; }
  const cplx& operator[](std::size_t i) const { return values_[i]; }

  ScalarField& operator*=(cplx s);
  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);

 private:
  Grid grid_;
  Space space_;
  FieldBuffer values_;
};

/// Four components ordered (large1, large2, small1, small2).
struct SpinorField {
  std::array<ScalarField, 4> c;

  explicit SpinorField(const Grid& grid, Space space = Space::Real);
  SpinorField(ScalarField l1, ScalarField l2, ScalarField s1, ScalarField s2);

  const Grid& grid() const { return c[0].grid(); }
  Space space() const { return c[0].space(); }
  ScalarField& operator[](std::size_t i) { return c[i]; }
  const ScalarField& operator[](std::size_t i) const { return c[i]; }

  SpinorField& operator*=(cplx s);
  SpinorField& operator+=(const SpinorField& other);
  SpinorField& operator-=(const SpinorField& other);
};

template <class F>
ScalarField sample(const Grid& grid, F&& f) {
  ScalarField out(grid);
  const std::size_t n = grid.n();
  for (std::size_t iz = 0; iz < n; ++iz) {
    const double z = grid.coordinate(iz);
    for (std::size_t iy = 0; iy < n; ++iy) {
      const double y = grid.coordinate(iy);
      for (std::size_t ix = 0; ix < n; ++ix) {
        out[grid.index(ix, iy, iz)] = f(grid.coordinate(ix), y, z);
      }
    }
  }
  return out;
}

// Fourier transforms. Unitary and phase-referenced to the physical grid
// coordinates, so a real even function has a real transform.
ScalarField transform(const ScalarField& field, Direction direction);
SpinorField transform(const SpinorField& field, Direction direction);
void transform_in_place(ScalarField& field, Direction direction);
void transform_in_place(SpinorField& field, Direction direction);

/// Unnormalised, unphased in-place DFT for pipelines that only multiply by
/// functions of |p|. Forward followed by inverse scales by n^3.
void raw_fft_in_place(ScalarField& field, Direction direction);

/// Wavenumbers 2 pi k / L along one axis, in FFT order.
std::vector<double> axis_wavenumbers(const Grid& grid);

enum class GreensBoundary {
  FreeSpace,  ///< symbol on a 2x zero-padded grid
  Periodic,   ///< symbol on the grid itself
};

/// Convolution with e^{-param r}/(4 pi r) applied through the momentum symbol
/// (param^2 + p^2)^{-1}.
ScalarField apply_greens_scalar(const ScalarField& field, double param,
                                GreensBoundary boundary = GreensBoundary::FreeSpace);

/// Periodic symbol path applied in place to a real-space field.
void apply_greens_periodic_in_place(ScalarField& field, double param);

/// Same convolution through a separated Gaussian expansion of the kernel,
/// applied as sequential 1D convolutions.
ScalarField apply_greens_separated(const ScalarField& field, double param,
                                   double epsilon = 1e-10);

SpinorField apply_greens_spinor(const SpinorField& field, double kappa,
                                GreensBoundary boundary = GreensBoundary::FreeSpace);

cplx inner_product(const ScalarField& a, const ScalarField& b);
cplx inner_product(const SpinorField& a, const SpinorField& b);
double norm(const ScalarField& a);
double norm(const SpinorField& a);
ScalarField normalize(const ScalarField& a);
SpinorField normalize(const SpinorField& a);

/// Band-limited projection of exp(-a x^2) onto |k| < pi/h, evaluated at x.
double band_limited_gaussian(double a, double x, double spacing);

class GridMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace boundstate
