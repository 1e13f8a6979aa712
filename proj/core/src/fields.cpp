#include "boundstate/fields.hpp"

#include <fftw3.h>

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <map>
#include <mutex>
#include <utility>

#include "boundstate/constants.hpp"
#include "boundstate/kernel_expansion.hpp"

namespace boundstate {

namespace {

class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(std::size_t n, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto key = std::make_pair(n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    FieldBuffer scratch(n * n * n);
    auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
    const int dim = static_cast<int>(n);
    fftw_plan plan = fftw_plan_dft_3d(dim, dim, dim, p, p, sign, FFTW_ESTIMATE);
    if (plan == nullptr) throw std::runtime_error("FFTW planning failed");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

void require_same_grid(const ScalarField& a, const ScalarField& b) {
  if (!(a.grid() == b.grid())) throw GridMismatch("fields live on different grids");
  if (a.space() != b.space()) throw GridMismatch("fields live in different spaces");
}

void require_real(const ScalarField& f, const char* what) {
  if (f.space() != Space::Real) throw std::invalid_argument(std::string(what) + " needs a real-space field");
}

std::vector<cplx> axis_phase(const Grid& grid, double sign) {
  const std::size_t n = grid.n();
  const double x0 = grid.coordinate(0);
  std::vector<cplx> ph(n);
  for (std::size_t i = 0; i < n; ++i) ph[i] = std::polar(1.0, sign * grid.wavenumber(i) * x0);
  return ph;
}

void apply_phase(ScalarField& f, double sign, double scale) {
  const Grid& g = f.grid();
  const std::size_t n = g.n();
  const auto ph = axis_phase(g, sign);
  for (std::size_t iz = 0; iz < n; ++iz) {
    for (std::size_t iy = 0; iy < n; ++iy) {
      const cplx pyz = scale * ph[iy] * ph[iz];
      cplx* row = f.data() + g.index(0, iy, iz);
      for (std::size_t ix = 0; ix < n; ++ix) row[ix] *= pyz * ph[ix];
    }
  }
}

// Multiplies a raw-transformed field by scale / (param^2 + p^2).
void multiply_greens_symbol(ScalarField& f, double param, double scale) {
  const Grid& g = f.grid();
  const std::size_t n = g.n();
  const auto p = axis_wavenumbers(g);
  const double mu2 = param * param;
  for (std::size_t iz = 0; iz < n; ++iz) {
    for (std::size_t iy = 0; iy < n; ++iy) {
      const double pyz = mu2 + p[iy] * p[iy] + p[iz] * p[iz];
      cplx* row = f.data() + g.index(0, iy, iz);
      for (std::size_t ix = 0; ix < n; ++ix) row[ix] *= scale / (pyz + p[ix] * p[ix]);
    }
  }
}

// 1D Toeplitz kernel h * g(m h) of one Gaussian term, m = 0..n-1, cut where
// all remaining entries fall below 1e-14 of the peak.
std::vector<double> separated_kernel(double a, const Grid& g) {
  const std::size_t n = g.n();
  const double h = g.spacing();
  std::vector<double> k(n);
  for (std::size_t m = 0; m < n; ++m) k[m] = h * band_limited_gaussian(a, h * static_cast<double>(m), h);
  double peak = 0.0;
  for (double v : k) peak = std::max(peak, std::abs(v));
  std::size_t last = n;
  while (last > 1 && std::abs(k[last - 1]) < 1e-14 * peak) --last;
  k.resize(last);
  return k;
}

// out[i] = sum_j kern[|i-j|] in[j] along one axis of a stride-addressed line.
void convolve_axis(const std::vector<double>& kern, const cplx* in, cplx* out, std::size_t n,
                   std::size_t stride) {
  const std::size_t width = kern.size();
  for (std::size_t i = 0; i < n; ++i) {
    cplx acc = kern[0] * in[i * stride];
    const std::size_t reach = std::min(width - 1, std::max(i, n - 1 - i));
    for (std::size_t m = 1; m <= reach; ++m) {
      if (i >= m) acc += kern[m] * in[(i - m) * stride];
      if (i + m < n) acc += kern[m] * in[(i + m) * stride];
    }
    out[i * stride] = acc;
  }
}

void convolve_along(const std::vector<double>& kern, const ScalarField& in, ScalarField& out,
                    int axis) {
  const Grid& g = in.grid();
  const std::size_t n = g.n();
  const std::size_t stride = axis == 0 ? 1 : (axis == 1 ? n : n * n);
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t a = 0; a < n; ++a) {
      std::size_t base = 0;
      if (axis == 0) base = g.index(0, a, b);
      if (axis == 1) base = g.index(a, 0, b);
      if (axis == 2) base = g.index(a, b, 0);
      convolve_axis(kern, in.data() + base, out.data() + base, n, stride);
    }
  }
}

}  // namespace

Grid::Grid(std::size_t n, double box) : n_(n), box_(box) {
  if (!is_valid_axis_length(n)) {
    throw std::invalid_argument("grid axis length must be even, >= 16 and 2/3/5/7-smooth");
  }
  if (!(box > 0.0) || !std::isfinite(box)) throw std::invalid_argument("box length must be positive");
}

double Grid::cell_volume() const {
  const double h = spacing();
  return h * h * h;
}

double Grid::coordinate(std::size_t i) const {
  return -box_ / 2.0 + (static_cast<double>(i) + 0.5) * spacing();
}

long Grid::frequency_index(std::size_t i) const {
  const long k = static_cast<long>(i);
  const long half = static_cast<long>(n_ / 2);
  return k < half ? k : k - static_cast<long>(n_);
}

double Grid::wavenumber(std::size_t i) const {
  return 2.0 * kPi * static_cast<double>(frequency_index(i)) / box_;
}

bool is_valid_axis_length(std::size_t n) {
  if (n < 16 || n % 2 != 0) return false;
  for (std::size_t p : {2u, 3u, 5u, 7u}) {
    while (n % p == 0) n /= p;
  }
  return n == 1;
}

ScalarField::ScalarField(const Grid& grid, Space space)
    : grid_(grid), space_(space), values_(grid.size(), cplx(0.0, 0.0)) {}

ScalarField& ScalarField::operator*=(cplx s) {
  for (auto& v : values_) v *= s;
  return *this;
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

SpinorField::SpinorField(const Grid& grid, Space space)
    : c{ScalarField(grid, space), ScalarField(grid, space), ScalarField(grid, space),
        ScalarField(grid, space)} {}

SpinorField::SpinorField(ScalarField l1, ScalarField l2, ScalarField s1, ScalarField s2)
    : c{std::move(l1), std::move(l2), std::move(s1), std::move(s2)} {
  for (std::size_t i = 1; i < 4; ++i) require_same_grid(c[0], c[i]);
}

SpinorField& SpinorField::operator*=(cplx s) {
  for (auto& comp : c) comp *= s;
  return *this;
}

SpinorField& SpinorField::operator+=(const SpinorField& other) {
  for (std::size_t i = 0; i < 4; ++i) c[i] += other.c[i];
  return *this;
}

SpinorField& SpinorField::operator-=(const SpinorField& other) {
  for (std::size_t i = 0; i < 4; ++i) c[i] -= other.c[i];
  return *this;
}

void raw_fft_in_place(ScalarField& field, Direction direction) {
  const int sign = direction == Direction::Forward ? FFTW_FORWARD : FFTW_BACKWARD;
  fftw_plan plan = PlanCache::instance().get(field.grid().n(), sign);
  auto* p = reinterpret_cast<fftw_complex*>(field.data());
  fftw_execute_dft(plan, p, p);
}

void transform_in_place(ScalarField& field, Direction direction) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(field.size()));
  if (direction == Direction::Forward) {
    if (field.space() != Space::Real) throw std::invalid_argument("forward transform needs a real-space field");
    raw_fft_in_place(field, direction);
    apply_phase(field, -1.0, scale);
    field.set_space(Space::Momentum);
  } else {
    if (field.space() != Space::Momentum) {
      throw std::invalid_argument("inverse transform needs a momentum-space field");
    }
    apply_phase(field, 1.0, scale);
    raw_fft_in_place(field, direction);
    field.set_space(Space::Real);
  }
}

void transform_in_place(SpinorField& field, Direction direction) {
  for (auto& comp : field.c) transform_in_place(comp, direction);
}

ScalarField transform(const ScalarField& field, Direction direction) {
  ScalarField out = field;
  transform_in_place(out, direction);
  return out;
}

SpinorField transform(const SpinorField& field, Direction direction) {
  SpinorField out = field;
  transform_in_place(out, direction);
  return out;
}

std::vector<double> axis_wavenumbers(const Grid& grid) {
  std::vector<double> p(grid.n());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = grid.wavenumber(i);
  return p;
}

ScalarField apply_greens_scalar(const ScalarField& field, double param, GreensBoundary boundary) {
  require_real(field, "apply_greens_scalar");
  if (!(param > 0.0)) throw std::invalid_argument("Green's parameter must be positive");
  const Grid& g = field.grid();
  if (boundary == GreensBoundary::Periodic) {
    ScalarField out = field;
    apply_greens_periodic_in_place(out, param);
    return out;
  }

  const std::size_t n = g.n();
  const Grid padded_grid(2 * n, 2.0 * g.box());
  ScalarField padded(padded_grid);
  for (std::size_t iz = 0; iz < n; ++iz) {
    for (std::size_t iy = 0; iy < n; ++iy) {
      std::copy_n(field.data() + g.index(0, iy, iz), n, padded.data() + padded_grid.index(0, iy, iz));
    }
  }
  raw_fft_in_place(padded, Direction::Forward);
  multiply_greens_symbol(padded, param, 1.0 / static_cast<double>(padded.size()));
  raw_fft_in_place(padded, Direction::Inverse);
  ScalarField out(g);
  for (std::size_t iz = 0; iz < n; ++iz) {
    for (std::size_t iy = 0; iy < n; ++iy) {
      std::copy_n(padded.data() + padded_grid.index(0, iy, iz), n, out.data() + g.index(0, iy, iz));
    }
  }
  return out;
}

void apply_greens_periodic_in_place(ScalarField& field, double param) {
  require_real(field, "apply_greens_periodic_in_place");
  if (!(param > 0.0)) throw std::invalid_argument("Green's parameter must be positive");
  raw_fft_in_place(field, Direction::Forward);
  multiply_greens_symbol(field, param, 1.0 / static_cast<double>(field.size()));
  raw_fft_in_place(field, Direction::Inverse);
}

ScalarField apply_greens_separated(const ScalarField& field, double param, double epsilon) {
  require_real(field, "apply_greens_separated");
  if (!(param > 0.0)) throw std::invalid_argument("Green's parameter must be positive");
  const Grid& g = field.grid();
  const double d_lo = 1e-3 * g.spacing();
  // beyond 40 / param the kernel is below e^{-40} of its near-field size
  const double d_hi = std::max(10.0 * d_lo, std::min(2.0 * std::sqrt(3.0) * g.box(), 40.0 / param));
  const GaussianSum sum = build_helmholtz_sum(param, epsilon, d_lo, d_hi);

  ScalarField out(g);
  ScalarField a(g);
  ScalarField b(g);
  for (const auto& term : sum.terms) {
    const auto kern = separated_kernel(term.exponent, g);
    convolve_along(kern, field, a, 0);
    convolve_along(kern, a, b, 1);
    convolve_along(kern, b, a, 2);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += term.weight * a[i];
  }
  return out;
}

SpinorField apply_greens_spinor(const SpinorField& field, double kappa, GreensBoundary boundary) {
  return SpinorField(apply_greens_scalar(field[0], kappa, boundary),
                     apply_greens_scalar(field[1], kappa, boundary),
                     apply_greens_scalar(field[2], kappa, boundary),
                     apply_greens_scalar(field[3], kappa, boundary));
}

cplx inner_product(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b);
  cplx acc(0.0, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc * a.grid().cell_volume();
}

cplx inner_product(const SpinorField& a, const SpinorField& b) {
  cplx acc(0.0, 0.0);
  for (std::size_t i = 0; i < 4; ++i) acc += inner_product(a[i], b[i]);
  return acc;
}

double norm(const ScalarField& a) { return std::sqrt(inner_product(a, a).real()); }

double norm(const SpinorField& a) { return std::sqrt(inner_product(a, a).real()); }

ScalarField normalize(const ScalarField& a) {
  const double nrm = norm(a);
  if (!(nrm > 0.0)) throw std::invalid_argument("cannot normalize a zero field");
  ScalarField out = a;
  out *= 1.0 / nrm;
  return out;
}

SpinorField normalize(const SpinorField& a) {
  const double nrm = norm(a);
  if (!(nrm > 0.0)) throw std::invalid_argument("cannot normalize a zero spinor");
  SpinorField out = a;
  out *= 1.0 / nrm;
  return out;
}

double band_limited_gaussian(double a, double x, double spacing) {
  const double cutoff = kPi / spacing;
  if (cutoff * cutoff / (4.0 * a) > 40.0) return std::exp(-a * x * x);
  // (1/pi) int_0^K sqrt(pi/a) exp(-k^2/4a) cos(k x) dk, panels resolve cos(kx)
  const double pre = std::sqrt(kPi / a) / kPi;
  const auto panels = static_cast<std::size_t>(std::ceil(cutoff * std::abs(x) / kPi)) + 1;
  const double width = cutoff / static_cast<double>(panels);
  double acc = 0.0;
  for (std::size_t j = 0; j < panels; ++j) {
    const double lo = width * static_cast<double>(j);
    acc += boost::math::quadrature::gauss<double, 20>::integrate(
        [&](double k) { return std::exp(-k * k / (4.0 * a)) * std::cos(k * x); }, lo, lo + width);
  }
  return pre * acc;
}

}  // namespace boundstate
