#pragma once

// Periodic grid standing in for the real line, the two faces of a field
// (samples and Fourier coefficients), Fourier multipliers and L^p quadrature.
//
// Normalization: coeffs(m) = (1/N) sum_i f(x_i) exp(-i xi_m x_i), so that
// coeffs(m) approximates fhat(xi_m)/L with fhat(xi) = int exp(-i x xi) f(x) dx,
// and f(x_i) = sum_m coeffs(m) exp(i xi_m x_i) exactly.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <fftw3.h>

#include "besovlab/error.hpp"

namespace besovlab {

using complex = std::complex<double>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

class Grid {
 public:
  Grid(double length, std::size_t num_points) : length_(length), size_(num_points) {
    if (!(length > 0.0) || !std::isfinite(length)) {
      fail(ErrorKind::InvalidParameter, "grid length must be positive and finite");
    }
    if (num_points < 2 || (num_points & (num_points - 1)) != 0) {
      fail(ErrorKind::InvalidParameter,
           "grid size must be a power of two >= 2, got " + std::to_string(num_points));
    }
  }

  double length() const { return length_; }
  std::size_t size() const { return size_; }
  double dx() const { return length_ / static_cast<double>(size_); }
  double dxi() const { return 2.0 * std::numbers::pi / length_; }
  double xi_max() const { return std::numbers::pi * static_cast<double>(size_) / length_; }

  double x(std::size_t i) const { return -0.5 * length_ + static_cast<double>(i) * dx(); }

  // Storage is FFT order: index i holds wavenumber i for i < N/2, i - N otherwise.
  long wavenumber(std::size_t index) const {
    const auto n = static_cast<long>(size_);
    const auto i = static_cast<long>(index);
    return i < n / 2 ? i : i - n;
  }
  std::size_t index_of(long m) const {
    const auto n = static_cast<long>(size_);
    return static_cast<std::size_t>(((m % n) + n) % n);
  }
  double xi(std::size_t index) const { return static_cast<double>(wavenumber(index)) * dxi(); }
  std::size_t nyquist_index() const { return size_ / 2; }

  std::string fingerprint() const {
    std::ostringstream os;
    os.precision(17);
    os << "L=" << length_ << ",N=" << size_;
    return os.str();
  }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.length_ == b.length_ && a.size_ == b.size_;
  }

 private:
  double length_;
  std::size_t size_;
};

class RealField {
 public:
  explicit RealField(const Grid& grid) : grid_(grid), samples_(grid.size(), 0.0) {}
  RealField(const Grid& grid, std::vector<double> samples) : grid_(grid), samples_(std::move(samples)) {
    if (samples_.size() != grid_.size()) {
      fail(ErrorKind::InvalidField, "sample count does not match grid size");
    }
  }

  template <typename F>
  static RealField sample(const Grid& grid, F&& f) {
    RealField out(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) out.samples_[i] = f(grid.x(i));
    return out;
  }

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return samples_.size(); }
  std::span<const double> samples() const { return samples_; }
  std::span<double> samples() { return samples_; }
  double operator[](std::size_t i) const { return samples_[i]; }
  double& operator[](std::size_t i) { return samples_[i]; }

  bool all_finite() const {
    return std::all_of(samples_.begin(), samples_.end(), [](double v) { return std::isfinite(v); });
  }
  double max_abs() const {
    double m = 0.0;
    for (double v : samples_) m = std::max(m, std::abs(v));
    return m;
  }

  RealField& operator+=(const RealField& o) {
    check_same(o);
    for (std::size_t i = 0; i < samples_.size(); ++i) samples_[i] += o.samples_[i];
    return *this;
  }
  RealField& operator-=(const RealField& o) {
    check_same(o);
    for (std::size_t i = 0; i < samples_.size(); ++i) samples_[i] -= o.samples_[i];
    return *this;
  }
  RealField& operator*=(double a) {
    for (double& v : samples_) v *= a;
    return *this;
  }
  friend RealField operator+(RealField a, const RealField& b) { return a += b; }
  friend RealField operator-(RealField a, const RealField& b) { return a -= b; }
  friend RealField operator*(double s, RealField a) { return a *= s; }

 private:
  void check_same(const RealField& o) const {
    if (!(o.grid_ == grid_)) fail(ErrorKind::InvalidField, "fields bound to different grids");
  }

  Grid grid_;
  std::vector<double> samples_;
};

// Pointwise product of two fields on the same grid.
inline RealField pointwise(const RealField& a, const RealField& b) {
  if (!(a.grid() == b.grid())) fail(ErrorKind::InvalidField, "fields bound to different grids");
  RealField out(a.grid());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

class SpectralField {
 public:
  explicit SpectralField(const Grid& grid) : grid_(grid), coeffs_(grid.size(), complex{}) {}
  SpectralField(const Grid& grid, std::vector<complex> coeffs) : grid_(grid), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != grid_.size()) {
      fail(ErrorKind::InvalidField, "coefficient count does not match grid size");
    }
  }

  // Fills coefficients from a function of physical frequency xi (all modes).
  template <typename F>
  static SpectralField from_symbol(const Grid& grid, F&& f) {
    SpectralField out(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) out.coeffs_[i] = f(grid.xi(i));
    return out;
  }

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return coeffs_.size(); }
  std::span<const complex> coeffs() const { return coeffs_; }
  std::span<complex> coeffs() { return coeffs_; }
  complex operator[](std::size_t index) const { return coeffs_[index]; }
  complex& operator[](std::size_t index) { return coeffs_[index]; }
  // Access by signed wavenumber m in [-N/2, N/2).
  complex at_mode(long m) const { return coeffs_[grid_.index_of(m)]; }

  double max_abs() const {
    double m = 0.0;
    for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
    return m;
  }
  bool is_zero() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const complex& c) { return c == complex{}; });
  }

  SpectralField& operator+=(const SpectralField& o) {
    check_same(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
  }
  SpectralField& operator-=(const SpectralField& o) {
    check_same(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
  }
  SpectralField& operator*=(double a) {
    for (auto& c : coeffs_) c *= a;
    return *this;
  }
  // this += a * o
  SpectralField& add_scaled(double a, const SpectralField& o) {
    check_same(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += a * o.coeffs_[i];
    return *this;
  }
  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

 private:
  void check_same(const SpectralField& o) const {
    if (!(o.grid_ == grid_)) fail(ErrorKind::InvalidField, "fields bound to different grids");
  }

  Grid grid_;
  std::vector<complex> coeffs_;
};

namespace detail {

// One forward and one backward FFTW plan per size. Planning is serialized;
// fftw_execute_dft on distinct arrays is thread-safe.
class FftPlans {
 public:
  static const FftPlans& get(std::size_t n) {
    static std::mutex mutex;
    static std::map<std::size_t, std::unique_ptr<FftPlans>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) slot.reset(new FftPlans(n));
    return *slot;
  }

  void forward(std::vector<complex>& data) const { execute(forward_, data); }
  void backward(std::vector<complex>& data) const { execute(backward_, data); }

  ~FftPlans() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }
  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;

 private:
  explicit FftPlans(std::size_t n) {
    std::vector<complex> scratch(n);
    auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
    const int size = static_cast<int>(n);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward_ = fftw_plan_dft_1d(size, p, p, FFTW_FORWARD, flags);
    backward_ = fftw_plan_dft_1d(size, p, p, FFTW_BACKWARD, flags);
  }

  static void execute(fftw_plan plan, std::vector<complex>& data) {
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, p, p);
  }

  fftw_plan forward_{};
  fftw_plan backward_{};
};

// x_0 = -L/2 contributes the phase exp(i pi m) = (-1)^m, and (-1)^m = (-1)^index for even N.
inline void alternate_signs(std::vector<complex>& data) {
  for (std::size_t i = 1; i < data.size(); i += 2) data[i] = -data[i];
}

}  // namespace detail

inline constexpr double kSymmetryTolerance = 1e-10;

inline SpectralField forward_transform(const RealField& f) {
  if (!f.all_finite()) fail(ErrorKind::InvalidField, "non-finite sample in forward transform");
  const std::size_t n = f.size();
  std::vector<complex> data(n);
  for (std::size_t i = 0; i < n; ++i) data[i] = f[i];
  detail::FftPlans::get(n).forward(data);
  const double scale = 1.0 / static_cast<double>(n);
  for (auto& c : data) c *= scale;
  detail::alternate_signs(data);
  // Real input: project onto exactly Hermitian spectra so that differences of
  // nearby fields stay symmetric.
  data[0] = complex(data[0].real(), 0.0);
  data[n / 2] = complex(data[n / 2].real(), 0.0);
  for (std::size_t i = 1; i < n / 2; ++i) {
    const complex avg = 0.5 * (data[i] + std::conj(data[n - i]));
    data[i] = avg;
    data[n - i] = std::conj(avg);
  }
  return SpectralField(f.grid(), std::move(data));
}

// Largest |coeffs(m) - conj(coeffs(-m))| relative to the largest coefficient.
inline double hermitian_defect(const SpectralField& F) {
  const Grid& g = F.grid();
  const double scale = F.max_abs();
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const std::size_t j = g.index_of(-g.wavenumber(i));
    worst = std::max(worst, std::abs(F[i] - std::conj(F[j])));
  }
  return worst / scale;
}

inline RealField inverse_transform(const SpectralField& F) {
  const double defect = hermitian_defect(F);
  if (!(defect <= kSymmetryTolerance)) {
    std::ostringstream os;
    os << "spectrum violates Hermitian symmetry (relative defect " << defect << ")";
    fail(ErrorKind::Asymmetry, os.str());
  }
  std::vector<complex> data(F.coeffs().begin(), F.coeffs().end());
  detail::alternate_signs(data);
  detail::FftPlans::get(data.size()).backward(data);
  RealField out(F.grid());
  for (std::size_t i = 0; i < data.size(); ++i) out[i] = data[i].real();
  return out;
}

// Scales coeffs(m) by symbol(xi_m). The Nyquist mode has no partner, so it is
// scaled by the real part of the symbol; this keeps real fields real.
template <typename Symbol>
SpectralField apply_multiplier(const SpectralField& F, Symbol&& symbol) {
  const Grid& g = F.grid();
  SpectralField out(g);
  const std::size_t nyq = g.nyquist_index();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const complex s = symbol(g.xi(i));
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
      fail(ErrorKind::InvalidParameter, "multiplier symbol is not finite on the grid");
    }
    out[i] = (i == nyq ? complex(s.real(), 0.0) : s) * F[i];
  }
  return out;
}

inline SpectralField derivative(const SpectralField& F) {
  return apply_multiplier(F, [](double xi) { return complex(0.0, xi); });
}

inline SpectralField helmholtz_inverse(const SpectralField& F) {
  return apply_multiplier(F, [](double xi) { return complex(1.0 / (1.0 + xi * xi), 0.0); });
}

// (1 - d^2/dx^2)
inline SpectralField helmholtz(const SpectralField& F) {
  return apply_multiplier(F, [](double xi) { return complex(1.0 + xi * xi, 0.0); });
}

inline double dealias_cutoff(const Grid& grid, double fraction) { return fraction * grid.xi_max(); }

inline SpectralField dealias(const SpectralField& F, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    fail(ErrorKind::InvalidParameter, "dealias fraction must lie in (0, 1]");
  }
  const Grid& g = F.grid();
  const double cutoff = dealias_cutoff(g, fraction);
  SpectralField out = F;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (std::abs(g.xi(i)) > cutoff) out[i] = complex{};
  }
  return out;
}

// Fraction of sum |c|^2 carried by modes with |xi| > cutoff.
inline double energy_fraction_above(const SpectralField& F, double cutoff) {
  const Grid& g = F.grid();
  double above = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double e = std::norm(F[i]);
    total += e;
    if (std::abs(g.xi(i)) > cutoff) above += e;
  }
  return total > 0.0 ? above / total : 0.0;
}

inline void check_exponent(double p) {
  if (!(p >= 1.0)) fail(ErrorKind::InvalidParameter, "L^p exponent must satisfy p >= 1");
}

// Rectangle rule on the grid.
inline double lp_norm(std::span<const double> samples, double dx, double p) {
  check_exponent(p);
  if (p == kInfinity) {
    double m = 0.0;
    for (double v : samples) m = std::max(m, std::abs(v));
    return m;
  }
  double sum = 0.0;
  if (p == 2.0) {
    for (double v : samples) sum += v * v;
    return std::sqrt(sum * dx);
  }
  for (double v : samples) sum += std::pow(std::abs(v), p);
  return std::pow(sum * dx, 1.0 / p);
}

inline double lp_norm(const RealField& f, double p) { return lp_norm(f.samples(), f.grid().dx(), p); }

// Discrete Parseval: sum_i |f(x_i)|^2 dx = L sum_m |coeffs(m)|^2.
inline double l2_norm(const SpectralField& F) {
  double sum = 0.0;
  for (const auto& c : F.coeffs()) sum += std::norm(c);
  return std::sqrt(F.grid().length() * sum);
}

}  // namespace besovlab
