#pragma once

// Explicit initial data: the bump phi (prescribed by its transform), wave
// packets phi(x) cos(17/12 (2^{kn} +- 2^{ki}) x), the Camassa-Holm series
// datum sum_n 2^{-kn sigma} f^k_n and the Novikov power-law datum.
//
// Packets are assembled in spectral space from shifted copies of the sampled
// bump transform, so their spectra vanish exactly outside the predicted
// annulus; the physical field is the periodization of phi(x) cos(omega x).

#include <cmath>
#include <optional>
#include <string>

#include "besovlab/littlewood_paley.hpp"
#include "besovlab/spectral.hpp"

namespace besovlab {

inline constexpr double kCarrier = 17.0 / 12.0;
inline constexpr double kHatPlateau = 0.25;
inline constexpr double kHatEdge = 0.5;
inline constexpr double kTailMargin = 10.0;
inline constexpr double kTailTolerance = 1e-10;
inline constexpr double kQuadraticDealias = 2.0 / 3.0;
inline constexpr double kCubicDealias = 0.5;

// Even, nonnegative, 1 on |xi| <= 1/4 and 0 on |xi| >= 1/2.
inline double hat_profile(double xi) {
  return 1.0 - smooth_step((std::abs(xi) - kHatPlateau) / (kHatEdge - kHatPlateau));
}

// Relative energy of the samples outside |x| <= L/2 - margin.
inline double tail_energy_fraction(const RealField& f, double margin = kTailMargin) {
  const Grid& g = f.grid();
  const double inner = 0.5 * g.length() - margin;
  double tail = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double e = f[i] * f[i];
    total += e;
    if (std::abs(g.x(i)) > inner) tail += e;
  }
  return total > 0.0 ? tail / total : 0.0;
}

inline void check_tail(const RealField& f, const std::string& what) {
  const double frac = tail_energy_fraction(f);
  if (!(frac < kTailTolerance)) {
    fail(ErrorKind::TailEnergy, what + " has relative tail energy " + short_number(frac) +
                                    " (limit 1e-10); enlarge the grid length");
  }
}

struct BumpProfile {
  SpectralField spectrum;
  RealField field;
  double tail_fraction = 0.0;

  double hat(double xi) const { return hat_profile(xi); }
  const Grid& grid() const { return field.grid(); }
};

inline BumpProfile make_bump(const Grid& grid) {
  if (grid.dxi() > 1.0 / 64.0) {
    fail(ErrorKind::Resolution, "bump needs frequency spacing <= 1/64 (grid length >= 128*pi)");
  }
  if (grid.xi_max() <= kHatEdge) fail(ErrorKind::Resolution, "grid does not resolve |xi| <= 1/2");
  const double inv_l = 1.0 / grid.length();
  SpectralField spectrum =
      SpectralField::from_symbol(grid, [&](double xi) { return complex(hat_profile(xi) * inv_l, 0.0); });
  RealField field = inverse_transform(spectrum);
  const double tail = tail_energy_fraction(field);
  check_tail(field, "bump");
  return BumpProfile{std::move(spectrum), std::move(field), tail};
}

struct PacketSpec {
  int k = 1;
  int n = 0;
  std::optional<int> i;  // absent: f^k_n, present: g^k_{i,n}
  int sign = +1;

  // 2^{kn} +- 2^{ki}
  double omega_index() const {
    const double base = std::ldexp(1.0, k * n);
    if (!i) return base;
    return base + static_cast<double>(sign) * std::ldexp(1.0, k * *i);
  }
  double frequency() const { return kCarrier * omega_index(); }
  int block() const { return k * n; }

  void validate() const {
    if (k < 1) fail(ErrorKind::Precondition, "packet k must be >= 1");
    if (n < 0) fail(ErrorKind::Precondition, "packet n must be >= 0");
    if (sign != 1 && sign != -1) fail(ErrorKind::Precondition, "packet sign must be +1 or -1");
    if (i && (*i < 0 || *i > n - 1)) {
      fail(ErrorKind::Precondition, "packet index i must lie in [0, n-1]");
    }
  }
};

struct FrequencyBand {
  double lo = 0.0;
  double hi = 0.0;
};

// Spectral support of a packet: |xi| in [omega - 1/2, omega + 1/2].
inline FrequencyBand packet_support(const PacketSpec& spec) {
  const double w = spec.frequency();
  return {w - kHatEdge, w + kHatEdge};
}

inline void check_packet_band(const PacketSpec& spec, const Grid& grid) {
  const double top = packet_support(spec).hi;
  const double cutoff = dealias_cutoff(grid, kQuadraticDealias);
  if (top > cutoff) {
    fail(ErrorKind::OutOfBand, "packet frequency " + short_number(spec.frequency()) +
                                   " exceeds the dealias cutoff " + short_number(cutoff));
  }
}

// coeffs = (hat(xi - omega) + hat(xi + omega)) / (2L), nonzero only near +-omega.
inline SpectralField packet_spectrum(const PacketSpec& spec, const BumpProfile& bump) {
  spec.validate();
  const Grid& g = bump.grid();
  check_packet_band(spec, g);
  const double w = spec.frequency();
  const double scale = 0.5 / g.length();
  SpectralField out(g);
  // Even in xi, so fill m >= 0 and mirror; for w < 1/2 both shifts meet near 0.
  const long m_hi = std::min(static_cast<long>(g.size() / 2) - 1,
                             static_cast<long>(std::ceil((w + kHatEdge) / g.dxi())));
  const long m_lo = std::max(0L, static_cast<long>(std::floor((w - kHatEdge) / g.dxi())));
  const long m_start = w < kHatEdge ? 0 : m_lo;
  for (long m = m_start; m <= m_hi; ++m) {
    const double xi = static_cast<double>(m) * g.dxi();
    const double v = scale * (hat_profile(xi - w) + hat_profile(xi + w));
    if (v == 0.0) continue;
    out[g.index_of(m)] = v;
    out[g.index_of(-m)] = v;
  }
  return out;
}

inline RealField make_packet(const PacketSpec& spec, const BumpProfile& bump) {
  RealField f = inverse_transform(packet_spectrum(spec, bump));
  check_tail(f, "packet");
  return f;
}

struct CHDataSpec {
  int k = 5;
  double sigma = 4.0;
  int n_max = 2;
  double p = 2.0;  // integrability used for the admissibility of sigma

  void validate() const {
    if (k < 1) fail(ErrorKind::Precondition, "CH datum k must be >= 1");
    if (n_max < 0) fail(ErrorKind::Precondition, "CH datum n_max must be >= 0");
    check_exponent(p);
    const double floor_sigma = 2.0 + std::max(1.5, 1.0 + 1.0 / p);
    if (!(sigma > floor_sigma)) {
      fail(ErrorKind::Domain, "CH datum needs sigma > 2 + max{3/2, 1+1/p} = " + short_number(floor_sigma));
    }
  }

  double coefficient(int n) const { return std::exp2(-static_cast<double>(k * n) * sigma); }
};

inline SpectralField ch_data_spectrum(const CHDataSpec& spec, const BumpProfile& bump) {
  spec.validate();
  SpectralField out(bump.grid());
  for (int n = 0; n <= spec.n_max; ++n) {
    out.add_scaled(spec.coefficient(n), packet_spectrum(PacketSpec{spec.k, n, std::nullopt, +1}, bump));
  }
  return out;
}

inline RealField make_ch_data(const CHDataSpec& spec, const BumpProfile& bump) {
  RealField f = inverse_transform(ch_data_spectrum(spec, bump));
  check_tail(f, "CH datum");
  return f;
}

struct NovikovDataSpec {
  double sigma = 4.0;

  void validate() const {
    if (!(sigma > 3.5)) fail(ErrorKind::Domain, "Novikov datum needs sigma > 7/2");
  }
};

// Power-law transform (1+|xi|)^{-sigma-1/2} sampled at every grid frequency.
inline double novikov_hat(double sigma, double xi) { return std::pow(1.0 + std::abs(xi), -sigma - 0.5); }

inline SpectralField novikov_data_spectrum(const NovikovDataSpec& spec, const Grid& grid) {
  spec.validate();
  const double inv_l = 1.0 / grid.length();
  return SpectralField::from_symbol(
      grid, [&](double xi) { return complex(novikov_hat(spec.sigma, xi) * inv_l, 0.0); });
}

inline RealField make_novikov_data(const NovikovDataSpec& spec, const Grid& grid) {
  return inverse_transform(novikov_data_spectrum(spec, grid));
}

// int_{|eta|<=1} (1+|eta|)^{-sigma-1/2} d eta
inline double c_sigma(double sigma) {
  if (!(sigma > 0.5)) fail(ErrorKind::Domain, "c(sigma) requires sigma > 1/2");
  return 4.0 * (1.0 - std::exp2(-sigma + 0.5)) / (2.0 * sigma - 1.0);
}

}  // namespace besovlab
