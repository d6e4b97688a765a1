#pragma once

// Dyadic partition of unity (chi, phi), Littlewood-Paley blocks and
// nonhomogeneous Besov norms on a periodic grid.
//
// theta(xi) = 1 for |xi| <= 3/4, 0 for |xi| >= 4/3, with the exp(-1/t) smooth
// step in between. Then chi = theta and phi(xi) = theta(xi/2) - theta(xi), so
// chi + sum_{j>=0} phi(2^-j xi) telescopes to 1, supp phi = [3/4, 8/3] and
// phi = 1 on [4/3, 3/2].

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "besovlab/spectral.hpp"

namespace besovlab {

// 0 for t <= 0, 1 for t >= 1, C-infinity in between.
inline double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

inline constexpr double kChiPlateau = 0.75;      // chi = 1 below
inline constexpr double kChiEdge = 4.0 / 3.0;    // chi = 0 above
inline constexpr double kPhiInner = 0.75;        // supp phi lower edge
inline constexpr double kPhiOuter = 8.0 / 3.0;   // supp phi upper edge

inline double lp_theta(double xi) {
  return 1.0 - smooth_step((std::abs(xi) - kChiPlateau) / (kChiEdge - kChiPlateau));
}
inline double lp_chi(double xi) { return lp_theta(xi); }
inline double lp_phi(double xi) { return lp_theta(0.5 * xi) - lp_theta(xi); }

struct BesovParams {
  double s = 0.0;
  double p = 2.0;
  double r = kInfinity;

  void validate() const {
    if (!std::isfinite(s)) fail(ErrorKind::InvalidParameter, "Besov regularity s must be finite");
    if (!(p >= 1.0)) fail(ErrorKind::InvalidParameter, "Besov integrability p must be >= 1");
    if (!(r >= 1.0)) fail(ErrorKind::InvalidParameter, "Besov summability r must be >= 1");
  }
};

class DyadicPartition {
 public:
  explicit DyadicPartition(const Grid& grid) : grid_(grid) {
    const double reach = grid.xi_max() * 3.0 / 8.0;
    if (reach < 1.0) {
      fail(ErrorKind::Resolution, "grid too coarse for any j >= 0 block (xi_max < 8/3)");
    }
    j_max_ = static_cast<int>(std::floor(std::log2(reach)));
    // Guard against log2 rounding at exact powers of two.
    while (kPhiOuter * std::ldexp(1.0, j_max_ + 1) <= grid.xi_max()) ++j_max_;
    while (kPhiOuter * std::ldexp(1.0, j_max_) > grid.xi_max()) --j_max_;

    const double dxi = grid.dxi();
    const long nyq = static_cast<long>(grid.size() / 2);
    tables_.reserve(static_cast<std::size_t>(j_max_ + 2));
    for (int j = -1; j <= j_max_; ++j) {
      const double lo = j < 0 ? 0.0 : kPhiInner * std::ldexp(1.0, j);
      const double hi = j < 0 ? kChiEdge : kPhiOuter * std::ldexp(1.0, j);
      BlockTable t;
      t.m_lo = j < 0 ? 0 : static_cast<long>(std::floor(lo / dxi));
      t.m_hi = std::min(nyq, static_cast<long>(std::ceil(hi / dxi)));
      t.values.resize(static_cast<std::size_t>(t.m_hi - t.m_lo + 1));
      for (long m = t.m_lo; m <= t.m_hi; ++m) {
        t.values[static_cast<std::size_t>(m - t.m_lo)] = symbol(j, static_cast<double>(m) * dxi);
      }
      tables_.push_back(std::move(t));
    }
  }

  const Grid& grid() const { return grid_; }
  int j_max() const { return j_max_; }

  // Multiplier of Delta_j evaluated at xi (0 for j <= -2).
  static double symbol(int j, double xi) {
    if (j <= -2) return 0.0;
    if (j == -1) return lp_chi(xi);
    return lp_phi(std::ldexp(xi, -j));
  }

  // Frequencies with |xi| <= this are covered by blocks -1..j_max with exact unity sum.
  double resolved_band() const { return 1.5 * std::ldexp(1.0, j_max_); }

  // Tabulated value of the block-j multiplier at nonnegative wavenumber m.
  double table_value(int j, long m) const {
    const auto& t = table(j);
    if (m < t.m_lo || m > t.m_hi) return 0.0;
    return t.values[static_cast<std::size_t>(m - t.m_lo)];
  }

  // Applies Delta_j in spectral space.
  SpectralField apply(const SpectralField& F, int j) const {
    check_grid(F.grid());
    SpectralField out(grid_);
    if (j <= -2) return out;
    check_band(j);
    const auto& t = table(j);
    const long nyq = static_cast<long>(grid_.size() / 2);
    for (long m = t.m_lo; m <= t.m_hi; ++m) {
      const double v = t.values[static_cast<std::size_t>(m - t.m_lo)];
      if (v == 0.0) continue;
      const std::size_t ip = grid_.index_of(m);
      out[ip] = v * F[ip];
      if (m != 0 && m != nyq) {
        const std::size_t in = grid_.index_of(-m);
        out[in] = v * F[in];
      }
    }
    return out;
  }

  // True when F has no nonzero coefficient inside the support of Delta_j.
  bool block_vanishes(const SpectralField& F, int j) const {
    if (j <= -2) return true;
    check_band(j);
    const auto& t = table(j);
    for (long m = t.m_lo; m <= t.m_hi; ++m) {
      if (t.values[static_cast<std::size_t>(m - t.m_lo)] == 0.0) continue;
      if (F.at_mode(m) != complex{} || F.at_mode(-m) != complex{}) return false;
    }
    return true;
  }

  // max over grid frequencies in the resolved band of |chi + sum phi_j - 1|.
  double unity_residual() const {
    double worst = 0.0;
    for_each_resolved_mode([&](long m) {
      double sum = 0.0;
      for (int j = -1; j <= j_max_; ++j) sum += table_value(j, m);
      worst = std::max(worst, std::abs(sum - 1.0));
    });
    return worst;
  }

  // Range of chi^2 + sum phi_j^2 over grid frequencies in the resolved band.
  std::pair<double, double> squared_sum_range() const {
    double lo = kInfinity;
    double hi = -kInfinity;
    for_each_resolved_mode([&](long m) {
      double sum = 0.0;
      for (int j = -1; j <= j_max_; ++j) {
        const double v = table_value(j, m);
        sum += v * v;
      }
      lo = std::min(lo, sum);
      hi = std::max(hi, sum);
    });
    return {lo, hi};
  }

  std::string fingerprint() const {
    return "theta=1-S((|xi|-3/4)/(4/3-3/4)),S(t)=e^{-1/t}/(e^{-1/t}+e^{-1/(1-t)}),"
           "chi=theta,phi(xi)=theta(xi/2)-theta(xi),j_max=" +
           std::to_string(j_max_);
  }

 private:
  struct BlockTable {
    long m_lo = 0;
    long m_hi = 0;
    std::vector<double> values;
  };

  const BlockTable& table(int j) const { return tables_[static_cast<std::size_t>(j + 1)]; }

  void check_band(int j) const {
    if (j > j_max_) {
      fail(ErrorKind::OutOfBand,
           "block " + std::to_string(j) + " exceeds j_max=" + std::to_string(j_max_));
    }
  }
  void check_grid(const Grid& g) const {
    if (!(g == grid_)) fail(ErrorKind::InvalidField, "field grid differs from partition grid");
  }

  template <typename F>
  void for_each_resolved_mode(F&& f) const {
    const long m_top = std::min(static_cast<long>(grid_.size() / 2),
                                static_cast<long>(std::floor(resolved_band() / grid_.dxi())));
    for (long m = 0; m <= m_top; ++m) f(m);
  }

  Grid grid_;
  int j_max_ = 0;
  std::vector<BlockTable> tables_;
};

inline DyadicPartition build_partition(const Grid& grid) { return DyadicPartition(grid); }

inline SpectralField lp_block(const SpectralField& u, int j, const DyadicPartition& part) {
  return part.apply(u, j);
}

inline RealField lp_block(const RealField& u, int j, const DyadicPartition& part) {
  if (j <= -2) return RealField(u.grid());
  return inverse_transform(part.apply(forward_transform(u), j));
}

// ||Delta_j u||_{L^p}. p = 2 uses discrete Parseval, which equals the
// rectangle rule on the grid up to rounding.
inline double block_lp_norm(const SpectralField& u, int j, double p, const DyadicPartition& part) {
  check_exponent(p);
  if (part.block_vanishes(u, j)) return 0.0;
  const SpectralField block = part.apply(u, j);
  if (p == 2.0) return l2_norm(block);
  return lp_norm(inverse_transform(block), p);
}

// ||Delta_j u||_{L^p} for j = -1..j_max (index 0 holds j = -1).
inline std::vector<double> block_lp_norms(const SpectralField& u, double p, const DyadicPartition& part) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(part.j_max() + 2));
  for (int j = -1; j <= part.j_max(); ++j) out.push_back(block_lp_norm(u, j, p, part));
  return out;
}

inline void warn_if_unresolved(const SpectralField& u, const DyadicPartition& part) {
  const double frac = energy_fraction_above(u, part.resolved_band());
  if (frac > 1e-24) {
    warn("Besov norm truncated at j_max=" + std::to_string(part.j_max()) +
         ": relative energy beyond the resolved band is " + short_number(frac));
  }
}

inline double besov_from_blocks(const std::vector<double>& blocks, const BesovParams& bp) {
  double acc = 0.0;
  for (std::size_t idx = 0; idx < blocks.size(); ++idx) {
    const int j = static_cast<int>(idx) - 1;
    const double term = std::exp2(bp.s * j) * blocks[idx];
    if (bp.r == kInfinity) {
      acc = std::max(acc, term);
    } else {
      acc += std::pow(term, bp.r);
    }
  }
  return bp.r == kInfinity ? acc : std::pow(acc, 1.0 / bp.r);
}

inline double besov_norm(const SpectralField& u, const BesovParams& bp, const DyadicPartition& part) {
  bp.validate();
  warn_if_unresolved(u, part);
  return besov_from_blocks(block_lp_norms(u, bp.p, part), bp);
}

inline double besov_norm(const RealField& u, const BesovParams& bp, const DyadicPartition& part) {
  return besov_norm(forward_transform(u), bp, part);
}

// Random real field with modes 0 < |xi| <= band and amplitudes decaying like
// (1+|xi|)^-decay. The draw depends on L but not on N, so refining N
// reproduces the same function.
inline SpectralField random_band_limited(const Grid& grid, double band, double decay, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  SpectralField out(grid);
  const long m_top = std::min(static_cast<long>(std::floor(band / grid.dxi())),
                              static_cast<long>(grid.size() / 2) - 1);
  for (long m = 1; m <= m_top; ++m) {
    const double xi = static_cast<double>(m) * grid.dxi();
    const double a = std::pow(1.0 + xi, -decay);
    const complex c(a * unit(rng), a * unit(rng));
    out[grid.index_of(m)] = c;
    out[grid.index_of(-m)] = std::conj(c);
  }
  return out;
}

struct ProductProbe {
  double product_constant = 0.0;  // max ||uv||_{B^{s-2}} / (||u||_{B^{s-2}} ||v||_{B^{s-1}})
  double algebra_constant = 0.0;  // max ||uv||_{B^s} / (||u||_{B^s}||v||_inf + ||v||_{B^s}||u||_inf)
  int samples = 0;
  double band = 0.0;
};

namespace detail {
inline SpectralField dealiased_product(const SpectralField& a, const SpectralField& b) {
  return dealias(forward_transform(pointwise(inverse_transform(a), inverse_transform(b))), 2.0 / 3.0);
}
inline double safe_ratio(double num, double den) { return num == 0.0 ? 0.0 : num / den; }
}  // namespace detail

inline ProductProbe probe_pair(const SpectralField& u, const SpectralField& v, const BesovParams& bp,
                               const DyadicPartition& part) {
  const SpectralField uv = detail::dealiased_product(u, v);
  const BesovParams low{bp.s - 2.0, bp.p, bp.r};
  const BesovParams mid{bp.s - 1.0, bp.p, bp.r};
  ProductProbe out;
  out.samples = 1;
  out.product_constant = detail::safe_ratio(besov_norm(uv, low, part),
                                            besov_norm(u, low, part) * besov_norm(v, mid, part));
  const double u_inf = inverse_transform(u).max_abs();
  const double v_inf = inverse_transform(v).max_abs();
  out.algebra_constant = detail::safe_ratio(
      besov_norm(uv, bp, part), besov_norm(u, bp, part) * v_inf + besov_norm(v, bp, part) * u_inf);
  return out;
}

// Empirical constants of the Besov product and algebra estimates over `count`
// random band-limited pairs. Reported, not asserted.
inline ProductProbe product_estimate_probe(const DyadicPartition& part, int count, const BesovParams& bp,
                                           std::uint64_t seed, double band = 16.0) {
  bp.validate();
  const double floor_s = std::max(1.0 + 1.0 / bp.p, 1.5);
  if (!(bp.s > floor_s)) {
    fail(ErrorKind::Precondition, "product estimate requires s > max{1 + 1/p, 3/2}");
  }
  if (count < 1) fail(ErrorKind::InvalidParameter, "probe count must be positive");
  const Grid& g = part.grid();
  band = std::min(band, g.xi_max() / 3.0);
  std::mt19937_64 rng(seed);
  ProductProbe out;
  out.band = band;
  for (int n = 0; n < count; ++n) {
    const SpectralField u = random_band_limited(g, band, bp.s, rng);
    const SpectralField v = random_band_limited(g, band, bp.s, rng);
    const ProductProbe one = probe_pair(u, v, bp, part);
    out.product_constant = std::max(out.product_constant, one.product_constant);
    out.algebra_constant = std::max(out.algebra_constant, one.algebra_constant);
    ++out.samples;
  }
  return out;
}

}  // namespace besovlab
