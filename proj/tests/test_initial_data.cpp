#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "besovlab/initial_data.hpp"
#include "oracles.hpp"

using namespace besovlab;

namespace {

constexpr double kPi = std::numbers::pi;

const Grid& small_grid() {
  static const Grid g(512.0, std::size_t{1} << 14);
  return g;
}

const BumpProfile& small_bump() {
  static const BumpProfile b = make_bump(small_grid());
  return b;
}

template <typename F>
void expect_error(F&& f, ErrorKind kind) {
  try {
    f();
    ADD_FAILURE() << "no error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
  }
}

}  // namespace

TEST(Hat, Values) {
  for (double xi : {0.0, 0.1, 0.25, -0.25}) EXPECT_EQ(hat_profile(xi), 1.0);
  for (double xi : {0.5, 0.7, -0.5, -3.0}) EXPECT_EQ(hat_profile(xi), 0.0);
  EXPECT_DOUBLE_EQ(hat_profile(0.375), 0.5);
  for (double xi = 0.0; xi < 0.6; xi += 0.01) {
    EXPECT_EQ(hat_profile(xi), hat_profile(-xi));
    EXPECT_GE(hat_profile(xi), 0.0);
    EXPECT_LE(hat_profile(xi), 1.0);
  }
}

TEST(Bump, EvenRealAndCentred) {
  const BumpProfile& b = small_bump();
  const Grid& g = b.grid();
  const std::size_t n = g.size();
  for (std::size_t i = 1; i < n; i += 97) EXPECT_NEAR(b.field[i], b.field[n - i], 1e-16);
  // phi(0) = (1/pi) int_0^{1/2} hat = (1/pi)(1/4 + 1/8); the periodic images add ~1e-9.
  EXPECT_NEAR(b.field[n / 2], 3.0 / (8.0 * kPi), 1e-8);
  EXPECT_EQ(hermitian_defect(b.spectrum), 0.0);
  EXPECT_LT(b.tail_fraction, kTailTolerance);
  EXPECT_EQ(b.hat(0.3), hat_profile(0.3));
}

// The grid field is the periodization sum_k phi(x + kL); |k| <= 2 suffices.
TEST(Bump, ValueAgainstQuadrature) {
  const BumpProfile& b = small_bump();
  const Grid& g = b.grid();
  const oracle::GaussRule rule = oracle::composite_gauss(0.0, 0.5, 256, 24);
  auto phi = [&](double x) {
    return oracle::apply_rule(rule, [&](double xi) { return hat_profile(xi) * std::cos(x * xi); }) / kPi;
  };
  for (std::size_t i : {g.size() / 2, g.size() / 2 + 16, g.size() / 2 + 160, g.size() / 2 + 1000, std::size_t{3}}) {
    const double x = g.x(i);
    double ref = 0.0;
    for (int k = -2; k <= 2; ++k) ref += phi(x + k * g.length());
    EXPECT_NEAR(b.field[i], ref, 1e-13) << x;
  }
}

TEST(Bump, ResolutionLimits) {
  expect_error([] { make_bump(Grid(128.0, 8192)); }, ErrorKind::Resolution);
  expect_error([] { make_bump(Grid(1024.0, 64)); }, ErrorKind::Resolution);
}

TEST(Tail, FractionAndCheck) {
  const Grid g(100.0, 1024);
  const RealField flat = RealField::sample(g, [](double) { return 1.0; });
  const double expected = [&] {
    std::size_t out = 0;
    for (std::size_t i = 0; i < g.size(); ++i) out += std::abs(g.x(i)) > 40.0;
    return static_cast<double>(out) / static_cast<double>(g.size());
  }();
  EXPECT_DOUBLE_EQ(tail_energy_fraction(flat), expected);
  EXPECT_EQ(tail_energy_fraction(RealField(g)), 0.0);
  expect_error([&] { check_tail(flat, "flat"); }, ErrorKind::TailEnergy);
  const RealField centred = RealField::sample(g, [](double x) { return std::exp(-x * x); });
  EXPECT_NO_THROW(check_tail(centred, "gaussian"));
}

TEST(Packet, FrequencyAndBlock) {
  EXPECT_DOUBLE_EQ((PacketSpec{5, 2, std::nullopt, 1}.frequency()), 17.0 / 12.0 * 1024.0);
  EXPECT_DOUBLE_EQ((PacketSpec{5, 2, 1, 1}.frequency()), 17.0 / 12.0 * (1024.0 + 32.0));
  EXPECT_DOUBLE_EQ((PacketSpec{5, 2, 1, -1}.frequency()), 17.0 / 12.0 * (1024.0 - 32.0));
  EXPECT_EQ((PacketSpec{5, 2, std::nullopt, 1}.block()), 10);
  const FrequencyBand band = packet_support(PacketSpec{1, 3, std::nullopt, 1});
  EXPECT_DOUBLE_EQ(band.lo, 17.0 / 12.0 * 8.0 - 0.5);
  EXPECT_DOUBLE_EQ(band.hi, 17.0 / 12.0 * 8.0 + 0.5);
}

TEST(Packet, Validation) {
  const BumpProfile& b = small_bump();
  expect_error([&] { packet_spectrum(PacketSpec{0, 1, std::nullopt, 1}, b); }, ErrorKind::Precondition);
  expect_error([&] { packet_spectrum(PacketSpec{1, -1, std::nullopt, 1}, b); }, ErrorKind::Precondition);
  expect_error([&] { packet_spectrum(PacketSpec{1, 2, std::nullopt, 0}, b); }, ErrorKind::Precondition);
  expect_error([&] { packet_spectrum(PacketSpec{1, 2, 2, 1}, b); }, ErrorKind::Precondition);
  expect_error([&] { packet_spectrum(PacketSpec{1, 2, -1, 1}, b); }, ErrorKind::Precondition);
  // xi_max = 100.5, cutoff 67: 17/12 2^6 = 90.7 is beyond it.
  expect_error([&] { packet_spectrum(PacketSpec{1, 6, std::nullopt, 1}, b); }, ErrorKind::OutOfBand);
  EXPECT_NO_THROW(packet_spectrum(PacketSpec{1, 5, std::nullopt, 1}, b));
}

TEST(Packet, SpectrumSupportedOnPredictedAnnulus) {
  const BumpProfile& b = small_bump();
  const Grid& g = b.grid();
  for (const PacketSpec& spec : {PacketSpec{1, 4, std::nullopt, 1}, PacketSpec{2, 2, 1, -1}, PacketSpec{1, 0, {}, 1}}) {
    const SpectralField F = packet_spectrum(spec, b);
    const FrequencyBand band = packet_support(spec);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double a = std::abs(g.xi(i));
      if (a < band.lo || a > band.hi) {
        EXPECT_EQ(F[i], complex{}) << g.xi(i);
      }
    }
    EXPECT_EQ(hermitian_defect(F), 0.0);
    // Peak value 1/(2L) at the carrier when it is far from 0.
    if (spec.frequency() > 1.0) {
      EXPECT_NEAR(F.max_abs(), 0.5 / g.length(), 1e-15);
    }
  }
}

TEST(Packet, MatchesSampledProductToTailLevel) {
  const BumpProfile& b = small_bump();
  const Grid& g = b.grid();
  for (int n : {2, 4}) {
    const PacketSpec spec{1, n, std::nullopt, 1};
    const RealField f = make_packet(spec, b);
    const double w = spec.frequency();
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      worst = std::max(worst, std::abs(f[i] - b.field[i] * std::cos(w * g.x(i))));
    }
    // Off-grid carriers wrap discontinuously at x = +-L/2.
    EXPECT_LT(worst, 1e-5 * b.field.max_abs()) << n;
  }
}

TEST(Packet, ZeroFrequencyPacketIsTheBump) {
  const BumpProfile& b = small_bump();
  // n = 0 carries 17/12 > 1/2, so the two shifted copies do not overlap.
  const SpectralField F = packet_spectrum(PacketSpec{1, 0, std::nullopt, 1}, b);
  EXPECT_EQ(F.at_mode(0), complex{});
  EXPECT_GT(F.at_mode(static_cast<long>(std::round(kCarrier / b.grid().dxi()))).real(), 0.0);
}

TEST(CHData, SeriesCoefficients) {
  const CHDataSpec spec{5, 4.0, 2, 2.0};
  EXPECT_EQ(spec.coefficient(0), 1.0);
  EXPECT_EQ(spec.coefficient(1), std::exp2(-20.0));
  EXPECT_EQ(spec.coefficient(2), std::exp2(-40.0));
}

TEST(CHData, IsTheLinearSeries) {
  const BumpProfile& b = small_bump();
  const CHDataSpec spec{2, 4.0, 2, 2.0};
  const SpectralField u = ch_data_spectrum(spec, b);
  SpectralField ref(b.grid());
  for (int n = 0; n <= 2; ++n) ref.add_scaled(spec.coefficient(n), packet_spectrum(PacketSpec{2, n, {}, 1}, b));
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_EQ(u[i], ref[i]);

  const SpectralField single = ch_data_spectrum(CHDataSpec{2, 4.0, 0, 2.0}, b);
  const SpectralField f0 = packet_spectrum(PacketSpec{2, 0, {}, 1}, b);
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_EQ(single[i], f0[i]);

  const RealField field = make_ch_data(spec, b);
  const RealField back = inverse_transform(u);
  for (std::size_t i = 0; i < field.size(); i += 101) EXPECT_EQ(field[i], back[i]);
}

TEST(CHData, AdmissibleSigma) {
  const BumpProfile& b = small_bump();
  expect_error([&] { ch_data_spectrum(CHDataSpec{5, 3.5, 1, 2.0}, b); }, ErrorKind::Domain);
  expect_error([&] { ch_data_spectrum(CHDataSpec{5, 4.0, 1, 1.0}, b); }, ErrorKind::Domain);
  EXPECT_NO_THROW(ch_data_spectrum(CHDataSpec{1, 4.01, 1, 1.0}, b));
  EXPECT_NO_THROW(ch_data_spectrum(CHDataSpec{1, 3.6, 1, kInfinity}, b));
  expect_error([&] { ch_data_spectrum(CHDataSpec{0, 4.0, 1, 2.0}, b); }, ErrorKind::Precondition);
  expect_error([&] { ch_data_spectrum(CHDataSpec{1, 4.0, -1, 2.0}, b); }, ErrorKind::Precondition);
}

TEST(NovikovData, SpectrumAndParity) {
  const Grid& g = small_grid();
  const NovikovDataSpec spec{4.0};
  const SpectralField F = novikov_data_spectrum(spec, g);
  for (long m : {0L, 1L, 17L, -17L, 4000L}) {
    const double xi = static_cast<double>(m) * g.dxi();
    EXPECT_DOUBLE_EQ(F.at_mode(m).real(), std::pow(1.0 + std::abs(xi), -4.5) / g.length());
    EXPECT_EQ(F.at_mode(m).imag(), 0.0);
  }
  const RealField u = make_novikov_data(spec, g);
  for (std::size_t i = 1; i < g.size(); i += 131) EXPECT_NEAR(u[i], u[g.size() - i], 1e-17);
}

TEST(NovikovData, PeakAgainstIntegral) {
  // u0(0) = (1/2pi) int (1+|xi|)^{-sigma-1/2} = 1/(pi (sigma - 1/2)), up to the
  // band truncation and the Riemann error at the kink.
  const Grid& g = small_grid();
  const RealField u = make_novikov_data(NovikovDataSpec{4.0}, g);
  EXPECT_NEAR(u[g.size() / 2], 1.0 / (kPi * 3.5), 1e-4);
}

TEST(NovikovData, Domain) {
  expect_error([] { novikov_data_spectrum(NovikovDataSpec{3.5}, small_grid()); }, ErrorKind::Domain);
  EXPECT_NO_THROW(novikov_data_spectrum(NovikovDataSpec{3.51}, small_grid()));
  EXPECT_DOUBLE_EQ(novikov_hat(4.0, -1.0), std::pow(2.0, -4.5));
}

TEST(CSigma, ClosedFormAgainstQuadrature) {
  const oracle::GaussRule rule = oracle::composite_gauss(-1.0, 1.0, 2, 30);  // kink at 0 sits on a panel edge
  for (double sigma : {0.75, 2.0, 4.0, 7.5}) {
    const double ref = oracle::apply_rule(rule, [&](double eta) { return std::pow(1.0 + std::abs(eta), -sigma - 0.5); });
    EXPECT_NEAR(c_sigma(sigma), ref, 1e-13) << sigma;
  }
  EXPECT_NEAR(c_sigma(4.0), 4.0 * (1.0 - std::pow(2.0, -3.5)) / 7.0, 1e-15);
}

TEST(CSigma, DecreasingAndDomain) {
  double prev = kInfinity;
  for (double sigma = 0.6; sigma < 10.0; sigma += 0.3) {
    EXPECT_LT(c_sigma(sigma), prev);
    EXPECT_LT(c_sigma(sigma), 2.0);
    prev = c_sigma(sigma);
  }
  expect_error([] { c_sigma(0.5); }, ErrorKind::Domain);
}
