#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "besovlab/experiments.hpp"

using namespace besovlab;

namespace {

// j_max = 7 here; k = 3 keeps blocks 3 and 6 inside the band.
const Grid& small_grid() {
  static const Grid g(512.0, std::size_t{1} << 16);
  return g;
}

std::string failing(const ExperimentReport& r) {
  std::string s;
  for (const auto& m : r.measurements) {
    if (!m.passes()) s += m.quantity + "[" + m.index + "]=" + format_number(m.value) + " ";
  }
  return s;
}

void expect_same(const ExperimentReport& a, const ExperimentReport& b) {
  ASSERT_EQ(a.measurements.size(), b.measurements.size());
  for (std::size_t i = 0; i < a.measurements.size(); ++i) {
    EXPECT_EQ(a.measurements[i].quantity, b.measurements[i].quantity);
    EXPECT_EQ(a.measurements[i].value, b.measurements[i].value) << a.measurements[i].quantity;
  }
  EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
}

}  // namespace

TEST(SlopeFit, ExactPowerLaws) {
  const std::vector<double> x{1e-5, 1e-4, 1e-3, 1e-2};
  for (double k : {-1.5, 0.0, 1.0, 2.0, 3.25}) {
    std::vector<double> y;
    for (double v : x) y.push_back(7.0 * std::pow(v, k));
    EXPECT_NEAR(fit_loglog_slope(x, y), k, 1e-12) << k;
  }
}

TEST(SlopeFit, LeastSquaresOnNoisyData) {
  // log y = 2 log x + {+d, -d, +d, -d}; the symmetric perturbation has a closed-form slope.
  const std::vector<double> x{1.0, 10.0, 100.0, 1000.0};
  const double d = 0.1;
  std::vector<double> y;
  for (std::size_t i = 0; i < x.size(); ++i) y.push_back(x[i] * x[i] * std::exp(i % 2 ? -d : d));
  // Centered log x = ln10 * {-1.5,-0.5,0.5,1.5}; sum c*e = ln10 * d * (-1.5+0.5+0.5-1.5) = -2 d ln10.
  const double l = std::log(10.0);
  const double expected = 2.0 + (-2.0 * d * l) / (5.0 * l * l);
  EXPECT_NEAR(fit_loglog_slope(x, y), expected, 1e-12);
}

TEST(SlopeFit, Degenerate) {
  EXPECT_TRUE(std::isnan(fit_loglog_slope({1.0}, {1.0})));
  EXPECT_TRUE(std::isnan(fit_loglog_slope({1.0, 2.0}, {1.0})));
  EXPECT_TRUE(std::isnan(fit_loglog_slope({1.0, 2.0}, {1.0, 0.0})));
  EXPECT_TRUE(std::isnan(fit_loglog_slope({2.0, 2.0}, {1.0, 3.0})));
  EXPECT_TRUE(std::isnan(fit_loglog_slope({-1.0, 2.0}, {1.0, 3.0})));
}

TEST(Localization, PassesOnSmallGrid) {
  LocalizationParams prm;
  prm.k = 3;
  prm.n_list = {1, 2};
  const ExperimentReport r = exp_localization(small_grid(), prm);
  EXPECT_TRUE(r.pass()) << failing(r);
  EXPECT_EQ(r.tag, "Lemma 3.1");
  EXPECT_EQ(r.value("support_contained", "n=2"), 1.0);
  EXPECT_LE(r.value("identity_residual", "n=1"), 1e-10);

  // The 2^{ki} offset of g^k_{i,n} only stays inside block kn for larger k.
  prm.n_list = {2};
  prm.i = 1;
  prm.sign = -1;
  EXPECT_FALSE(exp_localization(small_grid(), prm).pass());
  prm.k = 5;
  const Grid wide(512.0, std::size_t{1} << 19);  // j_max = 10
  for (int sign : {+1, -1}) {
    prm.sign = sign;
    const ExperimentReport g = exp_localization(wide, prm);
    EXPECT_TRUE(g.pass()) << sign << ": " << failing(g);
  }
}

TEST(Localization, Errors) {
  LocalizationParams prm;
  prm.k = 3;
  prm.n_list = {3};  // block 9 > j_max
  EXPECT_THROW(exp_localization(small_grid(), prm), Error);
  prm.n_list = {};
  EXPECT_THROW(exp_localization(small_grid(), prm), Error);
  prm.n_list = {1};
  prm.i = 1;  // needs i < n
  EXPECT_THROW(exp_localization(small_grid(), prm), Error);
}

TEST(ChLowerBound, PassesOnSmallGrid) {
  ChLowerBoundParams prm;
  prm.k = 3;
  prm.n_list = {1, 2};
  for (double p : {2.0, kInfinity}) {
    prm.p = p;
    const ExperimentReport r = exp_ch_lower_bound(small_grid(), prm);
    EXPECT_TRUE(r.pass()) << p << ": " << failing(r);
    EXPECT_GE(r.value("r_n", "n=2"), 1e-3);
    // The single-term control does not reach block k.
    const Measurement* ctrl = r.find("control_r_single_term", "n=1");
    ASSERT_NE(ctrl, nullptr);
    EXPECT_TRUE(ctrl->expected_negative);
    EXPECT_FALSE(ctrl->meets_threshold());
    // n = 1 has no I2 term.
    EXPECT_EQ(r.value("norm_I2", "n=1"), 0.0);
  }
}

TEST(ChLowerBound, Errors) {
  ChLowerBoundParams prm;
  prm.k = 3;
  prm.n_list = {0};
  EXPECT_THROW(exp_ch_lower_bound(small_grid(), prm), Error);
  prm.n_list = {3};
  EXPECT_THROW(exp_ch_lower_bound(small_grid(), prm), Error);
  prm.n_list = {1};
  prm.p = 0.5;
  EXPECT_THROW(exp_ch_lower_bound(small_grid(), prm), Error);
}

TEST(NovikovLowerBound, PassesOnSmallGrid) {
  NovikovLowerBoundParams prm;
  prm.j_list = {3, 4, 5};
  const ExperimentReport r = exp_novikov_lower_bound(small_grid(), prm);
  EXPECT_TRUE(r.pass()) << failing(r);
  EXPECT_GE(r.value("domination_square_at_zero"), 1.0);
  EXPECT_LE(r.value("rho_variation"), 4.0);
}

TEST(NovikovLowerBound, Errors) {
  NovikovLowerBoundParams prm;
  prm.j_list = {6};  // j_max - 2 = 5
  EXPECT_THROW(exp_novikov_lower_bound(small_grid(), prm), Error);
  prm.j_list = {-1};
  EXPECT_THROW(exp_novikov_lower_bound(small_grid(), prm), Error);
  prm.j_list = {};
  EXPECT_THROW(exp_novikov_lower_bound(small_grid(), prm), Error);
}

TEST(Remainder, PassesOnSmallGrid) {
  for (const ModelKind& m : {ModelKind{CamassaHolm{}}, ModelKind{BFamily{3.0}}, ModelKind{Novikov{}}}) {
    RemainderParams prm;
    prm.model = m;
    prm.k = 3;
    const ExperimentReport r = exp_remainder_scaling(small_grid(), prm);
    EXPECT_TRUE(r.pass()) << model_name(m) << ": " << failing(r);
    EXPECT_NEAR(r.value("remainder_slope"), 2.0, 0.2);
    EXPECT_EQ(r.tag, is_cubic(m) ? "Proposition 4.1" : "Proposition 3.2");
  }
}

TEST(Remainder, TimeListValidation) {
  EXPECT_NO_THROW(check_time_list({1e-5, 1e-3}));
  EXPECT_THROW(check_time_list({1e-5}), Error);
  EXPECT_THROW(check_time_list({1e-5, 1e-4}), Error);
  EXPECT_THROW(check_time_list({0.0, 1e-3}), Error);
  EXPECT_THROW(check_time_list({-1e-5, 1e-3}), Error);
  EXPECT_THROW(check_time_list({1e-5, std::nan("")}), Error);
  RemainderParams prm;
  prm.t_list = {1e-4, 2e-4};
  EXPECT_THROW(exp_remainder_scaling(small_grid(), prm), Error);
  prm.t_list = {1e-5, 1e-3};
  prm.model = Novikov{};
  prm.p = kInfinity;
  EXPECT_THROW(exp_remainder_scaling(small_grid(), prm), Error);
}

TEST(Discontinuity, PassesOnSmallGrid) {
  DiscontinuityParams ch;
  ch.k = 3;
  const ExperimentReport r = exp_discontinuity(small_grid(), ch);
  EXPECT_TRUE(r.pass()) << failing(r);
  EXPECT_EQ(r.tag, "Theorem 1.1");
  EXPECT_DOUBLE_EQ(r.value("t", "n=2"), 0.05 / 64.0);

  DiscontinuityParams nv;
  nv.model = Novikov{};
  nv.j_list = {4, 6};
  const ExperimentReport q = exp_discontinuity(small_grid(), nv);
  EXPECT_TRUE(q.pass()) << failing(q);
  EXPECT_EQ(q.tag, "Theorem 1.2");
}

TEST(Discontinuity, ZeroEpsilonIsDegenerate) {
  DiscontinuityParams prm;
  prm.k = 3;
  prm.epsilon = 0.0;
  const ExperimentReport r = exp_discontinuity(small_grid(), prm);
  EXPECT_TRUE(r.degenerate);
  EXPECT_FALSE(r.pass());
  EXPECT_EQ(r.value("D", "n=1"), 0.0);
  EXPECT_EQ(r.to_json()["verdict"], "fail");
}

TEST(Discontinuity, Errors) {
  DiscontinuityParams prm;
  prm.k = 3;
  prm.epsilon = -0.1;
  EXPECT_THROW(exp_discontinuity(small_grid(), prm), Error);
  prm.epsilon = std::nan("");
  EXPECT_THROW(exp_discontinuity(small_grid(), prm), Error);
  prm.epsilon = 0.05;
  prm.n_list = {3};
  EXPECT_THROW(exp_discontinuity(small_grid(), prm), Error);
  prm.n_list = {};
  EXPECT_THROW(exp_discontinuity(small_grid(), prm), Error);
}

TEST(Conservation, PassesOnSmallGrid) {
  for (const ModelKind& m :
       {ModelKind{CamassaHolm{}}, ModelKind{Novikov{}}, ModelKind{BFamily{2.0}}, ModelKind{BFamily{3.0}}}) {
    ConservationParams prm;
    prm.model = m;
    prm.k = 3;
    prm.t_end = 0.002;
    prm.probe_n = std::size_t{1} << 12;
    const ExperimentReport r = exp_conservation(small_grid(), prm);
    EXPECT_TRUE(r.pass()) << model_name(m) << ": " << failing(r);
    EXPECT_GE(r.value("refinement_ratio"), 16.0);
  }
}

TEST(Conservation, ZeroTimeAndErrors) {
  ConservationParams prm;
  prm.k = 3;
  prm.t_end = 0.0;
  const ExperimentReport r = exp_conservation(small_grid(), prm);
  EXPECT_TRUE(r.pass());
  EXPECT_EQ(r.value("h1_drift"), 0.0);
  EXPECT_EQ(r.find("refinement_ratio"), nullptr);
  prm.t_end = -1.0;
  EXPECT_THROW(exp_conservation(small_grid(), prm), Error);
}

TEST(Conservation, QuadraticInvariantChoice) {
  const Grid g(8.0 * std::numbers::pi, 64);
  SpectralField u(g);
  u[g.index_of(4)] = 1.0;  // xi = 1
  u[g.index_of(-4)] = 1.0;
  const double h1 = g.length() * 2.0 * 2.0;
  EXPECT_NEAR(*quadratic_invariant(u, CamassaHolm{}), h1, 1e-12 * h1);
  EXPECT_NEAR(*quadratic_invariant(u, BFamily{2.0}), h1, 1e-12 * h1);
  EXPECT_NEAR(*quadratic_invariant(u, Novikov{}), h1, 1e-12 * h1);
  EXPECT_NEAR(*quadratic_invariant(u, BFamily{3.0}), g.length() * 2.0 * 2.0 / 5.0, 1e-12);
  EXPECT_FALSE(quadratic_invariant(u, BFamily{1.0}).has_value());
}

TEST(Experiments, DeterministicAcrossRuns) {
  ChLowerBoundParams ch;
  ch.k = 3;
  expect_same(exp_ch_lower_bound(small_grid(), ch), exp_ch_lower_bound(small_grid(), ch));
  NovikovLowerBoundParams nv;
  nv.j_list = {3, 4};
  expect_same(exp_novikov_lower_bound(small_grid(), nv), exp_novikov_lower_bound(small_grid(), nv));
  RemainderParams rm;
  rm.k = 3;
  rm.t_list = {1e-5, 1e-3};
  expect_same(exp_remainder_scaling(small_grid(), rm), exp_remainder_scaling(small_grid(), rm));
}

TEST(Experiments, ThresholdsAreApplied) {
  ChLowerBoundParams prm;
  prm.k = 3;
  Thresholds strict;
  strict.c_star = 1e6;
  const ExperimentReport r = exp_ch_lower_bound(small_grid(), prm, strict);
  EXPECT_FALSE(r.pass());
  // Raising c_star also flips the control back to "not met", which is still its expected state.
  EXPECT_TRUE(r.find("control_r_single_term", "n=1")->passes());
  EXPECT_FALSE(r.find("r_n", "n=1")->passes());
  EXPECT_NE(r.notes.back().find("not exhibited"), std::string::npos);
}

TEST(Experiments, ReportSerialization) {
  LocalizationParams prm;
  prm.k = 3;
  const ExperimentReport r = exp_localization(small_grid(), prm);
  const nlohmann::json j = r.to_json();
  EXPECT_EQ(j["experiment"], "localization");
  EXPECT_EQ(j["statement"], "Lemma 3.1");
  EXPECT_EQ(j["verdict"], "pass");
  EXPECT_EQ(j["parameters"]["grid_n"], 65536);
  EXPECT_EQ(j["grid"], small_grid().fingerprint());
  EXPECT_EQ(j["measurements"].size(), r.measurements.size());
  const std::string csv = r.to_csv();
  EXPECT_EQ(csv.rfind("quantity,index,measured,threshold,pass\n", 0), 0u);
  EXPECT_NE(csv.find("identity_residual,n=2,"), std::string::npos);
  EXPECT_NE(csv.find(",<=1e-10,true"), std::string::npos);
}

TEST(Catalog, NamesTagsAndDefaults) {
  const auto cat = experiment_catalog();
  ASSERT_EQ(cat.size(), 6u);
  std::set<std::string> names;
  for (const auto& e : cat) {
    names.insert(e.name);
    EXPECT_FALSE(e.tag.empty());
    EXPECT_FALSE(e.summary.empty());
    EXPECT_TRUE(e.defaults.is_object());
  }
  EXPECT_EQ(names, (std::set<std::string>{"localization", "ch-lower-bound", "novikov-lower-bound", "remainder",
                                          "discontinuity", "conservation"}));
  EXPECT_EQ(cat[1].tag, "Lemma 3.2");
  EXPECT_EQ(cat[2].tag, "Lemma 4.1");
  // Catalog defaults agree with the parameter structs.
  EXPECT_EQ(cat[0].defaults["k"], LocalizationParams{}.k);
  EXPECT_EQ(cat[1].defaults["sigma"], ChLowerBoundParams{}.sigma);
  EXPECT_EQ(cat[2].defaults["j"].get<std::vector<int>>(), NovikovLowerBoundParams{}.j_list);
  EXPECT_EQ(cat[4].defaults["epsilon"], DiscontinuityParams{}.epsilon);
  EXPECT_EQ(cat[5].defaults["t_end"], ConservationParams{}.t_end);
}
