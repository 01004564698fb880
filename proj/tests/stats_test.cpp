#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "wayfind/rng.hpp"
#include "wayfind/stats.hpp"

namespace ws = wayfind::stats;

namespace {

// Reference values computed with mpmath at 40 significant digits.
struct Fixture {
  double stat, df1, df2, p;
};

void expect_rel(double got, double want, double rel = 1e-8) {
  EXPECT_NEAR(got, want, rel * std::abs(want)) << "want " << want;
}

}  // namespace

TEST(TailProbability, ChiSquareFixtures) {
  const Fixture cases[] = {
      {9.18, 2, 0, 0.010152858373369763424},     {20.56, 3, 0, 0.00012991699591521995229},
      {3.84, 1, 0, 0.050043521248705103189},     {0.5, 1, 0, 0.47950012218695346232},
      {10, 5, 0, 0.075235246146512178722},       {100, 50, 0, 0.000034549313829848639421},
      {1e-3, 4, 0, 0.99999987504165885521},      {30, 10, 0, 0.00085664121077530039211},
      {7.5, 2.5, 0, 0.038169088215206796642},
  };
  for (const auto& c : cases) expect_rel(ws::tail_probability(ws::Distribution::chi_square, c.stat, c.df1), c.p);
}

TEST(TailProbability, StudentTFixtures) {
  const Fixture cases[] = {
      {1.96, 10, 0, 0.078436240247699712932}, {2.5, 30, 0, 0.018115649068066694102},
      {0.3, 3, 0, 0.78376329203991904229},    {4.0, 200, 0, 0.000089130952185934386578},
      {1.0, 1, 0, 0.5},                       {12.0, 5, 0, 0.000070894925171615226866},
  };
  for (const auto& c : cases) expect_rel(ws::tail_probability(ws::Distribution::student_t, c.stat, c.df1), c.p);
  // two-sided: sign does not matter
  EXPECT_DOUBLE_EQ(ws::student_t_two_sided(-2.5, 30), ws::student_t_two_sided(2.5, 30));
}

TEST(TailProbability, FisherFFixtures) {
  const Fixture cases[] = {
      {34.905, 7, 270, 1.7171353132764761045e-34}, {7.449, 4, 275, 0.000010389327171429792418},
      {3.0, 2, 10, 0.095367431640625},             {0.5, 1, 20, 0.48765809505137566359},
      {9.29, 15, 260, 2.4459637276547272349e-17},  {4.0, 1, 294, 0.046419942937278162852},
  };
  for (const auto& c : cases) expect_rel(ws::tail_probability(ws::Distribution::fisher_f, c.stat, c.df1, c.df2), c.p);
}

TEST(TailProbability, NormalFixtures) {
  expect_rel(ws::tail_probability(ws::Distribution::normal, 1.96), 0.049995790296440872426);
  expect_rel(ws::tail_probability(ws::Distribution::normal, 1.0), 0.31731050786291410283);
  expect_rel(ws::tail_probability(ws::Distribution::normal, 3.0), 0.0026997960632601890533);
  expect_rel(ws::tail_probability(ws::Distribution::normal, 5.0), 5.7330314375838782335e-7);
  EXPECT_DOUBLE_EQ(ws::tail_probability(ws::Distribution::normal, 0.0), 1.0);
}

TEST(TailProbability, ChiSquareZeroStatisticIsOne) {
  for (double df : {1.0, 2.0, 7.0, 30.0}) EXPECT_EQ(ws::tail_probability(ws::Distribution::chi_square, 0.0, df), 1.0);
}

TEST(TailProbability, ChiSquareDf2MatchesClosedForm) {
  for (double x = 0.0; x <= 50.0; x += 0.25) EXPECT_NEAR(ws::chi_square_upper(x, 2), std::exp(-x / 2.0), 1e-10) << x;
  EXPECT_NEAR(ws::chi_square_upper(9.18, 2), 0.01014, 5e-5);
}

TEST(TailProbability, MonotoneDecreasingInStatistic) {
  for (double df : {1.0, 3.0, 10.0}) {
    double prev_chi = 1.0, prev_t = 1.0, prev_f = 1.0;
    for (double s = 0.05; s < 40.0; s += 0.05) {
      const double c = ws::chi_square_upper(s, df);
      const double t = ws::student_t_two_sided(s, df);
      const double f = ws::f_upper(s, df, 50.0);
      EXPECT_LE(c, prev_chi);
      EXPECT_LE(t, prev_t);
      EXPECT_LE(f, prev_f);
      prev_chi = c;
      prev_t = t;
      prev_f = f;
    }
  }
}

TEST(TailProbability, StudentConvergesToNormal) {
  for (double t : {0.5, 1.0, 1.96, 2.5, 3.5})
    EXPECT_NEAR(ws::student_t_two_sided(t, 1e6), ws::normal_two_sided(t), 1e-6) << t;
}

TEST(TailProbability, InvalidDegreesOfFreedom) {
  EXPECT_THROW(ws::tail_probability(ws::Distribution::chi_square, 1.0, 0.0), ws::StatsError);
  EXPECT_THROW(ws::tail_probability(ws::Distribution::student_t, 1.0, -2.0), ws::StatsError);
  EXPECT_THROW(ws::tail_probability(ws::Distribution::fisher_f, 1.0, 2.0, 0.0), ws::StatsError);
}

TEST(TailProbability, NormalCriticalValue) { EXPECT_NEAR(ws::normal_critical(0.05), 1.959963984540054, 1e-9); }

TEST(Spearman, IdenticalAndReversedRanks) {
  const std::vector<double> x = {1, 2, 3, 4, 5, 6};
  std::vector<double> y, z;
  for (double v : x) {
    y.push_back(std::exp(v));
    z.push_back(-v * v);
  }
  EXPECT_DOUBLE_EQ(ws::spearman_rho(x, y), 1.0);
  EXPECT_DOUBLE_EQ(ws::spearman_rho(x, z), -1.0);
}

TEST(Spearman, HandEvaluatedRankDifference) {
  // 1 - 6 * sum d^2 / (n (n^2 - 1)) with d = (-2, 1, 1): 1 - 36/24 = -0.5
  const std::vector<double> x = {1, 2, 3}, y = {3, 1, 2};
  EXPECT_NEAR(ws::spearman_rho(x, y), -0.5, 1e-15);
}

TEST(Spearman, MidRanksForTies) {
  const std::vector<double> v = {10, 20, 20, 30};
  const auto r = ws::mid_ranks(v);
  EXPECT_EQ(r, (std::vector<double>{1.0, 2.5, 2.5, 4.0}));
}

TEST(Spearman, Errors) {
  const std::vector<double> a = {1, 2, 3}, b = {1, 2}, c = {4, 4, 4};
  EXPECT_THROW(ws::spearman_rho(a, b), ws::StatsError);
  EXPECT_THROW(ws::spearman_rho(a, c), ws::StatsError);
}

TEST(Spearman, InvariantUnderMonotoneTransforms) {
  wayfind::rng::CounterRng gen(7);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> x(40), y(40), fx(40), gy(40);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = gen.normal();
      y[i] = x[i] + gen.normal();
      fx[i] = std::exp(3.0 * x[i]);
      gy[i] = std::atan(y[i]) + 5.0;
    }
    EXPECT_NEAR(ws::spearman_rho(x, y), ws::spearman_rho(fx, gy), 1e-12);
  }
}

TEST(CorrelationMatrix, StructureAndHighlighting) {
  wayfind::rng::CounterRng gen(11);
  std::vector<ws::NamedColumn> cols(4);
  for (std::size_t j = 0; j < cols.size(); ++j) cols[j].name = "c" + std::to_string(j);
  for (int i = 0; i < 60; ++i) {
    const double base = gen.normal();
    cols[0].values.push_back(base);
    cols[1].values.push_back(base);
    cols[2].values.push_back(gen.normal());
    cols[3].values.push_back(-base + 0.1 * gen.normal());
  }
  const auto m = ws::correlation_matrix(cols);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(m.rho[i][i], 1.0);
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(m.rho[i][j], m.rho[j][i]);
  }
  EXPECT_DOUBLE_EQ(m.rho[0][1], 1.0);
  EXPECT_TRUE(m.highlighted(0, 1));
  EXPECT_TRUE(m.highlighted(0, 3));
  EXPECT_FALSE(m.highlighted(0, 0));
}

TEST(CorrelationMatrix, IndependentUniformColumnsAreWeaklyCorrelated) {
  wayfind::rng::CounterRng gen(2024);
  std::vector<ws::NamedColumn> cols = {{"u", {}}, {"v", {}}};
  for (int i = 0; i < 1000; ++i) {
    cols[0].values.push_back(gen.uniform());
    cols[1].values.push_back(gen.uniform());
  }
  EXPECT_LT(std::abs(ws::correlation_matrix(cols).rho[0][1]), 0.1);
}

TEST(CorrelationMatrix, RejectsBadInput) {
  std::vector<ws::NamedColumn> one = {{"a", {1, 2}}};
  EXPECT_THROW(ws::correlation_matrix(one), ws::StatsError);
  std::vector<ws::NamedColumn> ragged = {{"a", {1, 2, 3}}, {"b", {1, 2}}};
  EXPECT_THROW(ws::correlation_matrix(ragged), ws::StatsError);
}
