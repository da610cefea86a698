#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <sstream>

#include "flipspec/errors.hpp"
#include "flipspec/experiments.hpp"
#include "flipspec/operators.hpp"
#include "flipspec/spectral.hpp"
#include "oracles.hpp"

using namespace flipspec;
using oracle::kPi;

namespace {

Eigen::MatrixXd random_symmetric(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(n, n);
  for (auto& v : a.reshaped()) v = g(rng);
  return 0.5 * (a + a.transpose());
}

}  // namespace

TEST(Eigen, FlipAndLaplace) {
  const auto y = sym_eigenvalues(flip_matrix(MultiIndex({4})));
  ASSERT_EQ(y.size(), 4u);
  EXPECT_NEAR(y[0], -1.0, 1e-14);
  EXPECT_NEAR(y[1], -1.0, 1e-14);
  EXPECT_NEAR(y[2], 1.0, 1e-14);
  EXPECT_NEAR(y[3], 1.0, 1e-14);

  const auto lap = sym_eigenvalues(ToeplitzOperator(laplace1d_symbol(), MultiIndex({4})).assemble_dense());
  for (int k = 1; k <= 4; ++k) EXPECT_NEAR(lap[static_cast<std::size_t>(k - 1)], 2.0 - 2.0 * std::cos(k * kPi / 5.0), 1e-13);

  const auto ten = sym_eigenvalues(flipped_dense(constant_symbol(1.0), MultiIndex({10})));
  EXPECT_EQ(std::count_if(ten.begin(), ten.end(), [](double v) { return std::abs(v + 1.0) < 1e-13; }), 5);
  EXPECT_EQ(std::count_if(ten.begin(), ten.end(), [](double v) { return std::abs(v - 1.0) < 1e-13; }), 5);
}

TEST(Eigen, ReconstructionAndOrdering) {
  std::mt19937_64 rng(50);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::MatrixXd a = random_symmetric(50, rng);
    const auto e = sym_eigendecomposition(a);
    const Eigen::MatrixXd back = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
    EXPECT_LE((a - back).norm(), 1e-10 * a.norm());
    EXPECT_TRUE(std::is_sorted(e.values.begin(), e.values.end()));
    EXPECT_LE((e.vectors.transpose() * e.vectors - Eigen::MatrixXd::Identity(50, 50)).norm(), 1e-12);
  }
}

TEST(Eigen, RejectsNonSymmetric) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(3, 3);
  a(0, 2) = 1.0;
  EXPECT_THROW(sym_eigenvalues(a), SymmetryError);
  a(0, 2) = 1e-13;
  EXPECT_NO_THROW(sym_eigenvalues(a));
}

TEST(Singular, Examples) {
  for (double s : singular_values(flip_matrix(MultiIndex({7})))) EXPECT_NEAR(s, 1.0, 1e-14);
  for (double s : singular_values(Eigen::MatrixXd::Zero(5, 5))) EXPECT_EQ(s, 0.0);
  const Eigen::MatrixXd h = assemble_hankel(trig_monomial({1}), MultiIndex({8}));
  const auto s = singular_values(h);
  const auto want = oracle::singular_values_normal(oracle::hankel_by_enumeration(trig_monomial({1}).coefficients(), MultiIndex({8})));
  EXPECT_EQ(std::count_if(s.begin(), s.end(), [](double v) { return v > 0.1; }), 2);
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(s[i], want[i], 1e-7);
}

TEST(Singular, MatchNormalEquations) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(30, 30);
  for (auto& v : a.reshaped()) v = g(rng);
  const auto s = singular_values(a);
  const auto want = oracle::singular_values_normal(a);
  EXPECT_TRUE(std::is_sorted(s.begin(), s.end(), std::greater<>()));
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(s[i], want[i], 1e-8 * s.front());
}

TEST(Gamma, SmallGrid) {
  const Grid g = build_gamma(MultiIndex({4, 3}));
  ASSERT_EQ(g.size(), 6u);
  EXPECT_EQ(g.axes[0], (std::vector<double>{0.0, kPi}));
  ASSERT_EQ(g.axes[1].size(), 3u);
  EXPECT_EQ(g.axes[1][0], 0.0);
  EXPECT_NEAR(g.axes[1][1], kPi / 2.0, 1e-15);
  EXPECT_EQ(g.axes[1][2], kPi);
  EXPECT_EQ(g.point(5), (std::vector<double>{kPi, kPi}));
  EXPECT_EQ(g.point(1)[0], 0.0);
}

TEST(Gamma, Cardinality) {
  EXPECT_EQ(build_gamma(MultiIndex({10, 10})).size(), 50u);
  EXPECT_EQ(build_gamma(MultiIndex({11, 7, 3})).size(), 5u * 7u * 3u);
  const Grid g = build_gamma(MultiIndex({9, 6}));
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (double t : g.point(i)) {
      EXPECT_GE(t, 0.0);
      EXPECT_LE(t, kPi);
    }
  }
  EXPECT_EQ(g.point(g.size() - 1)[0], kPi);
}

TEST(Gamma, UniformAlternativeAndGuards) {
  const Grid g = build_gamma(MultiIndex({8, 2}), true);
  ASSERT_EQ(g.axes[0].size(), 4u);
  EXPECT_NEAR(g.axes[0][1], kPi / 4.0, 1e-15);
  EXPECT_LT(g.axes[0].back(), kPi);
  EXPECT_THROW(build_gamma(MultiIndex({3, 4})), ParameterError);
  EXPECT_THROW(build_gamma(MultiIndex({4, 1})), ParameterError);
}

TEST(Delta, EndpointsIncluded) {
  const Grid d = build_delta(MultiIndex({5, 4}));
  EXPECT_EQ(d.size(), 20u);
  EXPECT_EQ(d.axes[0].front(), -kPi);
  EXPECT_EQ(d.axes[0].back(), kPi);
  EXPECT_EQ(d.axes[1].front(), -kPi);
  EXPECT_EQ(d.axes[1].back(), kPi);
  EXPECT_NEAR(d.axes[0][2], 0.0, 1e-15);
  EXPECT_THROW(build_delta(MultiIndex({1, 4})), ParameterError);
}

TEST(Lambda, ConstantSymbol) {
  const Grid g = build_gamma(MultiIndex({6, 5}));
  const LambdaSet l = build_lambda(constant_symbol(1.0, 2), nullptr, g);
  ASSERT_EQ(l.size(), 2 * g.size());
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(l.entries[i].value, -1.0);
  for (std::size_t i = g.size(); i < l.size(); ++i) EXPECT_EQ(l.entries[i].value, 1.0);
}

TEST(Lambda, Ex1Minimum) {
  const Grid g = build_gamma(MultiIndex({10, 10}));
  const LambdaSet l = build_lambda(ex1_symbol(), nullptr, g);
  double brute = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) brute = std::max(brute, std::abs(ex1_symbol().evaluate(g.point(i))));
  EXPECT_EQ(l.entries.front().value, -brute);
  EXPECT_NEAR(l.entries.front().value, -6.0, 1e-15);
  EXPECT_EQ(l.entries.front().branch, Branch::Lower);
  EXPECT_EQ(l.entries.front().point, 0u);
}

TEST(Lambda, PairedMultiset) {
  const LambdaSet l = build_lambda(convection_diffusion_symbol(6, 5, 4), nullptr, build_gamma(MultiIndex({6, 5, 4})));
  const auto v = l.values();
  EXPECT_TRUE(std::is_sorted(v.begin(), v.end()));
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(v[i], -v[v.size() - 1 - i]);
}

TEST(Lambda, PreconditionedClustersNearOne) {
  ExperimentConfig c;
  c.experiment = ExperimentId::Ex2;
  c.n = MultiIndex({30, 34});
  const Experiment e = make_experiment(c);
  const auto p = make_preconditioner(e, PrecondId::ToepFr);
  const LambdaSet l = build_lambda(e.f, p->symbol(), build_gamma(c.n));
  EXPECT_GE(cluster_fraction(l.values(), 0.3), 0.9);
}

TEST(Lambda, PoleReportsPoint) {
  const Symbol h = laplace1d_symbol();
  try {
    build_lambda(constant_symbol(1.0), &h, build_gamma(MultiIndex({8})));
    FAIL() << "expected PoleError";
  } catch (const PoleError& e) {
    EXPECT_NE(std::string(e.what()).find("theta"), std::string::npos);
  }
}

TEST(Matching, ExactSetGivesZeroDistance) {
  const LambdaSet l = build_lambda(ex1_symbol(), nullptr, build_delta(MultiIndex({4, 5})));
  const auto v = l.values();
  const auto m = match_eigenvalues(v, l);
  for (std::size_t i = 0; i < m.size(); ++i) {
    EXPECT_EQ(m[i].distance, 0.0);
    EXPECT_EQ(m[i].matched_value, v[i]);
  }
}

TEST(Matching, TiesPreferSmallerValueThenLowerPoint) {
  LambdaSet l;
  l.grid = build_delta(MultiIndex({2}));
  l.entries = {{-1.0, Branch::Lower, 0}, {1.0, Branch::Upper, 0}, {1.0, Branch::Upper, 1}, {3.0, Branch::Upper, 1}};
  const std::vector<double> eigs{0.0, 2.0, 1.0, -5.0, 9.0};
  const auto m = match_eigenvalues(eigs, l);
  EXPECT_EQ(m[0].matched_value, -1.0);
  EXPECT_EQ(m[1].matched_value, 1.0);
  EXPECT_EQ(m[1].point, 0u);
  EXPECT_EQ(m[2].lambda_index, 1u);
  EXPECT_EQ(m[3].lambda_index, 0u);
  EXPECT_EQ(m[4].lambda_index, 3u);
  EXPECT_THROW(match_eigenvalues(eigs, LambdaSet{}), ParameterError);
}

TEST(Matching, ConstantFlipMatchesExactly) {
  const MultiIndex n({4, 4});
  const auto eigs = sym_eigenvalues(flipped_dense(constant_symbol(1.0, 2), n));
  const auto m = match_eigenvalues(eigs, build_lambda(constant_symbol(1.0, 2), nullptr, build_delta(n)));
  ASSERT_EQ(m.size(), 16u);
  for (const auto& e : m) EXPECT_NEAR(e.distance, 0.0, 1e-14);
}

TEST(Matching, Ex1ImprovesWithSize) {
  auto mean_distance = [](const MultiIndex& n) {
    const auto eigs = sym_eigenvalues(flipped_dense(ex1_symbol(), n));
    const auto m = match_eigenvalues(eigs, build_lambda(ex1_symbol(), nullptr, build_delta(n)));
    double total = 0.0;
    for (const auto& e : m) total += e.distance;
    return total / static_cast<double>(m.size());
  };
  EXPECT_LT(mean_distance(MultiIndex({10, 10})), mean_distance(MultiIndex({6, 6})));
}

TEST(Gaps, RankResampling) {
  const std::vector<double> lambda{0, 1, 2, 3, 4, 5, 6, 7, 8};
  EXPECT_EQ(resample_by_rank(lambda, 3), (std::vector<double>{0, 4, 8}));
  EXPECT_EQ(resample_by_rank(lambda, 9), lambda);
  const auto gaps = index_gaps(std::vector<double>{0.5, 4.0, 7.0}, lambda);
  EXPECT_EQ(gaps, (std::vector<double>{0.5, 0.0, 1.0}));
}

TEST(Discrepancy, ConstantSymbolWithIdentityFunction) {
  const TestFunction id{"x", [](double x) { return x; }};
  const auto eigs = sym_eigenvalues(flipped_dense(constant_symbol(1.0, 2), MultiIndex({4, 6})));
  const auto rows = distribution_discrepancy(eigs, constant_symbol(1.0, 2), nullptr, std::span(&id, 1));
  EXPECT_NEAR(rows[0].discrepancy, 0.0, 1e-14);
}

TEST(Discrepancy, IdentityFunctionMeasuresTrace) {
  const TestFunction id{"x", [](double x) { return x; }};
  for (const MultiIndex& n : {MultiIndex({6, 8}), MultiIndex({10, 4})}) {
    const Eigen::MatrixXd s = flipped_dense(ex1_symbol(), n);
    const auto eigs = sym_eigenvalues(s);
    const auto rows = distribution_discrepancy(eigs, ex1_symbol(), nullptr, std::span(&id, 1));
    EXPECT_NEAR(rows[0].integral, 0.0, 1e-14);
    EXPECT_NEAR(rows[0].discrepancy, std::abs(s.trace()) / static_cast<double>(n.total()), 1e-12);
  }
}

TEST(Discrepancy, TentsDecayForEx1) {
  const std::vector<TestFunction> tests{tent(0.0, 16.0), tent(4.0, 8.0), tent(-3.0, 6.0)};
  std::vector<std::vector<DiscrepancyRow>> rows;
  for (int s : {10, 30}) {
    const auto eigs = sym_eigenvalues(flipped_dense(ex1_symbol(), MultiIndex({s, s})));
    rows.push_back(distribution_discrepancy(eigs, ex1_symbol(), nullptr, tests));
  }
  for (std::size_t i = 0; i < tests.size(); ++i) EXPECT_LT(rows[1][i].discrepancy, rows[0][i].discrepancy);
}

TEST(Discrepancy, TentShapeAndQuadratureSizes) {
  const auto t = tent(1.0, 4.0);
  EXPECT_EQ(t.fn(1.0), 1.0);
  EXPECT_EQ(t.fn(2.0), 0.5);
  EXPECT_EQ(t.fn(3.0), 0.0);
  EXPECT_EQ(t.fn(-5.0), 0.0);
  EXPECT_EQ(t.id.find(','), std::string::npos);
  EXPECT_THROW(tent(0.0, 0.0), ParameterError);
  EXPECT_EQ(default_quadrature_points(1), 128);
  EXPECT_EQ(default_quadrature_points(2), 128);
  EXPECT_EQ(default_quadrature_points(3), 48);
}

TEST(Discrepancy, QuadratureIsAccurateForSmoothModulus) {
  // Mean of (2 - 2cos)^2 over the period is 6.
  const TestFunction sq{"x2", [](double x) { return x * x; }};
  const std::vector<double> eigs{0.0};
  const auto rows = distribution_discrepancy(eigs, laplace1d_symbol(), nullptr, std::span(&sq, 1), 64);
  EXPECT_NEAR(rows[0].integral, 6.0, 1e-12);
}

TEST(ZeroDistribution, HankelOfExponential) {
  std::vector<Eigen::MatrixXd> mats;
  for (int n : {8, 16, 32}) mats.push_back(assemble_hankel(trig_monomial({1}), MultiIndex({n})));
  const auto r = zero_distribution_verdict(mats);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.tau, 1e-6);
  ASSERT_EQ(r.rows.size(), 3u);
  EXPECT_EQ(r.rows[0].count, 2u);
  EXPECT_EQ(r.rows[1].count, 2u);
  EXPECT_EQ(r.rows[2].count, 2u);
  EXPECT_DOUBLE_EQ(r.rows[0].fraction, 2.0 / 8.0);
  EXPECT_DOUBLE_EQ(r.rows[2].fraction, 2.0 / 32.0);
}

TEST(ZeroDistribution, TrivialCases) {
  EXPECT_TRUE(zero_distribution_verdict({Eigen::MatrixXd::Zero(4, 4), Eigen::MatrixXd::Zero(8, 8)}).pass);
  const auto id = zero_distribution_verdict({Eigen::MatrixXd::Identity(4, 4), Eigen::MatrixXd::Identity(8, 8)});
  EXPECT_FALSE(id.pass);
  EXPECT_EQ(id.rows[0].fraction, 1.0);
  EXPECT_EQ(id.rows[1].fraction, 1.0);
  EXPECT_THROW(zero_distribution_verdict({Eigen::MatrixXd::Zero(4, 4)}), ParameterError);
}

TEST(ZeroDistribution, HankelOfEx1) {
  std::vector<Eigen::MatrixXd> mats;
  for (int n : {8, 16, 32}) mats.push_back(assemble_hankel(ex1_symbol(), MultiIndex({n, n})));
  EXPECT_TRUE(zero_distribution_verdict(mats).pass);
}

namespace {

// Both sides of the odd-size embedding built from the definitions.
double odd_embedding_residual(int j, int n) {
  const int m = (n - 1) / 2;
  const Eigen::MatrixXd lhs = oracle::u_by_blocks(n) * oracle::anti_identity(n) * oracle::shift_matrix(n, j) *
                              oracle::u_by_blocks(n);
  CoefficientTable plus(1), minus(1);
  plus.set({j}, 1.0);
  minus.set({-j}, 1.0);
  const MultiIndex half({m + 1});
  Eigen::MatrixXd a(n + 1, n + 1);
  a << oracle::hankel_by_enumeration(plus, half), oracle::toeplitz_by_kron(plus, half),
      oracle::toeplitz_by_kron(minus, half), oracle::hankel_by_enumeration(minus, half);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n + 1);
  p.topLeftCorner(m + 1, m + 1).setIdentity();
  p.bottomRightCorner(m, m).setIdentity();
  return (lhs - p * a * p.transpose()).cwiseAbs().maxCoeff();
}

}  // namespace

TEST(OddEmbedding, DefinitionHolds) {
  for (int n : {3, 5, 7, 9, 11}) {
    for (int j = -(n - 1); j <= n - 1; ++j) EXPECT_EQ(odd_embedding_residual(j, n), 0.0) << j << " " << n;
  }
}

TEST(OddEmbedding, Report) {
  const auto one = odd_embedding_check(constant_symbol(1.0), 3);
  EXPECT_EQ(one.max_error, 0.0);
  // H_2(1) keeps its unit corner in both diagonal blocks.
  EXPECT_NEAR(one.hankel_correction_norm, std::sqrt(2.0), 1e-15);
  EXPECT_EQ(odd_embedding_check(trig_monomial({1}), 5).max_error, 0.0);
  EXPECT_EQ(odd_embedding_check(trig_monomial({2}), 7).max_error, 0.0);
  const auto lap = odd_embedding_check(laplace1d_symbol(), 9);
  EXPECT_EQ(lap.max_error, 0.0);
  EXPECT_EQ(lap.terms.size(), 3u);
  EXPECT_THROW(odd_embedding_check(constant_symbol(1.0), 4), PreconditionError);
}

TEST(FlippedSpectrum, TraceTwoWays) {
  for (const MultiIndex& n : {MultiIndex({6, 6}), MultiIndex({4, 8}), MultiIndex({2, 4, 6})}) {
    const Symbol f = n.levels() == 2 ? ex1_symbol() : convection_diffusion_symbol(2, 4, 6);
    const Eigen::MatrixXd s = flipped_dense(f, n);
    const auto eigs = sym_eigenvalues(s);
    double sum = 0.0;
    for (double e : eigs) sum += e;
    EXPECT_NEAR(sum, s.trace(), 1e-10);
  }
}

TEST(Csv, SpectralAndDiscrepancyFormats) {
  const LambdaSet l = build_lambda(ex1_symbol(), nullptr, build_delta(MultiIndex({3, 3})));
  const auto v = l.values();
  const auto m = match_eigenvalues(std::vector<double>{v[0]}, l);
  std::ostringstream out;
  write_spectral_report_csv(out, m, l);
  std::string header;
  std::istringstream in(out.str());
  std::getline(in, header);
  EXPECT_EQ(header, "index,eigenvalue,matched_value,branch,theta_1,theta_2,distance");
  std::ostringstream d;
  const std::vector<DiscrepancyRow> rows{{"tent(c=0;w=1)", 0.5, 0.25, 0.25}};
  write_discrepancy_csv(d, rows);
  EXPECT_EQ(d.str(), "testfn_id,sample_mean,integral,discrepancy\n\"tent(c=0;w=1)\",0.5,0.25,0.25\n");
}
