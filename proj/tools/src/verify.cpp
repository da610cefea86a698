#include "verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "flipspec/errors.hpp"
#include "flipspec/experiments.hpp"
#include "flipspec/operators.hpp"
#include "flipspec/spectral.hpp"

namespace flipspec::cli {

namespace {

Check at_most(std::string suite, std::string name, double value, double threshold,
              std::string detail = {}) {
  return {std::move(suite), std::move(name), value <= threshold, value, threshold,
          std::move(detail)};
}

Check holds(std::string suite, std::string name, bool ok, double value, std::string detail) {
  return {std::move(suite), std::move(name), ok, value, std::nan(""), std::move(detail)};
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out += (i ? " " : "") + std::to_string(values[i]);
  }
  return out;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

Symbol exp_symbol(int k) { return trig_monomial({k}); }

std::vector<Check> operators_suite(std::uint64_t seed) {
  std::vector<Check> out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 1 + trial % 3;
    std::vector<int> sizes(d);
    for (int& s : sizes) s = 1 + static_cast<int>(rng() % (d == 3 ? 6 : 12));
    CoefficientTable table(d);
    for (int c = 0; c < 6; ++c) {
      std::vector<int> k(d);
      for (int l = 0; l < d; ++l) k[l] = static_cast<int>(rng() % 7) - 3;
      table.add(k, unit(rng));
    }
    const ToeplitzOperator t(table, MultiIndex(sizes));
    Eigen::VectorXd x(static_cast<Eigen::Index>(t.dimension()));
    for (auto& v : x) v = unit(rng);
    const Eigen::VectorXd dense = t.assemble_dense() * x;
    const auto fast = t.matvec(std::span<const double>(x.data(), t.dimension()));
    const double num = (Eigen::Map<const Eigen::VectorXd>(fast.data(), x.size()) - dense).norm();
    const double den = std::max(dense.norm(), 1e-300);
    if (dense.norm() > 0.0) worst = std::max(worst, num / den);
  }
  out.push_back(at_most("operators", "fft_vs_dense_matvec", worst, 1e-12, "50 random cases"));

  double shuffle = 0.0;
  for (const MultiIndex& n : {MultiIndex({8}), MultiIndex({4, 6}), MultiIndex({2, 4, 4})}) {
    const auto one = constant_symbol(1.0, n.levels());
    const Eigen::MatrixXd lhs =
        shuffle_conjugate(Eigen::MatrixXd::Identity(n.total(), n.total()), n);
    shuffle = std::max(shuffle, (lhs - assemble_levelwise_block_g(one, n)).cwiseAbs().maxCoeff());
  }
  out.push_back(at_most("operators", "shuffle_identity", shuffle, 0.0, "Pi U Y U Pi^T = T(g), f = 1"));

  const MultiIndex n({6, 6});
  const Eigen::MatrixXd yt = flipped_dense(ex1_symbol(), n);
  const auto eigs = sym_eigenvalues(yt);
  double sum = 0.0;
  for (double e : eigs) sum += e;
  out.push_back(at_most("operators", "flipped_trace", std::abs(sum - yt.trace()), 1e-10,
                        "sum of eigenvalues vs trace"));
  return out;
}

std::vector<Check> prop31_suite(std::vector<int> sizes) {
  if (sizes.empty()) sizes = {8, 16};
  std::vector<Check> out;
  std::vector<double> exp_fraction, ex1_fraction;
  double one_norm = 0.0;
  for (int s : sizes) {
    exp_fraction.push_back(structure_residual(exp_symbol(1), MultiIndex({s})).rank_fraction);
    ex1_fraction.push_back(structure_residual(ex1_symbol(), MultiIndex({s, s})).rank_fraction);
    one_norm = std::max(one_norm,
                        structure_residual(constant_symbol(1.0, 2), MultiIndex({s, s})).norm);
  }
  out.push_back(holds("prop31", "rank_fraction_exp", strictly_decreasing(exp_fraction),
                      exp_fraction.back(), "fractions " + join(exp_fraction)));
  out.push_back(holds("prop31", "rank_fraction_ex1", strictly_decreasing(ex1_fraction),
                      ex1_fraction.back(), "fractions " + join(ex1_fraction)));
  out.push_back(at_most("prop31", "constant_symbol_zero", one_norm, 0.0, "||D|| for f = 1"));
  return out;
}

std::vector<Check> hankel_suite(std::vector<int> sizes) {
  if (sizes.empty()) sizes = {8, 16, 32};
  std::vector<Eigen::MatrixXd> uni, multi;
  for (int s : sizes) {
    uni.push_back(assemble_hankel(exp_symbol(1), MultiIndex({s})));
    multi.push_back(assemble_hankel(ex1_symbol(), MultiIndex({s, s})));
  }
  std::vector<Check> out;
  for (auto [name, mats] : {std::pair{"hankel_exp", &uni}, std::pair{"hankel_ex1", &multi}}) {
    const auto report = zero_distribution_verdict(*mats);
    std::vector<double> fractions;
    for (const auto& row : report.rows) fractions.push_back(row.fraction);
    out.push_back(holds("hankel", name, report.pass, fractions.back(), "fractions " + join(fractions)));
  }
  return out;
}

std::vector<Check> odd_suite() {
  std::vector<Check> out;
  const std::vector<std::pair<Symbol, int>> cases = {
      {constant_symbol(1.0), 3}, {exp_symbol(1), 5}, {exp_symbol(2), 7}, {laplace1d_symbol(), 9}};
  for (const auto& [f, n] : cases) {
    const auto report = odd_embedding_check(f, n);
    out.push_back(at_most("odd", f.name() + "_n" + std::to_string(n), report.max_error, 0.0,
                          "hankel correction " + std::to_string(report.hankel_correction_norm)));
  }
  return out;
}

std::vector<TestFunction> tents() { return {tent(0.0, 16.0), tent(4.0, 8.0), tent(-3.0, 6.0)}; }

std::vector<Check> discrepancy_suite() {
  const Symbol f = ex1_symbol();
  const auto tests = tents();
  std::vector<std::vector<DiscrepancyRow>> rows;
  for (int s : {10, 30}) {
    const auto eigs = sym_eigenvalues(flipped_dense(f, MultiIndex({s, s})));
    rows.push_back(distribution_discrepancy(eigs, f, nullptr, tests));
  }
  std::vector<Check> out;
  for (std::size_t i = 0; i < tests.size(); ++i) {
    const double coarse = rows[0][i].discrepancy;
    const double fine = rows[1][i].discrepancy;
    out.push_back({"discrepancy", tests[i].id, fine < coarse && fine < 0.05, fine, 0.05,
                   "n=10: " + std::to_string(coarse) + ", n=30: " + std::to_string(fine)});
  }
  return out;
}

std::vector<Check> overlay_suite() {
  ExperimentConfig c;
  c.experiment = ExperimentId::Ex1;
  std::vector<SpectrumResult> runs;
  for (int s : {10, 30}) {
    c.n = MultiIndex({s, s});
    runs.push_back(compute_spectrum(make_experiment(c), nullptr));
  }
  return {holds("overlay", "max_gap_decreases", runs[1].max_gap < runs[0].max_gap, runs[1].max_gap,
                "n=10: " + std::to_string(runs[0].max_gap) + ", n=30: " +
                    std::to_string(runs[1].max_gap)),
          at_most("overlay", "mean_gap_n30", runs[1].mean_gap, 0.6, "0.1 max|f|")};
}

std::vector<Check> precond_suite(std::uint64_t seed) {
  struct Case {
    ExperimentId exp;
    MultiIndex n;
    PrecondId p;
  };
  const std::vector<Case> cases = {{ExperimentId::Ex2, MultiIndex({10, 10}), PrecondId::ToepFr},
                                   {ExperimentId::Ex2, MultiIndex({10, 10}), PrecondId::P22},
                                   {ExperimentId::Ex2, MultiIndex({10, 10}), PrecondId::P2Beta},
                                   {ExperimentId::Ex3, MultiIndex({5, 5, 5}), PrecondId::ToepFr},
                                   {ExperimentId::Ex3, MultiIndex({8, 8, 8}), PrecondId::CircSum}};
  std::vector<Check> out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  for (const auto& c : cases) {
    ExperimentConfig cfg;
    cfg.experiment = c.exp;
    cfg.n = c.n;
    const auto p = make_preconditioner(make_experiment(cfg), c.p);
    double worst = 0.0;
    std::vector<double> r(p->dimension()), z(p->dimension()), back(p->dimension());
    for (int probe = 0; probe < 20; ++probe) {
      for (double& v : r) v = gauss(rng);
      p->apply_inverse(r, z);
      p->apply(z, back);
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < r.size(); ++i) {
        num += (back[i] - r[i]) * (back[i] - r[i]);
        den += r[i] * r[i];
      }
      worst = std::max(worst, std::sqrt(num / den));
    }
    out.push_back(at_most("precond", to_string(c.exp) + "_" + to_string(c.p) + "_round_trip",
                          worst, 1e-10, "20 probes, n=" + c.n.to_string()));
  }
  return out;
}

std::vector<Check> cluster_suite() {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentId::Ex2;
  cfg.n = MultiIndex({30, 34});
  cfg.M = 30;
  const Experiment e = make_experiment(cfg);
  const auto p = make_preconditioner(e, PrecondId::ToepFr);
  const auto eigs = sym_eigenvalues(p->whiten(flipped_dense(e.f, cfg.n)));
  const double frac = cluster_fraction(eigs, 0.3);
  return {{"cluster", "toepfr_ex2_30x34", frac >= 0.9, frac, 0.9, "fraction within 0.3 of +-1"}};
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"operators", "prop31",  "hankel",  "odd",
                                                 "discrepancy", "overlay", "precond", "cluster"};
  return names;
}

std::vector<Check> run_suite(const std::string& name, const std::vector<int>& sizes,
                             std::uint64_t seed) {
  if (name == "operators") return operators_suite(seed);
  if (name == "prop31") return prop31_suite(sizes);
  if (name == "hankel") return hankel_suite(sizes);
  if (name == "odd") return odd_suite();
  if (name == "discrepancy") return discrepancy_suite();
  if (name == "overlay") return overlay_suite();
  if (name == "precond") return precond_suite(seed);
  if (name == "cluster") return cluster_suite();
  throw ParameterError("unknown suite '" + name + "'");
}

}  // namespace flipspec::cli
