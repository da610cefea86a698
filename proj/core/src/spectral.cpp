#include "flipspec/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "flipspec/errors.hpp"
#include "flipspec/operators.hpp"
#include "flipspec/parallel.hpp"

namespace flipspec {

namespace {

constexpr double kPi = std::numbers::pi;

void guard_order(Eigen::Index rows, Eigen::Index cols, const char* what) {
  if (static_cast<std::size_t>(std::max(rows, cols)) > kDenseLimit) {
    throw CapacityError(std::string(what) + ": order " + std::to_string(std::max(rows, cols)) +
                        " exceeds " + std::to_string(kDenseLimit));
  }
}

std::vector<double> equispaced(int count, double start, double step) {
  std::vector<double> axis(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) axis[k] = start + step * k;
  return axis;
}

// |f|/h at every point of a grid, evaluated in parallel.
std::vector<double> ratio_samples(const Symbol& f, const Symbol* h, const Grid& grid,
                                  bool checked) {
  const std::size_t count = grid.size();
  std::vector<double> mag(count), den(count, 1.0);
  parallel_for(count, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto theta = grid.point(i);
      mag[i] = std::abs(checked ? eval(f, theta) : f.evaluate(theta));
      if (h != nullptr) den[i] = (checked ? eval(*h, theta) : h->evaluate(theta)).real();
    }
  });
  if (h != nullptr) {
    double scale = 0.0;
    for (double v : den) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < count; ++i) {
      if (!(std::abs(den[i]) > 1e-12 * scale)) {
        const auto theta = grid.point(i);
        std::string where;
        for (std::size_t l = 0; l < theta.size(); ++l) {
          where += (l ? ", " : "") + std::to_string(theta[l]);
        }
        throw PoleError("symbol '" + h->name() + "' vanishes at theta = (" + where + ")");
      }
      mag[i] /= den[i];
    }
  }
  return mag;
}

CoefficientTable monomial(int k) {
  CoefficientTable t(1);
  t.set({k}, 1.0);
  return t;
}

}  // namespace

// --- dense decompositions ----------------------------------------------------

void check_symmetric(const Eigen::MatrixXd& a, double rel_tol) {
  if (a.rows() != a.cols()) throw ShapeError("matrix is not square");
  const double scale = a.cwiseAbs().maxCoeff();
  const double asym = a.rows() == 0 ? 0.0 : (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > rel_tol * scale) {
    throw SymmetryError("matrix not symmetric: max|A - A^T| = " + std::to_string(asym) +
                        ", max|A| = " + std::to_string(scale));
  }
}

std::vector<double> sym_eigenvalues(const Eigen::MatrixXd& a) {
  guard_order(a.rows(), a.cols(), "sym_eigenvalues");
  check_symmetric(a);
  if (a.rows() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error("symmetric eigensolver did not converge");
  const Eigen::VectorXd& v = solver.eigenvalues();
  return {v.data(), v.data() + v.size()};
}

SymmetricEigen sym_eigendecomposition(const Eigen::MatrixXd& a) {
  guard_order(a.rows(), a.cols(), "sym_eigendecomposition");
  check_symmetric(a);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw Error("symmetric eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

std::vector<double> singular_values(const Eigen::MatrixXd& a) {
  guard_order(a.rows(), a.cols(), "singular_values");
  if (a.size() == 0) return {};
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
  const Eigen::VectorXd& s = svd.singularValues();
  std::vector<double> out(s.data(), s.data() + s.size());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

// --- grids -------------------------------------------------------------------

std::size_t Grid::size() const {
  if (axes.empty()) return 0;
  std::size_t n = 1;
  for (const auto& axis : axes) n *= axis.size();
  return n;
}

std::vector<double> Grid::point(std::size_t index) const {
  std::vector<double> theta(axes.size());
  for (std::size_t l = axes.size(); l-- > 0;) {
    const std::size_t len = axes[l].size();
    theta[l] = axes[l][index % len];
    index /= len;
  }
  return theta;
}

Grid build_gamma(const MultiIndex& n, bool uniform_first) {
  if (n.levels() == 0) throw ParameterError("build_gamma: no levels");
  const int m = n[0] / 2;
  if (m < 2) throw ParameterError("build_gamma: floor(n_1/2) must be >= 2, n = " + n.to_string());
  Grid grid;
  grid.axes.push_back(equispaced(m, 0.0, uniform_first ? kPi / m : kPi / (m - 1)));
  for (std::size_t l = 1; l < n.levels(); ++l) {
    if (n[l] < 2) throw ParameterError("build_gamma: n_j must be >= 2, n = " + n.to_string());
    grid.axes.push_back(equispaced(n[l], 0.0, kPi / (n[l] - 1)));
  }
  // Pin the closing endpoint so the last node is pi exactly.
  if (!uniform_first) grid.axes[0].back() = kPi;
  for (std::size_t l = 1; l < grid.axes.size(); ++l) grid.axes[l].back() = kPi;
  return grid;
}

Grid build_delta(const MultiIndex& n) {
  Grid grid;
  for (int size : n.sizes()) {
    if (size < 2) throw ParameterError("build_delta: sizes must be >= 2, n = " + n.to_string());
    auto axis = equispaced(size, -kPi, 2.0 * kPi / (size - 1));
    axis.back() = kPi;
    grid.axes.push_back(std::move(axis));
  }
  return grid;
}

// --- Lambda --------------------------------------------------------------------

std::vector<double> LambdaSet::values() const {
  std::vector<double> v(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) v[i] = entries[i].value;
  return v;
}

LambdaSet build_lambda(const Symbol& f, const Symbol* h, const Grid& grid) {
  if (grid.levels() != f.levels()) throw ShapeError("build_lambda: grid/symbol level mismatch");
  const auto r = ratio_samples(f, h, grid, true);
  LambdaSet set;
  set.grid = grid;
  set.entries.reserve(2 * r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    set.entries.push_back({-r[i], Branch::Lower, i});
    set.entries.push_back({r[i], Branch::Upper, i});
  }
  std::sort(set.entries.begin(), set.entries.end(),
            [](const LambdaEntry& a, const LambdaEntry& b) {
              if (a.value != b.value) return a.value < b.value;
              if (a.point != b.point) return a.point < b.point;
              return a.branch < b.branch;
            });
  return set;
}

std::vector<MatchEntry> match_eigenvalues(std::span<const double> eigs,
                                          const LambdaSet& lambda) {
  if (lambda.entries.empty()) throw ParameterError("match_eigenvalues: empty Lambda");
  const std::vector<double> values = lambda.values();
  std::vector<MatchEntry> out;
  out.reserve(eigs.size());
  for (std::size_t i = 0; i < eigs.size(); ++i) {
    const double x = eigs[i];
    const auto above = std::lower_bound(values.begin(), values.end(), x);
    std::size_t pick;
    if (above == values.begin()) {
      pick = 0;
    } else if (above == values.end()) {
      pick = static_cast<std::size_t>(
          std::lower_bound(values.begin(), values.end(), values.back()) - values.begin());
    } else {
      const double lo = *(above - 1);
      if (x - lo <= *above - x) {
        pick = static_cast<std::size_t>(
            std::lower_bound(values.begin(), values.end(), lo) - values.begin());
      } else {
        pick = static_cast<std::size_t>(above - values.begin());
      }
    }
    const LambdaEntry& e = lambda.entries[pick];
    out.push_back({i, x, pick, e.value, e.branch, e.point, std::abs(x - e.value)});
  }
  return out;
}

std::vector<double> resample_by_rank(std::span<const double> values, std::size_t count) {
  if (values.empty()) throw ParameterError("resample_by_rank: no values");
  const std::size_t len = values.size();
  if (len == count) return {values.begin(), values.end()};
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j =
        count == 1 ? 0
                   : static_cast<std::size_t>(std::llround(static_cast<double>(i) * (len - 1) /
                                                           static_cast<double>(count - 1)));
    out[i] = values[j];
  }
  return out;
}

std::vector<double> index_gaps(std::span<const double> eigs, std::span<const double> lambda) {
  if (lambda.empty()) throw ParameterError("index_gaps: empty Lambda");
  const auto picked = resample_by_rank(lambda, eigs.size());
  std::vector<double> gaps(eigs.size());
  for (std::size_t i = 0; i < eigs.size(); ++i) gaps[i] = std::abs(eigs[i] - picked[i]);
  return gaps;
}

// --- distribution functionals --------------------------------------------------

TestFunction tent(double center, double width) {
  if (!(width > 0.0)) throw ParameterError("tent: width must be positive");
  std::ostringstream id;
  id << "tent(c=" << center << ";w=" << width << ')';
  return {id.str(),
          [center, width](double x) {
            return std::max(0.0, 1.0 - 2.0 * std::abs(x - center) / width);
          }};
}

int default_quadrature_points(std::size_t levels) {
  if (levels <= 2) return 128;
  if (levels == 3) return 48;
  return 16;
}

std::vector<DiscrepancyRow> distribution_discrepancy(std::span<const double> eigs,
                                                     const Symbol& f, const Symbol* h,
                                                     std::span<const TestFunction> tests,
                                                     int points) {
  if (eigs.empty()) throw ShapeError("distribution_discrepancy: no eigenvalues");
  if (h != nullptr && h->levels() != f.levels()) {
    throw ShapeError("distribution_discrepancy: f and h level mismatch");
  }
  const int m = points > 0 ? points : default_quadrature_points(f.levels());
  Grid nodes;
  // Periodic midpoint rule: spectrally accurate and never samples theta = 0.
  for (std::size_t l = 0; l < f.levels(); ++l) {
    nodes.axes.push_back(equispaced(m, -kPi + kPi / m, 2.0 * kPi / m));
  }
  const auto r = ratio_samples(f, h, nodes, false);
  std::vector<DiscrepancyRow> rows;
  for (const auto& test : tests) {
    double sample = 0.0;
    for (double x : eigs) sample += test.fn(x);
    sample /= static_cast<double>(eigs.size());
    double integral = 0.0;
    for (double v : r) integral += 0.5 * (test.fn(-v) + test.fn(v));
    integral /= static_cast<double>(r.size());
    rows.push_back({test.id, sample, integral, std::abs(sample - integral)});
  }
  return rows;
}

ZeroDistributionReport zero_distribution_verdict(const std::vector<Eigen::MatrixXd>& matrices,
                                                 double tau) {
  if (matrices.size() < 2) throw ParameterError("zero_distribution_verdict: need >= 2 sizes");
  if (!(tau > 0.0 && tau < 1.0)) throw ParameterError("zero_distribution_verdict: tau in (0,1)");
  ZeroDistributionReport report{tau, {}, true};
  bool all_zero = true;
  for (const auto& a : matrices) {
    const auto sigma = singular_values(a);
    ZeroDistributionRow row{static_cast<std::size_t>(a.rows()), 0, 0.0, 0.0, 0.0};
    row.sigma_max = sigma.empty() ? 0.0 : sigma.front();
    const double cut = tau * row.sigma_max;
    for (double s : sigma) {
      if (row.sigma_max > 0.0 && s > cut) {
        ++row.count;
      } else {
        row.sigma_below_cut = std::max(row.sigma_below_cut, s);
      }
    }
    row.fraction = row.order ? static_cast<double>(row.count) / static_cast<double>(row.order) : 0.0;
    all_zero = all_zero && row.sigma_max == 0.0;
    report.rows.push_back(row);
  }
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    if (report.rows[i].fraction > report.rows[i - 1].fraction) report.pass = false;
  }
  if (!(report.rows.back().fraction < report.rows.front().fraction || all_zero)) {
    report.pass = false;
  }
  return report;
}

OddEmbeddingReport odd_embedding_check(const Symbol& f, int n) {
  if (f.levels() != 1) throw ShapeError("odd_embedding_check: unilevel symbols only");
  if (n % 2 == 0) throw PreconditionError("odd_embedding_check: n must be odd, got " + std::to_string(n));
  if (n < 3) throw ParameterError("odd_embedding_check: n must be >= 3");
  const int m = (n - 1) / 2;
  const MultiIndex sizes({n});
  const MultiIndex half({m + 1});
  const MultiIndex even({n + 1});
  const Eigen::MatrixXd u = u_matrix(sizes);
  const Eigen::MatrixXd y = flip_matrix(sizes);
  const Eigen::MatrixXd pi = pi_matrix(even);

  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n + 1);
  p.block(0, 0, m + 1, m + 1).setIdentity();
  p.block(m + 1, m + 2, m, m).setIdentity();

  OddEmbeddingReport report{n, {}, 0.0, 0.0};
  Eigen::MatrixXcd correction = Eigen::MatrixXcd::Zero(n + 1, n + 1);
  for (const auto& [k, value] : f.coefficients().entries()) {
    const int j = k[0];
    if (std::abs(j) >= n) continue;
    const Symbol plus = Symbol::from_coefficients(monomial(j), "e^{ik}");
    const Symbol minus = Symbol::from_coefficients(monomial(-j), "e^{-ik}");

    const Eigen::MatrixXd lhs = u * y * ToeplitzOperator(plus, sizes).assemble_dense() * u;
    Eigen::MatrixXd hankel = Eigen::MatrixXd::Zero(n + 1, n + 1);
    hankel.block(0, 0, m + 1, m + 1) = assemble_hankel(plus, half);
    hankel.block(m + 1, m + 1, m + 1, m + 1) = assemble_hankel(minus, half);
    Eigen::MatrixXd a = hankel;
    a.block(0, m + 1, m + 1, m + 1) = ToeplitzOperator(plus, half).assemble_dense();
    a.block(m + 1, 0, m + 1, m + 1) = ToeplitzOperator(minus, half).assemble_dense();

    const Eigen::MatrixXd toeplitz_part = pi.transpose() * assemble_block_g(plus, half) * pi;
    OddEmbeddingTerm term{j, value, (lhs - p * a * p.transpose()).cwiseAbs().maxCoeff(),
                          (a - toeplitz_part - hankel).cwiseAbs().maxCoeff(), hankel.norm()};
    report.max_error = std::max({report.max_error, term.embedding_error, term.split_error});
    correction += value * hankel.cast<cdouble>();
    report.terms.push_back(term);
  }
  report.hankel_correction_norm = correction.norm();
  return report;
}

// --- CSV ---------------------------------------------------------------------------

void write_spectral_report_csv(std::ostream& out, std::span<const MatchEntry> matches,
                               const LambdaSet& lambda) {
  const auto old = out.precision(17);
  out << "index,eigenvalue,matched_value,branch";
  for (std::size_t l = 0; l < lambda.grid.levels(); ++l) out << ",theta_" << (l + 1);
  out << ",distance\n";
  for (const auto& m : matches) {
    out << m.index << ',' << m.eigenvalue << ',' << m.matched_value << ','
        << static_cast<int>(m.branch);
    for (double t : lambda.grid.point(m.point)) out << ',' << t;
    out << ',' << m.distance << '\n';
  }
  out.precision(old);
}

void write_discrepancy_csv(std::ostream& out, std::span<const DiscrepancyRow> rows) {
  const auto old = out.precision(17);
  out << "testfn_id,sample_mean,integral,discrepancy\n";
  for (const auto& r : rows) {
    out << '"' << r.id << "\"," << r.sample_mean << ',' << r.integral << ',' << r.discrepancy
        << '\n';
  }
  out.precision(old);
}

}  // namespace flipspec
