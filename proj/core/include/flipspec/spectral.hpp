#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "flipspec/multi_index.hpp"
#include "flipspec/symbol.hpp"

namespace flipspec {

// Throws SymmetryError unless max|A - A^T| <= rel_tol * max|A|.
void check_symmetric(const Eigen::MatrixXd& a, double rel_tol = 1e-10);

// Eigenvalues of a dense symmetric matrix, ascending.
std::vector<double> sym_eigenvalues(const Eigen::MatrixXd& a);

struct SymmetricEigen {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // orthonormal columns
};
SymmetricEigen sym_eigendecomposition(const Eigen::MatrixXd& a);

// Singular values, descending.
std::vector<double> singular_values(const Eigen::MatrixXd& a);

// --- sampling grids ---------------------------------------------------------

// Tensor grid of points in R^d, row-major with the first coordinate slowest.
struct Grid {
  std::vector<std::vector<double>> axes;

  std::size_t levels() const noexcept { return axes.size(); }
  std::size_t size() const;
  // Coordinates of point `index`.
  std::vector<double> point(std::size_t index) const;
};

// Gamma on [0, pi]^d: floor(n_1/2) points pi k/(floor(n_1/2) - 1) on the
// first level and n_j points pi k/(n_j - 1) on the others. With
// `uniform_first` the first level uses pi k / floor(n_1/2) instead
// (sensitivity runs only).
Grid build_gamma(const MultiIndex& n, bool uniform_first = false);

// Delta on [-pi, pi]^d: n_j points -pi + 2 pi k/(n_j - 1) per level.
Grid build_delta(const MultiIndex& n);

// --- the sample set Lambda --------------------------------------------------

enum class Branch { Lower = 1, Upper = 2 };  // lambda_1 = -|f|/h, lambda_2 = +|f|/h

struct LambdaEntry {
  double value;
  Branch branch;
  std::size_t point;  // index into the grid
};

struct LambdaSet {
  Grid grid;
  // Sorted by value, then grid index, then branch.
  std::vector<LambdaEntry> entries;

  std::size_t size() const noexcept { return entries.size(); }
  std::vector<double> values() const;
};

// {-|f|/h, +|f|/h} over the grid (h == nullptr means h = 1).
LambdaSet build_lambda(const Symbol& f, const Symbol* h, const Grid& grid);

struct MatchEntry {
  std::size_t index;        // position in the eigenvalue list
  double eigenvalue;
  std::size_t lambda_index; // position in LambdaSet::entries
  double matched_value;
  Branch branch;
  std::size_t point;
  double distance;
};

// Nearest Lambda value for every eigenvalue. Ties go to the smaller value,
// then to the lower grid index.
std::vector<MatchEntry> match_eigenvalues(std::span<const double> eigs,
                                          const LambdaSet& lambda);

// |eig_i - Lambda_i| for sorted inputs. When the lengths differ the sample
// set is resampled by rank: Lambda at round(i (L-1)/(N-1)).
std::vector<double> index_gaps(std::span<const double> eigs,
                               std::span<const double> lambda);
// The rank resampling used by index_gaps: `count` values picked from `values`.
std::vector<double> resample_by_rank(std::span<const double> values, std::size_t count);

// --- distribution functionals -----------------------------------------------

struct TestFunction {
  std::string id;
  std::function<double(double)> fn;
};

// max(0, 1 - 2|x - center|/width): support of total length `width`.
TestFunction tent(double center, double width);

// Quadrature points per level used by distribution_discrepancy.
int default_quadrature_points(std::size_t levels);

struct DiscrepancyRow {
  std::string id;
  double sample_mean;
  double integral;
  double discrepancy;
};

// For each F: |(1/N) sum F(eig_j) - (2pi)^-d \int [F(-|f|/h) + F(|f|/h)]/2|.
// The integral uses the periodic midpoint rule with `points` nodes per level
// (0 selects default_quadrature_points). Throws PoleError if h vanishes at
// a node.
std::vector<DiscrepancyRow> distribution_discrepancy(
    std::span<const double> eigs, const Symbol& f, const Symbol* h,
    std::span<const TestFunction> tests, int points = 0);

struct ZeroDistributionRow {
  std::size_t order;
  std::size_t count;       // singular values above tau * sigma_max
  double fraction;         // count / order
  double sigma_max;
  double sigma_below_cut;  // largest singular value at or below the cut
};

struct ZeroDistributionReport {
  double tau;
  std::vector<ZeroDistributionRow> rows;
  bool pass;
};

// PASS when the rank fractions never increase and either the last is below
// the first or every matrix is zero.
ZeroDistributionReport zero_distribution_verdict(
    const std::vector<Eigen::MatrixXd>& matrices, double tau = 1e-6);

struct OddEmbeddingTerm {
  int k;
  cdouble coefficient;
  double embedding_error;  // max |U Y T_n(e^{ik theta}) U - P A_{n+1} P^T|
  double split_error;      // max |A_{n+1} - Pi^T T(g_k) Pi - Hankel part|
  double hankel_norm;      // Frobenius norm of the Hankel part of A_{n+1}
};

struct OddEmbeddingReport {
  int n;
  std::vector<OddEmbeddingTerm> terms;
  double max_error;
  double hankel_correction_norm;  // || sum_k t_k Hankel_k ||_F
};

// Unilevel, odd n = 2m + 1, f with a coefficient table.
OddEmbeddingReport odd_embedding_check(const Symbol& f, int n);

// --- CSV export --------------------------------------------------------------

// index,eigenvalue,matched_value,branch,theta_1..theta_d,distance
void write_spectral_report_csv(std::ostream& out, std::span<const MatchEntry> matches,
                               const LambdaSet& lambda);
// testfn_id,sample_mean,integral,discrepancy
void write_discrepancy_csv(std::ostream& out, std::span<const DiscrepancyRow> rows);

}  // namespace flipspec
