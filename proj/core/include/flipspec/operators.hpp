#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "flipspec/fft.hpp"
#include "flipspec/multi_index.hpp"
#include "flipspec/symbol.hpp"

namespace flipspec {

// Largest matrix order any assemble_* call will materialize.
inline constexpr std::size_t kDenseLimit = 20000;

// d-level Toeplitz matrix T_n(f) held by its coefficients.
//
// Dense entry (i, j) is t_{i-j} (multi-index difference). Products use a
// circulant embedding of size next_pow2(n_l + q_l + 1) per level, where
// q_l = min(band_l, n_l - 1); coefficients with |k_l| >= n_l never enter.
class ToeplitzOperator {
 public:
  ToeplitzOperator(const CoefficientTable& coefficients, MultiIndex sizes);
  ToeplitzOperator(const Symbol& symbol, MultiIndex sizes);

  const MultiIndex& sizes() const noexcept { return sizes_; }
  std::size_t dimension() const noexcept { return sizes_.total(); }
  bool is_real() const noexcept { return real_; }
  const CoefficientTable& coefficients() const noexcept { return coefficients_; }

  // max |sum_l k_l * stride_l| over the stored coefficients: the half
  // bandwidth of the flattened matrix.
  std::size_t linear_bandwidth() const;

  Eigen::MatrixXd assemble_dense() const;
  Eigen::MatrixXcd assemble_dense_complex() const;

  // y = T x. Requires real coefficients. Reentrant.
  void matvec(std::span<const double> x, std::span<double> y) const;
  std::vector<double> matvec(std::span<const double> x) const;

 private:
  CoefficientTable coefficients_;
  MultiIndex sizes_;
  bool real_ = true;
  std::vector<std::size_t> embed_;
  std::vector<std::size_t> place_;  // flat index -> embedding offset
  std::shared_ptr<const FftNd> fft_;
  std::vector<cdouble> kernel_hat_;
};

// --- index operators (never materialized unless asked) -------------------

// Y_n = Y_{n_1} (x) ... (x) Y_{n_d}: reverses the index on every level.
void flip_apply(const MultiIndex& n, std::span<const double> x, std::span<double> y);
std::vector<double> flip_apply(const MultiIndex& n, std::span<const double> x);

// Pi_n (or Pi_n^T) with columns pi_j = e_{2j-1} (j <= n/2), e_{2(j-n/2)}
// (j > n/2) per level. Requires every n_l even.
void pi_apply(const MultiIndex& n, std::span<const double> x, std::span<double> y,
              bool transposed = false);
std::vector<double> pi_apply(const MultiIndex& n, std::span<const double> x,
                             bool transposed = false);

// U_n = (x)_l diag(Y_{ceil(n_l/2)}, I_{floor(n_l/2)}).
void u_apply(const MultiIndex& n, std::span<const double> x, std::span<double> y);
std::vector<double> u_apply(const MultiIndex& n, std::span<const double> x);

Eigen::MatrixXd flip_matrix(const MultiIndex& n);
Eigen::MatrixXd pi_matrix(const MultiIndex& n);
Eigen::MatrixXd u_matrix(const MultiIndex& n);

// --- block symbols and Hankel ---------------------------------------------

// T_m(g) for g = [[0, f], [f*, 0]] per the block Toeplitz definition: order
// 2 d_m, block coefficient [[0, t_k], [conj(t_{-k}), 0]] as the innermost
// Kronecker factor. Real coefficients required for the real overload.
Eigen::MatrixXd assemble_block_g(const Symbol& f, const MultiIndex& m);
Eigen::MatrixXcd assemble_block_g_hermitian(const Symbol& f, const MultiIndex& m);

// The levelwise counterpart of order d_n (all n_l even):
//   sum_k t_k (x)_l T_{n_l/2}([[0, e^{i k_l theta}], [e^{-i k_l theta}, 0]]).
// This is the matrix Pi U Y T_n(f) U Pi^T is compared against; for d = 1 it
// coincides with assemble_block_g(f, n/2).
Eigen::MatrixXd assemble_levelwise_block_g(const Symbol& f, const MultiIndex& n);

enum class HankelOrientation { Plus, Minus };

// Entry (i, j) = t_{i+j-2} (Plus) or t_{2-i-j} (Minus), 1-based multi-indices.
Eigen::MatrixXd assemble_hankel(const Symbol& f, const MultiIndex& n,
                                HankelOrientation orientation = HankelOrientation::Plus);

// Pi_n U_n Y_n A U_n Pi_n^T for a dense d_n x d_n matrix A (all n_l even).
Eigen::MatrixXd shuffle_conjugate(const Eigen::MatrixXd& a, const MultiIndex& n);

struct StructureResidual {
  Eigen::MatrixXd residual;  // D
  double norm = 0.0;         // ||D||_2
  std::size_t rank = 0;      // singular values above 1e-8 ||D||
  double rank_fraction = 0.0;
  double tail_norm = 0.0;    // largest singular value below the cut
};

// D = Pi U Y T_n(f) U Pi^T - levelwise T_n(g). Requires all n_l even.
StructureResidual structure_residual(const Symbol& f, const MultiIndex& n);

}  // namespace flipspec
