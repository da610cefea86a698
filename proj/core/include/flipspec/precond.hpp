#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flipspec/fft.hpp"
#include "flipspec/multi_index.hpp"
#include "flipspec/operators.hpp"
#include "flipspec/symbol.hpp"

namespace flipspec {

// An SPD operator P of order d_n, P = L L^T.
class Preconditioner {
 public:
  virtual ~Preconditioner() = default;

  virtual std::size_t dimension() const = 0;
  virtual std::string name() const = 0;

  // z = P^{-1} r.
  virtual void apply_inverse(std::span<const double> r, std::span<double> z) const = 0;
  // y = P x.
  virtual void apply(std::span<const double> x, std::span<double> y) const = 0;

  // L^{-1} S L^{-T} for a dense symmetric S: a symmetric matrix similar to
  // P^{-1} S.
  virtual Eigen::MatrixXd whiten(const Eigen::MatrixXd& s) const = 0;

  // Symbol of the preconditioner sequence, when one is attached.
  virtual const Symbol* symbol() const { return nullptr; }

  std::vector<double> apply_inverse(std::span<const double> r) const;
  std::vector<double> apply(std::span<const double> x) const;
};

// --- circulants ---------------------------------------------------------------

// Frobenius-closest circulant to T_n(t): c_j = ((n-j) t_j + j t_{j-n}) / n.
// Requires a real unilevel table with |k| < n.
std::vector<double> optimal_circulant(const CoefficientTable& t, int n);

// |lambda_k| for the circulant with first column c (length-n DFT modulus).
std::vector<double> circulant_abs(std::span<const double> c);

// C_n = sum_l I (x) ... (x) |C_{n_l}| (x) ... (x) I, diagonalized by the
// d-dimensional DFT.
class CirculantKronSum final : public Preconditioner {
 public:
  // One unilevel symbol (with coefficients) per level.
  CirculantKronSum(const std::vector<Symbol>& level_symbols, MultiIndex n);
  // Directly from per-level nonnegative eigenvalue vectors.
  CirculantKronSum(std::vector<std::vector<double>> level_eigenvalues, MultiIndex n,
                   std::optional<Symbol> h = std::nullopt);

  std::size_t dimension() const override { return sizes_.total(); }
  std::string name() const override { return "circsum"; }
  const MultiIndex& sizes() const noexcept { return sizes_; }

  const std::vector<std::vector<double>>& level_eigenvalues() const noexcept { return levels_; }
  // lambda(k_1, ..., k_d) = sum_l |lambda^(l)_{k_l}|, row-major.
  const std::vector<double>& eigen_tensor() const noexcept { return tensor_; }

  using Preconditioner::apply;
  using Preconditioner::apply_inverse;
  void apply_inverse(std::span<const double> r, std::span<double> z) const override;
  void apply(std::span<const double> x, std::span<double> y) const override;
  // z = C_n^{-1/2} r.
  void apply_inverse_sqrt(std::span<const double> r, std::span<double> z) const;
  Eigen::MatrixXd whiten(const Eigen::MatrixXd& s) const override;
  // h = sum_l |f_l(theta_l)|.
  const Symbol* symbol() const override { return h_ ? &*h_ : nullptr; }

 private:
  void diagonal_apply(std::span<const double> x, std::span<double> y, int power2) const;

  MultiIndex sizes_;
  std::vector<std::vector<double>> levels_;
  std::vector<double> tensor_;
  std::shared_ptr<const FftNd> fft_;
  std::optional<Symbol> h_;
};

// --- SPD Toeplitz ---------------------------------------------------------------

// T_n(h) for a real, even symbol h >= 0, solved by Cholesky. The factor is
// built on first use (thread-safe) and then immutable. Narrow-band matrices
// use a band Cholesky; the rest use a dense one.
class ToeplitzPreconditioner final : public Preconditioner {
 public:
  ToeplitzPreconditioner(Symbol h, MultiIndex n, std::string name = "toeplitz");

  std::size_t dimension() const override { return op_.dimension(); }
  std::string name() const override { return name_; }
  const ToeplitzOperator& toeplitz() const noexcept { return op_; }
  const Symbol* symbol() const override { return &h_; }
  bool banded() const noexcept { return banded_; }

  // Forces the factorization; throws NotSpdError naming the failing pivot.
  void factorize() const;

  using Preconditioner::apply;
  using Preconditioner::apply_inverse;
  void apply_inverse(std::span<const double> r, std::span<double> z) const override;
  void apply(std::span<const double> x, std::span<double> y) const override;
  Eigen::MatrixXd whiten(const Eigen::MatrixXd& s) const override;

 private:
  void build_factor() const;
  // In place: x <- L^{-1} x or x <- L^{-T} x.
  void lower_solve(std::span<double> x) const;
  void upper_solve(std::span<double> x) const;

  Symbol h_;
  ToeplitzOperator op_;
  std::string name_;
  std::size_t bandwidth_;
  bool banded_;

  mutable std::once_flag once_;
  mutable std::vector<double> band_;  // row i holds L(i, i-bw .. i)
  mutable Eigen::LLT<Eigen::MatrixXd> dense_;
};

// P from an explicit dense SPD matrix (diagnostics: exact preconditioning).
class DensePreconditioner final : public Preconditioner {
 public:
  DensePreconditioner(Eigen::MatrixXd p, std::string name);

  std::size_t dimension() const override { return static_cast<std::size_t>(p_.rows()); }
  std::string name() const override { return name_; }
  const Eigen::MatrixXd& matrix() const noexcept { return p_; }

  using Preconditioner::apply;
  using Preconditioner::apply_inverse;
  void apply_inverse(std::span<const double> r, std::span<double> z) const override;
  void apply(std::span<const double> x, std::span<double> y) const override;
  Eigen::MatrixXd whiten(const Eigen::MatrixXd& s) const override;

 private:
  Eigen::MatrixXd p_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  std::string name_;
};

// Symbols of the fractional-diffusion preconditioners.
Symbol p22_symbol(const FractionalParams& params);
Symbol p2beta_symbol(const FractionalParams& params);

std::unique_ptr<ToeplitzPreconditioner> build_p22(const FractionalParams& params);
std::unique_ptr<ToeplitzPreconditioner> build_p2beta(const FractionalParams& params);
// T_n(f_R) with f_R = (f + f*)/2.
std::unique_ptr<ToeplitzPreconditioner> build_toeplitz_fr(const Symbol& f, const MultiIndex& n);

// C_n for the per-level summands f_l; attaches h = sum |f_l|.
std::unique_ptr<CirculantKronSum> build_circulant_kron_sum(const std::vector<Symbol>& level_symbols,
                                                           const MultiIndex& n);

}  // namespace flipspec
