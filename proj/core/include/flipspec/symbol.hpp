#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace flipspec {

using cdouble = std::complex<double>;

// Finite table of Fourier coefficients {k in Z^d -> t_k}.
class CoefficientTable {
 public:
  explicit CoefficientTable(std::size_t levels = 1) : levels_(levels) {}

  std::size_t levels() const noexcept { return levels_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  // Accumulates into t_k.
  void add(std::vector<int> k, cdouble value);
  void set(std::vector<int> k, cdouble value);
  cdouble at(const std::vector<int>& k) const;

  const std::map<std::vector<int>, cdouble>& entries() const noexcept {
    return entries_;
  }

  // Per-level half-bandwidth q_l = max |k_l| over stored entries.
  std::vector<int> band() const;
  double max_abs() const;
  bool is_real(double rel_tol = 1e-14) const;

  // sum_k t_k exp(i <k, theta>).
  cdouble sum(std::span<const double> theta) const;

  // Drops entries with |t_k| <= rel_threshold * max |t_k|.
  void prune(double rel_threshold);

 private:
  std::size_t levels_;
  std::map<std::vector<int>, cdouble> entries_;
};

using Evaluator = std::function<cdouble(std::span<const double>)>;

// A d-variate generating function f : [-pi, pi]^d -> C.
//
// A symbol carries a closed-form evaluator, a coefficient table, or both.
// Without a closed form, evaluation falls back to the trigonometric sum.
// Symbols are immutable once built.
class Symbol {
 public:
  Symbol(std::size_t levels, Evaluator closed_form,
         std::optional<CoefficientTable> coefficients, std::string name);

  static Symbol from_coefficients(CoefficientTable table, std::string name);

  std::size_t levels() const noexcept { return levels_; }
  const std::string& name() const noexcept { return name_; }
  bool has_closed_form() const noexcept { return static_cast<bool>(closed_); }
  bool has_coefficients() const noexcept { return coefficients_.has_value(); }

  // Throws ParameterError when absent.
  const CoefficientTable& coefficients() const;
  const Evaluator& closed_form() const noexcept { return closed_; }

  // Unchecked evaluation (no domain test); used by hot loops.
  cdouble evaluate(std::span<const double> theta) const;

 private:
  std::size_t levels_;
  Evaluator closed_;
  std::optional<CoefficientTable> coefficients_;
  std::string name_;
};

// f(theta) with theta checked against [-pi, pi]^d.
cdouble eval(const Symbol& symbol, std::span<const double> theta);

// t_k = (2 pi)^-d \int f(theta) e^{-i<k,theta>} dtheta for |k_l| <= band_l,
// via the d-dimensional FFT of m_1 x ... x m_d equispaced samples.
// Requires m_l >= 2 band_l + 1. Entries below 1e-14 max|t| are pruned.
CoefficientTable fourier_coefficients(const Evaluator& f,
                                      std::span<const int> band,
                                      std::span<const int> quadrature);
CoefficientTable fourier_coefficients(const Symbol& symbol,
                                      std::span<const int> band,
                                      std::span<const int> quadrature);

// Number of equispaced samples used for the coefficients of the fractional
// symbols. Their Fourier coefficients decay like |k|^(-1-gamma), so the
// aliasing error of an m-point rule is O(m^(-1-gamma)) ~ 1e-13 here.
inline constexpr int kFractionalQuadrature = 1 << 16;

// --- built-in symbols ----------------------------------------------------

Symbol constant_symbol(double value, std::size_t levels = 1);

// 2 - 2 cos(theta); T_n is tridiag(-1, 2, -1).
Symbol laplace1d_symbol();

// coefficient * exp(i <k, theta>).
Symbol trig_monomial(std::vector<int> k, double coefficient = 1.0);

// 4 + e^{i theta_1} + e^{i theta_2}.
Symbol ex1_symbol();

// Weighted and shifted Grunwald symbol
//   f_gamma(theta) = -[(2 - gamma (1 - e^{-i theta})) / 2] (1 + e^{i(theta+pi)})^gamma,
// principal branch, f_gamma(0) = 0. With band >= 0 the coefficients
// t_k = -w_{k+1} for -1 <= k <= band are attached (computed by FFT).
Symbol grunwald_symbol(double gamma, int band = -1);

// Unilevel coefficient table of f_gamma on -1 <= k <= band.
CoefficientTable grunwald_coefficients(double gamma, int band);

struct FractionalParams {
  double alpha = 1.8;
  double beta = 1.6;
  int n1 = 10;
  int n2 = 10;
  int M = 0;  // time steps; 0 means M = n1
  bool shift = true;

  int time_steps() const { return M > 0 ? M : n1; }
  double hx() const { return 1.0 / (n1 + 1); }
  double hy() const { return 1.0 / (n2 + 1); }
  double dt() const { return 1.0 / time_steps(); }
  // h_x^alpha / h_y^beta.
  double coupling() const;
  // 2 h_x^alpha / dt, or 0 when the shift is disabled.
  double identity_shift() const;
  void validate() const;
};

// f_alpha(theta_1) + (h_x^alpha/h_y^beta) f_beta(theta_2) + 2 h_x^alpha/dt,
// the symbol of the Crank-Nicolson coefficient matrix. Coefficients are
// attached on the band (n1-1, n2-1), which is all that T_n needs.
Symbol fractional_symbol(const FractionalParams& params);

struct ConvectionDiffusionStencil {
  double a, b, c, d, e, f, g;
};
ConvectionDiffusionStencil convection_diffusion_stencil(int n1, int n2, int n3);

// Upwind 3-level symbol f_1(theta_1) + f_2(theta_2) + f_3(theta_3).
Symbol convection_diffusion_symbol(int n1, int n2, int n3);

// The unilevel summands f_1, f_2, f_3 (each with one level).
std::array<Symbol, 3> convection_diffusion_level_symbols(int n1, int n2,
                                                         int n3);

// (f + f*) / 2 with t'_k = (t_k + conj(t_{-k})) / 2.
Symbol real_part_symbol(const Symbol& f);

// p_beta(theta) = -sum_{k=-1}^{2} w_{k+1} e^{i k theta}.
Symbol p_beta_truncation(double beta);

// Embeds a unilevel symbol as a function of theta_level among `levels` levels.
Symbol lift_to_level(const Symbol& unilevel, std::size_t level,
                     std::size_t levels);

// sum_i weight_i * f_i + shift, all of the same level count.
Symbol linear_combination(const std::vector<std::pair<double, Symbol>>& terms,
                          double shift, std::string name);

// 2x2 Hermitian matrix-valued symbol g = [[0, f], [f*, 0]].
class BlockSymbol2x2 {
 public:
  explicit BlockSymbol2x2(Symbol f) : f_(std::move(f)) {}

  const Symbol& f() const noexcept { return f_; }
  std::array<std::array<cdouble, 2>, 2> evaluate(
      std::span<const double> theta) const;
  // (lambda_1, lambda_2) = (-|f|, +|f|).
  std::array<double, 2> eigenvalues(std::span<const double> theta) const;

 private:
  Symbol f_;
};

// One CSV row per coefficient: k_1,...,k_d,re,im.
void write_coefficients_csv(std::ostream& out, const CoefficientTable& table);

}  // namespace flipspec
