#pragma once

// Reference implementations used only by the tests. Everything here is
// written from the definitions, deliberately slow, and shares no code with
// the library beyond the plain data types.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "flipspec/multi_index.hpp"
#include "flipspec/symbol.hpp"

namespace oracle {

using cdouble = std::complex<double>;
constexpr double kPi = std::numbers::pi;

// X_k = sum_j x_j exp(-2 pi i jk/n), O(n^2).
inline std::vector<cdouble> naive_dft(const std::vector<cdouble>& x, bool inverse = false) {
  const std::size_t n = x.size();
  const double sign = inverse ? 1.0 : -1.0;
  std::vector<cdouble> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    cdouble acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double phase = sign * 2.0 * kPi * static_cast<double>((j * k) % n) / static_cast<double>(n);
      acc += x[j] * std::polar(1.0, phase);
    }
    out[k] = acc;
  }
  return out;
}

inline Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Eigen::MatrixXd kron_all(const std::vector<Eigen::MatrixXd>& factors) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Ones(1, 1);
  for (const auto& f : factors) out = kron(out, f);
  return out;
}

// J_n^{(k)}: ones where i - j = k.
inline Eigen::MatrixXd shift_matrix(int n, int k) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int r = 0; r < n; ++r) {
    const int c = r - k;
    if (c >= 0 && c < n) j(r, c) = 1.0;
  }
  return j;
}

inline Eigen::MatrixXd anti_identity(int n) {
  return Eigen::MatrixXd::Identity(n, n).rowwise().reverse();
}

// T_n(f) = sum_k t_k J^{(k_1)} (x) ... (x) J^{(k_d)}.
inline Eigen::MatrixXd toeplitz_by_kron(const flipspec::CoefficientTable& t,
                                        const flipspec::MultiIndex& n) {
  const auto order = static_cast<Eigen::Index>(n.total());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(order, order);
  for (const auto& [k, value] : t.entries()) {
    std::vector<Eigen::MatrixXd> factors;
    for (std::size_t l = 0; l < n.levels(); ++l) factors.push_back(shift_matrix(n[l], k[l]));
    out += value.real() * kron_all(factors);
  }
  return out;
}

// H_n(f): entry (i, j) = t_{i+j} with 0-based multi-indices, by enumeration.
inline Eigen::MatrixXd hankel_by_enumeration(const flipspec::CoefficientTable& t,
                                             const flipspec::MultiIndex& n) {
  const auto order = static_cast<Eigen::Index>(n.total());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(order, order);
  std::vector<int> i(n.levels()), j(n.levels()), k(n.levels());
  for (Eigen::Index r = 0; r < order; ++r) {
    n.unravel(static_cast<std::size_t>(r), i);
    for (Eigen::Index c = 0; c < order; ++c) {
      n.unravel(static_cast<std::size_t>(c), j);
      for (std::size_t l = 0; l < n.levels(); ++l) k[l] = i[l] + j[l];
      out(r, c) = t.at(k).real();
    }
  }
  return out;
}

// Pi_n from its column rule: column j (1-based) is e_{2j-1} for j <= n/2 and
// e_{2(j - n/2)} otherwise.
inline Eigen::MatrixXd pi_by_columns(int n) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (int j = 1; j <= n; ++j) {
    const int row = j <= n / 2 ? 2 * j - 1 : 2 * (j - n / 2);
    p(row - 1, j - 1) = 1.0;
  }
  return p;
}

inline Eigen::MatrixXd u_by_blocks(int n) {
  const int top = (n + 1) / 2;
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n, n);
  u.topLeftCorner(top, top) = anti_identity(top);
  u.bottomRightCorner(n - top, n - top).setIdentity();
  return u;
}

template <class Fn>
Eigen::MatrixXd per_level_kron(const flipspec::MultiIndex& n, Fn unilevel) {
  std::vector<Eigen::MatrixXd> factors;
  for (std::size_t l = 0; l < n.levels(); ++l) factors.push_back(unilevel(n[l]));
  return kron_all(factors);
}

// g_k = (-1)^k binom(gamma, k).
inline std::vector<double> binomial_weights(double gamma, int count) {
  std::vector<double> g(static_cast<std::size_t>(count));
  double binom = 1.0;
  for (int k = 0; k < count; ++k) {
    if (k > 0) binom *= (gamma - (k - 1)) / k;
    g[static_cast<std::size_t>(k)] = (k % 2 == 0 ? 1.0 : -1.0) * binom;
  }
  return g;
}

// Coefficient t_k (k >= -1) of the weighted and shifted Grunwald symbol,
// read off the product of (2 - gamma)/2 + (gamma/2) e^{-i theta} with the
// binomial series of (1 - e^{i theta})^gamma.
inline double grunwald_coefficient(double gamma, int k) {
  const auto g = binomial_weights(gamma, k + 3);
  const double gk = k >= 0 ? g[static_cast<std::size_t>(k)] : 0.0;
  return -((2.0 - gamma) / 2.0 * gk + gamma / 2.0 * g[static_cast<std::size_t>(k + 1)]);
}

// Direct rectangle rule for (2 pi)^-1 \int f(theta) e^{-ik theta} on m nodes.
template <class Fn>
cdouble quadrature_coefficient(Fn f, int k, int m) {
  cdouble acc = 0.0;
  for (int j = 0; j < m; ++j) {
    const double theta = -kPi + 2.0 * kPi * j / m;
    acc += f(theta) * std::polar(1.0, -k * theta);
  }
  return acc / static_cast<double>(m);
}

inline Eigen::MatrixXd circulant_from_column(const std::vector<double>& c) {
  const int n = static_cast<int>(c.size());
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = c[static_cast<std::size_t>(((i - j) % n + n) % n)];
  return m;
}

// argmin_c ||C(c) - T||_F over all real circulants, by least squares on
// the vectorized circulant basis.
inline std::vector<double> frobenius_circulant(const Eigen::MatrixXd& t) {
  const int n = static_cast<int>(t.rows());
  Eigen::MatrixXd basis(n * n, n);
  for (int p = 0; p < n; ++p) {
    std::vector<double> e(static_cast<std::size_t>(n), 0.0);
    e[static_cast<std::size_t>(p)] = 1.0;
    basis.col(p) = circulant_from_column(e).reshaped();
  }
  const Eigen::VectorXd target = t.reshaped();
  const Eigen::VectorXd c = basis.colPivHouseholderQr().solve(target);
  return {c.data(), c.data() + n};
}

// Singular values as square roots of the eigenvalues of A^T A, descending.
inline std::vector<double> singular_values_normal(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a.transpose() * a);
  std::vector<double> s;
  for (Eigen::Index i = eig.eigenvalues().size() - 1; i >= 0; --i)
    s.push_back(std::sqrt(std::max(0.0, eig.eigenvalues()(i))));
  return s;
}

inline cdouble trig_sum(const flipspec::CoefficientTable& t, const std::vector<double>& theta) {
  cdouble acc = 0.0;
  for (const auto& [k, v] : t.entries()) {
    double phase = 0.0;
    for (std::size_t l = 0; l < k.size(); ++l) phase += k[l] * theta[l];
    acc += v * std::polar(1.0, phase);
  }
  return acc;
}

}  // namespace oracle
