#include "flipspec/precond.hpp"

#include <algorithm>
#include <cmath>

#include "flipspec/errors.hpp"

namespace flipspec {

namespace {

void check_length(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got) {
    throw ShapeError(std::string(what) + ": length " + std::to_string(got) + " != " +
                     std::to_string(expected));
  }
}

// Plain Cholesky used only to name the failing pivot after a rejected
// factorization.
NotSpdError locate_pivot(Eigen::MatrixXd a, const std::string& who) {
  const Eigen::Index n = a.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    const double s = a(j, j) - a.row(j).head(j).squaredNorm();
    if (!(s > 0.0)) {
      return NotSpdError(who + ": not positive definite, pivot " + std::to_string(j) + " = " +
                             std::to_string(s),
                         static_cast<std::size_t>(j), s);
    }
    a(j, j) = std::sqrt(s);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      a(i, j) = (a(i, j) - a.row(i).head(j).dot(a.row(j).head(j))) / a(j, j);
    }
  }
  return NotSpdError(who + ": factorization failed", 0, 0.0);
}

}  // namespace

std::vector<double> Preconditioner::apply_inverse(std::span<const double> r) const {
  std::vector<double> z(dimension());
  apply_inverse(r, z);
  return z;
}

std::vector<double> Preconditioner::apply(std::span<const double> x) const {
  std::vector<double> y(dimension());
  apply(x, y);
  return y;
}

// --- circulants ------------------------------------------------------------------

std::vector<double> optimal_circulant(const CoefficientTable& t, int n) {
  if (n < 1) throw ParameterError("optimal_circulant: n must be >= 1");
  if (t.levels() != 1) throw ShapeError("optimal_circulant: unilevel table required");
  if (!t.is_real()) throw ParameterError("optimal_circulant: real coefficients required");
  for (const auto& [k, value] : t.entries()) {
    if (std::abs(k[0]) >= n && value != cdouble{}) {
      throw ParameterError("optimal_circulant: coefficient k = " + std::to_string(k[0]) +
                           " outside |k| < " + std::to_string(n));
    }
  }
  std::vector<double> c(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    c[j] = ((n - j) * t.at({j}).real() + j * t.at({j - n}).real()) / n;
  }
  return c;
}

std::vector<double> circulant_abs(std::span<const double> c) {
  std::vector<cdouble> spectrum(c.begin(), c.end());
  if (spectrum.empty()) return {};
  FftPlan(spectrum.size()).forward(spectrum);
  std::vector<double> out(spectrum.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::abs(spectrum[k]);
  return out;
}

namespace {

std::vector<std::vector<double>> level_spectra(const std::vector<Symbol>& level_symbols,
                                               const MultiIndex& n) {
  if (level_symbols.size() != n.levels()) {
    throw ShapeError("circulant sum: need one symbol per level");
  }
  std::vector<std::vector<double>> spectra;
  for (std::size_t l = 0; l < n.levels(); ++l) {
    if (level_symbols[l].levels() != 1) throw ShapeError("circulant sum: unilevel symbols only");
    spectra.push_back(circulant_abs(optimal_circulant(level_symbols[l].coefficients(), n[l])));
  }
  return spectra;
}

Symbol sum_abs_symbol(const std::vector<Symbol>& parts) {
  return Symbol(
      parts.size(),
      [parts](std::span<const double> t) {
        double total = 0.0;
        for (std::size_t l = 0; l < parts.size(); ++l) {
          const double one[] = {t[l]};
          total += std::abs(parts[l].evaluate(one));
        }
        return cdouble{total, 0.0};
      },
      std::nullopt, "sum_abs");
}

}  // namespace

CirculantKronSum::CirculantKronSum(const std::vector<Symbol>& level_symbols, MultiIndex n)
    : CirculantKronSum(level_spectra(level_symbols, n), n, sum_abs_symbol(level_symbols)) {}

CirculantKronSum::CirculantKronSum(std::vector<std::vector<double>> level_eigenvalues,
                                   MultiIndex n, std::optional<Symbol> h)
    : sizes_(std::move(n)), levels_(std::move(level_eigenvalues)), h_(std::move(h)) {
  const std::size_t d = sizes_.levels();
  if (levels_.size() != d) throw ShapeError("circulant sum: need one spectrum per level");
  std::vector<std::size_t> shape(d);
  for (std::size_t l = 0; l < d; ++l) {
    check_length(static_cast<std::size_t>(sizes_[l]), levels_[l].size(), "circulant sum level");
    shape[l] = levels_[l].size();
  }
  tensor_.assign(sizes_.total(), 0.0);
  std::vector<int> idx(d);
  for (std::size_t flat = 0; flat < tensor_.size(); ++flat) {
    sizes_.unravel(flat, idx);
    double v = 0.0;
    for (std::size_t l = 0; l < d; ++l) v += std::abs(levels_[l][idx[l]]);
    tensor_[flat] = v;
  }
  const auto [lo, hi] = std::minmax_element(tensor_.begin(), tensor_.end());
  if (!(*lo > 1e-14 * *hi)) {
    throw IndefiniteError("circulant sum: eigenvalue " + std::to_string(*lo) +
                          " <= 1e-14 * max (" + std::to_string(*hi) + ")");
  }
  fft_ = std::make_shared<FftNd>(shape);
}

void CirculantKronSum::diagonal_apply(std::span<const double> x, std::span<double> y,
                                      int power2) const {
  check_length(dimension(), x.size(), "circulant sum input");
  check_length(dimension(), y.size(), "circulant sum output");
  std::vector<cdouble> work(x.begin(), x.end());
  fft_->forward(work);
  for (std::size_t i = 0; i < work.size(); ++i) {
    const double lambda = tensor_[i];
    switch (power2) {
      case 2: work[i] *= lambda; break;
      case -2: work[i] /= lambda; break;
      default: work[i] /= std::sqrt(lambda); break;
    }
  }
  fft_->inverse(work);
  for (std::size_t i = 0; i < work.size(); ++i) y[i] = work[i].real();
}

void CirculantKronSum::apply_inverse(std::span<const double> r, std::span<double> z) const {
  diagonal_apply(r, z, -2);
}

void CirculantKronSum::apply(std::span<const double> x, std::span<double> y) const {
  diagonal_apply(x, y, 2);
}

void CirculantKronSum::apply_inverse_sqrt(std::span<const double> r, std::span<double> z) const {
  diagonal_apply(r, z, -1);
}

Eigen::MatrixXd CirculantKronSum::whiten(const Eigen::MatrixXd& s) const {
  const auto n = static_cast<Eigen::Index>(dimension());
  if (s.rows() != n || s.cols() != n) throw ShapeError("whiten: matrix order mismatch");
  Eigen::MatrixXd half(n, n), out(n, n);
  std::vector<double> col(n), res(n);
  auto sweep = [&](const Eigen::MatrixXd& in, Eigen::MatrixXd& dst) {
    for (Eigen::Index j = 0; j < n; ++j) {
      Eigen::Map<Eigen::VectorXd>(col.data(), n) = in.col(j);
      apply_inverse_sqrt(col, res);
      dst.col(j) = Eigen::Map<const Eigen::VectorXd>(res.data(), n);
    }
  };
  sweep(s, half);
  const Eigen::MatrixXd half_t = half.transpose();
  sweep(half_t, out);
  return 0.5 * (out + out.transpose());
}

// --- SPD Toeplitz -------------------------------------------------------------------

ToeplitzPreconditioner::ToeplitzPreconditioner(Symbol h, MultiIndex n, std::string name)
    : h_(std::move(h)), op_(h_.coefficients(), std::move(n)), name_(std::move(name)) {
  if (!op_.is_real()) throw ParameterError("toeplitz preconditioner: symbol '" + h_.name() +
                                           "' has complex coefficients");
  const CoefficientTable& t = op_.coefficients();
  const double scale = t.max_abs();
  for (const auto& [k, value] : t.entries()) {
    std::vector<int> minus(k.size());
    std::transform(k.begin(), k.end(), minus.begin(), [](int v) { return -v; });
    if (std::abs(value - std::conj(t.at(minus))) > 1e-12 * scale) {
      throw SymmetryError("toeplitz preconditioner: symbol '" + h_.name() + "' is not real-valued");
    }
  }
  bandwidth_ = op_.linear_bandwidth();
  banded_ = 4 * (bandwidth_ + 1) <= dimension();
}

void ToeplitzPreconditioner::factorize() const {
  std::call_once(once_, [this] { build_factor(); });
}

void ToeplitzPreconditioner::build_factor() const {
  const std::size_t n = dimension();
  if (!banded_) {
    const Eigen::MatrixXd a = op_.assemble_dense();
    dense_.compute(a);
    if (dense_.info() != Eigen::Success) throw locate_pivot(a, name_);
    return;
  }
  const std::size_t w = bandwidth_ + 1;
  std::vector<double> band(n * w, 0.0);
  // Lower band of T: row = col + k for coefficients with nonnegative offset.
  const MultiIndex& sizes = op_.sizes();
  const std::size_t d = sizes.levels();
  std::vector<int> lo(d), hi(d);
  for (const auto& [k, value] : op_.coefficients().entries()) {
    long long offset = 0;
    for (std::size_t l = 0; l < d; ++l) offset += static_cast<long long>(k[l]) * sizes.stride(l);
    if (offset < 0) continue;
    for (std::size_t l = 0; l < d; ++l) {
      lo[l] = std::max(0, -k[l]);
      hi[l] = std::min(sizes[l], sizes[l] - k[l]);
    }
    const double v = value.real();
    for_each_index(lo, hi, [&](std::span<const int> j) {
      const std::size_t col = sizes.ravel(j);
      const std::size_t row = col + static_cast<std::size_t>(offset);
      band[row * w + (col + bandwidth_ - row)] = v;
    });
  }
  // Row-oriented band Cholesky, in place.
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t first = i >= bandwidth_ ? i - bandwidth_ : 0;
    double* li = &band[i * w + (bandwidth_ - i)];  // li[k] = L(i, k)
    for (std::size_t j = first; j <= i; ++j) {
      const double* lj = &band[j * w + (bandwidth_ - j)];
      const std::size_t start = std::max(first, j >= bandwidth_ ? j - bandwidth_ : 0);
      double s = li[j];
      for (std::size_t k = start; k < j; ++k) s -= li[k] * lj[k];
      if (j < i) {
        li[j] = s / lj[j];
      } else {
        if (!(s > 0.0)) {
          throw NotSpdError(name_ + ": not positive definite, pivot " + std::to_string(i) +
                                " = " + std::to_string(s),
                            i, s);
        }
        li[i] = std::sqrt(s);
      }
    }
  }
  band_ = std::move(band);
}

void ToeplitzPreconditioner::lower_solve(std::span<double> x) const {
  const std::size_t n = dimension();
  const std::size_t w = bandwidth_ + 1;
  for (std::size_t i = 0; i < n; ++i) {
    const double* li = &band_[i * w + (bandwidth_ - i)];
    const std::size_t first = i >= bandwidth_ ? i - bandwidth_ : 0;
    double s = x[i];
    for (std::size_t k = first; k < i; ++k) s -= li[k] * x[k];
    x[i] = s / li[i];
  }
}

void ToeplitzPreconditioner::upper_solve(std::span<double> x) const {
  const std::size_t n = dimension();
  const std::size_t w = bandwidth_ + 1;
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    const std::size_t last = std::min(n - 1, i + bandwidth_);
    for (std::size_t k = i + 1; k <= last; ++k) s -= band_[k * w + (i + bandwidth_ - k)] * x[k];
    x[i] = s / band_[i * w + bandwidth_];
  }
}

void ToeplitzPreconditioner::apply_inverse(std::span<const double> r, std::span<double> z) const {
  check_length(dimension(), r.size(), "preconditioner input");
  check_length(dimension(), z.size(), "preconditioner output");
  factorize();
  if (banded_) {
    std::copy(r.begin(), r.end(), z.begin());
    lower_solve(z);
    upper_solve(z);
    return;
  }
  Eigen::Map<Eigen::VectorXd> out(z.data(), static_cast<Eigen::Index>(z.size()));
  out = dense_.solve(Eigen::Map<const Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(r.size())));
}

void ToeplitzPreconditioner::apply(std::span<const double> x, std::span<double> y) const {
  op_.matvec(x, y);
}

Eigen::MatrixXd ToeplitzPreconditioner::whiten(const Eigen::MatrixXd& s) const {
  const auto n = static_cast<Eigen::Index>(dimension());
  if (s.rows() != n || s.cols() != n) throw ShapeError("whiten: matrix order mismatch");
  factorize();
  Eigen::MatrixXd out;
  if (banded_) {
    Eigen::MatrixXd half = s;
    for (Eigen::Index j = 0; j < n; ++j) lower_solve({half.col(j).data(), static_cast<std::size_t>(n)});
    out = half.transpose();
    for (Eigen::Index j = 0; j < n; ++j) lower_solve({out.col(j).data(), static_cast<std::size_t>(n)});
  } else {
    const auto l = dense_.matrixL();
    const Eigen::MatrixXd half = l.solve(s);
    out = l.solve(half.transpose());
  }
  return 0.5 * (out + out.transpose());
}

// --- dense ----------------------------------------------------------------------------

DensePreconditioner::DensePreconditioner(Eigen::MatrixXd p, std::string name)
    : p_(std::move(p)), name_(std::move(name)) {
  if (p_.rows() != p_.cols()) throw ShapeError("dense preconditioner: matrix not square");
  llt_.compute(p_);
  if (llt_.info() != Eigen::Success) throw locate_pivot(p_, name_);
}

void DensePreconditioner::apply_inverse(std::span<const double> r, std::span<double> z) const {
  check_length(dimension(), r.size(), "preconditioner input");
  check_length(dimension(), z.size(), "preconditioner output");
  Eigen::Map<Eigen::VectorXd>(z.data(), static_cast<Eigen::Index>(z.size())) =
      llt_.solve(Eigen::Map<const Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(r.size())));
}

void DensePreconditioner::apply(std::span<const double> x, std::span<double> y) const {
  check_length(dimension(), x.size(), "preconditioner input");
  check_length(dimension(), y.size(), "preconditioner output");
  Eigen::Map<Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size())) =
      p_ * Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
}

Eigen::MatrixXd DensePreconditioner::whiten(const Eigen::MatrixXd& s) const {
  if (s.rows() != p_.rows() || s.cols() != p_.cols()) throw ShapeError("whiten: matrix order mismatch");
  const auto l = llt_.matrixL();
  const Eigen::MatrixXd half = l.solve(s);
  const Eigen::MatrixXd out = l.solve(half.transpose());
  return 0.5 * (out + out.transpose());
}

// --- builders ----------------------------------------------------------------------------

Symbol p22_symbol(const FractionalParams& params) {
  params.validate();
  return linear_combination({{1.0, lift_to_level(laplace1d_symbol(), 0, 2)},
                             {params.coupling(), lift_to_level(laplace1d_symbol(), 1, 2)}},
                            params.identity_shift(), "p22");
}

Symbol p2beta_symbol(const FractionalParams& params) {
  params.validate();
  const Symbol pb = real_part_symbol(p_beta_truncation(params.beta));
  return linear_combination({{1.0, lift_to_level(laplace1d_symbol(), 0, 2)},
                             {params.coupling(), lift_to_level(pb, 1, 2)}},
                            params.identity_shift(), "p2beta");
}

std::unique_ptr<ToeplitzPreconditioner> build_p22(const FractionalParams& params) {
  return std::make_unique<ToeplitzPreconditioner>(p22_symbol(params),
                                                  MultiIndex({params.n1, params.n2}), "p22");
}

std::unique_ptr<ToeplitzPreconditioner> build_p2beta(const FractionalParams& params) {
  return std::make_unique<ToeplitzPreconditioner>(p2beta_symbol(params),
                                                  MultiIndex({params.n1, params.n2}), "p2beta");
}

std::unique_ptr<ToeplitzPreconditioner> build_toeplitz_fr(const Symbol& f, const MultiIndex& n) {
  return std::make_unique<ToeplitzPreconditioner>(real_part_symbol(f), n, "toepfr");
}

std::unique_ptr<CirculantKronSum> build_circulant_kron_sum(const std::vector<Symbol>& level_symbols,
                                                           const MultiIndex& n) {
  return std::make_unique<CirculantKronSum>(level_symbols, n);
}

}  // namespace flipspec
