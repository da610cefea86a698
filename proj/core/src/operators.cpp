#include "flipspec/operators.hpp"

#include <algorithm>
#include <cmath>

#include "flipspec/errors.hpp"
#include "flipspec/spectral.hpp"

namespace flipspec {

namespace {

void check_dense(std::size_t order, const char* what) {
  if (order > kDenseLimit) {
    throw CapacityError(std::string(what) + ": order " + std::to_string(order) +
                        " exceeds dense limit " + std::to_string(kDenseLimit));
  }
}

void check_length(const MultiIndex& n, std::size_t got, const char* what) {
  if (got != n.total()) {
    throw ShapeError(std::string(what) + ": length " + std::to_string(got) +
                     " != " + std::to_string(n.total()));
  }
}

// dest[l][i]: where index i of level l moves to.
using LevelMaps = std::vector<std::vector<int>>;

std::vector<std::size_t> flatten_maps(const MultiIndex& n, const LevelMaps& maps) {
  std::vector<std::size_t> dest(n.total());
  std::vector<int> idx(n.levels(), 0);
  for (std::size_t flat = 0; flat < dest.size(); ++flat) {
    std::size_t target = 0;
    for (std::size_t l = 0; l < n.levels(); ++l) {
      target += static_cast<std::size_t>(maps[l][idx[l]]) * n.stride(l);
    }
    dest[flat] = target;
    for (std::size_t l = n.levels(); l-- > 0;) {
      if (++idx[l] < n[l]) break;
      idx[l] = 0;
    }
  }
  return dest;
}

void apply_maps(const MultiIndex& n, const LevelMaps& maps,
                std::span<const double> x, std::span<double> y) {
  const auto dest = flatten_maps(n, maps);
  for (std::size_t i = 0; i < dest.size(); ++i) y[dest[i]] = x[i];
}

std::vector<int> flip_map(int n) {
  std::vector<int> m(n);
  for (int i = 0; i < n; ++i) m[i] = n - 1 - i;
  return m;
}

std::vector<int> u_map(int n) {
  const int head = (n + 1) / 2;
  std::vector<int> m(n);
  for (int i = 0; i < n; ++i) m[i] = i < head ? head - 1 - i : i;
  return m;
}

std::vector<int> pi_map(int n) {
  if (n % 2 != 0) {
    throw PreconditionError("shuffle permutation needs even sizes, got " +
                            std::to_string(n));
  }
  std::vector<int> m(n);
  const int half = n / 2;
  for (int j = 0; j < n; ++j) m[j] = j < half ? 2 * j : 2 * (j - half) + 1;
  return m;
}

std::vector<int> invert(const std::vector<int>& m) {
  std::vector<int> inv(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) inv[m[i]] = static_cast<int>(i);
  return inv;
}

std::vector<int> compose(const std::vector<int>& outer, const std::vector<int>& inner) {
  std::vector<int> m(inner.size());
  for (std::size_t i = 0; i < inner.size(); ++i) m[i] = outer[inner[i]];
  return m;
}

template <class Make>
LevelMaps per_level(const MultiIndex& n, Make make) {
  LevelMaps maps;
  for (int size : n.sizes()) maps.push_back(make(size));
  return maps;
}

Eigen::MatrixXd materialize(const MultiIndex& n, const LevelMaps& maps) {
  check_dense(n.total(), "materialize");
  const auto dest = flatten_maps(n, maps);
  const auto order = static_cast<Eigen::Index>(n.total());
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(order, order);
  for (std::size_t j = 0; j < dest.size(); ++j) {
    p(static_cast<Eigen::Index>(dest[j]), static_cast<Eigen::Index>(j)) = 1.0;
  }
  return p;
}

const CoefficientTable& real_coefficients(const Symbol& f, const char* what) {
  const CoefficientTable& table = f.coefficients();
  if (!table.is_real()) {
    throw ParameterError(std::string(what) + " needs real coefficients (symbol '" +
                         f.name() + "')");
  }
  return table;
}

template <class Matrix, class Convert>
Matrix block_g_impl(const CoefficientTable& table, const MultiIndex& m,
                    Convert convert) {
  check_dense(2 * m.total(), "assemble_block_g");
  const auto order = static_cast<Eigen::Index>(2 * m.total());
  Matrix out = Matrix::Zero(order, order);
  const std::size_t d = m.levels();
  std::vector<int> lo(d), hi(d);
  for (const auto& [k, value] : table.entries()) {
    // +k carries t_k in position (0,1); -k carries conj(t_k) in position (1,0).
    for (int sign : {1, -1}) {
      bool inside = true;
      for (std::size_t l = 0; l < d; ++l) {
        const int off = sign * k[l];
        if (std::abs(off) >= m[l]) inside = false;
        lo[l] = std::max(0, -off);
        hi[l] = std::min(m[l], m[l] - off);
      }
      if (!inside) continue;
      for_each_index(lo, hi, [&](std::span<const int> j) {
        std::size_t row = 0, col = 0;
        for (std::size_t l = 0; l < d; ++l) {
          row += static_cast<std::size_t>(j[l] + sign * k[l]) * m.stride(l);
          col += static_cast<std::size_t>(j[l]) * m.stride(l);
        }
        const auto r = static_cast<Eigen::Index>(2 * row);
        const auto c = static_cast<Eigen::Index>(2 * col);
        if (sign > 0) {
          out(r, c + 1) += convert(value);
        } else {
          out(r + 1, c) += convert(std::conj(value));
        }
      });
    }
  }
  return out;
}

}  // namespace

// --- ToeplitzOperator ------------------------------------------------------

ToeplitzOperator::ToeplitzOperator(const CoefficientTable& coefficients,
                                   MultiIndex sizes)
    : coefficients_(sizes.levels()), sizes_(std::move(sizes)) {
  const std::size_t d = sizes_.levels();
  if (coefficients.levels() != d) {
    throw ShapeError("coefficient table has " + std::to_string(coefficients.levels()) +
                     " levels, sizes have " + std::to_string(d));
  }
  for (const auto& [k, value] : coefficients.entries()) {
    bool inside = value != cdouble{};
    for (std::size_t l = 0; l < d && inside; ++l) inside = std::abs(k[l]) < sizes_[l];
    if (inside) coefficients_.set(k, value);
  }
  real_ = coefficients_.is_real();

  const std::vector<int> q = coefficients_.band();
  std::vector<std::size_t> embed(d);
  for (std::size_t l = 0; l < d; ++l) {
    const int ql = std::min(q[l], sizes_[l] - 1);
    embed[l] = next_power_of_two(static_cast<std::size_t>(sizes_[l] + ql + 1));
  }
  embed_ = embed;
  auto fft = std::make_shared<FftNd>(embed);
  kernel_hat_.assign(fft->total(), cdouble{});
  for (const auto& [k, value] : coefficients_.entries()) {
    std::size_t flat = 0;
    for (std::size_t l = 0; l < d; ++l) {
      const auto len = static_cast<long long>(embed_[l]);
      const long long wrapped = ((k[l] % len) + len) % len;
      flat = flat * embed_[l] + static_cast<std::size_t>(wrapped);
    }
    kernel_hat_[flat] += value;
  }
  fft->forward(kernel_hat_);
  fft_ = std::move(fft);

  std::vector<std::size_t> embed_stride(d, 1);
  for (std::size_t l = d - 1; l-- > 0;) embed_stride[l] = embed_stride[l + 1] * embed_[l + 1];
  place_.resize(sizes_.total());
  std::vector<int> idx(d, 0);
  for (std::size_t flat = 0; flat < place_.size(); ++flat) {
    std::size_t pos = 0;
    for (std::size_t l = 0; l < d; ++l) pos += static_cast<std::size_t>(idx[l]) * embed_stride[l];
    place_[flat] = pos;
    for (std::size_t l = d; l-- > 0;) {
      if (++idx[l] < sizes_[l]) break;
      idx[l] = 0;
    }
  }
}

ToeplitzOperator::ToeplitzOperator(const Symbol& symbol, MultiIndex sizes)
    : ToeplitzOperator(symbol.coefficients(), std::move(sizes)) {}

std::size_t ToeplitzOperator::linear_bandwidth() const {
  std::size_t bw = 0;
  for (const auto& [k, value] : coefficients_.entries()) {
    long long offset = 0;
    for (std::size_t l = 0; l < k.size(); ++l) {
      offset += static_cast<long long>(k[l]) * static_cast<long long>(sizes_.stride(l));
    }
    bw = std::max(bw, static_cast<std::size_t>(std::llabs(offset)));
  }
  return bw;
}

Eigen::MatrixXcd ToeplitzOperator::assemble_dense_complex() const {
  check_dense(dimension(), "assemble_dense");
  const auto order = static_cast<Eigen::Index>(dimension());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(order, order);
  const std::size_t d = sizes_.levels();
  std::vector<int> lo(d), hi(d);
  for (const auto& [k, value] : coefficients_.entries()) {
    for (std::size_t l = 0; l < d; ++l) {
      lo[l] = std::max(0, -k[l]);
      hi[l] = std::min(sizes_[l], sizes_[l] - k[l]);
    }
    for_each_index(lo, hi, [&](std::span<const int> j) {
      std::size_t row = 0, col = 0;
      for (std::size_t l = 0; l < d; ++l) {
        row += static_cast<std::size_t>(j[l] + k[l]) * sizes_.stride(l);
        col += static_cast<std::size_t>(j[l]) * sizes_.stride(l);
      }
      out(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = value;
    });
  }
  return out;
}

Eigen::MatrixXd ToeplitzOperator::assemble_dense() const {
  if (!real_) throw ParameterError("assemble_dense: coefficients are not real");
  check_dense(dimension(), "assemble_dense");
  const auto order = static_cast<Eigen::Index>(dimension());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(order, order);
  const std::size_t d = sizes_.levels();
  std::vector<int> lo(d), hi(d);
  for (const auto& [k, value] : coefficients_.entries()) {
    for (std::size_t l = 0; l < d; ++l) {
      lo[l] = std::max(0, -k[l]);
      hi[l] = std::min(sizes_[l], sizes_[l] - k[l]);
    }
    const double v = value.real();
    for_each_index(lo, hi, [&](std::span<const int> j) {
      std::size_t row = 0, col = 0;
      for (std::size_t l = 0; l < d; ++l) {
        row += static_cast<std::size_t>(j[l] + k[l]) * sizes_.stride(l);
        col += static_cast<std::size_t>(j[l]) * sizes_.stride(l);
      }
      out(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = v;
    });
  }
  return out;
}

void ToeplitzOperator::matvec(std::span<const double> x, std::span<double> y) const {
  if (!real_) throw ParameterError("matvec: coefficients are not real");
  check_length(sizes_, x.size(), "matvec input");
  check_length(sizes_, y.size(), "matvec output");
  std::vector<cdouble> work(fft_->total(), cdouble{});

  for (std::size_t i = 0; i < place_.size(); ++i) work[place_[i]] = x[i];
  fft_->forward(work);
  for (std::size_t i = 0; i < work.size(); ++i) work[i] *= kernel_hat_[i];
  fft_->inverse(work);
  for (std::size_t i = 0; i < place_.size(); ++i) y[i] = work[place_[i]].real();
}

std::vector<double> ToeplitzOperator::matvec(std::span<const double> x) const {
  std::vector<double> y(dimension());
  matvec(x, y);
  return y;
}

// --- index operators -------------------------------------------------------

void flip_apply(const MultiIndex& n, std::span<const double> x, std::span<double> y) {
  check_length(n, x.size(), "flip_apply input");
  check_length(n, y.size(), "flip_apply output");
  // Reversing every level reverses the flattened vector.
  std::reverse_copy(x.begin(), x.end(), y.begin());
}

std::vector<double> flip_apply(const MultiIndex& n, std::span<const double> x) {
  std::vector<double> y(x.size());
  flip_apply(n, x, y);
  return y;
}

void pi_apply(const MultiIndex& n, std::span<const double> x, std::span<double> y,
              bool transposed) {
  check_length(n, x.size(), "pi_apply input");
  check_length(n, y.size(), "pi_apply output");
  LevelMaps maps = per_level(n, pi_map);
  if (transposed) {
    for (auto& m : maps) m = invert(m);
  }
  apply_maps(n, maps, x, y);
}

std::vector<double> pi_apply(const MultiIndex& n, std::span<const double> x,
                             bool transposed) {
  std::vector<double> y(x.size());
  pi_apply(n, x, y, transposed);
  return y;
}

void u_apply(const MultiIndex& n, std::span<const double> x, std::span<double> y) {
  check_length(n, x.size(), "u_apply input");
  check_length(n, y.size(), "u_apply output");
  apply_maps(n, per_level(n, u_map), x, y);
}

std::vector<double> u_apply(const MultiIndex& n, std::span<const double> x) {
  std::vector<double> y(x.size());
  u_apply(n, x, y);
  return y;
}

Eigen::MatrixXd flip_matrix(const MultiIndex& n) {
  return materialize(n, per_level(n, flip_map));
}

Eigen::MatrixXd pi_matrix(const MultiIndex& n) {
  return materialize(n, per_level(n, pi_map));
}

Eigen::MatrixXd u_matrix(const MultiIndex& n) {
  return materialize(n, per_level(n, u_map));
}

// --- block symbols and Hankel ------------------------------------------------

Eigen::MatrixXd assemble_block_g(const Symbol& f, const MultiIndex& m) {
  const CoefficientTable& table = real_coefficients(f, "assemble_block_g");
  if (table.levels() != m.levels()) throw ShapeError("assemble_block_g: level mismatch");
  return block_g_impl<Eigen::MatrixXd>(table, m,
                                       [](cdouble v) { return v.real(); });
}

Eigen::MatrixXcd assemble_block_g_hermitian(const Symbol& f, const MultiIndex& m) {
  const CoefficientTable& table = f.coefficients();
  if (table.levels() != m.levels()) throw ShapeError("assemble_block_g: level mismatch");
  return block_g_impl<Eigen::MatrixXcd>(table, m, [](cdouble v) { return v; });
}

Eigen::MatrixXd assemble_levelwise_block_g(const Symbol& f, const MultiIndex& n) {
  const CoefficientTable& table = real_coefficients(f, "assemble_levelwise_block_g");
  if (table.levels() != n.levels()) throw ShapeError("levelwise block g: level mismatch");
  if (!n.all_even()) {
    throw PreconditionError("levelwise block g needs even sizes, got " + n.to_string());
  }
  check_dense(n.total(), "assemble_levelwise_block_g");
  const std::size_t d = n.levels();
  struct Triple {
    int row, col;
  };
  const auto order = static_cast<Eigen::Index>(n.total());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(order, order);

  for (const auto& [k, value] : table.entries()) {
    // Nonzeros of T_{n_l/2}([[0, e^{i k theta}], [e^{-i k theta}, 0]]).
    std::vector<std::vector<Triple>> factors(d);
    bool empty = false;
    for (std::size_t l = 0; l < d; ++l) {
      const int m = n[l] / 2;
      for (int i = 0; i < m; ++i) {
        const int j_upper = i - k[l];  // J^{(k)} (x) E_12
        if (j_upper >= 0 && j_upper < m) factors[l].push_back({2 * i, 2 * j_upper + 1});
        const int j_lower = i + k[l];  // J^{(-k)} (x) E_21
        if (j_lower >= 0 && j_lower < m) factors[l].push_back({2 * i + 1, 2 * j_lower});
      }
      empty = empty || factors[l].empty();
    }
    if (empty) continue;
    std::vector<int> lo(d, 0), hi(d);
    for (std::size_t l = 0; l < d; ++l) hi[l] = static_cast<int>(factors[l].size());
    for_each_index(lo, hi, [&](std::span<const int> pick) {
      std::size_t row = 0, col = 0;
      for (std::size_t l = 0; l < d; ++l) {
        row += static_cast<std::size_t>(factors[l][pick[l]].row) * n.stride(l);
        col += static_cast<std::size_t>(factors[l][pick[l]].col) * n.stride(l);
      }
      out(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) += value.real();
    });
  }
  return out;
}

Eigen::MatrixXd assemble_hankel(const Symbol& f, const MultiIndex& n,
                                HankelOrientation orientation) {
  const CoefficientTable& table = real_coefficients(f, "assemble_hankel");
  if (table.levels() != n.levels()) throw ShapeError("assemble_hankel: level mismatch");
  check_dense(n.total(), "assemble_hankel");
  const auto order = static_cast<Eigen::Index>(n.total());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(order, order);
  const int sign = orientation == HankelOrientation::Plus ? 1 : -1;
  const std::size_t d = n.levels();
  std::vector<int> lo(d, 0), hi(d);
  for (std::size_t l = 0; l < d; ++l) hi[l] = n[l];
  for (const auto& [k, value] : table.entries()) {
    // 0-based i_l + j_l = sign * k_l.
    bool reachable = true;
    for (std::size_t l = 0; l < d; ++l) {
      const int s = sign * k[l];
      reachable = reachable && s >= 0 && s <= 2 * (n[l] - 1);
    }
    if (!reachable) continue;
    for_each_index(lo, hi, [&](std::span<const int> i) {
      std::size_t row = 0, col = 0;
      for (std::size_t l = 0; l < d; ++l) {
        const int j = sign * k[l] - i[l];
        if (j < 0 || j >= n[l]) return;
        row += static_cast<std::size_t>(i[l]) * n.stride(l);
        col += static_cast<std::size_t>(j) * n.stride(l);
      }
      out(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = value.real();
    });
  }
  return out;
}

Eigen::MatrixXd shuffle_conjugate(const Eigen::MatrixXd& a, const MultiIndex& n) {
  if (!n.all_even()) {
    throw PreconditionError("shuffle_conjugate needs even sizes, got " + n.to_string());
  }
  if (a.rows() != static_cast<Eigen::Index>(n.total()) || a.cols() != a.rows()) {
    throw ShapeError("shuffle_conjugate: matrix does not match sizes");
  }
  // R = (Pi U Y) A (Pi U)^T, so R(pL(i), pR(j)) = A(i, j).
  LevelMaps left, right;
  for (int size : n.sizes()) {
    const auto pu = compose(pi_map(size), u_map(size));
    right.push_back(pu);
    left.push_back(compose(pu, flip_map(size)));
  }
  const auto pl = flatten_maps(n, left);
  const auto pr = flatten_maps(n, right);
  Eigen::MatrixXd out(a.rows(), a.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    const auto cj = static_cast<Eigen::Index>(pr[static_cast<std::size_t>(j)]);
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      out(static_cast<Eigen::Index>(pl[static_cast<std::size_t>(i)]), cj) = a(i, j);
    }
  }
  return out;
}

StructureResidual structure_residual(const Symbol& f, const MultiIndex& n) {
  if (!n.all_even()) {
    throw PreconditionError("structure_residual needs even sizes, got " + n.to_string());
  }
  const ToeplitzOperator t(real_coefficients(f, "structure_residual"), n);
  StructureResidual out;
  out.residual = shuffle_conjugate(t.assemble_dense(), n) - assemble_levelwise_block_g(f, n);
  const std::vector<double> sigma = singular_values(out.residual);
  out.norm = sigma.empty() ? 0.0 : sigma.front();
  const double cut = 1e-8 * out.norm;
  for (double s : sigma) {
    if (out.norm > 0.0 && s > cut) {
      ++out.rank;
    } else {
      out.tail_norm = std::max(out.tail_norm, s);
    }
  }
  out.rank_fraction = static_cast<double>(out.rank) / static_cast<double>(n.total());
  return out;
}

}  // namespace flipspec
