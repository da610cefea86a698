#include "flipspec/matrix_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>

#include "flipspec/errors.hpp"

namespace flipspec {

namespace {

template <class T>
void put(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) {
    throw ShapeError("matrix file truncated");
  }
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

std::size_t expected_order(const MultiIndex& sizes, std::uint32_t flags) {
  return (flags & kMatrixFlagBlock2x2) ? 2 * sizes.total() : sizes.total();
}

}  // namespace

void write_matrix_binary(std::ostream& out, const Eigen::MatrixXd& matrix,
                         const MultiIndex& sizes, std::uint32_t flags) {
  const std::size_t order = expected_order(sizes, flags);
  if (matrix.rows() != static_cast<Eigen::Index>(order) || matrix.cols() != matrix.rows()) {
    throw ShapeError("write_matrix_binary: matrix order does not match sizes " +
                     sizes.to_string());
  }
  put<std::uint32_t>(out, kMatrixMagic);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(sizes.levels()));
  for (int n : sizes.sizes()) put<std::uint64_t>(out, static_cast<std::uint64_t>(n));
  put<std::uint32_t>(out, flags);
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) put<double>(out, matrix(i, j));
  }
  if (!out) throw Error("write_matrix_binary: stream error");
}

StoredMatrix read_matrix_binary(std::istream& in) {
  if (get<std::uint32_t>(in) != kMatrixMagic) throw ShapeError("not a matrix file (bad magic)");
  const auto d = get<std::uint32_t>(in);
  if (d == 0 || d > 16) throw ShapeError("matrix file: bad level count");
  std::vector<int> sizes(d);
  for (auto& n : sizes) {
    const auto v = get<std::uint64_t>(in);
    if (v == 0 || v > static_cast<std::uint64_t>(std::numeric_limits<int>::max())) {
      throw ShapeError("matrix file: bad size");
    }
    n = static_cast<int>(v);
  }
  StoredMatrix stored;
  stored.sizes = MultiIndex(sizes);
  stored.flags = get<std::uint32_t>(in);
  const auto order = static_cast<Eigen::Index>(expected_order(stored.sizes, stored.flags));
  stored.matrix.resize(order, order);
  for (Eigen::Index i = 0; i < order; ++i) {
    for (Eigen::Index j = 0; j < order; ++j) stored.matrix(i, j) = get<double>(in);
  }
  return stored;
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& matrix) {
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      if (j > 0) out << ',';
      out << matrix(i, j);
    }
    out << '\n';
  }
  out.precision(old);
}

}  // namespace flipspec
