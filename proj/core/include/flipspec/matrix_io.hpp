#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>

#include "flipspec/multi_index.hpp"

namespace flipspec {

// Binary dense-matrix container, all fields little-endian:
//   uint32 magic 'FSPM' (0x4D505346), uint32 d, d x uint64 n_l, uint32 flags,
//   then order^2 IEEE-754 doubles row-major.
// order = d_n, or 2 d_n when kMatrixFlagBlock2x2 is set.
inline constexpr std::uint32_t kMatrixMagic = 0x4D505346u;
inline constexpr std::uint32_t kMatrixFlagBlock2x2 = 1u << 0;
inline constexpr std::uint32_t kMatrixFlagSymmetric = 1u << 1;

struct StoredMatrix {
  MultiIndex sizes;
  std::uint32_t flags = 0;
  Eigen::MatrixXd matrix;
};

void write_matrix_binary(std::ostream& out, const Eigen::MatrixXd& matrix,
                         const MultiIndex& sizes, std::uint32_t flags = 0);
StoredMatrix read_matrix_binary(std::istream& in);

// Row-major CSV, full double precision.
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& matrix);

}  // namespace flipspec
