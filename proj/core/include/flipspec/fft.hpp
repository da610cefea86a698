#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace flipspec {

using cdouble = std::complex<double>;

// Unnormalized complex DFT of one length:
//   forward  X_k = sum_j x_j exp(-2 pi i j k / n)
//   inverse  x_j = sum_k X_k exp(+2 pi i j k / n)   (no 1/n factor)
//
// Powers of two use an iterative radix-2 kernel; every other length goes
// through Bluestein's chirp-z reduction onto a power-of-two convolution.
// Plans are immutable and safe to share between threads.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n);
  ~FftPlan();
  FftPlan(FftPlan&&) noexcept;
  FftPlan& operator=(FftPlan&&) noexcept;

  std::size_t size() const noexcept { return n_; }
  void forward(std::span<cdouble> data) const;
  void inverse(std::span<cdouble> data) const;

 private:
  struct Bluestein;
  void radix2(std::span<cdouble> data, bool inverse) const;
  void bluestein(std::span<cdouble> data, bool inverse) const;

  std::size_t n_;
  std::vector<std::size_t> bitrev_;
  std::vector<cdouble> twiddle_;  // exp(-2 pi i k / n), k < n/2
  std::unique_ptr<Bluestein> chirp_;
};

// Separable d-dimensional DFT over a row-major tensor (axis 0 slowest).
class FftNd {
 public:
  explicit FftNd(std::vector<std::size_t> shape);

  const std::vector<std::size_t>& shape() const noexcept { return shape_; }
  std::size_t total() const noexcept { return total_; }

  void forward(std::span<cdouble> data) const;
  // Includes the 1/total normalization, so inverse(forward(x)) == x.
  void inverse(std::span<cdouble> data) const;

 private:
  void transform(std::span<cdouble> data, bool inverse) const;

  std::vector<std::size_t> shape_;
  std::size_t total_ = 1;
  std::vector<FftPlan> plans_;
};

std::size_t next_power_of_two(std::size_t n);

}  // namespace flipspec
