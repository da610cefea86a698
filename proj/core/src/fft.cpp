#include "flipspec/fft.hpp"

#include <cmath>
#include <numbers>

#include "flipspec/errors.hpp"

namespace flipspec {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

struct FftPlan::Bluestein {
  std::unique_ptr<FftPlan> inner;
  std::vector<cdouble> chirp;           // exp(-i pi j^2 / n)
  std::vector<cdouble> kernel_forward;  // FFT of conj(chirp) wrapped
  std::vector<cdouble> kernel_inverse;  // FFT of chirp wrapped
};

FftPlan::FftPlan(std::size_t n) : n_(n) {
  if (n == 0) throw ParameterError("FFT length must be positive");
  if (is_power_of_two(n)) {
    bitrev_.resize(n);
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < n) ++bits;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = 0;
      for (std::size_t b = 0; b < bits; ++b) {
        if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
      }
      bitrev_[i] = r;
    }
    twiddle_.resize(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) /
                           static_cast<double>(n);
      twiddle_[k] = {std::cos(angle), std::sin(angle)};
    }
    return;
  }

  chirp_ = std::make_unique<Bluestein>();
  const std::size_t m = next_power_of_two(2 * n - 1);
  chirp_->inner = std::make_unique<FftPlan>(m);
  chirp_->chirp.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    // j^2 mod 2n keeps the angle small for large j.
    const std::size_t jj = (j * j) % (2 * n);
    const double angle =
        -std::numbers::pi * static_cast<double>(jj) / static_cast<double>(n);
    chirp_->chirp[j] = {std::cos(angle), std::sin(angle)};
  }
  chirp_->kernel_forward.assign(m, cdouble{});
  chirp_->kernel_inverse.assign(m, cdouble{});
  for (std::size_t j = 0; j < n; ++j) {
    const cdouble w = chirp_->chirp[j];
    chirp_->kernel_forward[j] = std::conj(w);
    chirp_->kernel_inverse[j] = w;
    if (j != 0) {
      chirp_->kernel_forward[m - j] = std::conj(w);
      chirp_->kernel_inverse[m - j] = w;
    }
  }
  chirp_->inner->forward(chirp_->kernel_forward);
  chirp_->inner->forward(chirp_->kernel_inverse);
}

FftPlan::~FftPlan() = default;
FftPlan::FftPlan(FftPlan&&) noexcept = default;
FftPlan& FftPlan::operator=(FftPlan&&) noexcept = default;

void FftPlan::forward(std::span<cdouble> data) const {
  if (data.size() != n_) throw ShapeError("FFT input length mismatch");
  if (chirp_) {
    bluestein(data, false);
  } else {
    radix2(data, false);
  }
}

void FftPlan::inverse(std::span<cdouble> data) const {
  if (data.size() != n_) throw ShapeError("FFT input length mismatch");
  if (chirp_) {
    bluestein(data, true);
  } else {
    radix2(data, true);
  }
}

void FftPlan::radix2(std::span<cdouble> data, bool inverse) const {
  const std::size_t n = n_;
  for (std::size_t i = 0; i < n; ++i) {
    if (i < bitrev_[i]) std::swap(data[i], data[bitrev_[i]]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t step = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        cdouble w = twiddle_[k * step];
        if (inverse) w = std::conj(w);
        const cdouble u = data[start + k];
        const cdouble v = data[start + k + half] * w;
        data[start + k] = u + v;
        data[start + k + half] = u - v;
      }
    }
  }
}

// X_k = c_k * sum_j (x_j c_j) conj(c_{k-j}) with c_j = exp(-i pi j^2 / n),
// evaluated as a circular convolution of power-of-two length.
void FftPlan::bluestein(std::span<cdouble> data, bool inverse) const {
  const std::size_t n = n_;
  const FftPlan& inner = *chirp_->inner;
  const std::size_t m = inner.size();
  std::vector<cdouble> work(m, cdouble{});
  for (std::size_t j = 0; j < n; ++j) {
    const cdouble w =
        inverse ? std::conj(chirp_->chirp[j]) : chirp_->chirp[j];
    work[j] = data[j] * w;
  }
  inner.forward(work);
  const auto& kernel =
      inverse ? chirp_->kernel_inverse : chirp_->kernel_forward;
  for (std::size_t k = 0; k < m; ++k) work[k] *= kernel[k];
  inner.inverse(work);
  const double scale = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < n; ++k) {
    const cdouble w =
        inverse ? std::conj(chirp_->chirp[k]) : chirp_->chirp[k];
    data[k] = work[k] * w * scale;
  }
}

FftNd::FftNd(std::vector<std::size_t> shape) : shape_(std::move(shape)) {
  if (shape_.empty()) throw ParameterError("FftNd needs at least one axis");
  plans_.reserve(shape_.size());
  for (std::size_t len : shape_) {
    total_ *= len;
    plans_.emplace_back(len);
  }
}

void FftNd::forward(std::span<cdouble> data) const { transform(data, false); }

void FftNd::inverse(std::span<cdouble> data) const {
  transform(data, true);
  const double scale = 1.0 / static_cast<double>(total_);
  for (auto& v : data) v *= scale;
}

void FftNd::transform(std::span<cdouble> data, bool inverse) const {
  if (data.size() != total_) throw ShapeError("FftNd input length mismatch");
  std::vector<cdouble> line;
  std::size_t stride = total_;
  for (std::size_t axis = 0; axis < shape_.size(); ++axis) {
    const std::size_t len = shape_[axis];
    stride /= len;
    if (len == 1) continue;
    line.resize(len);
    const std::size_t block = len * stride;
    for (std::size_t outer = 0; outer < total_; outer += block) {
      for (std::size_t inner = 0; inner < stride; ++inner) {
        const std::size_t base = outer + inner;
        for (std::size_t j = 0; j < len; ++j) line[j] = data[base + j * stride];
        if (inverse) {
          plans_[axis].inverse(line);
        } else {
          plans_[axis].forward(line);
        }
        for (std::size_t j = 0; j < len; ++j) data[base + j * stride] = line[j];
      }
    }
  }
}

}  // namespace flipspec
