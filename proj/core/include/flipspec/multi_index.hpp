#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace flipspec {

// Sizes n = (n_1, ..., n_d) of a d-level structure.
//
// Vectors indexed by a MultiIndex use row-major lexicographic order over
// (i_1, ..., i_d) with level 1 varying slowest, i.e. the Kronecker order
// A_1 (x) A_2 (x) ... (x) A_d.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> sizes);
  MultiIndex(std::initializer_list<int> sizes);

  std::size_t levels() const noexcept { return sizes_.size(); }
  int operator[](std::size_t level) const { return sizes_[level]; }
  const std::vector<int>& sizes() const noexcept { return sizes_; }

  // d_n = n_1 * ... * n_d.
  std::size_t total() const noexcept { return total_; }

  // Stride of level l in the flattened layout.
  std::size_t stride(std::size_t level) const { return strides_[level]; }

  bool all_even() const noexcept;

  std::size_t ravel(std::span<const int> index) const;
  void unravel(std::size_t flat, std::span<int> index) const;

  // "n1xn2x..." for logs and file headers.
  std::string to_string() const;

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) {
    return a.sizes_ == b.sizes_;
  }

 private:
  std::vector<int> sizes_;
  std::vector<std::size_t> strides_;
  std::size_t total_ = 0;
};

// Visits every index in the box lo_l <= i_l < hi_l in row-major order.
void for_each_index(std::span<const int> lo, std::span<const int> hi,
                    const std::function<void(std::span<const int>)>& fn);

// Parses "10,10" or "5x5x5".
MultiIndex parse_multi_index(const std::string& text);

}  // namespace flipspec
