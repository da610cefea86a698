#include "flipspec/multi_index.hpp"

#include <limits>
#include <sstream>

#include "flipspec/errors.hpp"

namespace flipspec {

MultiIndex::MultiIndex(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.empty()) {
    throw ParameterError("MultiIndex needs at least one level");
  }
  strides_.assign(sizes_.size(), 1);
  total_ = 1;
  for (std::size_t l = sizes_.size(); l-- > 0;) {
    if (sizes_[l] < 1) {
      throw ParameterError("MultiIndex sizes must be >= 1, got " +
                           std::to_string(sizes_[l]));
    }
    strides_[l] = total_;
    if (total_ > std::numeric_limits<std::size_t>::max() /
                     static_cast<std::size_t>(sizes_[l])) {
      throw ParameterError("MultiIndex total size overflows");
    }
    total_ *= static_cast<std::size_t>(sizes_[l]);
  }
}

MultiIndex::MultiIndex(std::initializer_list<int> sizes)
    : MultiIndex(std::vector<int>(sizes)) {}

bool MultiIndex::all_even() const noexcept {
  for (int n : sizes_) {
    if (n % 2 != 0) return false;
  }
  return true;
}

std::size_t MultiIndex::ravel(std::span<const int> index) const {
  std::size_t flat = 0;
  for (std::size_t l = 0; l < sizes_.size(); ++l) {
    flat += static_cast<std::size_t>(index[l]) * strides_[l];
  }
  return flat;
}

void MultiIndex::unravel(std::size_t flat, std::span<int> index) const {
  for (std::size_t l = 0; l < sizes_.size(); ++l) {
    index[l] = static_cast<int>(flat / strides_[l]);
    flat %= strides_[l];
  }
}

std::string MultiIndex::to_string() const {
  std::ostringstream out;
  for (std::size_t l = 0; l < sizes_.size(); ++l) {
    if (l) out << 'x';
    out << sizes_[l];
  }
  return out.str();
}

MultiIndex parse_multi_index(const std::string& text) {
  std::vector<int> sizes;
  std::string token;
  auto flush = [&] {
    if (token.empty()) throw ParameterError("empty size in '" + text + "'");
    std::size_t used = 0;
    int value = 0;
    try {
      value = std::stoi(token, &used);
    } catch (const std::exception&) {
      throw ParameterError("bad size '" + token + "' in '" + text + "'");
    }
    if (used != token.size()) {
      throw ParameterError("bad size '" + token + "' in '" + text + "'");
    }
    sizes.push_back(value);
    token.clear();
  };
  for (char c : text) {
    if (c == ',' || c == 'x') {
      flush();
    } else if (c != ' ') {
      token.push_back(c);
    }
  }
  flush();
  return MultiIndex(std::move(sizes));
}

}  // namespace flipspec

namespace flipspec {

void for_each_index(std::span<const int> lo, std::span<const int> hi,
                    const std::function<void(std::span<const int>)>& fn) {
  const std::size_t d = lo.size();
  if (hi.size() != d) throw ShapeError("for_each_index: bound length mismatch");
  for (std::size_t l = 0; l < d; ++l) {
    if (lo[l] >= hi[l]) return;
  }
  std::vector<int> idx(lo.begin(), lo.end());
  while (true) {
    fn(idx);
    std::size_t l = d;
    while (l-- > 0) {
      if (++idx[l] < hi[l]) break;
      idx[l] = lo[l];
    }
    if (l == static_cast<std::size_t>(-1)) return;
  }
}

}  // namespace flipspec
