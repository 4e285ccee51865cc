#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dx/error.hpp"

namespace dx {

// Compressed rows: row i is entries[offsets[i], offsets[i + 1]).
template <typename T>
class Csr {
 public:
  Csr() : offsets_{0} {}

  static Csr from_parts(std::vector<std::uint64_t> offsets, std::vector<T> entries) {
    if (offsets.empty() || offsets.front() != 0 || offsets.back() != entries.size()) {
      throw InvariantError("row offsets are inconsistent");
    }
    for (std::size_t i = 1; i < offsets.size(); ++i) {
      if (offsets[i] < offsets[i - 1]) throw InvariantError("row offsets are not monotone");
    }
    Csr out;
    out.offsets_ = std::move(offsets);
    out.entries_ = std::move(entries);
    return out;
  }

  void push_row(std::span<const T> row) {
    entries_.insert(entries_.end(), row.begin(), row.end());
    offsets_.push_back(entries_.size());
  }

  std::size_t rows() const { return offsets_.size() - 1; }
  std::span<const T> row(std::size_t i) const {
    return {entries_.data() + offsets_[i], entries_.data() + offsets_[i + 1]};
  }

  const std::vector<std::uint64_t>& offsets() const { return offsets_; }
  const std::vector<T>& entries() const { return entries_; }

 private:
  std::vector<std::uint64_t> offsets_;
  std::vector<T> entries_;
};

}  // namespace dx
