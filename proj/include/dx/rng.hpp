#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace dx {

// Fixed stream identifiers. Every randomized operation draws from its own
// stream derived from the run seed, so adding a stream never shifts another.
enum class Stream : std::uint64_t {
  kSemiRandomBaseline = 1,
  kGoldStandard = 2,
  kFolds = 3,
  kGroupSample = 4,
  kClassBalance = 5,
};

std::uint64_t splitmix64(std::uint64_t x);

// Counter-based split: seed for stream `stream`, sub-counter `counter`.
std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t counter = 0);

// Portable generator: mt19937_64 is fully specified by the standard, and the
// bounded draw below avoids the implementation-defined distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  // Fisher-Yates, last position first.
  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  // min(count, items.size()) uniform draws without replacement, in draw order.
  template <typename T>
  std::vector<T> sample(std::span<const T> items, std::size_t count) {
    std::vector<T> pool(items.begin(), items.end());
    const std::size_t n = std::min(count, pool.size());
    for (std::size_t i = 0; i < n; ++i) {
      const auto j = i + static_cast<std::size_t>(below(pool.size() - i));
      std::swap(pool[i], pool[j]);
    }
    pool.resize(n);
    return pool;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dx
