#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dx/induction.hpp"

namespace dx {

enum class ExplanationKind { kEcii, kHumanGold, kSemiRandom };

std::string_view to_string(ExplanationKind k);

inline constexpr std::size_t kMaxExplanationLength = 7;
inline constexpr double kConcretenessThreshold = 3.5;

// Up to seven unique concept labels plus how they were produced.
struct Explanation {
  std::vector<std::string> concepts;
  ExplanationKind kind = ExplanationKind::kEcii;
  std::optional<Metric> metric;
  std::optional<std::uint64_t> seed;
  bool filtered = false;
  bool alphabetized = false;
  // Fewer labels were available than requested.
  bool short_list = false;
};

// word -> concreteness rating (roughly 1 = abstract .. 5 = concrete).
class ConcretenessTable {
 public:
  // Lookup is case-insensitive after trimming. Duplicate words keep the first
  // rating and record a warning.
  void add(std::string_view word, double rating, std::size_t line = 0);

  std::optional<double> find(std::string_view word) const;

  // Rating for a concept label. Labels absent from the table are split into
  // words (on spaces, underscores and hyphens) and rated by the mean of the
  // word ratings when every word is present.
  std::optional<double> rate(std::string_view label) const;

  std::size_t size() const { return ratings_.size(); }
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  std::unordered_map<std::string, double> ratings_;
  std::vector<std::string> warnings_;
};

// CSV with a header naming `word` and `rating` columns.
ConcretenessTable load_concreteness(const std::string& path);

// Human-readable form of a concept IRI: the part after the last '/', without
// a "Category:" prefix, underscores as spaces.
std::string display_label(std::string_view iri);

struct MachineExplanationOptions {
  std::size_t k = kMaxExplanationLength;
  const ConcretenessTable* table = nullptr;
  double threshold = kConcretenessThreshold;
  Metric metric = Metric::kF1;
  std::optional<std::uint64_t> seed;
  ExplanationKind kind = ExplanationKind::kEcii;
};

// Walks the ranking in order, skipping repeated labels and, with a table,
// labels rated below the threshold or not rated at all (a rating equal to the
// threshold is kept). Returns nullopt when nothing survives.
std::optional<Explanation> assemble_machine_explanation(std::span<const std::string> ranked_labels,
                                                        const MachineExplanationOptions& options);
std::optional<Explanation> assemble_machine_explanation(std::span<const ScoredConcept> ranked,
                                                        const MachineExplanationOptions& options);

// Shuffles A ++ B with Fisher-Yates under `seed` and splits it back into
// groups of the original sizes.
template <typename T>
std::pair<std::vector<T>, std::vector<T>> semi_random_baseline(std::span<const T> a,
                                                               std::span<const T> b,
                                                               std::uint64_t seed);

// Three rater lists of 7..10 labels each.
class RaterLists {
 public:
  explicit RaterLists(std::vector<std::vector<std::string>> lists);
  const std::vector<std::vector<std::string>>& lists() const { return lists_; }

 private:
  std::vector<std::vector<std::string>> lists_;
};

// Concepts named by all three raters (alphabetical), then by exactly two
// (alphabetical), then seeded draws from the rest, up to seven labels. Labels
// compare case-insensitively after trimming; the result does not depend on
// the order the lists are given in.
Explanation pool_gold_standard(const RaterLists& raters, std::uint64_t seed);

// Case-insensitive ascending sort; sets the alphabetized flag.
Explanation alphabetize(Explanation e);

// `kind<TAB>metric<TAB>seed<TAB>label1;label2;...`, with '-' for an absent
// metric or seed.
std::string to_text_line(const Explanation& e);

}  // namespace dx

#include "dx/rng.hpp"

namespace dx {

template <typename T>
std::pair<std::vector<T>, std::vector<T>> semi_random_baseline(std::span<const T> a,
                                                               std::span<const T> b,
                                                               std::uint64_t seed) {
  if (a.empty() || b.empty()) throw UsageError("semi-random baseline needs two nonempty sets");
  std::vector<T> all(a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  Rng rng(seed);
  rng.shuffle(std::span<T>(all));
  std::vector<T> first(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(a.size()));
  std::vector<T> second(all.begin() + static_cast<std::ptrdiff_t>(a.size()), all.end());
  return {std::move(first), std::move(second)};
}

}  // namespace dx
