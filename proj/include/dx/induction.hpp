#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dx/error.hpp"
#include "dx/membership.hpp"
#include "dx/taxonomy.hpp"

namespace dx {

enum class Metric { kF1, kPrecision, kRecall, kHybrid };

Metric parse_metric(std::string_view name);  // throws UsageError
std::string_view to_string(Metric m);

// Positive and negative example individuals: disjoint, both nonempty,
// duplicates removed.
class ExampleSets {
 public:
  static ExampleSets make(std::vector<IndividualId> positives, std::vector<IndividualId> negatives);

  std::span<const IndividualId> positives() const { return positives_; }
  std::span<const IndividualId> negatives() const { return negatives_; }

 private:
  std::vector<IndividualId> positives_;
  std::vector<IndividualId> negatives_;
};

// Resolves IRIs against the membership index. Individuals without membership
// rows are rejected (LookupError naming them) rather than treated as covering
// nothing.
ExampleSets resolve_examples(std::span<const std::string> positives,
                             std::span<const std::string> negatives, const MembershipIndex& idx);

enum class Shape { kAtom, kAnd, kOr };

// Disjunction of conjunctions of atomic concepts. A single term with one atom
// is an atom; a single term with several atoms is an `and`.
class CandidateConcept {
 public:
  static CandidateConcept atom(ConceptId c);
  static CandidateConcept conjunction(std::vector<ConceptId> atoms);
  static CandidateConcept disjunction(std::vector<std::vector<ConceptId>> terms);

  Shape shape() const;
  const std::vector<std::vector<ConceptId>>& terms() const { return terms_; }
  std::size_t atom_count() const;

  // Sorts atoms within each term and terms against each other by IRI.
  void canonicalize(const Interner& names);

  bool operator==(const CandidateConcept&) const = default;

 private:
  std::vector<std::vector<ConceptId>> terms_;
};

// "A", "A and B", "(A and B) or C".
std::string render(const CandidateConcept& c, const Interner& names);

struct ScoreSet {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
  double precision = 0, recall = 0, f1 = 0, hybrid = 0;

  double value(Metric m) const;
};

// Derived metrics from counts. Each ratio is a single division of integers so
// equal rationals always compare equal. hybrid = alpha*f1 + (1-alpha)*precision.
ScoreSet make_scores(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn, std::uint64_t tn,
                     double alpha = 0.5);

struct ScoredConcept {
  CandidateConcept candidate;
  ScoreSet scores;
  std::string label;
};

bool candidate_covers(const CandidateConcept& cand, const MembershipIndex& idx, IndividualId i);

// Recounts coverage over the examples one membership test at a time.
ScoreSet score(const CandidateConcept& cand, const ExampleSets& examples,
               const MembershipIndex& idx, double alpha = 0.5);

struct InductionConfig {
  Metric metric = Metric::kF1;
  std::size_t max_conjuncts = 2;
  std::size_t max_disjuncts = 3;
  std::size_t beam_width = 64;
  std::size_t top_k = 7;
  double alpha = 0.5;
  // Largest candidate space exhaustive_induce will enumerate.
  std::uint64_t exhaustive_cap = 1'000'000;
};

void validate(const InductionConfig& config);  // throws UsageError

struct InductionResult {
  // Sorted by metric descending, then fewer atoms, then IRIs.
  std::vector<ScoredConcept> ranked;
  std::uint64_t candidates_scored = 0;

  // No concept covers any positive example.
  bool no_explanation() const { return ranked.empty(); }
};

// Candidate space shared by both searches: atoms covering at least one
// positive; conjunctions of 2..max_conjuncts such atoms where no atom
// subsumes another and every atom is needed on the examples (dropping one
// strictly grows coverage); disjunctions of 2..max_disjuncts distinct atoms or
// conjunctions where every term covers a positive the others miss.
//
// induce() searches it with a beam: all atoms, then conjunctions built from
// the beam_width best atoms (level by level), then greedy unions of the
// beam_width best candidates that raise recall without lowering the metric.
InductionResult induce(const ExampleSets& examples, const MembershipIndex& idx,
                       const Taxonomy& taxonomy, const ClosureIndex& closure,
                       const InductionConfig& config);

class CapExceeded : public UsageError {
 public:
  using UsageError::UsageError;
};

// Complete enumeration of the same space with the same ordering. Throws
// CapExceeded when the space is larger than config.exhaustive_cap.
InductionResult exhaustive_induce(const ExampleSets& examples, const MembershipIndex& idx,
                                  const Taxonomy& taxonomy, const ClosureIndex& closure,
                                  const InductionConfig& config);

}  // namespace dx
