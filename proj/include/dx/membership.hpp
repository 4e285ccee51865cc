#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dx/csr.hpp"
#include "dx/taxonomy.hpp"

namespace dx {

using IndividualId = std::uint32_t;

// Individual -> concept assignments with the inferred (ancestor-closed)
// membership materialized up front. Both row kinds are sorted by concept id.
class MembershipIndex {
 public:
  MembershipIndex() = default;

  // direct[i] lists the asserted concepts of individual i (any order,
  // duplicates allowed).
  static MembershipIndex build(Interner individuals,
                               const std::vector<std::vector<ConceptId>>& direct,
                               const ClosureIndex& closure, std::size_t duplicate_rows = 0);

  static MembershipIndex from_parts(Interner individuals, Csr<ConceptId> direct,
                                    Csr<ConceptId> inferred,
                                    std::size_t duplicate_rows = 0);

  const Interner& individuals() const { return individuals_; }
  std::size_t size() const { return individuals_.size(); }
  std::optional<IndividualId> find(std::string_view iri) const { return individuals_.find(iri); }

  std::span<const ConceptId> direct(IndividualId i) const;
  std::span<const ConceptId> inferred(IndividualId i) const;

  // Throws LookupError for an id outside the index.
  bool covers(ConceptId c, IndividualId i) const;
  // Individuals without membership rows cover nothing.
  bool covers(ConceptId c, std::string_view individual_iri) const;

  std::size_t duplicate_rows() const { return duplicate_rows_; }
  const Csr<ConceptId>& direct_rows() const { return direct_; }
  const Csr<ConceptId>& inferred_rows() const { return inferred_; }

 private:
  void check(IndividualId i) const;

  Interner individuals_;
  Csr<ConceptId> direct_;
  Csr<ConceptId> inferred_;
  std::size_t duplicate_rows_ = 0;
};

struct MembershipLoadOptions {
  // Unknown concepts are an error when set; otherwise they are added to the
  // taxonomy as isolated concepts.
  bool strict = true;
};

// Reads `individual<TAB>concept` rows ('#' comments and blank lines skipped).
MembershipIndex load_memberships(const std::string& path, Taxonomy& taxonomy,
                                 ClosureIndex& closure, MembershipLoadOptions options = {});

}  // namespace dx
