#include "dx/membership.hpp"

#include <algorithm>

#include "dx/error.hpp"
#include "dx/text.hpp"

namespace dx {

MembershipIndex MembershipIndex::build(Interner individuals,
                                       const std::vector<std::vector<ConceptId>>& direct,
                                       const ClosureIndex& closure, std::size_t duplicate_rows) {
  if (direct.size() != individuals.size()) {
    throw InvariantError("membership rows do not match individual count");
  }
  MembershipIndex idx;
  idx.individuals_ = std::move(individuals);
  idx.duplicate_rows_ = duplicate_rows;

  std::vector<ConceptId> row;
  std::vector<ConceptId> merged;
  for (const auto& concepts : direct) {
    row = concepts;
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    idx.direct_.push_row(row);

    merged.clear();
    for (ConceptId c : row) {
      const auto anc = closure.ancestors(c);
      merged.insert(merged.end(), anc.begin(), anc.end());
    }
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    idx.inferred_.push_row(merged);
  }
  return idx;
}

MembershipIndex MembershipIndex::from_parts(Interner individuals, Csr<ConceptId> direct,
                                            Csr<ConceptId> inferred,
                                            std::size_t duplicate_rows) {
  if (direct.rows() != individuals.size() || inferred.rows() != individuals.size()) {
    throw InvariantError("membership rows do not match individual count");
  }
  MembershipIndex idx;
  idx.individuals_ = std::move(individuals);
  idx.direct_ = std::move(direct);
  idx.inferred_ = std::move(inferred);
  idx.duplicate_rows_ = duplicate_rows;
  return idx;
}

void MembershipIndex::check(IndividualId i) const {
  if (i >= size()) throw LookupError("unknown individual id " + std::to_string(i));
}

std::span<const ConceptId> MembershipIndex::direct(IndividualId i) const {
  check(i);
  return direct_.row(i);
}

std::span<const ConceptId> MembershipIndex::inferred(IndividualId i) const {
  check(i);
  return inferred_.row(i);
}

bool MembershipIndex::covers(ConceptId c, IndividualId i) const {
  const auto row = inferred(i);
  return std::binary_search(row.begin(), row.end(), c);
}

bool MembershipIndex::covers(ConceptId c, std::string_view individual_iri) const {
  const auto i = find(individual_iri);
  return i && covers(c, *i);
}

MembershipIndex load_memberships(const std::string& path, Taxonomy& taxonomy,
                                 ClosureIndex& closure, MembershipLoadOptions options) {
  Interner individuals;
  std::vector<std::vector<ConceptId>> direct;
  std::size_t rows = 0;

  LineReader reader(path);
  std::string line;
  while (reader.next(line)) {
    if (trim(line).empty() || line.front() == '#') continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      throw ParseError(path, reader.line_number(), "expected 'individual<TAB>concept'");
    }
    auto concept_id = taxonomy.concepts().find(fields[1]);
    if (!concept_id) {
      if (options.strict) {
        throw ParseError(path, reader.line_number(),
                         "unknown concept '" + std::string(fields[1]) + "'");
      }
      concept_id = taxonomy.add_isolated(fields[1]);
      closure.append_isolated();
    }
    const auto ind = individuals.intern(fields[0]);
    if (ind == direct.size()) direct.emplace_back();
    direct[ind].push_back(*concept_id);
    ++rows;
  }

  std::size_t unique_rows = 0;
  for (auto& concepts : direct) {
    std::sort(concepts.begin(), concepts.end());
    concepts.erase(std::unique(concepts.begin(), concepts.end()), concepts.end());
    unique_rows += concepts.size();
  }
  return MembershipIndex::build(std::move(individuals), direct, closure, rows - unique_rows);
}

}  // namespace dx
