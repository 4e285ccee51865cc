#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace dx {

using ConceptId = std::uint32_t;

// Bijective string <-> dense id table. Ids are handed out contiguously from 0
// in order of first appearance.
class Interner {
 public:
  std::uint32_t intern(std::string_view name);
  std::optional<std::uint32_t> find(std::string_view name) const;
  // Throws LookupError for an id that was never handed out.
  const std::string& name(std::uint32_t id) const;
  std::uint32_t id(std::string_view name) const;  // throws LookupError

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> ids_;
};

struct Edge {
  ConceptId child;
  ConceptId parent;
  auto operator<=>(const Edge&) const = default;
};

// Raw hierarchy as loaded: may contain duplicates, cycles and self-loops.
struct EdgeList {
  Interner concepts;
  std::vector<Edge> edges;
};

// Reads `child<TAB>parent` lines. Blank lines and lines starting with '#' are
// skipped; anything else without exactly two fields is a ParseError.
EdgeList load_edges(const std::string& path);

EdgeList make_edge_list(std::span<const std::pair<std::string, std::string>> pairs);

// Acyclic hierarchy after cycle breaking.
//
// topo_order lists every concept with children before their parents.
class Taxonomy {
 public:
  Taxonomy() = default;

  static Taxonomy from_parts(Interner concepts, std::vector<Edge> dag_edges,
                             std::vector<Edge> removed_edges, std::size_t duplicate_edges,
                             std::vector<ConceptId> topo_order);

  const Interner& concepts() const { return concepts_; }
  std::size_t size() const { return concepts_.size(); }

  // Sorted by (child, parent) id.
  std::span<const Edge> dag_edges() const { return dag_edges_; }
  std::span<const Edge> removed_edges() const { return removed_edges_; }
  std::span<const ConceptId> topo_order() const { return topo_order_; }
  std::size_t duplicate_edges() const { return duplicate_edges_; }

  std::span<const ConceptId> parents(ConceptId c) const;

  // Adds a concept with no edges (lenient membership loading).
  ConceptId add_isolated(std::string_view iri);

 private:
  void rebuild_parents();

  Interner concepts_;
  std::vector<Edge> dag_edges_;
  std::vector<Edge> removed_edges_;
  std::size_t duplicate_edges_ = 0;
  std::vector<ConceptId> topo_order_;
  std::vector<std::uint64_t> parent_offsets_;
  std::vector<ConceptId> parent_ids_;
};

// Collapses duplicates, drops self-loops and removes the back edges of a
// depth-first search that follows child->parent edges. Start nodes are the
// concepts without children in ascending IRI order, then any still unvisited
// concept (only possible inside a cycle) in ascending IRI order; parents are
// visited in ascending IRI order.
Taxonomy break_cycles(const EdgeList& raw);

// Reflexive-transitive ancestor sets, one sorted id row per concept (CSR).
//
// Memory: 8 * (|C| + 1) + 4 * sum(|ancestors(c)|) bytes.
class ClosureIndex {
 public:
  ClosureIndex() = default;

  static ClosureIndex from_parts(std::vector<std::uint64_t> offsets,
                                 std::vector<ConceptId> entries);

  std::size_t size() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::span<const ConceptId> ancestors(ConceptId c) const;
  bool contains(ConceptId sub, ConceptId super) const;

  std::size_t total_entries() const { return entries_.size(); }
  std::size_t memory_bytes() const;
  static std::size_t predicted_memory_bytes(std::size_t concepts, std::size_t entries);

  void append_isolated();

  const std::vector<std::uint64_t>& offsets() const { return offsets_; }
  const std::vector<ConceptId>& entries() const { return entries_; }

 private:
  std::vector<std::uint64_t> offsets_;
  std::vector<ConceptId> entries_;
};

// Rows are built parents-first (reverse topo order) as the union of the
// parents' rows plus the concept itself. Throws InvariantError when the
// taxonomy's topo order is inconsistent with its edges.
ClosureIndex materialize_closure(const Taxonomy& t);

// True iff `super` is an ancestor of (or equal to) `sub`.
bool subsumes(const ClosureIndex& idx, ConceptId sub, ConceptId super);

}  // namespace dx
