#include "dx/taxonomy.hpp"

#include <algorithm>
#include <numeric>

#include "dx/error.hpp"
#include "dx/text.hpp"

namespace dx {

std::uint32_t Interner::intern(std::string_view name) {
  std::string key(name);
  auto it = ids_.find(key);
  if (it != ids_.end()) return it->second;
  const auto id = static_cast<std::uint32_t>(names_.size());
  names_.push_back(key);
  ids_.emplace(std::move(key), id);
  return id;
}

std::optional<std::uint32_t> Interner::find(std::string_view name) const {
  auto it = ids_.find(std::string(name));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

const std::string& Interner::name(std::uint32_t id) const {
  if (id >= names_.size()) throw LookupError("unknown id " + std::to_string(id));
  return names_[id];
}

std::uint32_t Interner::id(std::string_view name) const {
  auto found = find(name);
  if (!found) throw LookupError("unknown name '" + std::string(name) + "'");
  return *found;
}

EdgeList load_edges(const std::string& path) {
  EdgeList out;
  LineReader reader(path);
  std::string line;
  while (reader.next(line)) {
    if (trim(line).empty() || line.front() == '#') continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      throw ParseError(path, reader.line_number(),
                       "expected 'child<TAB>parent', got " + std::to_string(fields.size()) +
                           " field(s)");
    }
    const auto child = out.concepts.intern(fields[0]);
    const auto parent = out.concepts.intern(fields[1]);
    out.edges.push_back({child, parent});
  }
  return out;
}

EdgeList make_edge_list(std::span<const std::pair<std::string, std::string>> pairs) {
  EdgeList out;
  for (const auto& [child, parent] : pairs) {
    const auto c = out.concepts.intern(child);
    const auto p = out.concepts.intern(parent);
    out.edges.push_back({c, p});
  }
  return out;
}

Taxonomy Taxonomy::from_parts(Interner concepts, std::vector<Edge> dag_edges,
                              std::vector<Edge> removed_edges, std::size_t duplicate_edges,
                              std::vector<ConceptId> topo_order) {
  Taxonomy t;
  t.concepts_ = std::move(concepts);
  t.dag_edges_ = std::move(dag_edges);
  t.removed_edges_ = std::move(removed_edges);
  t.duplicate_edges_ = duplicate_edges;
  t.topo_order_ = std::move(topo_order);
  const auto n = t.concepts_.size();
  for (const auto& e : t.dag_edges_) {
    if (e.child >= n || e.parent >= n) throw InvariantError("edge references unknown concept");
  }
  if (t.topo_order_.size() != n) throw InvariantError("topological order does not cover all concepts");
  std::sort(t.dag_edges_.begin(), t.dag_edges_.end());
  std::sort(t.removed_edges_.begin(), t.removed_edges_.end());
  t.rebuild_parents();
  return t;
}

void Taxonomy::rebuild_parents() {
  parent_offsets_.assign(concepts_.size() + 1, 0);
  for (const auto& e : dag_edges_) ++parent_offsets_[e.child + 1];
  std::partial_sum(parent_offsets_.begin(), parent_offsets_.end(), parent_offsets_.begin());
  parent_ids_.resize(dag_edges_.size());
  // dag_edges_ is sorted by child, so parents land in order.
  for (std::size_t i = 0; i < dag_edges_.size(); ++i) parent_ids_[i] = dag_edges_[i].parent;
}

std::span<const ConceptId> Taxonomy::parents(ConceptId c) const {
  if (c >= concepts_.size()) throw LookupError("unknown concept id " + std::to_string(c));
  return {parent_ids_.data() + parent_offsets_[c], parent_ids_.data() + parent_offsets_[c + 1]};
}

ConceptId Taxonomy::add_isolated(std::string_view iri) {
  if (auto existing = concepts_.find(iri)) return *existing;
  const auto id = concepts_.intern(iri);
  topo_order_.push_back(id);
  parent_offsets_.push_back(parent_offsets_.empty() ? 0 : parent_offsets_.back());
  if (parent_offsets_.size() == 1) parent_offsets_.push_back(0);
  return id;
}

Taxonomy break_cycles(const EdgeList& raw) {
  const auto n = raw.concepts.size();
  std::vector<Edge> unique = raw.edges;
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  const std::size_t duplicates = raw.edges.size() - unique.size();

  std::vector<Edge> removed;
  std::vector<Edge> candidates;
  candidates.reserve(unique.size());
  for (const auto& e : unique) {
    if (e.child == e.parent) {
      removed.push_back(e);
    } else {
      candidates.push_back(e);
    }
  }

  // Rank of each concept in lexicographic IRI order.
  std::vector<ConceptId> by_name(n);
  std::iota(by_name.begin(), by_name.end(), 0);
  const auto& names = raw.concepts.names();
  std::sort(by_name.begin(), by_name.end(),
            [&](ConceptId a, ConceptId b) { return names[a] < names[b]; });
  std::vector<std::uint32_t> rank(n);
  for (std::size_t r = 0; r < n; ++r) rank[by_name[r]] = static_cast<std::uint32_t>(r);

  std::vector<std::uint64_t> offsets(n + 1, 0);
  std::vector<std::uint32_t> child_count(n, 0);
  for (const auto& e : candidates) {
    ++offsets[e.child + 1];
    ++child_count[e.parent];
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  std::vector<ConceptId> out(candidates.size());
  {
    std::vector<std::uint64_t> fill(offsets.begin(), offsets.end() - 1);
    for (const auto& e : candidates) out[fill[e.child]++] = e.parent;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::sort(out.begin() + static_cast<std::ptrdiff_t>(offsets[c]),
              out.begin() + static_cast<std::ptrdiff_t>(offsets[c + 1]),
              [&](ConceptId a, ConceptId b) { return rank[a] < rank[b]; });
  }

  enum : std::uint8_t { kWhite, kGray, kBlack };
  std::vector<std::uint8_t> color(n, kWhite);
  std::vector<ConceptId> postorder;
  postorder.reserve(n);
  std::vector<Edge> back_edges;
  std::vector<std::pair<ConceptId, std::uint64_t>> stack;

  const auto dfs = [&](ConceptId start) {
    color[start] = kGray;
    stack.emplace_back(start, offsets[start]);
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      if (next == offsets[node + 1]) {
        color[node] = kBlack;
        postorder.push_back(node);
        stack.pop_back();
        continue;
      }
      const ConceptId parent = out[next++];
      if (color[parent] == kGray) {
        back_edges.push_back({node, parent});
      } else if (color[parent] == kWhite) {
        color[parent] = kGray;
        stack.emplace_back(parent, offsets[parent]);
      }
    }
  };

  for (ConceptId c : by_name) {
    if (child_count[c] == 0 && color[c] == kWhite) dfs(c);
  }
  for (ConceptId c : by_name) {
    if (color[c] == kWhite) dfs(c);
  }

  std::sort(back_edges.begin(), back_edges.end());
  std::vector<Edge> dag;
  dag.reserve(candidates.size() - back_edges.size());
  std::set_difference(candidates.begin(), candidates.end(), back_edges.begin(), back_edges.end(),
                      std::back_inserter(dag));
  removed.insert(removed.end(), back_edges.begin(), back_edges.end());

  std::vector<ConceptId> topo(postorder.rbegin(), postorder.rend());
  return Taxonomy::from_parts(raw.concepts, std::move(dag), std::move(removed), duplicates,
                              std::move(topo));
}

ClosureIndex ClosureIndex::from_parts(std::vector<std::uint64_t> offsets,
                                      std::vector<ConceptId> entries) {
  if (offsets.empty() || offsets.front() != 0 || offsets.back() != entries.size() ||
      !std::is_sorted(offsets.begin(), offsets.end())) {
    throw InvariantError("closure offsets are inconsistent");
  }
  ClosureIndex idx;
  idx.offsets_ = std::move(offsets);
  idx.entries_ = std::move(entries);
  return idx;
}

std::span<const ConceptId> ClosureIndex::ancestors(ConceptId c) const {
  if (c >= size()) throw LookupError("unknown concept id " + std::to_string(c));
  return {entries_.data() + offsets_[c], entries_.data() + offsets_[c + 1]};
}

bool ClosureIndex::contains(ConceptId sub, ConceptId super) const {
  if (super >= size()) throw LookupError("unknown concept id " + std::to_string(super));
  const auto row = ancestors(sub);
  return std::binary_search(row.begin(), row.end(), super);
}

std::size_t ClosureIndex::memory_bytes() const {
  return offsets_.capacity() * sizeof(std::uint64_t) + entries_.capacity() * sizeof(ConceptId);
}

std::size_t ClosureIndex::predicted_memory_bytes(std::size_t concepts, std::size_t entries) {
  return (concepts + 1) * sizeof(std::uint64_t) + entries * sizeof(ConceptId);
}

void ClosureIndex::append_isolated() {
  if (offsets_.empty()) offsets_.push_back(0);
  const auto id = static_cast<ConceptId>(size());
  entries_.push_back(id);
  offsets_.push_back(entries_.size());
}

ClosureIndex materialize_closure(const Taxonomy& t) {
  const auto n = t.size();
  const auto topo = t.topo_order();
  if (topo.size() != n) throw InvariantError("topological order does not cover all concepts");

  // Rows are produced in processing order, then compacted into id order.
  std::vector<std::uint64_t> row_start(n), row_len(n);
  std::vector<ConceptId> scratch;
  std::vector<std::uint8_t> done(n, 0);
  std::vector<ConceptId> stamp(n, static_cast<ConceptId>(-1));
  std::vector<ConceptId> row;

  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    const ConceptId c = *it;
    if (c >= n || done[c]) throw InvariantError("topological order is not a permutation");
    row.clear();
    row.push_back(c);
    stamp[c] = c;
    for (ConceptId p : t.parents(c)) {
      if (!done[p]) {
        throw InvariantError("cycle or order violation: parent '" + t.concepts().name(p) +
                             "' of '" + t.concepts().name(c) + "' not yet closed");
      }
      for (std::uint64_t k = row_start[p]; k < row_start[p] + row_len[p]; ++k) {
        const ConceptId a = scratch[k];
        if (stamp[a] != c) {
          stamp[a] = c;
          row.push_back(a);
        }
      }
    }
    std::sort(row.begin(), row.end());
    row_start[c] = scratch.size();
    row_len[c] = row.size();
    scratch.insert(scratch.end(), row.begin(), row.end());
    done[c] = 1;
  }

  std::vector<std::uint64_t> offsets(n + 1, 0);
  for (std::size_t c = 0; c < n; ++c) offsets[c + 1] = offsets[c] + row_len[c];
  std::vector<ConceptId> entries(scratch.size());
  for (std::size_t c = 0; c < n; ++c) {
    std::copy_n(scratch.begin() + static_cast<std::ptrdiff_t>(row_start[c]), row_len[c],
                entries.begin() + static_cast<std::ptrdiff_t>(offsets[c]));
  }
  return ClosureIndex::from_parts(std::move(offsets), std::move(entries));
}

bool subsumes(const ClosureIndex& idx, ConceptId sub, ConceptId super) {
  return idx.contains(sub, super);
}

}  // namespace dx
