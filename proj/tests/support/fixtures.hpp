#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dx/induction.hpp"
#include "dx/membership.hpp"
#include "dx/taxonomy.hpp"

namespace dxt {

using Pairs = std::vector<std::pair<std::string, std::string>>;

// Zero-padded concept name so lexicographic and numeric order agree.
std::string concept_name(std::size_t i);
std::string individual_name(std::size_t i);

// Random DAG over n concepts: each concept gets up to max_parents parents
// with larger index. Optional extra edges point downwards and may close
// cycles; self-loops and duplicates are sprinkled in when `dirty`.
Pairs random_dag(std::size_t n, std::size_t max_parents, std::uint64_t seed, bool dirty = false);

// Reflexive reachability by BFS over child->parent edges (by name).
std::map<std::string, std::set<std::string>> bfs_ancestors(const Pairs& edges);

// Kahn's algorithm; true when the edges admit a topological order.
bool topologically_sortable(std::size_t nodes, std::span<const dx::Edge> edges);

struct World {
  dx::Taxonomy taxonomy;
  dx::ClosureIndex closure;
  dx::MembershipIndex index;
};

// individual name -> direct concept names
using Assertions = std::vector<std::pair<std::string, std::vector<std::string>>>;

World make_world(const Pairs& edges, const Assertions& assertions);

struct RandomWorld {
  World world;
  Pairs edges;
  Assertions assertions;
};

RandomWorld random_world(std::size_t concepts, std::size_t individuals, std::uint64_t seed,
                         std::size_t max_direct = 3);

// Random example split of the individuals of a world (both sides nonempty).
dx::ExampleSets random_examples(const World& w, std::size_t p, std::size_t n, std::uint64_t seed);

// Two-branch hierarchy where positives sit under one subtree and negatives
// under another, with a shared root and shared noise concepts.
struct Separable {
  World world;
  std::vector<std::string> positives;
  std::vector<std::string> negatives;
};
Separable separable_fixture(std::size_t per_side, std::uint64_t seed);

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }
  std::string write(const std::string& name, const std::string& contents) const;

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::string& path);

}  // namespace dxt
