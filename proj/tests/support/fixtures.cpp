#include "fixtures.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <fstream>
#include <sstream>

#include "dx/error.hpp"

namespace dxt {

std::string concept_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "c%06zu", i);
  return buf;
}

std::string individual_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "i%06zu", i);
  return buf;
}

Pairs random_dag(std::size_t n, std::size_t max_parents, std::uint64_t seed, bool dirty) {
  std::mt19937_64 gen(seed);
  Pairs out;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const std::size_t k = std::uniform_int_distribution<std::size_t>(0, max_parents)(gen);
    for (std::size_t j = 0; j < k; ++j) {
      const auto p = std::uniform_int_distribution<std::size_t>(i + 1, n - 1)(gen);
      out.emplace_back(concept_name(i), concept_name(p));
    }
  }
  if (dirty && n > 1) {
    for (std::size_t j = 0; j < n / 10 + 1; ++j) {
      const auto a = std::uniform_int_distribution<std::size_t>(1, n - 1)(gen);
      const auto b = std::uniform_int_distribution<std::size_t>(0, a - 1)(gen);
      out.emplace_back(concept_name(a), concept_name(b));  // may close a cycle
    }
    for (std::size_t j = 0; j < n / 50 + 1; ++j) {
      const auto a = std::uniform_int_distribution<std::size_t>(0, n - 1)(gen);
      out.emplace_back(concept_name(a), concept_name(a));
    }
    const auto copies = out.size() / 20;
    for (std::size_t j = 0; j < copies; ++j) {
      out.push_back(out[std::uniform_int_distribution<std::size_t>(0, out.size() - 1)(gen)]);
    }
    std::shuffle(out.begin(), out.end(), gen);
  }
  return out;
}

std::map<std::string, std::set<std::string>> bfs_ancestors(const Pairs& edges) {
  std::map<std::string, std::vector<std::string>> parents;
  for (const auto& [c, p] : edges) {
    parents[c].push_back(p);
    parents[p];
  }
  std::map<std::string, std::set<std::string>> out;
  for (const auto& [start, _] : parents) {
    auto& seen = out[start];
    std::deque<std::string> queue{start};
    seen.insert(start);
    while (!queue.empty()) {
      const auto cur = queue.front();
      queue.pop_front();
      for (const auto& p : parents[cur]) {
        if (seen.insert(p).second) queue.push_back(p);
      }
    }
  }
  return out;
}

bool topologically_sortable(std::size_t nodes, std::span<const dx::Edge> edges) {
  std::vector<std::size_t> indegree(nodes, 0);
  std::vector<std::vector<std::size_t>> out(nodes);
  for (const auto& e : edges) {
    out[e.child].push_back(e.parent);
    ++indegree[e.parent];
  }
  std::vector<std::size_t> ready;
  for (std::size_t i = 0; i < nodes; ++i) {
    if (indegree[i] == 0) ready.push_back(i);
  }
  std::size_t done = 0;
  while (!ready.empty()) {
    const auto v = ready.back();
    ready.pop_back();
    ++done;
    for (auto w : out[v]) {
      if (--indegree[w] == 0) ready.push_back(w);
    }
  }
  return done == nodes;
}

World make_world(const Pairs& edges, const Assertions& assertions) {
  World w;
  w.taxonomy = dx::break_cycles(dx::make_edge_list(edges));
  for (const auto& [_, concepts] : assertions) {
    for (const auto& c : concepts) {
      if (!w.taxonomy.concepts().find(c)) w.taxonomy.add_isolated(c);
    }
  }
  w.closure = dx::materialize_closure(w.taxonomy);
  dx::Interner individuals;
  std::vector<std::vector<dx::ConceptId>> direct;
  for (const auto& [name, concepts] : assertions) {
    const auto id = individuals.intern(name);
    if (id >= direct.size()) direct.resize(id + 1);
    for (const auto& c : concepts) direct[id].push_back(w.taxonomy.concepts().id(c));
  }
  w.index = dx::MembershipIndex::build(std::move(individuals), direct, w.closure);
  return w;
}

RandomWorld random_world(std::size_t concepts, std::size_t individuals, std::uint64_t seed,
                         std::size_t max_direct) {
  RandomWorld r;
  std::mt19937_64 gen(seed ^ 0x5eedULL);
  r.edges = random_dag(concepts, 2, seed);
  for (std::size_t i = 0; i < individuals; ++i) {
    std::vector<std::string> direct;
    const auto k = std::uniform_int_distribution<std::size_t>(1, max_direct)(gen);
    for (std::size_t j = 0; j < k; ++j) {
      direct.push_back(concept_name(std::uniform_int_distribution<std::size_t>(0, concepts - 1)(gen)));
    }
    r.assertions.emplace_back(individual_name(i), std::move(direct));
  }
  r.world = make_world(r.edges, r.assertions);
  return r;
}

dx::ExampleSets random_examples(const World& w, std::size_t p, std::size_t n, std::uint64_t seed) {
  std::vector<dx::IndividualId> ids(w.index.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<dx::IndividualId>(i);
  std::mt19937_64 gen(seed);
  std::shuffle(ids.begin(), ids.end(), gen);
  p = std::min(p, ids.size() - 1);
  n = std::min(n, ids.size() - p);
  return dx::ExampleSets::make({ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(p)},
                               {ids.begin() + static_cast<std::ptrdiff_t>(p),
                                ids.begin() + static_cast<std::ptrdiff_t>(p + n)});
}

Separable separable_fixture(std::size_t per_side, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  Pairs edges = {
      {"Kitchen", "Room"},      {"Bathroom", "Room"},     {"Room", "Place"},
      {"Forest", "Landscape"},  {"Beach", "Landscape"},   {"Landscape", "Place"},
      {"Place", "Thing"},       {"Chair", "Furniture"},   {"Table", "Furniture"},
      {"Furniture", "Object"},  {"Tree", "Plant"},        {"Plant", "Object"},
      {"Object", "Thing"},      {"Lamp", "Object"},       {"Window", "Object"},
  };
  const std::vector<std::string> indoor = {"Kitchen", "Bathroom", "Chair", "Table"};
  const std::vector<std::string> outdoor = {"Forest", "Beach", "Tree"};
  const std::vector<std::string> noise = {"Lamp", "Window"};
  Assertions a;
  Separable s;
  auto pick = [&](const std::vector<std::string>& from) {
    return from[std::uniform_int_distribution<std::size_t>(0, from.size() - 1)(gen)];
  };
  for (std::size_t i = 0; i < per_side; ++i) {
    const auto name = "pos" + std::to_string(i);
    a.emplace_back(name, std::vector<std::string>{pick(indoor), pick(indoor), pick(noise)});
    s.positives.push_back(name);
  }
  for (std::size_t i = 0; i < per_side; ++i) {
    const auto name = "neg" + std::to_string(i);
    a.emplace_back(name, std::vector<std::string>{pick(outdoor), pick(outdoor), pick(noise)});
    s.negatives.push_back(name);
  }
  s.world = make_world(edges, a);
  return s;
}

TempDir::TempDir() {
  static std::uint64_t counter = 0;
  std::random_device rd;
  path_ = std::filesystem::temp_directory_path() /
          ("dxtest-" + std::to_string(rd()) + "-" + std::to_string(counter++));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string TempDir::write(const std::string& name, const std::string& contents) const {
  const auto p = file(name);
  std::ofstream out(p, std::ios::binary);
  out << contents;
  return p;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw dx::Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace dxt
