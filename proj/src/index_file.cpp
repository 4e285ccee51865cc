#include "dx/index_file.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "dx/error.hpp"

namespace dx {

static_assert(std::endian::native == std::endian::little,
              "index files are written in host order, which must be little-endian");

namespace {

constexpr char kTrailer[] = "END1";

class Writer {
 public:
  explicit Writer(const std::string& path) : out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw Error("cannot write " + path);
  }

  void bytes(const void* data, std::size_t n) {
    out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  }
  void u64(std::uint64_t v) { bytes(&v, sizeof v); }
  template <typename T>
  void array(const std::vector<T>& v) {
    if (!v.empty()) bytes(v.data(), v.size() * sizeof(T));
  }
  void names(const Interner& table) {
    for (const auto& s : table.names()) {
      const auto len = static_cast<std::uint32_t>(s.size());
      bytes(&len, sizeof len);
      bytes(s.data(), s.size());
    }
  }
  void edges(const std::span<const Edge> es) {
    for (const auto& e : es) {
      bytes(&e.child, sizeof e.child);
      bytes(&e.parent, sizeof e.parent);
    }
  }
  template <typename T>
  void rows(const std::vector<std::uint64_t>& offsets, const std::vector<T>& entries) {
    array(offsets);
    array(entries);
  }
  void finish() {
    out_.flush();
    if (!out_) throw Error("write failed");
  }

 private:
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : in_(path, std::ios::binary), path_(path) {
    if (!in_) throw Error("cannot open " + path);
    in_.seekg(0, std::ios::end);
    size_ = static_cast<std::uint64_t>(in_.tellg());
    in_.seekg(0);
  }

  void bytes(void* data, std::size_t n) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      throw IndexFormatError(path_ + ": truncated index file");
    }
    pos_ += n;
  }
  std::uint64_t u64() {
    std::uint64_t v;
    bytes(&v, sizeof v);
    return v;
  }
  template <typename T>
  std::vector<T> array(std::uint64_t n) {
    check_count(n, sizeof(T));
    std::vector<T> v(n);
    if (n) bytes(v.data(), n * sizeof(T));
    return v;
  }
  Interner names(std::uint64_t n) {
    Interner table;
    std::string s;
    for (std::uint64_t i = 0; i < n; ++i) {
      std::uint32_t len;
      bytes(&len, sizeof len);
      check_count(len, 1);
      s.resize(len);
      if (len) bytes(s.data(), len);
      if (table.intern(s) != i) throw IndexFormatError(path_ + ": duplicate name in intern table");
    }
    return table;
  }
  std::vector<Edge> edges(std::uint64_t n) {
    check_count(n, 2 * sizeof(ConceptId));
    std::vector<Edge> out(n);
    for (auto& e : out) {
      bytes(&e.child, sizeof e.child);
      bytes(&e.parent, sizeof e.parent);
    }
    return out;
  }
  std::pair<std::vector<std::uint64_t>, std::vector<ConceptId>> rows(std::uint64_t count) {
    auto offsets = array<std::uint64_t>(count + 1);
    if (offsets.empty() || offsets.front() != 0) throw IndexFormatError(path_ + ": bad row offsets");
    auto entries = array<ConceptId>(offsets.back());
    return {std::move(offsets), std::move(entries)};
  }

 private:
  // Guards against allocating absurd sizes from a corrupt header.
  void check_count(std::uint64_t n, std::size_t elem) {
    if (n > (size_ - pos_) / elem) {
      throw IndexFormatError(path_ + ": truncated index file");
    }
  }

  std::ifstream in_;
  std::string path_;
  std::uint64_t size_ = 0;
  std::uint64_t pos_ = 0;
};

}  // namespace

void save_index(const KnowledgeIndex& index, const std::string& path) {
  const auto& t = index.taxonomy;
  Writer w(path);
  w.bytes(kIndexMagic, 4);
  w.bytes(&kIndexVersion, 1);
  w.u64(t.size());
  w.u64(t.dag_edges().size());
  w.names(t.concepts());
  w.edges(t.dag_edges());
  w.u64(t.removed_edges().size());
  w.edges(t.removed_edges());
  w.u64(t.duplicate_edges());
  const std::vector<ConceptId> topo(t.topo_order().begin(), t.topo_order().end());
  w.array(topo);
  w.rows(index.closure.offsets(), index.closure.entries());

  const auto& m = index.memberships;
  w.u64(m.size());
  w.names(m.individuals());
  w.rows(m.direct_rows().offsets(), m.direct_rows().entries());
  w.rows(m.inferred_rows().offsets(), m.inferred_rows().entries());
  w.u64(m.duplicate_rows());
  w.bytes(kTrailer, 4);
  w.finish();
}

KnowledgeIndex load_index(const std::string& path) {
  Reader r(path);
  char magic[5];
  try {
    r.bytes(magic, 5);
  } catch (const IndexFormatError&) {
    throw IndexFormatError(path + ": not an index file");
  }
  if (std::memcmp(magic, kIndexMagic, 4) != 0) throw IndexFormatError(path + ": not an index file");
  if (magic[4] != kIndexVersion) {
    throw IndexFormatError(path + ": unsupported index version '" + std::string(1, magic[4]) +
                           "' (expected '" + std::string(1, kIndexVersion) + "')");
  }
  const auto concepts = r.u64();
  const auto dag_count = r.u64();
  auto names = r.names(concepts);
  auto dag = r.edges(dag_count);
  const auto removed_count = r.u64();
  auto removed = r.edges(removed_count);
  const auto duplicates = r.u64();
  auto topo = r.array<ConceptId>(concepts);
  auto [c_off, c_ent] = r.rows(concepts);

  const auto individuals = r.u64();
  auto ind_names = r.names(individuals);
  auto [d_off, d_ent] = r.rows(individuals);
  auto [i_off, i_ent] = r.rows(individuals);
  const auto dup_rows = r.u64();
  char trailer[4];
  r.bytes(trailer, 4);
  if (std::memcmp(trailer, kTrailer, 4) != 0) throw IndexFormatError(path + ": bad trailer");

  for (const auto* rows : {&c_ent, &d_ent, &i_ent}) {
    for (auto c : *rows) {
      if (c >= concepts) throw IndexFormatError(path + ": concept id out of range");
    }
  }

  KnowledgeIndex out;
  try {
    out.taxonomy = Taxonomy::from_parts(std::move(names), std::move(dag), std::move(removed),
                                        duplicates, std::move(topo));
    out.closure = ClosureIndex::from_parts(std::move(c_off), std::move(c_ent));
    auto m = MembershipIndex::from_parts(
        std::move(ind_names), Csr<ConceptId>::from_parts(std::move(d_off), std::move(d_ent)),
        Csr<ConceptId>::from_parts(std::move(i_off), std::move(i_ent)), dup_rows);
    out.memberships = std::move(m);
  } catch (const InvariantError& e) {
    throw IndexFormatError(path + ": " + e.what());
  }
  return out;
}

}  // namespace dx
