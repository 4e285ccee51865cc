#pragma once

#include <string>

#include "dx/membership.hpp"
#include "dx/taxonomy.hpp"

namespace dx {

// Everything `explain` needs, as written by `build-index`.
struct KnowledgeIndex {
  Taxonomy taxonomy;
  ClosureIndex closure;
  MembershipIndex memberships;
};

// Binary layout (little-endian):
//   "DXTX1"                      magic; the trailing digit is the version
//   u64 concept count, u64 dag edge count
//   concept intern table         u32 length + bytes, in id order
//   dag edges                    (u32 child, u32 parent) sorted
//   u64 n + removed edges, u64 duplicate edge count
//   topo order                   u32 per concept, children first
//   closure rows                 u64 offsets[concepts + 1], u32 entries
//   u64 individual count, individual intern table
//   direct rows, inferred rows   same row encoding as the closure
//   u64 duplicate membership rows
//   "END1"
inline constexpr char kIndexMagic[] = "DXTX";
inline constexpr char kIndexVersion = '1';

void save_index(const KnowledgeIndex& index, const std::string& path);
// Throws IndexFormatError on wrong magic, version mismatch or truncation.
KnowledgeIndex load_index(const std::string& path);

}  // namespace dx
