#include "shardsim/assignment.hpp"

#include <algorithm>

namespace shardsim::assignment {

Rid compute_rid(const Digest& digest, const Hash32& c_hash, const NodeId& id) {
  ByteWriter w;
  w.bytes(c_hash);
  w.bytes(id.bytes());
  return Rid{digest(w.view())};
}

membership::MemberMatrix reassign(const Digest& digest, const membership::MemberMatrix& matrix,
                                  const Hash32& c_hash) {
  std::vector<std::vector<membership::NodeRecord>> classes;
  classes.reserve(matrix.class_count());
  for (const auto& cls : matrix.classes()) {
    std::vector<std::pair<Rid, membership::NodeRecord>> ranked;
    ranked.reserve(cls.size());
    for (const auto& r : cls) ranked.emplace_back(compute_rid(digest, c_hash, r.id), r);
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first < b.first;
      return a.second.id < b.second.id;
    });
    std::vector<membership::NodeRecord> out;
    out.reserve(ranked.size());
    for (auto& [rid, rec] : ranked) out.push_back(std::move(rec));
    classes.push_back(std::move(out));
  }
  return membership::MemberMatrix(std::move(classes));
}

Hash32 reshuffle_seed(const Digest& digest, const Hash32& c_hash, std::uint64_t k) {
  if (k == 0) return c_hash;
  ByteWriter w;
  w.bytes(c_hash);
  w.u64(k);
  return digest(w.view());
}

}  // namespace shardsim::assignment
