#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "json.hpp"
#include "tfs/circuit.hpp"
#include "tfs/dsr.hpp"
#include "tfs/local_search.hpp"

namespace tfs {

class VertexSet {
 public:
  VertexSet() = default;
  explicit VertexSet(size_t n, bool full = false);

  size_t universe() const { return n_; }
  bool test(size_t v) const { return (w_[v / 64] >> (v % 64)) & 1; }
  void set(size_t v, bool on = true);
  size_t count() const;
  bool empty() const { return count() == 0; }
  // k-th member in increasing order.
  size_t nth(size_t k) const;
  bool subset_of(const VertexSet& o) const;
  std::vector<size_t> members() const;

  VertexSet& operator|=(const VertexSet& o);
  VertexSet& operator&=(const VertexSet& o);
  VertexSet operator~() const;
  friend bool operator==(const VertexSet&, const VertexSet&) = default;

  std::vector<uint64_t>& words() { return w_; }
  const std::vector<uint64_t>& words() const { return w_; }

 private:
  void trim();
  size_t n_ = 0;
  std::vector<uint64_t> w_;
};

// Explicit adjacency over vertices 0..N-1. Entries need not form a valid
// tournament; check_tournament reports the first defect.
class Tournament {
 public:
  explicit Tournament(size_t n_vertices = 0);

  size_t size() const { return out_.size(); }
  bool edge(size_t u, size_t v) const { return out_[u].test(v); }
  void set_edge(size_t u, size_t v, bool on = true);
  const VertexSet& out(size_t u) const { return out_[u]; }
  const VertexSet& in(size_t v) const { return in_[v]; }
  // Vertices reachable from u by a path of length 1 or 2 (memoized).
  const VertexSet& reach2(size_t u) const;

  static Tournament random(size_t n_vertices, Rng& rng);
  // u → v iff u < v
  static Tournament transitive(size_t n_vertices);
  // index-th tournament on n vertices, one bit per pair u<v (set: u → v)
  static Tournament from_index(size_t n_vertices, uint64_t index);
  static Tournament from_circuit(const Circuit& c);

  nlohmann::json to_json() const;
  static Tournament from_json(const nlohmann::json& j);

 private:
  std::vector<VertexSet> out_, in_;
  mutable std::vector<std::optional<VertexSet>> reach2_;
  mutable bool reach2_cached_ = false;
};

struct KingStats {
  uint64_t extend_calls = 0;
  uint64_t edge_probes = 0;
  uint64_t path_queries = 0;
  uint64_t iterations = 0;
};

std::optional<std::pair<size_t, size_t>> check_tournament(const Tournament& t);
bool is_weak_king(const Tournament& t, const VertexSet& U, size_t v);
bool is_king(const Tournament& t, size_t v);
size_t king_extend(const Tournament& t, size_t u, size_t v, KingStats* stats = nullptr);
size_t king_linear(const Tournament& t, KingStats* stats = nullptr);
VertexSet witness_set(const Tournament& t, size_t u);
size_t king_randomized(const Tournament& t, Rng& rng, uint64_t max_iters, KingStats* stats = nullptr);

// Successor/potential pair whose sinks carry kings; vertex (i, x) is
// encoded as i then x, each bits_for(N-1) wide.
struct KingSod {
  SinkOfDagInstance instance;
  BitString source;
  size_t coord_bits = 0;
  BitString encode(uint64_t i, uint64_t x) const;
  std::pair<uint64_t, uint64_t> decode(const BitString& v) const;
};

KingSod king_to_sod(const Tournament& t);
size_t king_from_sod_answer(const KingSod& sod, const BitString& answer);
size_t king_pls(const Tournament& t, KingStats* stats = nullptr);

// Instance [N:16][row-major matrix]; solution [kind:1][a:b][c:b] with
// b = bits_for(N-1): kind 0 names a king a, kind 1 a defective pair (a, c).
BitString encode_tournament(const Tournament& t);
Tournament decode_tournament(const BitString& bits);
ProblemPtr king_problem();

}  // namespace tfs
