#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "json.hpp"
#include "tfs/bitstring.hpp"

namespace tfs {

struct SinkOfDagInstance {
  size_t vertex_bits = 0;
  std::function<BitString(const BitString&)> S;
  std::function<uint64_t(const BitString&)> V;
};

struct SovlInstance {
  SinkOfDagInstance sod;
  BitString source;
  uint64_t target = 0;
  std::function<bool(const BitString&, uint64_t)> W;
};

struct SodAnswer {
  BitString vertex;
  // Successor edges walked from the start up to and including the edge out
  // of `vertex`.
  uint64_t steps = 0;
};

SodAnswer solve_sod_pathfollow(const SinkOfDagInstance& inst, const BitString& start, uint64_t max_steps,
                               std::vector<uint64_t>* potentials = nullptr);
SodAnswer solve_sod_scan(const SinkOfDagInstance& inst);
bool verify_sod_solution(const SinkOfDagInstance& inst, const BitString& v);
bool verify_sovl_solution(const SovlInstance& inst, const BitString& v);

// Explicit Sink-of-DAG instance given by truth tables of S and V.
struct ToySod {
  size_t vertex_bits = 0;
  size_t value_bits = 0;
  std::vector<uint64_t> S;
  std::vector<uint64_t> V;

  SinkOfDagInstance instance() const;
  // Bit layout: vertex_bits (8), value_bits (8), S table, V table.
  BitString encode() const;
  static ToySod decode(const BitString& bits);
  nlohmann::json to_json() const;
  static ToySod from_json(const nlohmann::json& j);
};

struct RssConfig {
  // Admissible lengths are 2^(exponent_scale * 2^k).
  uint64_t exponent_scale = 1;
};

bool rss_admissible_length(uint64_t length, const RssConfig& cfg = {});
bool rss_verify(const BitString& x, const BitString& y, const RssConfig& cfg = {});
BitString reduce_sod_to_rss(const BitString& xprime, const RssConfig& cfg = {});

}  // namespace tfs
