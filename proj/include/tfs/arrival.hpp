#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "json.hpp"
#include "tfs/dsr.hpp"

namespace tfs {

struct SwitchGraph {
  size_t n = 0;
  std::vector<uint32_t> s0, s1;
};

// Switch graph on vertices 0..n where n is the added sink d̄. Vertices that
// cannot reach d point both switches at d̄; d and d̄ carry self-loops.
struct SArrivalInstance {
  size_t n = 0;
  uint32_t o = 0, d = 0;
  std::vector<uint32_t> s0, s1;

  uint32_t dbar() const { return static_cast<uint32_t>(n); }
  uint32_t succ(size_t v, int slot) const { return slot ? s1[v] : s0[v]; }
};

// Traversal counts per (vertex, switch slot) over vertices 0..n.
struct RunProfile {
  size_t n = 0;
  std::vector<uint64_t> counts;

  RunProfile() = default;
  explicit RunProfile(size_t n_base) : n(n_base), counts(2 * (n_base + 1), 0) {}
  uint64_t& at(size_t v, int slot) { return counts[2 * v + slot]; }
  uint64_t at(size_t v, int slot) const { return counts[2 * v + slot]; }
  uint64_t out(size_t v) const { return at(v, 0) + at(v, 1); }
  friend bool operator==(const RunProfile&, const RunProfile&) = default;
};

// n·2^n, saturated
uint64_t run_length_bound(size_t n);

std::pair<RunProfile, uint32_t> run_simulation(const SArrivalInstance& inst, uint64_t step_cap);
std::pair<RunProfile, uint32_t> run_simulation(const SArrivalInstance& inst);

// flags for vertices of g with no path to d
std::vector<uint8_t> compute_vbad(const SwitchGraph& g, uint32_t d);
SArrivalInstance build_instance(const SwitchGraph& g, uint32_t o, uint32_t d);
// invariants of a built instance
bool is_sarrival_instance(const SArrivalInstance& inst);

std::vector<uint64_t> profile_in_counts(const SArrivalInstance& inst, const RunProfile& r);
uint32_t profile_end(const SArrivalInstance& inst, const RunProfile& r);
bool profile_valid(const SArrivalInstance& inst, const RunProfile& r);

BitString encode_sarrival(const SArrivalInstance& inst);
SArrivalInstance decode_sarrival(const BitString& bits);
BitString encode_profile(const RunProfile& r);
RunProfile decode_profile(const BitString& bits);

SArrivalInstance sarrival_random(size_t n, Rng& rng);

nlohmann::json sarrival_to_json(const SArrivalInstance& inst);
SArrivalInstance sarrival_from_json(const nlohmann::json& j);
nlohmann::json profile_to_json(const SArrivalInstance& inst, const RunProfile& r);

ProblemPtr sarrival_problem();
DsrPtr sarrival_dsr();

}  // namespace tfs
