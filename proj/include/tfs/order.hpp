#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "tfs/circuit.hpp"
#include "tfs/dsr.hpp"

namespace tfs {

// x ≺ y given by a circuit on 2n inputs (x first, MSB first).
struct LopInstance {
  size_t n = 0;
  Circuit prec;
};

BitString encode_lop(const LopInstance& inst);
LopInstance decode_lop(const BitString& bits);

enum class LopKind : uint8_t { Minimum = 0, Reflexive = 1, Incomparable = 2, Intransitive = 3 };

// Encoded as [kind:2][w1:n][w2:n][w3:n]; unused witnesses are zero.
struct LopSolution {
  LopKind kind = LopKind::Minimum;
  std::array<uint64_t, 3> w{0, 0, 0};

  friend bool operator==(const LopSolution&, const LopSolution&) = default;
};

size_t lop_solution_bits(size_t n);
BitString encode_lop_solution(size_t n, const LopSolution& s);
std::optional<LopSolution> decode_lop_solution(size_t n, const BitString& bits);

// Dense copy of ≺, row x holds the set {y : x ≺ y}.
class OrderTable {
 public:
  explicit OrderTable(const LopInstance& inst);
  size_t size() const { return size_; }
  bool less(uint64_t x, uint64_t y) const { return (rows_[x * words_ + y / 64] >> (y % 64)) & 1; }
  // Least z with y ≺ z and not x ≺ z.
  std::optional<uint64_t> first_gap(uint64_t x, uint64_t y) const;

 private:
  size_t size_ = 0;
  size_t words_ = 0;
  std::vector<uint64_t> rows_;
};

bool lop_less(const LopInstance& inst, uint64_t x, uint64_t y);
std::optional<LopSolution> lop_find_violation(const LopInstance& inst);
std::optional<LopSolution> lop_find_violation(const OrderTable& t);
bool lop_is_violation(const LopInstance& inst, const LopSolution& s);
bool lop_verify(const LopInstance& inst, const BitString& y);
// ≺ restricted to elements whose first bit is `bit`.
LopInstance lop_restrict(const LopInstance& inst, bool bit);
uint64_t lop_brute_minimum(const LopInstance& inst);

// x ≺ y iff rank[x] < rank[y].
LopInstance lop_from_ranks(size_t n, const std::vector<uint64_t>& rank);
LopInstance lop_random_order(size_t n, Rng& rng);

ProblemPtr lop_problem();
DsrPtr lop_dsr();
ProblemPtr lop_unique_problem();
DsrPtr lop_unique_dsr();

struct AvoidInstance {
  size_t n = 0;
  Circuit c;  // n inputs, n+1 outputs
};

BitString encode_avoid(const AvoidInstance& inst);
AvoidInstance decode_avoid(const BitString& bits);
bool avoid_verify(const AvoidInstance& inst, const BitString& y);
BitString avoid_brute(const AvoidInstance& inst);
ProblemPtr avoid_problem();

}  // namespace tfs
