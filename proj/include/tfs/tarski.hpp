#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "json.hpp"
#include "tfs/circuit.hpp"
#include "tfs/dsr.hpp"

namespace tfs {

using Point = std::vector<uint32_t>;  // coordinates in 1..N

// C : [N]^d -> [N]^d as an explicit table, N = 2^n.
struct TarskiFunction {
  size_t n = 0;
  size_t d = 1;
  std::vector<uint32_t> table;  // N^d rows of d values, row index is mixed radix of x-1

  uint64_t N() const { return uint64_t{1} << n; }
  uint64_t points() const;
  uint64_t index(const Point& x) const;
  Point point(uint64_t index) const;
  Point eval(const Point& x) const;

  static TarskiFunction from_circuit(const Circuit& c, size_t n, size_t d);
  nlohmann::json to_json() const;
  static TarskiFunction from_json(const nlohmann::json& j);
};

// Sub-problem on L(lo, hi) over coordinates 1..t-1 with coordinates t..d
// frozen to `fixed`; f is the first t-1 outputs of C.
struct TarskiPlusInstance {
  TarskiFunction c;
  size_t t = 2;
  Point lo, hi, fixed;

  uint64_t lattice_size() const;
  bool in_box(const Point& full) const;
  Point f(const Point& full) const;
};

enum class TarskiKind : uint8_t { Fixpoint = 0, Violation = 1, Escape = 2 };

struct TarskiSolution {
  TarskiKind kind = TarskiKind::Fixpoint;
  Point x, y;  // full d-vectors; y is unused except for violations

  friend bool operator==(const TarskiSolution&, const TarskiSolution&) = default;
};

BitString encode_tarski(const TarskiPlusInstance& inst);
TarskiPlusInstance decode_tarski(const BitString& bits);
size_t tarski_solution_bits(const TarskiPlusInstance& inst);
BitString encode_tarski_solution(const TarskiPlusInstance& inst, const TarskiSolution& s);
std::optional<TarskiSolution> decode_tarski_solution(const TarskiPlusInstance& inst, const BitString& bits);

bool tarski_verify(const TarskiPlusInstance& inst, const TarskiSolution& s);
uint64_t mu_tarski(const TarskiPlusInstance& inst);
TarskiPlusInstance tarski_to_plus(const TarskiFunction& c);

bool is_monotone(const TarskiFunction& c);
std::vector<Point> tarski_fixed_points(const TarskiFunction& c);
// Monotone envelope of a uniform random table.
TarskiFunction tarski_random_monotone(size_t n, size_t d, Rng& rng);
TarskiFunction tarski_random(size_t n, size_t d, Rng& rng);

ProblemPtr tarski_problem();
// Boxes with t = 2 or at most `brute_threshold` points are solved directly.
DsrPtr tarski_dsr(uint64_t brute_threshold = 100);

}  // namespace tfs
