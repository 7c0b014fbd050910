#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "json.hpp"
#include "tfs/dsr.hpp"

namespace tfs {

// Two-player graph game on vertices 0..n-1. A play starts at vertex 0; the
// owner of the least vertex visited infinitely often wins it.
struct GraphGame {
  size_t n = 0;
  std::vector<uint8_t> owner;
  std::vector<std::vector<uint8_t>> adj;

  explicit GraphGame(size_t n_vertices = 0)
      : n(n_vertices), owner(n_vertices, 0), adj(n_vertices, std::vector<uint8_t>(n_vertices, 0)) {}

  static constexpr size_t start = 0;
  bool edge(size_t u, size_t v) const { return adj[u][v]; }
  size_t out_degree(size_t v) const;
  size_t num_edges() const;
  // every vertex has a successor
  bool well_formed() const;
  // edges leaving vertices of out-degree at least 2, in (u, v) order
  std::vector<std::pair<size_t, size_t>> deletable_edges() const;
};

// sigma is indexed by vertex; entries at vertices not owned by `winner` are 0.
struct MemdetSolution {
  int winner = 0;
  std::vector<uint32_t> sigma;
  friend bool operator==(const MemdetSolution&, const MemdetSolution&) = default;
};

BitString encode_game(const GraphGame& g);
GraphGame decode_game(const BitString& bits);
BitString encode_memdet_solution(const MemdetSolution& s);
MemdetSolution decode_memdet_solution(const BitString& bits);

// Owner of the least vertex on the cycle reached from start when both
// players follow the memoryless choices in `choice` (one successor per vertex).
int play_winner(const GraphGame& g, const std::vector<uint32_t>& choice);

bool verify_memdet(const GraphGame& g, int player, const std::vector<uint32_t>& sigma);
bool memdet_verify(const GraphGame& g, const MemdetSolution& s);

// Exhaustive over memoryless strategy pairs; BudgetError above 2^22 pairs.
MemdetSolution solve_game_brute(const GraphGame& g);

// n vertices, between n and max_edges edges, each vertex at least one successor.
GraphGame memdet_random(size_t n, size_t max_edges, Rng& rng);

nlohmann::json game_to_json(const GraphGame& g);
GraphGame game_from_json(const nlohmann::json& j);
// sigma as [[v, sigma(v)], ...], 1-based like the game file
nlohmann::json memdet_solution_to_json(const GraphGame& g, const MemdetSolution& s);

ProblemPtr memdet_problem();
DsrPtr memdet_dsr();

}  // namespace tfs
