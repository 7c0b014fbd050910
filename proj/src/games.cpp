#include "tfs/games.hpp"

#include <algorithm>

#include "tfs/bitio.hpp"
#include "tfs/error.hpp"

namespace tfs {

namespace {

constexpr size_t kVertexBits = 8;

using Graph = std::vector<std::vector<uint32_t>>;

// One-player graph left after player i commits to sigma.
Graph induced(const GraphGame& g, int player, const std::vector<uint32_t>& sigma) {
  Graph out(g.n);
  for (size_t v = 0; v < g.n; ++v) {
    if (g.owner[v] == player) {
      out[v].push_back(sigma[v]);
      continue;
    }
    for (size_t w = 0; w < g.n; ++w)
      if (g.edge(v, w)) out[v].push_back(static_cast<uint32_t>(w));
  }
  return out;
}

std::vector<uint8_t> reachable(const Graph& h, size_t from, size_t floor) {
  std::vector<uint8_t> seen(h.size(), 0);
  std::vector<size_t> stack{from};
  seen[from] = 1;
  while (!stack.empty()) {
    size_t v = stack.back();
    stack.pop_back();
    for (uint32_t w : h[v])
      if (w >= floor && !seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
  }
  return seen;
}

// m lies on a cycle using only vertices >= m
bool min_cycle_at(const Graph& h, size_t m) {
  for (uint32_t w : h[m]) {
    if (w == m) return true;
    if (w > m && reachable(h, w, m)[m]) return true;
  }
  return false;
}

}  // namespace

size_t GraphGame::out_degree(size_t v) const { return std::count(adj[v].begin(), adj[v].end(), 1); }

size_t GraphGame::num_edges() const {
  size_t e = 0;
  for (size_t v = 0; v < n; ++v) e += out_degree(v);
  return e;
}

bool GraphGame::well_formed() const {
  if (n == 0) return false;
  for (size_t v = 0; v < n; ++v)
    if (out_degree(v) == 0) return false;
  return true;
}

std::vector<std::pair<size_t, size_t>> GraphGame::deletable_edges() const {
  std::vector<std::pair<size_t, size_t>> out;
  for (size_t u = 0; u < n; ++u) {
    if (out_degree(u) < 2) continue;
    for (size_t v = 0; v < n; ++v)
      if (edge(u, v)) out.emplace_back(u, v);
  }
  return out;
}

BitString encode_game(const GraphGame& g) {
  if (g.n >= (size_t{1} << kVertexBits)) fail(ErrorCode::InputError, "game too large to encode");
  BitWriter w;
  w.put(g.n, kVertexBits);
  for (size_t v = 0; v < g.n; ++v) w.put_bit(g.owner[v]);
  for (size_t u = 0; u < g.n; ++u)
    for (size_t v = 0; v < g.n; ++v) w.put_bit(g.adj[u][v]);
  return w.take();
}

GraphGame decode_game(const BitString& bits) {
  BitReader r(bits);
  GraphGame g(r.get(kVertexBits));
  for (size_t v = 0; v < g.n; ++v) g.owner[v] = r.get_bit();
  for (size_t u = 0; u < g.n; ++u)
    for (size_t v = 0; v < g.n; ++v) g.adj[u][v] = r.get_bit();
  r.expect_end();
  return g;
}

BitString encode_memdet_solution(const MemdetSolution& s) {
  BitWriter w;
  w.put(s.sigma.size(), kVertexBits);
  w.put_bit(s.winner);
  for (uint32_t t : s.sigma) w.put(t, kVertexBits);
  return w.take();
}

MemdetSolution decode_memdet_solution(const BitString& bits) {
  BitReader r(bits);
  MemdetSolution s;
  s.sigma.resize(r.get(kVertexBits));
  s.winner = r.get_bit();
  for (uint32_t& t : s.sigma) t = static_cast<uint32_t>(r.get(kVertexBits));
  r.expect_end();
  return s;
}

int play_winner(const GraphGame& g, const std::vector<uint32_t>& choice) {
  std::vector<int> seen_at(g.n, -1);
  size_t v = GraphGame::start;
  for (int t = 0; seen_at[v] < 0; ++t) {
    seen_at[v] = t;
    v = choice[v];
  }
  // v is the first repeated vertex; walk the cycle once
  size_t least = v;
  for (size_t w = choice[v]; w != v; w = choice[w]) least = std::min(least, w);
  return g.owner[least];
}

bool verify_memdet(const GraphGame& g, int player, const std::vector<uint32_t>& sigma) {
  if (sigma.size() != g.n || (player != 0 && player != 1)) return false;
  for (size_t v = 0; v < g.n; ++v) {
    if (g.owner[v] != player) continue;
    if (sigma[v] >= g.n || !g.edge(v, sigma[v])) return false;
  }
  Graph h = induced(g, player, sigma);
  auto from_start = reachable(h, GraphGame::start, 0);
  for (size_t m = 0; m < g.n; ++m)
    if (g.owner[m] != player && from_start[m] && min_cycle_at(h, m)) return false;
  return true;
}

bool memdet_verify(const GraphGame& g, const MemdetSolution& s) {
  if (!g.well_formed() || s.sigma.size() != g.n) return false;
  for (size_t v = 0; v < g.n; ++v)
    if (g.owner[v] != s.winner && s.sigma[v] != 0) return false;
  return verify_memdet(g, s.winner, s.sigma);
}

MemdetSolution solve_game_brute(const GraphGame& g) {
  if (!g.well_formed()) fail(ErrorCode::InputError, "not a graph game");
  std::vector<std::vector<uint32_t>> succ(g.n);
  uint64_t pairs = 1;
  for (size_t v = 0; v < g.n; ++v) {
    for (size_t w = 0; w < g.n; ++w)
      if (g.edge(v, w)) succ[v].push_back(static_cast<uint32_t>(w));
    pairs *= succ[v].size();
    if (pairs > (uint64_t{1} << 22)) fail(ErrorCode::BudgetError, "too many strategy pairs");
  }
  // odometer over the choices at the vertices of one player
  auto for_each = [&](int player, auto&& body) {
    std::vector<size_t> idx(g.n, 0);
    std::vector<uint32_t> choice(g.n, 0);
    while (true) {
      for (size_t v = 0; v < g.n; ++v)
        if (g.owner[v] == player) choice[v] = succ[v][idx[v]];
      if (!body(choice)) return;
      size_t v = 0;
      for (; v < g.n; ++v) {
        if (g.owner[v] != player) continue;
        if (++idx[v] < succ[v].size()) break;
        idx[v] = 0;
      }
      if (v == g.n) return;
    }
  };
  for (int p : {0, 1}) {
    std::optional<MemdetSolution> found;
    for_each(p, [&](const std::vector<uint32_t>& mine) {
      bool wins = true;
      for_each(1 - p, [&](const std::vector<uint32_t>& theirs) {
        std::vector<uint32_t> choice(g.n);
        for (size_t v = 0; v < g.n; ++v) choice[v] = g.owner[v] == p ? mine[v] : theirs[v];
        wins = play_winner(g, choice) == p;
        return wins;
      });
      if (wins) {
        MemdetSolution s{p, std::vector<uint32_t>(g.n, 0)};
        for (size_t v = 0; v < g.n; ++v)
          if (g.owner[v] == p) s.sigma[v] = mine[v];
        found = s;
      }
      return !wins;
    });
    if (found) return *found;
  }
  fail(ErrorCode::NoSolution, "neither player has a memoryless winning strategy");
}

GraphGame memdet_random(size_t n, size_t max_edges, Rng& rng) {
  GraphGame g(n);
  for (size_t v = 0; v < n; ++v) {
    g.owner[v] = uniform_below(rng, 2);
    g.adj[v][uniform_below(rng, n)] = 1;
  }
  size_t cap = std::min(max_edges, n * n);
  size_t target = n + uniform_below(rng, cap - n + 1);
  while (g.num_edges() < target) g.adj[uniform_below(rng, n)][uniform_below(rng, n)] = 1;
  return g;
}

nlohmann::json game_to_json(const GraphGame& g) {
  nlohmann::json v0 = nlohmann::json::array(), v1 = nlohmann::json::array(), e = nlohmann::json::array();
  for (size_t v = 0; v < g.n; ++v) (g.owner[v] ? v1 : v0).push_back(v + 1);
  for (size_t u = 0; u < g.n; ++u)
    for (size_t v = 0; v < g.n; ++v)
      if (g.edge(u, v)) e.push_back({u + 1, v + 1});
  return {{"problem", "memdet"}, {"V0", v0}, {"V1", v1}, {"E", e}};
}

GraphGame game_from_json(const nlohmann::json& j) {
  try {
    auto v0 = j.at("V0").get<std::vector<size_t>>();
    auto v1 = j.at("V1").get<std::vector<size_t>>();
    size_t n = v0.size() + v1.size();
    if (n == 0 || n > 255) fail(ErrorCode::ParseError, "memdet needs 1..255 vertices");
    GraphGame g(n);
    std::vector<uint8_t> seen(n, 0);
    auto claim = [&](size_t v, int p) {
      if (v < 1 || v > n || seen[v - 1]) fail(ErrorCode::ParseError, "V0 and V1 must partition 1..n");
      seen[v - 1] = 1;
      g.owner[v - 1] = p;
    };
    for (size_t v : v0) claim(v, 0);
    for (size_t v : v1) claim(v, 1);
    for (const auto& e : j.at("E")) {
      size_t u = e.at(0).get<size_t>(), v = e.at(1).get<size_t>();
      if (u < 1 || u > n || v < 1 || v > n) fail(ErrorCode::ParseError, "edge endpoint out of range");
      g.adj[u - 1][v - 1] = 1;
    }
    if (!g.well_formed()) fail(ErrorCode::ParseError, "every vertex needs an outgoing edge");
    return g;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("memdet json: ") + e.what());
  }
}

nlohmann::json memdet_solution_to_json(const GraphGame& g, const MemdetSolution& s) {
  nlohmann::json sigma = nlohmann::json::array();
  for (size_t v = 0; v < s.sigma.size() && v < g.n; ++v)
    if (g.owner[v] == s.winner) sigma.push_back({v + 1, s.sigma[v] + 1});
  return {{"winner", s.winner}, {"sigma", sigma}};
}

namespace {

class MemdetProblem final : public SearchProblem {
 public:
  std::string name() const override { return "memdet"; }
  int verifier_level() const override { return 0; }
  bool promise(const BitString& x) const override {
    try {
      return decode_game(x).well_formed();
    } catch (const Error&) {
      return false;
    }
  }
  bool verify(const BitString& x, const BitString& y) const override {
    try {
      return memdet_verify(decode_game(x), decode_memdet_solution(y));
    } catch (const Error&) {
      return false;
    }
  }
  size_t solution_bound(const BitString& x) const override {
    return kVertexBits + 1 + kVertexBits * decode_game(x).n;
  }
};

MemdetSolution forced(const GraphGame& g, int player) {
  MemdetSolution s{player, std::vector<uint32_t>(g.n, 0)};
  for (size_t v = 0; v < g.n; ++v)
    if (g.owner[v] == player)
      s.sigma[v] = static_cast<uint32_t>(std::find(g.adj[v].begin(), g.adj[v].end(), 1) - g.adj[v].begin());
  return s;
}

bool player_forced(const GraphGame& g, int player) {
  for (size_t v = 0; v < g.n; ++v)
    if (g.owner[v] == player && g.out_degree(v) != 1) return false;
  return true;
}

class MemdetDsr final : public Dsr {
 public:
  uint64_t mu(const BitString& x) const override {
    GraphGame g = decode_game(x);
    return g.num_edges() - g.n;
  }

  Step step(const BitString& x, History h, const BitString&) const override {
    GraphGame g = decode_game(x);
    if (h.empty()) {
      for (int p : {0, 1}) {
        if (!player_forced(g, p)) continue;
        MemdetSolution s = forced(g, p);
        if (memdet_verify(g, s)) return Step::finish(encode_memdet_solution(s));
      }
    } else {
      const BitString& y = h.back().answer;
      try {
        if (memdet_verify(g, decode_memdet_solution(y))) return Step::finish(y);
      } catch (const Error&) {
      }
    }
    auto del = g.deletable_edges();
    if (h.size() < del.size()) {
      auto [u, v] = del[h.size()];
      GraphGame sub = g;
      sub.adj[u][v] = 0;
      return Step::query(encode_game(sub));
    }
    fail(ErrorCode::NoCandidateVerifies, "no subgame answer wins the game");
  }

  size_t width_bound(const BitString& root) const override { return decode_game(root).deletable_edges().size(); }
  size_t size_growth(uint64_t) const override { return 0; }
  BitString dummy_instance() const override {
    GraphGame g(1);
    g.adj[0][0] = 1;
    return encode_game(g);
  }
};

}  // namespace

ProblemPtr memdet_problem() { return std::make_shared<MemdetProblem>(); }

DsrPtr memdet_dsr() { return std::make_shared<MemdetDsr>(); }

}  // namespace tfs
