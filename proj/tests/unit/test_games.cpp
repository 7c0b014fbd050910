#include <gtest/gtest.h>

#include "oracles/oracles.hpp"
#include "tfs/compiler.hpp"
#include "tfs/error.hpp"
#include "tfs/games.hpp"

using namespace tfs;

namespace {

GraphGame fig2() {
  return game_from_json(nlohmann::json::parse(R"({"V0":[1,3,5],"V1":[2,4],
      "E":[[1,2],[2,1],[1,3],[5,1],[2,4],[3,4],[3,5],[4,5]]})"));
}

MemdetSolution dsr_solve(const GraphGame& g) {
  Rng rng(0);
  return decode_memdet_solution(run_recursive(*memdet_problem(), *memdet_dsr(), encode_game(g), rng));
}

// every sigma for player p, in odometer order
std::vector<std::vector<uint32_t>> all_sigmas(const GraphGame& g, int p) {
  std::vector<std::vector<uint32_t>> out{std::vector<uint32_t>(g.n, 0)};
  for (size_t v = 0; v < g.n; ++v) {
    if (g.owner[v] != p) continue;
    std::vector<std::vector<uint32_t>> next;
    for (auto& s : out)
      for (size_t w = 0; w < g.n; ++w)
        if (g.edge(v, w)) {
          s[v] = static_cast<uint32_t>(w);
          next.push_back(s);
        }
    out = std::move(next);
  }
  return out;
}

}  // namespace

TEST(Memdet, SelfLoop) {
  GraphGame g(1);
  g.adj[0][0] = 1;
  EXPECT_TRUE(verify_memdet(g, 0, {0}));
  EXPECT_EQ(solve_game_brute(g).winner, 0);
  EXPECT_EQ(dsr_solve(g).winner, 0);
}

TEST(Memdet, TwoCycle) {
  GraphGame g = game_from_json(nlohmann::json::parse(R"({"V0":[2],"V1":[1],"E":[[1,2],[2,1]]})"));
  EXPECT_FALSE(verify_memdet(g, 0, {0, 0}));
  EXPECT_TRUE(verify_memdet(g, 1, {1, 0}));
  EXPECT_EQ(memdet_problem()->verify(encode_game(g), encode_memdet_solution({1, {1, 0}})), true);
  EXPECT_EQ(dsr_solve(g), (MemdetSolution{1, {1, 0}}));
  EXPECT_EQ(solve_game_brute(g).winner, 1);
}

TEST(Memdet, Fig2Game) {
  GraphGame g = fig2();
  for (int p : {0, 1})
    for (const auto& s : all_sigmas(g, p)) EXPECT_EQ(verify_memdet(g, p, s), oracle::memdet_beats_all(g, p, s));
  MemdetSolution brute = solve_game_brute(g);
  EXPECT_EQ(brute.winner, 0);
  EXPECT_TRUE(memdet_verify(g, dsr_solve(g)));
}

TEST(Memdet, VerifierMatchesEnumeration) {
  Rng rng(1);
  for (int trial = 0; trial < 300; ++trial) {
    GraphGame g = memdet_random(1 + trial % 5, 12, rng);
    for (int p : {0, 1})
      for (const auto& s : all_sigmas(g, p))
        ASSERT_EQ(verify_memdet(g, p, s), oracle::memdet_beats_all(g, p, s)) << game_to_json(g).dump();
  }
}

TEST(Memdet, DsrWinsAndAgreesWithBrute) {
  Rng rng(2);
  for (int trial = 0; trial < 300; ++trial) {
    GraphGame g = memdet_random(1 + trial % 5, 10, rng);
    MemdetSolution s = dsr_solve(g);
    ASSERT_TRUE(memdet_verify(g, s)) << game_to_json(g).dump();
    EXPECT_EQ(s.winner, solve_game_brute(g).winner);
  }
}

TEST(Memdet, QueriesDropMuByOne) {
  Rng rng(3);
  GraphGame g = memdet_random(4, 10, rng);
  auto d = memdet_dsr();
  BitString x = encode_game(g);
  std::vector<QueryAnswer> h;
  for (int k = 0;; ++k) {
    Step st = d->step(x, h, {});
    if (st.done) break;
    EXPECT_EQ(d->mu(st.payload), d->mu(x) - 1);
    EXPECT_TRUE(memdet_problem()->promise(st.payload));
    Rng r(k);
    h.push_back({st.payload, run_recursive(*memdet_problem(), *d, st.payload, r)});
  }
}

TEST(Memdet, Audit) {
  Rng rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    BitString x = encode_game(memdet_random(1 + trial % 4, 8, rng));
    EXPECT_TRUE(audit_dsr(*memdet_problem(), *memdet_dsr(), x, rng).passed);
  }
}

TEST(Memdet, JsonRoundTrip) {
  GraphGame g = fig2();
  EXPECT_EQ(encode_game(game_from_json(game_to_json(g))), encode_game(g));
  EXPECT_THROW(game_from_json(nlohmann::json::parse(R"({"V0":[1],"V1":[],"E":[]})")), tfs::Error);
  EXPECT_THROW(game_from_json(nlohmann::json::parse(R"({"V0":[1],"V1":[1],"E":[[1,1]]})")), tfs::Error);
}

TEST(Memdet, CompiledPathIsStepExact) {
  Rng rng(5);
  for (int trial = 0; trial < 6; ++trial) {
    GraphGame g = memdet_random(2 + trial % 3, 6, rng);
    CompiledSod c = compile_to_sod(memdet_problem(), memdet_dsr(), encode_game(g));
    std::vector<uint64_t> pots;
    SodAnswer a = solve_sod_pathfollow(c.instance, c.source, 10'000'000, &pots);
    EXPECT_EQ(a.steps, c.target - 1);
    for (uint64_t i = 0; i < pots.size(); ++i) ASSERT_EQ(pots[i], i + 1);
    EXPECT_TRUE(memdet_verify(g, decode_memdet_solution(extract_solution(a.vertex, *c.ctx, AnswerKind::SinkOfDag))));
  }
}
