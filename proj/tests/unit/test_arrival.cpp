#include <gtest/gtest.h>

#include "oracles/oracles.hpp"
#include "tfs/arrival.hpp"
#include "tfs/compiler.hpp"
#include "tfs/error.hpp"

using namespace tfs;

namespace {

SArrivalInstance make(std::vector<uint32_t> s0, std::vector<uint32_t> s1, uint32_t o, uint32_t d) {
  SwitchGraph g{s0.size(), std::move(s0), std::move(s1)};
  return build_instance(g, o, d);
}

RunProfile dsr_solve(const SArrivalInstance& inst, RecursionStats* stats = nullptr) {
  Rng rng(0);
  return decode_profile(run_recursive(*sarrival_problem(), *sarrival_dsr(), encode_sarrival(inst), rng, stats));
}

}  // namespace

TEST(SArrival, SimulationExamples) {
  auto direct = make({1, 1}, {1, 1}, 0, 1);
  auto [r1, e1] = run_simulation(direct);
  EXPECT_EQ(e1, 1u);
  EXPECT_EQ(r1.at(0, 0), 1u);
  EXPECT_EQ(r1.out(0), 1u);

  auto loop = make({0, 1}, {1, 1}, 0, 1);
  auto [r2, e2] = run_simulation(loop);
  EXPECT_EQ(e2, 1u);
  EXPECT_EQ(r2.at(0, 0), 1u);
  EXPECT_EQ(r2.at(0, 1), 1u);
  EXPECT_EQ(profile_end(loop, r2), 1u);
  EXPECT_EQ(profile_end(loop, RunProfile(2)), 0u);
}

TEST(SArrival, RandomRunsTerminate) {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    auto inst = sarrival_random(10, rng);
    auto [r, end] = run_simulation(inst);
    EXPECT_TRUE(end == inst.d || end == inst.dbar());
    uint64_t total = 0;
    for (uint64_t c : r.counts) total += c;
    EXPECT_LE(total, run_length_bound(10));
    EXPECT_EQ(profile_end(inst, r), end);
    EXPECT_TRUE(profile_valid(inst, r));
  }
}

TEST(SArrival, Vbad) {
  SwitchGraph all{3, {1, 2, 2}, {1, 2, 2}};
  auto bad = compute_vbad(all, 2);
  EXPECT_EQ(bad, (std::vector<uint8_t>{0, 0, 0}));
  SwitchGraph iso{3, {1, 1, 2}, {1, 1, 2}};
  EXPECT_TRUE(compute_vbad(iso, 1)[2]);
  // against path search by repeated relaxation
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    size_t n = 1 + trial % 10;
    SwitchGraph g{n, std::vector<uint32_t>(n), std::vector<uint32_t>(n)};
    for (size_t v = 0; v < n; ++v) {
      g.s0[v] = static_cast<uint32_t>(uniform_below(rng, n));
      g.s1[v] = static_cast<uint32_t>(uniform_below(rng, n));
    }
    uint32_t d = static_cast<uint32_t>(uniform_below(rng, n));
    std::vector<uint8_t> good(n, 0);
    good[d] = 1;
    for (size_t it = 0; it < n; ++it)
      for (size_t v = 0; v < n; ++v) good[v] |= good[g.s0[v]] | good[g.s1[v]];
    auto b = compute_vbad(g, d);
    for (size_t v = 0; v < n; ++v) EXPECT_EQ(b[v], !good[v]);
  }
}

TEST(SArrival, BuildInstance) {
  auto inst = make({1, 2, 2}, {1, 1, 2}, 0, 0);
  EXPECT_EQ(inst.n, 3u);
  EXPECT_EQ(inst.s0.size(), 4u);
  EXPECT_EQ(inst.s0[1], inst.dbar());
  EXPECT_EQ(inst.s1[2], inst.dbar());
  EXPECT_EQ(inst.s0[0], 0u);
  EXPECT_EQ(inst.s1[3], 3u);
  EXPECT_TRUE(is_sarrival_instance(inst));
}

TEST(SArrival, ProfileMutationsRejected) {
  Rng rng(3);
  int swapped = 0;
  for (int trial = 0; trial < 200; ++trial) {
    auto inst = sarrival_random(6, rng);
    auto [r, end] = run_simulation(inst);
    for (size_t v = 0; v <= inst.n; ++v)
      if (r.out(v) % 2) {
        RunProfile m = r;
        std::swap(m.at(v, 0), m.at(v, 1));
        EXPECT_FALSE(profile_valid(inst, m));
        ++swapped;
      }
  }
  EXPECT_GT(swapped, 0);
  // extra traffic on vertices the run never touches
  auto inst = make({1, 1, 3, 2}, {1, 1, 1, 1}, 0, 1);
  auto [r, end] = run_simulation(inst);
  RunProfile extra = r;
  extra.at(2, 0) = extra.at(2, 1) = extra.at(3, 0) = extra.at(3, 1) = 1;
  EXPECT_FALSE(profile_valid(inst, extra));
}

TEST(SArrival, ArborescenceBeatsConnectivity) {
  // a: s0 -> d, s1 -> a. The cycle a->a glued onto the run is connected and
  // balanced but its last exit loops.
  auto inst = make({1, 1}, {0, 1}, 0, 1);
  RunProfile fake(2);
  fake.at(0, 0) = 2;
  fake.at(0, 1) = 1;
  EXPECT_FALSE(profile_valid(inst, fake));
}

TEST(SArrival, ExhaustiveUniqueness) {
  Rng rng(4);
  for (int trial = 0; trial < 40; ++trial) {
    auto inst = sarrival_random(1 + trial % 3, rng);
    auto [sim, end] = run_simulation(inst);
    uint64_t total = 0;
    for (uint64_t c : sim.counts) total += c;
    auto acc = oracle::accepted_profiles(inst, 6);
    if (total <= 6) {
      ASSERT_EQ(acc.size(), 1u);
      EXPECT_EQ(acc[0], sim);
    } else {
      EXPECT_TRUE(acc.empty());
    }
  }
}

TEST(SArrival, DsrMatchesSimulation) {
  EXPECT_EQ(dsr_solve(make({1, 1}, {1, 1}, 0, 1)), run_simulation(make({1, 1}, {1, 1}, 0, 1)).first);
  auto chain = make({1, 2, 2}, {1, 2, 2}, 0, 2);
  RecursionStats st;
  EXPECT_EQ(dsr_solve(chain, &st), run_simulation(chain).first);
  EXPECT_GE(st.queries, 1u);
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    auto inst = sarrival_random(1 + trial % 12, rng);
    ASSERT_EQ(dsr_solve(inst), run_simulation(inst).first) << sarrival_to_json(inst).dump();
  }
}

TEST(SArrival, Audit) {
  Rng rng(6);
  for (int trial = 0; trial < 30; ++trial) {
    auto inst = sarrival_random(1 + trial % 7, rng);
    EXPECT_TRUE(audit_dsr(*sarrival_problem(), *sarrival_dsr(), encode_sarrival(inst), rng).passed);
  }
}

TEST(SArrival, Json) {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    auto inst = sarrival_random(5, rng);
    EXPECT_EQ(encode_sarrival(sarrival_from_json(sarrival_to_json(inst))), encode_sarrival(inst));
  }
  EXPECT_THROW(sarrival_from_json(nlohmann::json::parse(R"({"V":2,"s0":[0,5],"s1":[0,0],"o":0,"d":1})")),
               tfs::Error);
}

TEST(SArrival, CompiledMatchesRecursive) {
  Rng rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    auto inst = sarrival_random(2 + trial % 3, rng);
    CompiledSod c = compile_to_sod(sarrival_problem(), sarrival_dsr(), encode_sarrival(inst));
    std::vector<uint64_t> pots;
    SodAnswer a = solve_sod_pathfollow(c.instance, c.source, 10'000'000, &pots);
    EXPECT_EQ(a.steps, c.target - 1);
    EXPECT_EQ(decode_profile(extract_solution(a.vertex, *c.ctx, AnswerKind::SinkOfDag)), dsr_solve(inst));
  }
}
