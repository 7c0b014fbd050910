#include <gtest/gtest.h>

#include "tfs/error.hpp"
#include "tfs/local_search.hpp"
#include "tfs/rng.hpp"

using namespace tfs;

namespace {

BitString V1(uint64_t v) { return BitString::from_uint(v, 1); }

ToySod chain() {
  // a = 0 -> b = 1, b fixed
  return ToySod{1, 1, {1, 1}, {0, 1}};
}

ToySod random_toy(size_t m, size_t value_bits, Rng& rng) {
  ToySod t{m, value_bits, {}, {}};
  for (size_t v = 0; v < (size_t{1} << m); ++v) {
    t.S.push_back(uniform_below(rng, size_t{1} << m));
    t.V.push_back(uniform_below(rng, uint64_t{1} << value_bits));
  }
  t.S[0] = t.S[0] == 0 ? 1 : t.S[0];
  return t;
}

}  // namespace

TEST(Sod, PathfollowExamples) {
  SodAnswer a = solve_sod_pathfollow(chain().instance(), V1(0), 10);
  EXPECT_EQ(a.vertex, V1(0));
  EXPECT_EQ(a.steps, 1u);
  // 0 -> 1 -> 0 with V(1) < V(0): drop right after the start
  ToySod drop{1, 2, {1, 0}, {3, 1}};
  EXPECT_EQ(solve_sod_pathfollow(drop.instance(), V1(0), 10).vertex, V1(0));
  ToySod longer{2, 2, {1, 2, 3, 3}, {0, 1, 2, 3}};
  std::vector<uint64_t> pots;
  SodAnswer l = solve_sod_pathfollow(longer.instance(), BitString::from_uint(0, 2), 10, &pots);
  EXPECT_EQ(l.vertex.to_uint(), 2u);
  EXPECT_EQ(l.steps, 3u);
  EXPECT_EQ(pots, (std::vector<uint64_t>{0, 1, 2, 3}));
  EXPECT_THROW(solve_sod_pathfollow(longer.instance(), BitString::from_uint(0, 2), 2), tfs::Error);
}

TEST(Sod, ScanExamples) {
  EXPECT_EQ(solve_sod_scan(chain().instance()).vertex, V1(0));
  ToySod fixed{0, 1, {0}, {0}};
  try {
    solve_sod_scan(fixed.instance());
    FAIL();
  } catch (const tfs::Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoSolution);
  }
}

TEST(Sod, VerifyDisjuncts) {
  // S(v) = v: never a solution
  EXPECT_FALSE(verify_sod_solution(chain().instance(), V1(1)));
  // S(S(v)) = S(v)
  EXPECT_TRUE(verify_sod_solution(chain().instance(), V1(0)));
  // potential does not increase along S
  ToySod drop{1, 2, {1, 0}, {3, 1}};
  EXPECT_TRUE(verify_sod_solution(drop.instance(), V1(0)));
  EXPECT_FALSE(verify_sod_solution(drop.instance(), V1(1)));
}

TEST(Sod, ScanAndPathfollowAgree) {
  Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    ToySod t = random_toy(1 + trial % 4, 3, rng);
    auto inst = t.instance();
    BitString start = BitString::from_uint(0, t.vertex_bits);
    EXPECT_TRUE(verify_sod_solution(inst, solve_sod_pathfollow(inst, start, 1000).vertex));
    EXPECT_TRUE(verify_sod_solution(inst, solve_sod_scan(inst).vertex));
  }
}

TEST(Sod, ToyEncodingAndJson) {
  Rng rng(2);
  ToySod t = random_toy(3, 4, rng);
  ToySod back = ToySod::decode(t.encode());
  EXPECT_EQ(back.S, t.S);
  EXPECT_EQ(back.V, t.V);
  ToySod j = ToySod::from_json(t.to_json());
  EXPECT_EQ(j.encode(), t.encode());
  EXPECT_THROW(ToySod::from_json(nlohmann::json::parse(R"({"vertex_bits":1,"S":[0,2],"V":[0,0]})")), tfs::Error);
}

TEST(Rss, Examples) {
  BitString five(5);
  EXPECT_TRUE(rss_verify(five, BitString::from_string("0")));
  EXPECT_FALSE(rss_verify(five, BitString::from_string("1")));
  BitString x = chain().encode();
  BitString padded = reduce_sod_to_rss(x);
  EXPECT_TRUE(rss_admissible_length(padded.size()));
  EXPECT_TRUE(rss_verify(padded, solve_sod_scan(chain().instance()).vertex));
  EXPECT_FALSE(rss_verify(padded, V1(1)));
  EXPECT_EQ(reduce_sod_to_rss(BitString(4)).size(), 16u);
  EXPECT_EQ(reduce_sod_to_rss(BitString(16)).size(), 256u);
  EXPECT_THROW(rss_verify(BitString(16), V1(0)), tfs::Error);
}

TEST(Rss, AdmissibleLengths) {
  EXPECT_TRUE(rss_admissible_length(4));
  EXPECT_TRUE(rss_admissible_length(16));
  EXPECT_TRUE(rss_admissible_length(256));
  EXPECT_FALSE(rss_admissible_length(8));
  EXPECT_TRUE(rss_admissible_length(2));
  EXPECT_FALSE(rss_admissible_length(32));
  RssConfig wide{100};
  EXPECT_FALSE(rss_admissible_length(16, wide));
}

TEST(Rss, RoundTripOnToys) {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    ToySod t = random_toy(1 + trial % 3, 3, rng);
    BitString x = t.encode();
    BitString padded = reduce_sod_to_rss(x);
    uint64_t n = x.size();
    EXPECT_LE(padded.size(), n * n * n * n);
    BitString y(t.vertex_bits);
    do {
      EXPECT_EQ(rss_verify(padded, y), verify_sod_solution(t.instance(), y));
    } while (y.increment());
  }
}
