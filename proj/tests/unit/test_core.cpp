#include <gtest/gtest.h>

#include <map>

#include "tfs/bitio.hpp"
#include "tfs/circuit.hpp"
#include "tfs/dsr.hpp"
#include "tfs/error.hpp"
#include "tfs/order.hpp"
#include "tfs/quantified.hpp"

using namespace tfs;

namespace {

BitString B(const char* s) { return BitString::from_string(s); }

// x = m (8 bits), the solution is m itself; the d.s.r counts down.
class EchoProblem final : public SearchProblem {
 public:
  std::string name() const override { return "echo"; }
  int verifier_level() const override { return 0; }
  bool promise(const BitString& x) const override { return x.size() == 8; }
  bool verify(const BitString& x, const BitString& y) const override { return x == y; }
  size_t solution_bound(const BitString&) const override { return 8; }
  bool unique() const override { return true; }
};

class CountDown : public Dsr {
 public:
  explicit CountDown(bool stall = false, size_t fanout = 1) : stall_(stall), fanout_(fanout) {}
  uint64_t mu(const BitString& x) const override { return x.to_uint(); }
  Step step(const BitString& x, History h, const BitString&) const override {
    uint64_t m = x.to_uint();
    if (m == 0) return Step::finish(x);
    if (h.size() < fanout_) return Step::query(BitString::from_uint(stall_ ? m : m - 1, 8));
    return Step::finish(BitString::from_uint(h[0].answer.to_uint() + 1, 8));
  }
  size_t width_bound(const BitString&) const override { return fanout_; }
  size_t size_growth(uint64_t) const override { return 0; }
  BitString dummy_instance() const override { return BitString(8); }

 private:
  bool stall_;
  size_t fanout_;
};

// Answers correctly iff its single tape bit is 1.
class CoinDsr final : public Dsr {
 public:
  uint64_t mu(const BitString&) const override { return 0; }
  Step step(const BitString& x, History, const BitString& tape) const override {
    BitString y = x;
    if (!tape[0]) y.set(7, !y[7]);
    return Step::finish(y);
  }
  size_t width_bound(const BitString&) const override { return 0; }
  size_t size_growth(uint64_t) const override { return 0; }
  size_t randomness_bits(size_t) const override { return 1; }
  double failure_prob_bound() const override { return 0.5; }
  BitString dummy_instance() const override { return BitString(8); }
};

}  // namespace

TEST(BitString, Basics) {
  BitString x = B("1011");
  EXPECT_EQ(x.to_uint(), 11u);
  EXPECT_EQ(BitString::from_uint(11, 4), x);
  EXPECT_EQ(x.to_hex(), "b");
  EXPECT_EQ(BitString::from_hex("b", 4), x);
  EXPECT_LT(B("011"), B("100"));
  EXPECT_LT(B("11"), B("000"));
  BitString y = B("11");
  EXPECT_FALSE(y.increment());
  EXPECT_TRUE(y.all_zero());
  EXPECT_EQ(concat(B("10"), B("01")), B("1001"));
}

TEST(BitIo, RoundTripAndUnderrun) {
  BitWriter w;
  w.put(5, 3);
  w.put_bit(true);
  w.put_bits(B("0110"));
  BitString s = w.take();
  BitReader r(s);
  EXPECT_EQ(r.get(3), 5u);
  EXPECT_TRUE(r.get_bit());
  EXPECT_EQ(r.get_bits(4), B("0110"));
  r.expect_end();
  EXPECT_THROW(r.get(1), tfs::Error);
  EXPECT_EQ(bits_for(0), 0u);
  EXPECT_EQ(bits_for(8), 4u);
}

TEST(Circuit, Examples) {
  CircuitBuilder nb(1);
  Circuit neg = nb.build({nb.op_not(0)});
  EXPECT_EQ(eval_circuit(neg, B("1")), B("0"));
  Circuit id = CircuitBuilder(4).build({0, 1, 2, 3});
  EXPECT_EQ(eval_circuit(id, B("1011")), B("1011"));
  CircuitBuilder ab(2);
  Circuit conj = ab.build({ab.op_and(0, 1)});
  EXPECT_EQ(eval_circuit(conj, B("10")), B("0"));
  EXPECT_THROW(eval_circuit(conj, B("1")), tfs::Error);
}

TEST(Circuit, EncodingAndJson) {
  CircuitBuilder b(3);
  Circuit c = b.build({b.op_xor(0, b.op_or(1, 2)), b.op_and(0, 2)});
  BitWriter w;
  encode_circuit(w, c);
  BitString bits = w.take();
  BitReader r(bits);
  Circuit back = decode_circuit(r);
  r.expect_end();
  for (uint64_t v = 0; v < 8; ++v)
    EXPECT_EQ(eval_circuit(back, BitString::from_uint(v, 3)), eval_circuit(c, BitString::from_uint(v, 3)));
  Circuit j = circuit_from_json(circuit_to_json(c));
  EXPECT_EQ(circuit_to_json(j), circuit_to_json(c));
  EXPECT_THROW(circuit_from_json(nlohmann::json::parse(R"({"num_inputs":1,"gates":[["AND",0,1]],"outputs":[1]})")),
               tfs::Error);
}

TEST(Circuit, TruthTableAndLessThan) {
  Rng rng(1);
  std::vector<BitString> table;
  for (int i = 0; i < 16; ++i) table.push_back(BitString::from_uint(uniform_below(rng, 8), 3));
  Circuit c = circuit_from_truth_table(4, table);
  for (uint64_t v = 0; v < 16; ++v) EXPECT_EQ(eval_circuit(c, BitString::from_uint(v, 4)), table[v]);
  CircuitBuilder b(6);
  Circuit lt = b.build({build_less_than(b, {0, 1, 2}, {3, 4, 5})});
  for (uint64_t x = 0; x < 8; ++x)
    for (uint64_t y = 0; y < 8; ++y)
      EXPECT_EQ(eval_circuit(lt, BitString::from_uint(x * 8 + y, 6))[0], x < y);
}

TEST(Quantified, Examples) {
  QuantifiedPredicate eq{Quantifier::Exists, {}, [](const BitString& in, const auto&) { return in == B("11"); }};
  EXPECT_TRUE(decide_quantified(eq, B("11")));
  QuantifiedPredicate ex{Quantifier::Exists, {1}, [](const BitString& in, const auto& z) { return z[0] == in; }};
  EXPECT_TRUE(decide_quantified(ex, B("0")));
  QuantifiedPredicate all{Quantifier::Forall, {2}, [](const BitString&, const auto&) { return B("101") != B("101"); }};
  EXPECT_FALSE(decide_quantified(all, B("")));
  // ∃z1 ∀z2: z1 >= z2 holds with z1 = 11
  QuantifiedPredicate two{Quantifier::Exists, {2, 2},
                          [](const BitString&, const auto& z) { return z[0].to_uint() >= z[1].to_uint(); }};
  EXPECT_TRUE(decide_quantified(two, B("")));
  set_witness_bit_cap(3);
  EXPECT_THROW(decide_quantified(two, B("")), tfs::Error);
  set_witness_bit_cap(24);
}

TEST(Quantified, SamplingAndLexSmallest) {
  Rng rng(2);
  EXPECT_EQ(uniform_sample(2, [](const BitString& b) { return b == B("01"); }, rng), B("01"));
  EXPECT_FALSE(uniform_sample(2, [](const BitString&) { return false; }, rng));
  std::map<uint64_t, int> freq;
  for (int i = 0; i < 40000; ++i) ++freq[uniform_sample(2, [](const BitString&) { return true; }, rng)->to_uint()];
  for (auto [v, f] : freq) EXPECT_NEAR(f / 40000.0, 0.25, 0.02);
  auto parity = [](const BitString& b) { return (b[0] ^ b[1]) == 0; };
  EXPECT_EQ(lex_smallest(2, parity), B("00"));
  EXPECT_EQ(lex_smallest(2, [](const BitString& b) { return b[0]; }), B("10"));
  // first non-image of x -> x || 1 (range is every string ending in 1)
  CircuitBuilder cb(2);
  Circuit c = cb.build({0, 1, cb.constant(true)});
  auto non_image = [&](const BitString& y) {
    for (uint64_t v = 0; v < 4; ++v)
      if (eval_circuit(c, BitString::from_uint(v, 2)) == y) return false;
    return true;
  };
  EXPECT_EQ(lex_smallest(3, non_image), B("000"));
}

TEST(Dsr, RunRecursiveAndExamples) {
  EchoProblem p;
  CountDown d;
  Rng rng(3);
  RecursionStats st;
  EXPECT_EQ(run_recursive(p, d, BitString::from_uint(5, 8), rng, &st), BitString::from_uint(5, 8));
  EXPECT_EQ(st.calls, 6u);
  EXPECT_EQ(st.max_depth, 5u);
  EXPECT_EQ(d.step(BitString(8), {}, {}).done, true);
  // μ = 0 base case on LOP: n = 1 with 1 ≺ 0 answers directly
  LopInstance lop = lop_from_ranks(1, {1, 0});
  Step base = lop_dsr()->step(encode_lop(lop), {}, {});
  ASSERT_TRUE(base.done);
  EXPECT_EQ(decode_lop_solution(1, base.payload)->w[0], 1u);
}

TEST(Dsr, AuditFlagsViolations) {
  EchoProblem p;
  Rng rng(4);
  BitString x = BitString::from_uint(3, 8);
  EXPECT_TRUE(audit_dsr(p, CountDown(), x, rng).passed);
  AuditReport stall = audit_dsr(p, CountDown(true), x, rng);
  EXPECT_FALSE(stall.passed);
  EXPECT_TRUE(stall.has(ViolationKind::MuNotDecreasing));
  EXPECT_EQ(stall.violations[0].query, x);
}

TEST(Dsr, NormalizePadsToWidthAndDepth) {
  auto p = std::make_shared<EchoProblem>();
  auto d = std::make_shared<CountDown>();
  BitString x = BitString::from_uint(3, 8);
  Normalized nz = normalize_dsr(p, d, x);
  // one real query per level, padded up to the width of the normalized form
  size_t w = nz.width;
  std::vector<QueryAnswer> h;
  Step st = nz.dsr->step(nz.root, h, {});
  ASSERT_FALSE(st.done);
  EXPECT_FALSE(unframe_instance(st.payload).padding);
  Rng rng(5);
  EXPECT_EQ(run_recursive(*nz.problem, *nz.dsr, nz.root, rng), x);
  EXPECT_TRUE(audit_dsr(*nz.problem, *nz.dsr, nz.root, rng).passed);
  EXPECT_EQ(nz.depth, 3u);
  EXPECT_GE(w, 1u);
}

TEST(Dsr, NormalizeAddsDummyQueries) {
  auto p = std::make_shared<EchoProblem>();
  auto wide = std::make_shared<CountDown>(false, 2);
  BitString x = BitString::from_uint(1, 8);
  Normalized nz = normalize_dsr(p, wide, x);
  ASSERT_EQ(nz.width, 2u);
  // an instance that needs no queries still issues width padding queries while r > 0
  BitString framed = frame_instance(2, false, BitString::from_uint(0, 8));
  std::vector<QueryAnswer> h;
  int pads = 0;
  Rng rng(6);
  for (;;) {
    Step st = nz.dsr->step(framed, h, {});
    if (st.done) break;
    EXPECT_TRUE(unframe_instance(st.payload).padding);
    EXPECT_EQ(unframe_instance(st.payload).remaining, 1u);
    ++pads;
    h.push_back({st.payload, run_recursive(*nz.problem, *nz.dsr, st.payload, rng)});
  }
  EXPECT_EQ(pads, 2);
}

TEST(Dsr, NormalizedLopMatches) {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    LopInstance inst = lop_random_order(1 + trial % 3, rng);
    BitString x = encode_lop(inst);
    Normalized nz = normalize_dsr(lop_problem(), lop_dsr(), x);
    EXPECT_EQ(run_recursive(*nz.problem, *nz.dsr, nz.root, rng), run_recursive(*lop_problem(), *lop_dsr(), x, rng));
  }
}

TEST(Dsr, AmplificationIdentityAndDeterminism) {
  auto p = std::make_shared<EchoProblem>();
  Rng rng(8);
  auto det = std::make_shared<CountDown>();
  Amplified same = amplify_and_fix_randomness(p, det, 8, 8, rng);
  EXPECT_EQ(same.dsr.get(), det.get());
  EXPECT_TRUE(same.tape.empty());

  auto coin = std::make_shared<CoinDsr>();
  Amplified a = amplify_and_fix_randomness(p, coin, 8, 8, rng);
  BitString x = BitString::from_uint(77, 8);
  Rng r1(1), r2(2);
  auto once = [&](Rng& r) -> std::optional<BitString> {
    try {
      return run_recursive(*p, *a.dsr, x, r);
    } catch (const tfs::Error&) {
      return std::nullopt;
    }
  };
  EXPECT_EQ(once(r1), once(r2));
}

TEST(Dsr, AmplificationFailureRate) {
  auto p = std::make_shared<EchoProblem>();
  auto coin = std::make_shared<CoinDsr>();
  Rng rng(9);
  BitString x = BitString::from_uint(77, 8);
  int failures = 0;
  const int runs = 100000;
  for (int i = 0; i < runs; ++i) {
    Amplified a = amplify_and_fix_randomness(p, coin, 8, 8, rng);
    try {
      if (run_recursive(*p, *a.dsr, x, rng) != x) ++failures;
    } catch (const tfs::Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::AllTrialsFailed);
      ++failures;
    }
  }
  EXPECT_LT(failures / static_cast<double>(runs), 1e-4);
}

TEST(Dsr, UniqueLiftOnLop) {
  Rng rng(10);
  auto up = lop_unique_problem();
  auto ud = lop_unique_dsr();
  // valid order: the lifted answer is the base answer
  LopInstance ok = lop_random_order(2, rng);
  BitString x = encode_lop(ok);
  EXPECT_EQ(run_recursive(*up, *ud, x, rng), run_recursive(*lop_problem(), *lop_dsr(), x, rng));
  EXPECT_TRUE(audit_dsr(*up, *ud, x, rng).passed);
  // constant-0 order on n = 1: lex-least violation is INCOMPARABLE(0, 1)
  CircuitBuilder b(2);
  LopInstance zero{1, b.build({b.constant(false)})};
  LopSolution s = *decode_lop_solution(1, run_recursive(*up, *ud, encode_lop(zero), rng));
  EXPECT_EQ(s.kind, LopKind::Incomparable);
  EXPECT_EQ(s.w[0], 0u);
  EXPECT_EQ(s.w[1], 1u);
}
