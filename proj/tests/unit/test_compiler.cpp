#include <gtest/gtest.h>

#include <set>

#include "tfs/compiler.hpp"
#include "tfs/order.hpp"

using namespace tfs;

namespace {

// One-bit instances; the solution of x is x itself. x = 1 asks about 0.
class BitEcho final : public SearchProblem {
 public:
  std::string name() const override { return "bit-echo"; }
  int verifier_level() const override { return 0; }
  bool promise(const BitString& x) const override { return x.size() == 1; }
  bool verify(const BitString& x, const BitString& y) const override { return x == y; }
  size_t solution_bound(const BitString&) const override { return 1; }
  bool unique() const override { return true; }
};

class BitEchoDsr final : public Dsr {
 public:
  uint64_t mu(const BitString& x) const override { return x[0]; }
  Step step(const BitString& x, History h, const BitString&) const override {
    if (!x[0]) return Step::finish(x);
    if (h.empty()) return Step::query(BitString::from_string("0"));
    return Step::finish(BitString::from_string("1"));
  }
  size_t width_bound(const BitString&) const override { return 1; }
  size_t size_growth(uint64_t) const override { return 0; }
  BitString dummy_instance() const override { return BitString::from_string("0"); }
};

std::shared_ptr<CompiledContext> toy_context(uint64_t d, size_t w, const char* root) {
  return std::make_shared<CompiledContext>(std::make_shared<BitEcho>(), std::make_shared<BitEchoDsr>(),
                                           BitString::from_string(root), TableLayout::for_capacity(d, w, 1),
                                           BitString());
}

}  // namespace

TEST(Compiler, SourceTable) {
  auto ctx = toy_context(0, 1, "0");
  StackTable t = source_table(ctx->root(), ctx->layout());
  EXPECT_EQ(t.entries.size(), 1u);
  EXPECT_EQ(t.at(0, 0).tag, EntryTag::Pending);
  EXPECT_EQ(t.at(0, 0).instance, ctx->root());
  EXPECT_TRUE(is_valid(t, *ctx));
  EXPECT_EQ(potential(t, *ctx), 1u);
}

TEST(Compiler, PotentialFormula) {
  EXPECT_EQ(target_potential(1, 2), 6u);
  EXPECT_EQ(subtree_weight(1, 1, 2), 2u);
  EXPECT_EQ(subtree_weight(0, 1, 2), 6u);
}

TEST(Compiler, BadSolutionInvalidates) {
  auto ctx = toy_context(1, 1, "1");
  StackTable t = source_table(ctx->root(), ctx->layout());
  t = successor(t, *ctx);
  ASSERT_TRUE(is_valid(t, *ctx));
  ASSERT_EQ(t.at(1, 0).tag, EntryTag::Pending);
  StackTable bad = t;
  bad.at(1, 0).tag = EntryTag::Solved;
  bad.at(1, 0).solution = BitString::from_string("1");
  EXPECT_FALSE(is_valid(bad, *ctx));
  EXPECT_EQ(successor(bad, *ctx), bad);
  EXPECT_EQ(potential(bad, *ctx), 0u);
}

TEST(Compiler, ExhaustiveTablesOnePerPotential) {
  auto ctx = toy_context(1, 1, "1");
  const TableLayout& l = ctx->layout();
  ASSERT_EQ(l.s, 2u);
  uint64_t T = target_potential(l.d, l.w);
  ASSERT_EQ(T, 4u);
  std::multiset<uint64_t> seen;
  BitString bits(l.table_bits());
  do {
    auto t = StackTable::decode(bits, l);
    if (t && is_valid(*t, *ctx)) seen.insert(potential(*t, *ctx));
  } while (bits.increment());
  EXPECT_EQ(seen, (std::multiset<uint64_t>{1, 2, 3, 4}));
}

TEST(Compiler, SuccessorRaisesPotentialByOne) {
  auto ctx = toy_context(1, 1, "1");
  StackTable t = source_table(ctx->root(), ctx->layout());
  uint64_t T = target_potential(1, 1);
  for (uint64_t k = 1; k < T; ++k) {
    EXPECT_EQ(potential(t, *ctx), k);
    StackTable next = successor(t, *ctx);
    ASSERT_NE(next, t);
    t = next;
  }
  EXPECT_EQ(potential(t, *ctx), T);
  EXPECT_EQ(successor(t, *ctx), t);
  EXPECT_EQ(extract_solution(t.encode(), *ctx, AnswerKind::Sovl), BitString::from_string("1"));
}

TEST(Compiler, SovlOnLopUnique) {
  Rng rng(1);
  LopInstance inst = lop_random_order(2, rng);
  BitString x = encode_lop(inst);
  CompiledSovl c = compile_to_sovl(lop_unique_problem(), lop_unique_dsr(), x);
  EXPECT_TRUE(c.instance.W(c.instance.source, 1));
  EXPECT_FALSE(verify_sovl_solution(c.instance, c.instance.source));
  SodAnswer a = solve_sod_pathfollow(c.instance.sod, c.instance.source, 1'000'000);
  BitString sink = c.instance.sod.S(a.vertex);
  EXPECT_TRUE(verify_sovl_solution(c.instance, sink));
  auto sol = decode_lop_solution(inst.n, extract_solution(sink, *c.ctx, AnswerKind::Sovl));
  ASSERT_TRUE(sol);
  EXPECT_EQ(sol->kind, LopKind::Minimum);
  EXPECT_EQ(sol->w[0], lop_brute_minimum(inst));
}

TEST(Compiler, TableRowsJson) {
  auto ctx = toy_context(1, 1, "1");
  StackTable t = successor(source_table(ctx->root(), ctx->layout()), *ctx);
  auto rows = table_rows_json(t);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0]["entries"][0]["tag"], "P");
  EXPECT_EQ(rows[1]["entries"][0]["tag"], "P");
}
