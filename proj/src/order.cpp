#include "tfs/order.hpp"

#include <algorithm>
#include <bit>
#include <mutex>
#include <numeric>
#include <unordered_map>

#include "tfs/error.hpp"
#include "tfs/quantified.hpp"

namespace tfs {

namespace {

// Operand size of one extra CONST gate in the circuit encoding.
constexpr size_t kRestrictGrowth = 35;

BitString pair_input(size_t n, uint64_t x, uint64_t y) {
  BitString in = BitString::from_uint(x, n);
  in.append(BitString::from_uint(y, n));
  return in;
}

}  // namespace

BitString encode_lop(const LopInstance& inst) {
  BitWriter w;
  encode_circuit(w, inst.prec);
  return w.take();
}

LopInstance decode_lop(const BitString& bits) {
  BitReader r(bits);
  LopInstance inst;
  inst.prec = decode_circuit(r);
  r.expect_end();
  try {
    inst.prec.validate();
  } catch (const Error& e) {
    fail(ErrorCode::ParseError, e.what());
  }
  if (inst.prec.num_inputs % 2 != 0 || inst.prec.outputs.size() != 1)
    fail(ErrorCode::ParseError, "order circuit must map 2n bits to one bit");
  inst.n = inst.prec.num_inputs / 2;
  return inst;
}

size_t lop_solution_bits(size_t n) { return 2 + 3 * n; }

BitString encode_lop_solution(size_t n, const LopSolution& s) {
  BitWriter w;
  w.put(static_cast<uint64_t>(s.kind), 2);
  for (uint64_t v : s.w) w.put(v, n);
  return w.take();
}

std::optional<LopSolution> decode_lop_solution(size_t n, const BitString& bits) {
  if (bits.size() != lop_solution_bits(n)) return std::nullopt;
  BitReader r(bits);
  LopSolution s;
  s.kind = static_cast<LopKind>(r.get(2));
  for (uint64_t& v : s.w) v = r.get(n);
  size_t used = s.kind == LopKind::Minimum || s.kind == LopKind::Reflexive ? 1
                : s.kind == LopKind::Incomparable                          ? 2
                                                                           : 3;
  for (size_t i = used; i < 3; ++i)
    if (s.w[i] != 0) return std::nullopt;
  return s;
}

OrderTable::OrderTable(const LopInstance& inst) {
  if (2 * inst.n > witness_bit_cap()) fail(ErrorCode::BudgetError, "order too large to tabulate");
  size_ = size_t{1} << inst.n;
  words_ = (size_ + 63) / 64;
  rows_.assign(size_ * words_, 0);
  std::vector<uint8_t> in(2 * inst.n), vals;
  for (uint64_t x = 0; x < size_; ++x)
    for (uint64_t y = 0; y < size_; ++y) {
      for (size_t i = 0; i < inst.n; ++i) {
        in[i] = (x >> (inst.n - 1 - i)) & 1;
        in[inst.n + i] = (y >> (inst.n - 1 - i)) & 1;
      }
      eval_nodes(inst.prec, in.data(), vals);
      if (vals[inst.prec.outputs[0]]) rows_[x * words_ + y / 64] |= uint64_t{1} << (y % 64);
    }
}

std::optional<uint64_t> OrderTable::first_gap(uint64_t x, uint64_t y) const {
  for (size_t k = 0; k < words_; ++k) {
    uint64_t m = rows_[y * words_ + k] & ~rows_[x * words_ + k];
    if (m) return k * 64 + std::countr_zero(m);
  }
  return std::nullopt;
}

bool lop_less(const LopInstance& inst, uint64_t x, uint64_t y) {
  return eval_circuit(inst.prec, pair_input(inst.n, x, y))[0];
}

std::optional<LopSolution> lop_find_violation(const OrderTable& t) {
  size_t N = t.size();
  for (uint64_t x = 0; x < N; ++x)
    if (t.less(x, x)) return LopSolution{LopKind::Reflexive, {x, 0, 0}};
  for (uint64_t x = 0; x < N; ++x)
    for (uint64_t y = x + 1; y < N; ++y)
      if (!t.less(x, y) && !t.less(y, x)) return LopSolution{LopKind::Incomparable, {x, y, 0}};
  for (uint64_t x = 0; x < N; ++x)
    for (uint64_t y = 0; y < N; ++y)
      if (t.less(x, y))
        if (auto z = t.first_gap(x, y)) return LopSolution{LopKind::Intransitive, {x, y, *z}};
  return std::nullopt;
}

std::optional<LopSolution> lop_find_violation(const LopInstance& inst) {
  return lop_find_violation(OrderTable(inst));
}

bool lop_is_violation(const LopInstance& inst, const LopSolution& s) {
  auto lt = [&](uint64_t a, uint64_t b) { return lop_less(inst, a, b); };
  switch (s.kind) {
    case LopKind::Reflexive: return lt(s.w[0], s.w[0]);
    case LopKind::Incomparable: return s.w[0] != s.w[1] && !lt(s.w[0], s.w[1]) && !lt(s.w[1], s.w[0]);
    case LopKind::Intransitive: return lt(s.w[0], s.w[1]) && lt(s.w[1], s.w[2]) && !lt(s.w[0], s.w[2]);
    case LopKind::Minimum: return false;
  }
  return false;
}

namespace {

bool is_minimum(const LopInstance& inst, uint64_t m) {
  QuantifiedPredicate q;
  q.leading = Quantifier::Forall;
  q.witness_lengths = {inst.n};
  std::vector<uint8_t> in(2 * inst.n), vals;
  for (size_t i = 0; i < inst.n; ++i) in[i] = (m >> (inst.n - 1 - i)) & 1;
  q.matrix = [&](const BitString&, const std::vector<BitString>& z) {
    uint64_t zv = z[0].to_uint();
    if (zv == m) return true;
    std::copy(z[0].raw().begin(), z[0].raw().end(), in.begin() + inst.n);
    eval_nodes(inst.prec, in.data(), vals);
    return vals[inst.prec.outputs[0]] != 0;
  };
  return decide_quantified(q, BitString());
}

}  // namespace

bool lop_verify(const LopInstance& inst, const BitString& y) {
  auto s = decode_lop_solution(inst.n, y);
  if (!s) return false;
  if (s->kind == LopKind::Minimum) return is_minimum(inst, s->w[0]);
  return lop_is_violation(inst, *s);
}

LopInstance lop_restrict(const LopInstance& inst, bool bit) {
  if (inst.n == 0) fail(ErrorCode::InputError, "cannot restrict an empty order");
  size_t n = inst.n, m = n - 1;
  const Circuit& c = inst.prec;
  Circuit out;
  out.num_inputs = 2 * m;
  uint32_t konst = static_cast<uint32_t>(2 * m);
  out.gates.push_back({bit ? GateOp::Const1 : GateOp::Const0, 0, 0});
  auto remap = [&](uint32_t node) -> uint32_t {
    if (node < n) return node == 0 ? konst : node - 1;
    if (node < 2 * n) return node == n ? konst : static_cast<uint32_t>(m + node - n - 1);
    return static_cast<uint32_t>(node - 2 * n + 2 * m + 1);
  };
  for (const Gate& g : c.gates) {
    Gate h = g;
    int ar = gate_arity(g.op);
    if (ar >= 1) h.a = remap(g.a);
    if (ar >= 2) h.b = remap(g.b);
    out.gates.push_back(h);
  }
  for (uint32_t o : c.outputs) out.outputs.push_back(remap(o));
  return {m, out};
}

uint64_t lop_brute_minimum(const LopInstance& inst) {
  OrderTable t(inst);
  for (uint64_t m = 0; m < t.size(); ++m) {
    bool ok = true;
    for (uint64_t z = 0; z < t.size() && ok; ++z) ok = z == m || t.less(m, z);
    if (ok) return m;
  }
  fail(ErrorCode::NoSolution, "order has no minimum");
}

LopInstance lop_from_ranks(size_t n, const std::vector<uint64_t>& rank) {
  if (rank.size() != (size_t{1} << n)) fail(ErrorCode::InputError, "rank table size mismatch");
  CircuitBuilder b(2 * n);
  std::vector<BitString> table;
  for (uint64_t r : rank) table.push_back(BitString::from_uint(r, n));
  std::vector<uint32_t> xs, ys;
  for (size_t i = 0; i < n; ++i) {
    xs.push_back(b.input(i));
    ys.push_back(b.input(n + i));
  }
  auto rx = build_table_lookup(b, xs, table);
  auto ry = build_table_lookup(b, ys, table);
  return {n, b.build({build_less_than(b, rx, ry)})};
}

LopInstance lop_random_order(size_t n, Rng& rng) {
  if (n <= 8) {
    std::vector<uint64_t> rank(size_t{1} << n);
    std::iota(rank.begin(), rank.end(), 0);
    std::shuffle(rank.begin(), rank.end(), rng);
    return lop_from_ranks(n, rank);
  }
  // larger orders: rank(x) = (x with bits permuted) xor mask
  std::vector<size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  CircuitBuilder b(2 * n);
  std::vector<uint32_t> rx, ry;
  for (size_t i = 0; i < n; ++i) {
    bool flip = rng() & 1;
    uint32_t a = b.input(perm[i]), c = b.input(n + perm[i]);
    rx.push_back(flip ? b.op_not(a) : a);
    ry.push_back(flip ? b.op_not(c) : c);
  }
  return {n, b.build({build_less_than(b, rx, ry)})};
}

namespace {

class LopProblem final : public SearchProblem {
 public:
  LopProblem() {
    eu_.v1 = [](const BitString& x, const BitString& y) {
      LopInstance inst = decode_lop(x);
      auto s = decode_lop_solution(inst.n, y);
      return s && s->kind != LopKind::Minimum && lop_is_violation(inst, *s);
    };
    eu_.v2 = [](const BitString& x, const BitString& y) {
      LopInstance inst = decode_lop(x);
      auto s = decode_lop_solution(inst.n, y);
      return s && s->kind == LopKind::Minimum && lop_verify(inst, y);
    };
    eu_.witness_length = [](const BitString& x) { return lop_solution_bits(decode_lop(x).n); };
    eu_.least_v1 = [](const BitString& x) -> std::optional<BitString> {
      LopInstance inst = decode_lop(x);
      auto v = lop_find_violation(inst);
      if (!v) return std::nullopt;
      return encode_lop_solution(inst.n, *v);
    };
  }

  std::string name() const override { return "lop"; }
  int verifier_level() const override { return 1; }
  bool promise(const BitString& x) const override {
    try {
      decode_lop(x);
      return true;
    } catch (const Error&) {
      return false;
    }
  }
  bool verify(const BitString& x, const BitString& y) const override {
    try {
      return lop_verify(decode_lop(x), y);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::BudgetError) throw;
      return false;
    }
  }
  size_t solution_bound(const BitString& x) const override { return lop_solution_bits(decode_lop(x).n); }
  const EssentiallyUnique* essentially_unique() const override { return &eu_; }

 private:
  EssentiallyUnique eu_;
};

class LopDsr final : public Dsr {
 public:
  uint64_t mu(const BitString& x) const override { return decode_lop(x).n; }

  Step step(const BitString& x, History h, const BitString&) const override {
    LopInstance inst = decode_lop(x);
    size_t n = inst.n;
    if (auto v = violation(x, inst)) return Step::finish(encode_lop_solution(n, *v));
    if (n == 0) return Step::finish(encode_lop_solution(0, {}));
    if (n == 1) {
      uint64_t m = lop_less(inst, 1, 0) ? 1 : 0;
      return Step::finish(encode_lop_solution(1, {LopKind::Minimum, {m, 0, 0}}));
    }
    if (h.size() < 2) return Step::query(encode_lop(lop_restrict(inst, h.size() == 1)));
    uint64_t cand[2];
    for (int b = 0; b < 2; ++b) {
      auto a = decode_lop_solution(n - 1, h[b].answer);
      if (!a) fail(ErrorCode::ContractViolation, "sub-answer is not an order solution");
      uint64_t top = uint64_t{static_cast<uint64_t>(b)} << (n - 1);
      if (a->kind != LopKind::Minimum) {
        LopSolution lifted = *a;
        size_t used = a->kind == LopKind::Reflexive ? 1 : a->kind == LopKind::Incomparable ? 2 : 3;
        for (size_t i = 0; i < used; ++i) lifted.w[i] |= top;
        return Step::finish(encode_lop_solution(n, lifted));
      }
      cand[b] = top | a->w[0];
    }
    uint64_t m = lop_less(inst, cand[1], cand[0]) ? cand[1] : cand[0];
    return Step::finish(encode_lop_solution(n, {LopKind::Minimum, {m, 0, 0}}));
  }

  size_t width_bound(const BitString& root) const override { return decode_lop(root).n >= 2 ? 2 : 0; }
  size_t size_growth(uint64_t) const override { return kRestrictGrowth; }
  BitString dummy_instance() const override {
    return encode_lop({0, Circuit{0, {{GateOp::Const0, 0, 0}}, {0}}});
  }

 private:
  // Steps are replayed many times on the same instance by the compiled
  // successor circuit, so the tabulated violation search is cached.
  std::optional<LopSolution> violation(const BitString& x, const LopInstance& inst) const {
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = cache_.find(x);
      if (it != cache_.end()) return it->second;
    }
    auto v = lop_find_violation(inst);
    std::lock_guard<std::mutex> lock(mu_);
    cache_.emplace(x, v);
    return v;
  }

  mutable std::mutex mu_;
  mutable std::unordered_map<BitString, std::optional<LopSolution>, BitStringHash> cache_;
};

}  // namespace

ProblemPtr lop_problem() {
  static ProblemPtr p = std::make_shared<LopProblem>();
  return p;
}

DsrPtr lop_dsr() { return std::make_shared<LopDsr>(); }

ProblemPtr lop_unique_problem() { return make_unique_problem(lop_problem()); }

DsrPtr lop_unique_dsr() { return lift_dsr_unique(lop_problem(), lop_dsr()); }

BitString encode_avoid(const AvoidInstance& inst) {
  BitWriter w;
  encode_circuit(w, inst.c);
  return w.take();
}

AvoidInstance decode_avoid(const BitString& bits) {
  BitReader r(bits);
  AvoidInstance inst;
  inst.c = decode_circuit(r);
  r.expect_end();
  try {
    inst.c.validate();
  } catch (const Error& e) {
    fail(ErrorCode::ParseError, e.what());
  }
  if (inst.c.outputs.size() != inst.c.num_inputs + 1)
    fail(ErrorCode::ParseError, "avoid circuit must stretch n bits to n+1");
  inst.n = inst.c.num_inputs;
  return inst;
}

bool avoid_verify(const AvoidInstance& inst, const BitString& y) {
  if (y.size() != inst.n + 1) return false;
  QuantifiedPredicate q;
  q.leading = Quantifier::Forall;
  q.witness_lengths = {inst.n};
  q.matrix = [&](const BitString&, const std::vector<BitString>& z) { return eval_circuit(inst.c, z[0]) != y; };
  return decide_quantified(q, BitString());
}

BitString avoid_brute(const AvoidInstance& inst) {
  if (inst.n + 1 > witness_bit_cap()) fail(ErrorCode::BudgetError, "avoid instance too large");
  std::vector<bool> hit(size_t{1} << (inst.n + 1));
  BitString x(inst.n);
  do {
    hit[eval_circuit(inst.c, x).to_uint()] = true;
  } while (x.increment());
  for (uint64_t y = 0; y < hit.size(); ++y)
    if (!hit[y]) return BitString::from_uint(y, inst.n + 1);
  fail(ErrorCode::NoSolution, "circuit is surjective");
}

namespace {

class AvoidProblem final : public SearchProblem {
 public:
  std::string name() const override { return "avoid"; }
  int verifier_level() const override { return 1; }
  bool promise(const BitString& x) const override {
    try {
      decode_avoid(x);
      return true;
    } catch (const Error&) {
      return false;
    }
  }
  bool verify(const BitString& x, const BitString& y) const override {
    try {
      return avoid_verify(decode_avoid(x), y);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::BudgetError) throw;
      return false;
    }
  }
  size_t solution_bound(const BitString& x) const override { return decode_avoid(x).n + 1; }
};

}  // namespace

ProblemPtr avoid_problem() { return std::make_shared<AvoidProblem>(); }

}  // namespace tfs
