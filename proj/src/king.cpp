#include "tfs/king.hpp"

#include <bit>

#include "tfs/bitio.hpp"
#include "tfs/error.hpp"

namespace tfs {

VertexSet::VertexSet(size_t n, bool full) : n_(n), w_((n + 63) / 64, full ? ~uint64_t{0} : 0) { trim(); }

void VertexSet::trim() {
  if (n_ % 64 && !w_.empty()) w_.back() &= (uint64_t{1} << (n_ % 64)) - 1;
}

void VertexSet::set(size_t v, bool on) {
  uint64_t bit = uint64_t{1} << (v % 64);
  if (on) w_[v / 64] |= bit;
  else w_[v / 64] &= ~bit;
}

size_t VertexSet::count() const {
  size_t c = 0;
  for (uint64_t x : w_) c += std::popcount(x);
  return c;
}

size_t VertexSet::nth(size_t k) const {
  for (size_t i = 0; i < w_.size(); ++i) {
    uint64_t x = w_[i];
    size_t c = std::popcount(x);
    if (k >= c) {
      k -= c;
      continue;
    }
    while (k--) x &= x - 1;
    return i * 64 + std::countr_zero(x);
  }
  fail(ErrorCode::InputError, "vertex set has too few members");
}

bool VertexSet::subset_of(const VertexSet& o) const {
  for (size_t i = 0; i < w_.size(); ++i)
    if (w_[i] & ~o.w_[i]) return false;
  return true;
}

std::vector<size_t> VertexSet::members() const {
  std::vector<size_t> out;
  for (size_t i = 0; i < w_.size(); ++i)
    for (uint64_t x = w_[i]; x; x &= x - 1) out.push_back(i * 64 + std::countr_zero(x));
  return out;
}

VertexSet& VertexSet::operator|=(const VertexSet& o) {
  for (size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
  return *this;
}

VertexSet& VertexSet::operator&=(const VertexSet& o) {
  for (size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
  return *this;
}

VertexSet VertexSet::operator~() const {
  VertexSet r = *this;
  for (uint64_t& x : r.w_) x = ~x;
  r.trim();
  return r;
}

Tournament::Tournament(size_t n) : out_(n, VertexSet(n)), in_(n, VertexSet(n)), reach2_(n) {}

void Tournament::set_edge(size_t u, size_t v, bool on) {
  if (u == v) return;  // the diagonal carries no information
  out_[u].set(v, on);
  in_[v].set(u, on);
  if (reach2_cached_) {
    reach2_.assign(size(), std::nullopt);
    reach2_cached_ = false;
  }
}

const VertexSet& Tournament::reach2(size_t u) const {
  if (!reach2_[u]) {
    VertexSet r = out_[u];
    for (size_t w : out_[u].members()) r |= out_[w];
    reach2_[u] = std::move(r);
    reach2_cached_ = true;
  }
  return *reach2_[u];
}

Tournament Tournament::random(size_t n, Rng& rng) {
  Tournament t(n);
  uint64_t pool = 0;
  int left = 0;
  for (size_t u = 0; u < n; ++u)
    for (size_t v = u + 1; v < n; ++v) {
      if (left == 0) {
        pool = rng();
        left = 64;
      }
      bool fwd = pool & 1;
      pool >>= 1;
      --left;
      if (fwd) t.set_edge(u, v);
      else t.set_edge(v, u);
    }
  return t;
}

Tournament Tournament::transitive(size_t n) {
  Tournament t(n);
  for (size_t u = 0; u < n; ++u)
    for (size_t v = u + 1; v < n; ++v) t.set_edge(u, v);
  return t;
}

Tournament Tournament::from_index(size_t n, uint64_t index) {
  Tournament t(n);
  size_t k = 0;
  for (size_t u = 0; u < n; ++u)
    for (size_t v = u + 1; v < n; ++v, ++k) {
      if ((index >> k) & 1) t.set_edge(u, v);
      else t.set_edge(v, u);
    }
  return t;
}

Tournament Tournament::from_circuit(const Circuit& c) {
  if (c.num_inputs % 2 != 0 || c.outputs.size() != 1)
    fail(ErrorCode::ParseError, "tournament circuit must map 2n bits to one bit");
  size_t n = c.num_inputs / 2;
  if (n > 12) fail(ErrorCode::BudgetError, "tournament too large to tabulate");
  size_t N = size_t{1} << n;
  Tournament t(N);
  std::vector<uint8_t> in(2 * n), vals;
  for (size_t u = 0; u < N; ++u)
    for (size_t v = 0; v < N; ++v) {
      for (size_t i = 0; i < n; ++i) {
        in[i] = (u >> (n - 1 - i)) & 1;
        in[n + i] = (v >> (n - 1 - i)) & 1;
      }
      eval_nodes(c, in.data(), vals);
      if (vals[c.outputs[0]]) t.set_edge(u, v);
    }
  return t;
}

nlohmann::json Tournament::to_json() const {
  size_t N = size();
  BitString m(N * N);
  for (size_t u = 0; u < N; ++u)
    for (size_t v = 0; v < N; ++v) m.set(u * N + v, edge(u, v));
  nlohmann::json j = {{"N", N}, {"matrix", m.to_hex()}};
  if (N && std::has_single_bit(N)) j["n"] = std::countr_zero(N);
  return j;
}

Tournament Tournament::from_json(const nlohmann::json& j) {
  try {
    if (j.contains("circuit")) return from_circuit(circuit_from_json(j.at("circuit")));
    size_t N = j.contains("N") ? j.at("N").get<size_t>() : size_t{1} << j.at("n").get<size_t>();
    if (N == 0 || N > 4096) fail(ErrorCode::ParseError, "tournament size out of range");
    BitString m = BitString::from_hex(j.at("matrix").get<std::string>(), N * N);
    Tournament t(N);
    for (size_t u = 0; u < N; ++u)
      for (size_t v = 0; v < N; ++v)
        if (m[u * N + v]) t.set_edge(u, v);
    return t;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("tournament json: ") + e.what());
  }
}

std::optional<std::pair<size_t, size_t>> check_tournament(const Tournament& t) {
  for (size_t u = 0; u < t.size(); ++u)
    for (size_t v = u + 1; v < t.size(); ++v)
      if (t.edge(u, v) == t.edge(v, u)) return std::make_pair(u, v);
  return std::nullopt;
}

bool is_weak_king(const Tournament& t, const VertexSet& U, size_t v) {
  if (!U.test(v)) fail(ErrorCode::PreconditionViolation, "candidate is not in the vertex set");
  VertexSet covered = t.reach2(v);
  covered.set(v);
  return U.subset_of(covered);
}

bool is_king(const Tournament& t, size_t v) { return is_weak_king(t, VertexSet(t.size(), true), v); }

size_t king_extend(const Tournament& t, size_t u, size_t v, KingStats* stats) {
  if (stats) {
    ++stats->extend_calls;
    ++stats->path_queries;
    stats->edge_probes += t.size() + 1;
  }
  return t.reach2(u).test(v) ? u : v;
}

size_t king_linear(const Tournament& t, KingStats* stats) {
  if (t.size() == 0) fail(ErrorCode::InputError, "empty tournament");
  size_t v = 0;
  for (size_t i = 1; i < t.size(); ++i) v = king_extend(t, v, i, stats);
  return v;
}

VertexSet witness_set(const Tournament& t, size_t u) {
  VertexSet w = ~t.reach2(u);
  w.set(u, false);
  return w;
}

size_t king_randomized(const Tournament& t, Rng& rng, uint64_t max_iters, KingStats* stats) {
  if (t.size() == 0) fail(ErrorCode::InputError, "empty tournament");
  size_t u = 0;
  for (uint64_t it = 0;; ++it) {
    VertexSet w = witness_set(t, u);
    size_t s = w.count();
    if (s == 0) {
      if (stats) stats->iterations += it;
      return u;
    }
    if (it == max_iters) fail(ErrorCode::IterBudgetExceeded, "randomized king exceeded iteration budget");
    u = w.nth(uniform_below(rng, s));
  }
}

BitString KingSod::encode(uint64_t i, uint64_t x) const {
  BitWriter w;
  w.put(i, coord_bits);
  w.put(x, coord_bits);
  return w.take();
}

std::pair<uint64_t, uint64_t> KingSod::decode(const BitString& v) const {
  BitReader r(v);
  uint64_t i = r.get(coord_bits);
  return {i, r.get(coord_bits)};
}

KingSod king_to_sod(const Tournament& t) {
  size_t N = t.size();
  if (N < 2) fail(ErrorCode::InputError, "king successor graph needs at least two vertices");
  auto tp = std::make_shared<Tournament>(t);
  KingSod out;
  out.coord_bits = bits_for(N - 1);
  out.instance.vertex_bits = 2 * out.coord_bits;
  out.source = out.encode(0, 0);
  KingSod codec = out;
  // x is a weak king of the prefix [0, i]
  auto weak_prefix = [tp](uint64_t i, uint64_t x) {
    if (x > i) return false;
    VertexSet prefix(tp->size());
    for (uint64_t u = 0; u <= i; ++u) prefix.set(u);
    return is_weak_king(*tp, prefix, x);
  };
  out.instance.S = [tp, codec, weak_prefix](const BitString& v) {
    auto [i, x] = codec.decode(v);
    size_t N = tp->size();
    if (i >= N || x >= N || !weak_prefix(i, x) || i == N - 1) return v;
    if (tp->reach2(x).test(i + 1)) return codec.encode(i + 1, x);
    if (weak_prefix(i + 1, i + 1)) return codec.encode(i + 1, i + 1);
    return v;
  };
  out.instance.V = [codec](const BitString& v) -> uint64_t { return codec.decode(v).first; };
  return out;
}

size_t king_from_sod_answer(const KingSod& sod, const BitString& answer) {
  return sod.decode(sod.instance.S(answer)).second;
}

size_t king_pls(const Tournament& t, KingStats* stats) {
  if (t.size() == 1) return 0;
  KingSod sod = king_to_sod(t);
  SodAnswer a = solve_sod_pathfollow(sod.instance, sod.source, t.size() + 1);
  if (stats) stats->iterations += a.steps;
  return king_from_sod_answer(sod, a.vertex);
}

BitString encode_tournament(const Tournament& t) {
  size_t N = t.size();
  BitWriter w;
  w.put(N, 16);
  for (size_t u = 0; u < N; ++u)
    for (size_t v = 0; v < N; ++v) w.put_bit(t.edge(u, v));
  return w.take();
}

Tournament decode_tournament(const BitString& bits) {
  BitReader r(bits);
  size_t N = r.get(16);
  if (N == 0) fail(ErrorCode::ParseError, "empty tournament");
  Tournament t(N);
  for (size_t u = 0; u < N; ++u)
    for (size_t v = 0; v < N; ++v) {
      bool e = r.get_bit();
      if (u == v && e) fail(ErrorCode::ParseError, "self-loop in tournament encoding");
      if (e) t.set_edge(u, v);
    }
  r.expect_end();
  return t;
}

namespace {

class KingProblem final : public SearchProblem {
 public:
  std::string name() const override { return "king"; }
  int verifier_level() const override { return 2; }
  bool promise(const BitString& x) const override {
    try {
      decode_tournament(x);
      return true;
    } catch (const Error&) {
      return false;
    }
  }
  bool verify(const BitString& x, const BitString& y) const override {
    try {
      Tournament t = decode_tournament(x);
      size_t b = bits_for(t.size() - 1);
      if (y.size() != 1 + 2 * b) return false;
      BitReader r(y);
      bool defect = r.get_bit();
      size_t a = r.get(b), c = r.get(b);
      if (a >= t.size() || c >= t.size()) return false;
      if (!defect) return c == 0 && is_king(t, a);
      return a != c && t.edge(a, c) == t.edge(c, a);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::BudgetError) throw;
      return false;
    }
  }
  size_t solution_bound(const BitString& x) const override {
    return 1 + 2 * bits_for(decode_tournament(x).size() - 1);
  }
};

}  // namespace

ProblemPtr king_problem() { return std::make_shared<KingProblem>(); }

}  // namespace tfs
