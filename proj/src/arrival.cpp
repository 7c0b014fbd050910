#include "tfs/arrival.hpp"

#include "tfs/bitio.hpp"
#include "tfs/error.hpp"

namespace tfs {

namespace {

constexpr size_t kVertexBits = 8;

size_t count_bits(size_t n) { return n + 8; }

void add_into(RunProfile& acc, const RunProfile& r) {
  for (size_t i = 0; i < acc.counts.size(); ++i) acc.counts[i] += r.counts[i];
}

}  // namespace

uint64_t run_length_bound(size_t n) {
  if (n >= 57) return UINT64_MAX;
  return static_cast<uint64_t>(n) << n;
}

std::pair<RunProfile, uint32_t> run_simulation(const SArrivalInstance& inst, uint64_t step_cap) {
  RunProfile r(inst.n);
  uint32_t cur = inst.o;
  for (uint64_t steps = 0; cur != inst.d && cur != inst.dbar(); ++steps) {
    if (steps >= step_cap) fail(ErrorCode::CapExceeded, "run did not terminate within the step cap");
    int slot = static_cast<int>(r.out(cur) % 2);
    ++r.at(cur, slot);
    cur = inst.succ(cur, slot);
  }
  return {r, cur};
}

std::pair<RunProfile, uint32_t> run_simulation(const SArrivalInstance& inst) {
  return run_simulation(inst, run_length_bound(inst.n));
}

std::vector<uint8_t> compute_vbad(const SwitchGraph& g, uint32_t d) {
  std::vector<std::vector<uint32_t>> pred(g.n);
  for (uint32_t v = 0; v < g.n; ++v) {
    pred[g.s0[v]].push_back(v);
    pred[g.s1[v]].push_back(v);
  }
  std::vector<uint8_t> bad(g.n, 1);
  std::vector<uint32_t> stack{d};
  bad[d] = 0;
  while (!stack.empty()) {
    uint32_t v = stack.back();
    stack.pop_back();
    for (uint32_t u : pred[v])
      if (bad[u]) {
        bad[u] = 0;
        stack.push_back(u);
      }
  }
  return bad;
}

SArrivalInstance build_instance(const SwitchGraph& g, uint32_t o, uint32_t d) {
  if (g.n == 0 || o >= g.n || d >= g.n || g.s0.size() != g.n || g.s1.size() != g.n)
    fail(ErrorCode::InputError, "o and d must be vertices of the switch graph");
  for (size_t v = 0; v < g.n; ++v)
    if (g.s0[v] >= g.n || g.s1[v] >= g.n) fail(ErrorCode::InputError, "switch target out of range");
  auto bad = compute_vbad(g, d);
  SArrivalInstance inst;
  inst.n = g.n;
  inst.o = o;
  inst.d = d;
  inst.s0 = g.s0;
  inst.s1 = g.s1;
  inst.s0.push_back(inst.dbar());
  inst.s1.push_back(inst.dbar());
  for (size_t v = 0; v < g.n; ++v)
    if (bad[v]) inst.s0[v] = inst.s1[v] = inst.dbar();
  inst.s0[d] = inst.s1[d] = d;
  return inst;
}

bool is_sarrival_instance(const SArrivalInstance& inst) {
  const size_t n = inst.n;
  if (n == 0 || inst.o >= n || inst.d >= n || inst.s0.size() != n + 1 || inst.s1.size() != n + 1) return false;
  for (size_t v = 0; v <= n; ++v)
    if (inst.s0[v] > n || inst.s1[v] > n) return false;
  if (inst.s0[n] != n || inst.s1[n] != n || inst.s0[inst.d] != inst.d || inst.s1[inst.d] != inst.d) return false;
  SwitchGraph g{n + 1, inst.s0, inst.s1};
  auto bad = compute_vbad(g, inst.d);
  for (size_t v = 0; v < n; ++v) {
    bool to_sink = inst.s0[v] == n || inst.s1[v] == n;
    if (bad[v] && (inst.s0[v] != n || inst.s1[v] != n)) return false;
    if (!bad[v] && to_sink) return false;
  }
  return true;
}

std::vector<uint64_t> profile_in_counts(const SArrivalInstance& inst, const RunProfile& r) {
  std::vector<uint64_t> in(inst.n + 1, 0);
  for (size_t v = 0; v <= inst.n; ++v)
    for (int slot : {0, 1}) in[inst.succ(v, slot)] += r.at(v, slot);
  return in;
}

uint32_t profile_end(const SArrivalInstance& inst, const RunProfile& r) {
  if (r.n != inst.n || r.counts.size() != 2 * (inst.n + 1)) fail(ErrorCode::Malformed, "profile size mismatch");
  auto in = profile_in_counts(inst, r);
  std::optional<uint32_t> end;
  for (uint32_t v = 0; v <= inst.n; ++v) {
    int64_t bal = static_cast<int64_t>(in[v]) - static_cast<int64_t>(r.out(v));
    int64_t want = v == inst.o ? -1 : 0;
    if (bal == want) continue;
    if (bal == want + 1 && !end) {
      end = v;
      continue;
    }
    fail(ErrorCode::Malformed, "profile is not a single path from o");
  }
  if (!end) fail(ErrorCode::Malformed, "profile does not end");
  return *end;
}

bool profile_valid(const SArrivalInstance& inst, const RunProfile& r) {
  if (!is_sarrival_instance(inst) || r.n != inst.n || r.counts.size() != 2 * (inst.n + 1)) return false;
  uint64_t total = 0;
  for (size_t v = 0; v <= inst.n; ++v) {
    uint64_t k = r.out(v);
    if (r.at(v, 0) != (k + 1) / 2 || r.at(v, 1) != k / 2) return false;
    total += k;
    if (total > run_length_bound(inst.n)) return false;
  }
  uint32_t end;
  try {
    end = profile_end(inst, r);
  } catch (const Error&) {
    return false;
  }
  if (end != inst.d && end != inst.dbar()) return false;
  if (r.out(inst.d) || r.out(inst.dbar())) return false;
  // last exits must lead to the end without closing a cycle
  std::vector<uint8_t> state(inst.n + 1, 0);
  for (uint32_t v = 0; v <= inst.n; ++v) {
    std::vector<uint32_t> path;
    uint32_t u = v;
    while (r.out(u) > 0 && state[u] == 0) {
      state[u] = 1;
      path.push_back(u);
      u = inst.succ(u, static_cast<int>((r.out(u) - 1) % 2));
    }
    if (r.out(u) > 0 && state[u] == 1) return false;
    for (uint32_t p : path) state[p] = 2;
  }
  return true;
}

BitString encode_sarrival(const SArrivalInstance& inst) {
  if (inst.n + 1 >= (size_t{1} << kVertexBits)) fail(ErrorCode::InputError, "switch graph too large to encode");
  BitWriter w;
  w.put(inst.n, kVertexBits);
  w.put(inst.o, kVertexBits);
  w.put(inst.d, kVertexBits);
  for (uint32_t t : inst.s0) w.put(t, kVertexBits);
  for (uint32_t t : inst.s1) w.put(t, kVertexBits);
  return w.take();
}

SArrivalInstance decode_sarrival(const BitString& bits) {
  BitReader r(bits);
  SArrivalInstance inst;
  inst.n = r.get(kVertexBits);
  inst.o = static_cast<uint32_t>(r.get(kVertexBits));
  inst.d = static_cast<uint32_t>(r.get(kVertexBits));
  inst.s0.resize(inst.n + 1);
  inst.s1.resize(inst.n + 1);
  for (uint32_t& t : inst.s0) t = static_cast<uint32_t>(r.get(kVertexBits));
  for (uint32_t& t : inst.s1) t = static_cast<uint32_t>(r.get(kVertexBits));
  r.expect_end();
  return inst;
}

BitString encode_profile(const RunProfile& r) {
  BitWriter w;
  w.put(r.n, kVertexBits);
  for (uint64_t c : r.counts) {
    if (bits_for(c) > count_bits(r.n)) fail(ErrorCode::InputError, "count too large to encode");
    w.put(c, count_bits(r.n));
  }
  return w.take();
}

RunProfile decode_profile(const BitString& bits) {
  BitReader rd(bits);
  RunProfile r(rd.get(kVertexBits));
  for (uint64_t& c : r.counts) c = rd.get(count_bits(r.n));
  rd.expect_end();
  return r;
}

SArrivalInstance sarrival_random(size_t n, Rng& rng) {
  SwitchGraph g{n, std::vector<uint32_t>(n), std::vector<uint32_t>(n)};
  for (size_t v = 0; v < n; ++v) {
    g.s0[v] = static_cast<uint32_t>(uniform_below(rng, n));
    g.s1[v] = static_cast<uint32_t>(uniform_below(rng, n));
  }
  uint32_t o = static_cast<uint32_t>(uniform_below(rng, n));
  uint32_t d = static_cast<uint32_t>(uniform_below(rng, n));
  return build_instance(g, o, d);
}

nlohmann::json sarrival_to_json(const SArrivalInstance& inst) {
  // d̄ is implicit in the file format; bad vertices are written as self-loops,
  // which rebuilds the same instance
  std::vector<uint32_t> s0(inst.s0.begin(), inst.s0.end() - 1), s1(inst.s1.begin(), inst.s1.end() - 1);
  for (uint32_t v = 0; v < inst.n; ++v)
    if (s0[v] == inst.dbar()) s0[v] = s1[v] = v;
  return {{"problem", "sarrival"}, {"V", inst.n}, {"s0", s0}, {"s1", s1}, {"o", inst.o}, {"d", inst.d}};
}

SArrivalInstance sarrival_from_json(const nlohmann::json& j) {
  try {
    SwitchGraph g;
    g.n = j.at("V").get<size_t>();
    g.s0 = j.at("s0").get<std::vector<uint32_t>>();
    g.s1 = j.at("s1").get<std::vector<uint32_t>>();
    if (g.n == 0 || g.n > 254 || g.s0.size() != g.n || g.s1.size() != g.n)
      fail(ErrorCode::ParseError, "sarrival needs 1..254 vertices and one s0/s1 entry per vertex");
    return build_instance(g, j.at("o").get<uint32_t>(), j.at("d").get<uint32_t>());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("sarrival json: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InputError) fail(ErrorCode::ParseError, e.what());
    throw;
  }
}

nlohmann::json profile_to_json(const SArrivalInstance& inst, const RunProfile& r) {
  nlohmann::json counts = nlohmann::json::array();
  for (size_t v = 0; v <= r.n; ++v)
    for (int slot : {0, 1})
      if (r.at(v, slot)) counts.push_back({v, slot, r.at(v, slot)});
  uint32_t end = profile_end(inst, r);
  return {{"end", end == inst.dbar() ? nlohmann::json("dbar") : nlohmann::json(end)}, {"counts", counts}};
}

namespace {

class SArrivalProblem final : public SearchProblem {
 public:
  std::string name() const override { return "sarrival"; }
  int verifier_level() const override { return 0; }
  bool promise(const BitString& x) const override {
    try {
      return is_sarrival_instance(decode_sarrival(x));
    } catch (const Error&) {
      return false;
    }
  }
  bool verify(const BitString& x, const BitString& y) const override {
    try {
      return profile_valid(decode_sarrival(x), decode_profile(y));
    } catch (const Error&) {
      return false;
    }
  }
  size_t solution_bound(const BitString& x) const override {
    size_t n = decode_sarrival(x).n;
    return kVertexBits + 2 * (n + 1) * count_bits(n);
  }
  bool unique() const override { return true; }
};

// G with d removed and every edge into d sent to v instead; v becomes the
// destination. Vertex u > d moves to u - 1, d̄ to n - 1.
struct Contraction {
  SArrivalInstance sub;
  uint32_t v = 0;
  uint32_t d = 0;

  uint32_t to_sub(uint32_t u) const { return u > d ? u - 1 : u; }
  uint32_t from_sub(uint32_t u) const { return u >= d ? u + 1 : u; }

  // profile of the sub-instance in the original numbering, slots xor-ed by flip
  RunProfile lift(const RunProfile& r, const std::vector<uint8_t>& flip) const {
    RunProfile out(sub.n + 1);
    for (uint32_t u = 0; u <= sub.n; ++u)
      for (int slot : {0, 1}) out.at(from_sub(u), slot ^ flip[from_sub(u)]) += r.at(u, slot);
    return out;
  }
};

Contraction contract(const SArrivalInstance& inst, uint32_t v) {
  Contraction c;
  c.v = v;
  c.d = inst.d;
  SArrivalInstance& s = c.sub;
  s.n = inst.n - 1;
  s.o = c.to_sub(inst.o);
  s.d = c.to_sub(v);
  for (uint32_t u = 0; u <= inst.n; ++u) {
    if (u == inst.d) continue;
    auto map = [&](uint32_t t) { return c.to_sub(t == inst.d ? v : t); };
    s.s0.push_back(map(inst.s0[u]));
    s.s1.push_back(map(inst.s1[u]));
  }
  s.s0[s.d] = s.s1[s.d] = s.d;
  return c;
}

enum class Arrival { Sink, AtD, AtV };

// Where the original run stands once the sub-run (under `flip`) has ended.
Arrival classify(const SArrivalInstance& inst, const Contraction& c, const SArrivalInstance& sub,
                 const RunProfile& r, const std::vector<uint8_t>& flip) {
  uint32_t end = profile_end(sub, r);
  if (end == sub.dbar()) return Arrival::Sink;
  if (end != sub.d) fail(ErrorCode::CaseExhaustion, "sub-run ended away from its destination");
  for (uint32_t u = 0; u <= sub.n; ++u)
    for (int slot : {0, 1})
      if (r.at(u, slot) && sub.succ(u, slot) == sub.d && u != sub.d) {
        uint32_t orig = c.from_sub(u);
        return inst.succ(orig, slot ^ flip[orig]) == inst.d ? Arrival::AtD : Arrival::AtV;
      }
  return Arrival::AtV;  // the sub-run started at v
}

class SArrivalDsr final : public Dsr {
 public:
  uint64_t mu(const BitString& x) const override { return decode_sarrival(x).n; }

  Step step(const BitString& x, History h, const BitString&) const override {
    SArrivalInstance inst = decode_sarrival(x);
    RunProfile run(inst.n);
    if (inst.o == inst.d) return Step::finish(encode_profile(run));
    if (inst.s0[inst.o] == inst.dbar()) {
      run.at(inst.o, 0) = 1;
      return Step::finish(encode_profile(run));
    }
    uint32_t v = 0;
    while (v == inst.d || (inst.s0[v] != inst.d && inst.s1[v] != inst.d)) ++v;
    Contraction c = contract(inst, v);
    if (h.empty()) return Step::query(encode_sarrival(c.sub));

    std::vector<uint8_t> flip(inst.n + 1, 0);
    RunProfile m1 = decode_profile(h[0].answer);
    add_into(run, c.lift(m1, flip));
    Arrival a = classify(inst, c, c.sub, m1, flip);
    if (a != Arrival::AtV) return Step::finish(encode_profile(run));
    if (inst.s0[v] == inst.d) {
      ++run.at(v, 0);
      return Step::finish(encode_profile(run));
    }
    // (v, d) sits on slot 1: leave v by slot 0 and resume with switches in
    // their current positions
    ++run.at(v, 0);
    SArrivalInstance second = c.sub;
    for (uint32_t u = 0; u <= inst.n; ++u) {
      if (u == inst.d || run.out(u) % 2 == 0) continue;
      flip[u] = 1;
      uint32_t su = c.to_sub(u);
      std::swap(second.s0[su], second.s1[su]);
    }
    second.o = c.to_sub(inst.s0[v]);
    if (h.size() == 1) return Step::query(encode_sarrival(second));

    RunProfile m2 = decode_profile(h[1].answer);
    add_into(run, c.lift(m2, flip));
    a = classify(inst, c, second, m2, flip);
    if (a != Arrival::AtV) return Step::finish(encode_profile(run));
    if (inst.s1[v] != inst.d) fail(ErrorCode::CaseExhaustion, "second arrival at v does not continue to d");
    ++run.at(v, 1);
    return Step::finish(encode_profile(run));
  }

  size_t width_bound(const BitString&) const override { return 2; }
  size_t size_growth(uint64_t) const override { return 0; }
  BitString dummy_instance() const override {
    SwitchGraph g{1, {0}, {0}};
    return encode_sarrival(build_instance(g, 0, 0));
  }
};

}  // namespace

ProblemPtr sarrival_problem() { return std::make_shared<SArrivalProblem>(); }

DsrPtr sarrival_dsr() { return std::make_shared<SArrivalDsr>(); }

}  // namespace tfs
