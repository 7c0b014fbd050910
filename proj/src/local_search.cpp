#include "tfs/local_search.hpp"

#include "tfs/bitio.hpp"
#include "tfs/error.hpp"

namespace tfs {

SodAnswer solve_sod_pathfollow(const SinkOfDagInstance& inst, const BitString& start, uint64_t max_steps,
                               std::vector<uint64_t>* potentials) {
  BitString v = start;
  BitString sv = inst.S(v);
  if (sv == v) fail(ErrorCode::NoSolution, "start vertex is a fixed point of S");
  uint64_t vv = inst.V(v);
  if (potentials) potentials->push_back(vv);
  uint64_t steps = 0;
  for (;;) {
    if (++steps > max_steps)
      fail(ErrorCode::StepBudgetExceeded, "path following exceeded " + std::to_string(max_steps) + " steps");
    BitString ssv = inst.S(sv);
    uint64_t vsv = inst.V(sv);
    if (potentials) potentials->push_back(vsv);
    if (ssv == sv || vsv <= vv) return {v, steps};
    v = std::move(sv);
    sv = std::move(ssv);
    vv = vsv;
  }
}

bool verify_sod_solution(const SinkOfDagInstance& inst, const BitString& v) {
  if (v.size() != inst.vertex_bits) return false;
  BitString sv = inst.S(v);
  if (sv == v) return false;
  BitString ssv = inst.S(sv);
  return ssv == sv || inst.V(sv) <= inst.V(v);
}

SodAnswer solve_sod_scan(const SinkOfDagInstance& inst) {
  if (inst.vertex_bits > 20) fail(ErrorCode::BudgetError, "vertex space too large to scan");
  BitString v(inst.vertex_bits);
  do {
    if (verify_sod_solution(inst, v)) return {v, 0};
  } while (v.increment());
  fail(ErrorCode::NoSolution, "every vertex is a fixed point or lies on an increasing edge");
}

bool verify_sovl_solution(const SovlInstance& inst, const BitString& v) {
  return v.size() == inst.sod.vertex_bits && inst.W(v, inst.target);
}

SinkOfDagInstance ToySod::instance() const {
  auto self = std::make_shared<ToySod>(*this);
  SinkOfDagInstance out;
  out.vertex_bits = vertex_bits;
  out.S = [self](const BitString& v) {
    return BitString::from_uint(self->S[v.to_uint()], self->vertex_bits);
  };
  out.V = [self](const BitString& v) { return self->V[v.to_uint()]; };
  return out;
}

BitString ToySod::encode() const {
  BitWriter w;
  w.put(vertex_bits, 8);
  w.put(value_bits, 8);
  for (uint64_t s : S) w.put(s, vertex_bits);
  for (uint64_t v : V) w.put(v, value_bits);
  return w.take();
}

ToySod ToySod::decode(const BitString& bits) {
  BitReader r(bits);
  ToySod t;
  t.vertex_bits = r.get(8);
  t.value_bits = r.get(8);
  if (t.vertex_bits > 20 || t.value_bits > 63) fail(ErrorCode::ParseError, "toy SoD widths out of range");
  size_t n = size_t{1} << t.vertex_bits;
  t.S.resize(n);
  t.V.resize(n);
  for (auto& s : t.S) s = r.get(t.vertex_bits);
  for (auto& v : t.V) v = r.get(t.value_bits);
  r.expect_end();
  return t;
}

nlohmann::json ToySod::to_json() const {
  return {{"vertex_bits", vertex_bits}, {"value_bits", value_bits}, {"S", S}, {"V", V}};
}

ToySod ToySod::from_json(const nlohmann::json& j) {
  ToySod t;
  try {
    t.vertex_bits = j.at("vertex_bits").get<size_t>();
    t.S = j.at("S").get<std::vector<uint64_t>>();
    t.V = j.at("V").get<std::vector<uint64_t>>();
    uint64_t vmax = 0;
    for (uint64_t v : t.V) vmax = std::max(vmax, v);
    t.value_bits = j.contains("value_bits") ? j.at("value_bits").get<size_t>() : std::max<size_t>(1, bits_for(vmax));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("SoD json: ") + e.what());
  }
  size_t n = size_t{1} << t.vertex_bits;
  if (t.vertex_bits > 20 || t.S.size() != n || t.V.size() != n)
    fail(ErrorCode::ParseError, "SoD tables must have 2^vertex_bits entries");
  for (uint64_t s : t.S)
    if (s >= n) fail(ErrorCode::ParseError, "successor out of range");
  for (uint64_t v : t.V)
    if (t.value_bits < 64 && v >> t.value_bits) fail(ErrorCode::ParseError, "value exceeds value_bits");
  return t;
}

bool rss_admissible_length(uint64_t length, const RssConfig& cfg) {
  if (length == 0 || (length & (length - 1))) return false;
  uint64_t e = bits_for(length) - 1;  // length = 2^e
  if (e % cfg.exponent_scale) return false;
  uint64_t q = e / cfg.exponent_scale;
  return q != 0 && (q & (q - 1)) == 0;
}

bool rss_verify(const BitString& x, const BitString& y, const RssConfig& cfg) {
  if (!rss_admissible_length(x.size(), cfg)) return y == BitString::from_string("0");
  size_t t = 0;
  while (t < x.size() && !x[t]) ++t;
  if (t == x.size()) fail(ErrorCode::ParseError, "padded instance is all zeros");
  ToySod inner = ToySod::decode(x.substr(t + 1, x.size() - t - 1));
  return y.size() == inner.vertex_bits && verify_sod_solution(inner.instance(), y);
}

BitString reduce_sod_to_rss(const BitString& xprime, const RssConfig& cfg) {
  uint64_t n = xprime.size();
  if (n < 2) fail(ErrorCode::InputError, "instance must have at least 2 bits");
  uint64_t log_n = bits_for(n - 1);  // ceil(log2 n)
  uint64_t j = bits_for(log_n - 1);  // ceil(log2 ceil(log2 n))
  uint64_t k = j + 1;
  uint64_t exponent = cfg.exponent_scale << k;
  if (exponent > 24) fail(ErrorCode::BudgetError, "padded length 2^" + std::to_string(exponent) + " too large");
  uint64_t padded = uint64_t{1} << exponent;
  BitString out(padded - n - 1);
  out.push_back(true);
  out.append(xprime);
  return out;
}

}  // namespace tfs
