#include "tfs/tarski.hpp"

#include <algorithm>

#include "tfs/bitio.hpp"
#include "tfs/error.hpp"

namespace tfs {

namespace {

bool leq(const Point& a, const Point& b) {
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

uint64_t ceil_log2(uint64_t v) {
  uint64_t k = 0;
  while ((uint64_t{1} << k) < v) ++k;
  return k;
}

void put_point(BitWriter& w, const Point& p, size_t n) {
  for (uint32_t v : p) w.put(v - 1, n);
}

Point get_point(BitReader& r, size_t count, size_t n) {
  Point p(count);
  for (uint32_t& v : p) v = static_cast<uint32_t>(r.get(n) + 1);
  return p;
}

}  // namespace

uint64_t TarskiFunction::points() const {
  uint64_t p = 1;
  for (size_t i = 0; i < d; ++i) p *= N();
  return p;
}

uint64_t TarskiFunction::index(const Point& x) const {
  uint64_t k = 0;
  for (uint32_t v : x) k = k * N() + (v - 1);
  return k;
}

Point TarskiFunction::point(uint64_t index) const {
  Point x(d);
  for (size_t i = d; i-- > 0;) {
    x[i] = static_cast<uint32_t>(index % N() + 1);
    index /= N();
  }
  return x;
}

Point TarskiFunction::eval(const Point& x) const {
  uint64_t k = index(x) * d;
  return Point(table.begin() + k, table.begin() + k + d);
}

TarskiFunction TarskiFunction::from_circuit(const Circuit& c, size_t n, size_t d) {
  if (c.num_inputs != n * d || c.outputs.size() != n * d)
    fail(ErrorCode::ParseError, "tarski circuit must map d*n bits to d*n bits");
  if (n * d > 20) fail(ErrorCode::BudgetError, "tarski circuit too large to tabulate");
  TarskiFunction f{n, d, {}};
  for (uint64_t k = 0; k < f.points(); ++k) {
    BitString out = eval_circuit(c, BitString::from_uint(k, n * d));
    for (size_t i = 0; i < d; ++i) f.table.push_back(static_cast<uint32_t>(out.substr(i * n, n).to_uint() + 1));
  }
  return f;
}

nlohmann::json TarskiFunction::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (uint64_t k = 0; k < points(); ++k) rows.push_back(eval(point(k)));
  return {{"problem", "tarski"}, {"N", N()}, {"d", d}, {"table", rows}};
}

TarskiFunction TarskiFunction::from_json(const nlohmann::json& j) {
  try {
    size_t N = j.at("N").get<size_t>();
    size_t d = j.at("d").get<size_t>();
    if (N == 0 || (N & (N - 1)) || d == 0 || d > 15) fail(ErrorCode::ParseError, "tarski needs N = 2^n and 1 <= d <= 15");
    size_t n = bits_for(N - 1);
    if (j.contains("circuit")) return from_circuit(circuit_from_json(j.at("circuit")), n, d);
    TarskiFunction f{n, d, {}};
    const auto& rows = j.at("table");
    if (rows.size() != f.points()) fail(ErrorCode::ParseError, "tarski table has wrong number of rows");
    for (const auto& row : rows) {
      auto v = row.get<std::vector<uint32_t>>();
      if (v.size() != d) fail(ErrorCode::ParseError, "tarski table row has wrong arity");
      for (uint32_t x : v)
        if (x < 1 || x > N) fail(ErrorCode::ParseError, "tarski value outside 1..N");
      f.table.insert(f.table.end(), v.begin(), v.end());
    }
    return f;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("tarski json: ") + e.what());
  }
}

uint64_t TarskiPlusInstance::lattice_size() const {
  uint64_t s = 1;
  for (size_t i = 0; i < lo.size(); ++i) s *= hi[i] - lo[i] + 1;
  return s;
}

bool TarskiPlusInstance::in_box(const Point& x) const {
  if (x.size() != c.d) return false;
  for (size_t i = 0; i < t - 1; ++i)
    if (x[i] < lo[i] || x[i] > hi[i]) return false;
  for (size_t i = t - 1; i < c.d; ++i)
    if (x[i] != fixed[i - (t - 1)]) return false;
  return true;
}

Point TarskiPlusInstance::f(const Point& x) const {
  Point y = c.eval(x);
  y.resize(t - 1);
  return y;
}

BitString encode_tarski(const TarskiPlusInstance& inst) {
  const TarskiFunction& c = inst.c;
  BitWriter w;
  w.put(c.n, 5);
  w.put(c.d, 4);
  w.put(inst.t, 5);
  for (uint32_t v : c.table) w.put(v - 1, c.n);
  put_point(w, inst.lo, c.n);
  put_point(w, inst.hi, c.n);
  put_point(w, inst.fixed, c.n);
  return w.take();
}

TarskiPlusInstance decode_tarski(const BitString& bits) {
  BitReader r(bits);
  TarskiPlusInstance inst;
  TarskiFunction& c = inst.c;
  c.n = r.get(5);
  c.d = r.get(4);
  inst.t = r.get(5);
  if (c.d == 0 || inst.t < 2 || inst.t > c.d + 1) fail(ErrorCode::ParseError, "tarski header out of range");
  if (c.n * c.d > 24) fail(ErrorCode::BudgetError, "tarski table too large");
  c.table.resize(c.points() * c.d);
  for (uint32_t& v : c.table) v = static_cast<uint32_t>(r.get(c.n) + 1);
  inst.lo = get_point(r, inst.t - 1, c.n);
  inst.hi = get_point(r, inst.t - 1, c.n);
  inst.fixed = get_point(r, c.d - inst.t + 1, c.n);
  r.expect_end();
  if (!leq(inst.lo, inst.hi)) fail(ErrorCode::ParseError, "tarski box is empty");
  return inst;
}

size_t tarski_solution_bits(const TarskiPlusInstance& inst) { return 2 + 2 * inst.c.d * inst.c.n; }

BitString encode_tarski_solution(const TarskiPlusInstance& inst, const TarskiSolution& s) {
  size_t n = inst.c.n, d = inst.c.d;
  BitWriter w;
  w.put(static_cast<uint64_t>(s.kind), 2);
  put_point(w, s.x, n);
  if (s.kind == TarskiKind::Violation) put_point(w, s.y, n);
  else w.put(0, d * n);
  return w.take();
}

std::optional<TarskiSolution> decode_tarski_solution(const TarskiPlusInstance& inst, const BitString& bits) {
  if (bits.size() != tarski_solution_bits(inst)) return std::nullopt;
  BitReader r(bits);
  uint64_t kind = r.get(2);
  if (kind > 2) return std::nullopt;
  TarskiSolution s;
  s.kind = static_cast<TarskiKind>(kind);
  s.x = get_point(r, inst.c.d, inst.c.n);
  if (s.kind == TarskiKind::Violation) {
    s.y = get_point(r, inst.c.d, inst.c.n);
  } else if (!r.get_bits(inst.c.d * inst.c.n).all_zero()) {
    return std::nullopt;
  }
  return s;
}

bool tarski_verify(const TarskiPlusInstance& inst, const TarskiSolution& s) {
  if (!inst.in_box(s.x)) return false;
  Point fx = inst.f(s.x);
  switch (s.kind) {
    case TarskiKind::Fixpoint:
      return std::equal(fx.begin(), fx.end(), s.x.begin());
    case TarskiKind::Violation:
      return inst.in_box(s.y) && leq(s.x, s.y) && !leq(fx, inst.f(s.y));
    case TarskiKind::Escape:
      return !(leq(inst.lo, fx) && leq(fx, inst.hi));
  }
  return false;
}

uint64_t mu_tarski(const TarskiPlusInstance& inst) { return inst.t + ceil_log2(inst.lattice_size()); }

TarskiPlusInstance tarski_to_plus(const TarskiFunction& c) {
  TarskiPlusInstance inst;
  inst.c = c;
  inst.t = c.d + 1;
  inst.lo.assign(c.d, 1);
  inst.hi.assign(c.d, static_cast<uint32_t>(c.N()));
  return inst;
}

bool is_monotone(const TarskiFunction& c) {
  // enough to compare each point with its unit successors
  for (uint64_t k = 0; k < c.points(); ++k) {
    Point x = c.point(k);
    Point fx = c.eval(x);
    for (size_t i = 0; i < c.d; ++i) {
      if (x[i] == c.N()) continue;
      Point y = x;
      ++y[i];
      if (!leq(fx, c.eval(y))) return false;
    }
  }
  return true;
}

std::vector<Point> tarski_fixed_points(const TarskiFunction& c) {
  std::vector<Point> out;
  for (uint64_t k = 0; k < c.points(); ++k) {
    Point x = c.point(k);
    if (c.eval(x) == x) out.push_back(x);
  }
  return out;
}

TarskiFunction tarski_random(size_t n, size_t d, Rng& rng) {
  TarskiFunction c{n, d, {}};
  c.table.resize(c.points() * d);
  for (uint32_t& v : c.table) v = static_cast<uint32_t>(uniform_below(rng, c.N()) + 1);
  return c;
}

TarskiFunction tarski_random_monotone(size_t n, size_t d, Rng& rng) {
  TarskiFunction c = tarski_random(n, d, rng);
  // prefix max along each axis in turn yields the max over the down-set
  uint64_t stride = 1;
  for (size_t axis = d; axis-- > 0;) {
    for (uint64_t k = 0; k < c.points(); ++k) {
      if ((k / stride) % c.N() == 0) continue;
      uint64_t prev = k - stride;
      for (size_t i = 0; i < d; ++i) c.table[k * d + i] = std::max(c.table[k * d + i], c.table[prev * d + i]);
    }
    stride *= c.N();
  }
  return c;
}

namespace {

class TarskiProblem final : public SearchProblem {
 public:
  std::string name() const override { return "tarski"; }
  int verifier_level() const override { return 0; }
  bool promise(const BitString& x) const override {
    try {
      decode_tarski(x);
      return true;
    } catch (const Error&) {
      return false;
    }
  }
  bool verify(const BitString& x, const BitString& y) const override {
    try {
      TarskiPlusInstance inst = decode_tarski(x);
      auto s = decode_tarski_solution(inst, y);
      return s && tarski_verify(inst, *s);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::BudgetError) throw;
      return false;
    }
  }
  size_t solution_bound(const BitString& x) const override { return tarski_solution_bits(decode_tarski(x)); }
};

Point full_point(const TarskiPlusInstance& inst, const Point& free) {
  Point x = free;
  x.insert(x.end(), inst.fixed.begin(), inst.fixed.end());
  return x;
}

TarskiSolution binary_search(const TarskiPlusInstance& inst) {
  auto at = [&](uint32_t v) { return full_point(inst, {v}); };
  auto fv = [&](uint32_t v) { return inst.f(at(v))[0]; };
  uint32_t lo = inst.lo[0], hi = inst.hi[0];
  uint32_t flo = fv(lo);
  if (flo < lo) return {TarskiKind::Escape, at(lo), {}};
  if (flo == lo) return {TarskiKind::Fixpoint, at(lo), {}};
  uint32_t fhi = fv(hi);
  if (fhi > hi) return {TarskiKind::Escape, at(hi), {}};
  if (fhi == hi) return {TarskiKind::Fixpoint, at(hi), {}};
  // f(lo) > lo and f(hi) < hi
  while (hi - lo > 1) {
    uint32_t mid = lo + (hi - lo) / 2;
    uint32_t fm = fv(mid);
    if (fm == mid) return {TarskiKind::Fixpoint, at(mid), {}};
    if (fm > mid) lo = mid;
    else hi = mid;
  }
  return {TarskiKind::Violation, at(lo), at(hi)};
}

std::vector<Point> box_points(const TarskiPlusInstance& inst) {
  std::vector<Point> pts;
  Point free = inst.lo;
  for (;;) {
    pts.push_back(full_point(inst, free));
    size_t i = free.size();
    while (i > 0 && free[i - 1] == inst.hi[i - 1]) {
      free[i - 1] = inst.lo[i - 1];
      --i;
    }
    if (i == 0) return pts;
    ++free[i - 1];
  }
}

TarskiSolution brute_force(const TarskiPlusInstance& inst) {
  std::vector<Point> pts = box_points(inst);
  std::vector<Point> img;
  for (const Point& x : pts) img.push_back(inst.f(x));
  for (size_t k = 0; k < pts.size(); ++k)
    if (std::equal(img[k].begin(), img[k].end(), pts[k].begin())) return {TarskiKind::Fixpoint, pts[k], {}};
  for (size_t k = 0; k < pts.size(); ++k)
    if (!(leq(inst.lo, img[k]) && leq(img[k], inst.hi))) return {TarskiKind::Escape, pts[k], {}};
  for (size_t a = 0; a < pts.size(); ++a)
    for (size_t b = 0; b < pts.size(); ++b)
      if (leq(pts[a], pts[b]) && !leq(img[a], img[b])) return {TarskiKind::Violation, pts[a], pts[b]};
  fail(ErrorCode::CaseExhaustion, "self-map of a finite box without fixed point or violation");
}

class TarskiDsr final : public Dsr {
 public:
  explicit TarskiDsr(uint64_t threshold) : threshold_(threshold) {}

  uint64_t mu(const BitString& x) const override { return mu_tarski(decode_tarski(x)); }

  Step step(const BitString& x, History h, const BitString&) const override {
    TarskiPlusInstance inst = decode_tarski(x);
    auto done = [&](const TarskiSolution& s) { return Step::finish(encode_tarski_solution(inst, s)); };
    if (inst.t == 2) return done(binary_search(inst));
    if (inst.lattice_size() <= threshold_) return done(brute_force(inst));

    size_t k = inst.t - 2;  // 0-based index of coordinate t'
    uint32_t m = (inst.lo[k] + inst.hi[k] + 1) / 2;
    TarskiPlusInstance sub = inst;
    sub.t = inst.t - 1;
    sub.lo.resize(k);
    sub.hi.resize(k);
    sub.fixed.insert(sub.fixed.begin(), m);
    if (h.empty()) return Step::query(encode_tarski(sub));

    TarskiSolution a = answer(sub, h[0]);
    if (a.kind != TarskiKind::Fixpoint) return done(a);
    Point xs = a.x;
    Point p = inst.f(xs);
    uint32_t v = p[k];
    if (v < inst.lo[k] || v > inst.hi[k]) return done({TarskiKind::Escape, xs, {}});
    if (v == m) return done({TarskiKind::Fixpoint, xs, {}});
    bool upper = v > m;
    TarskiPlusInstance sub2 = inst;
    (upper ? sub2.lo : sub2.hi) = p;
    if (h.size() == 1) return Step::query(encode_tarski(sub2));

    TarskiSolution b = answer(sub2, h[1]);
    if (b.kind != TarskiKind::Escape) return done(b);
    Point fz = inst.f(b.x);
    if (upper) {
      if (!leq(p, fz)) return done({TarskiKind::Violation, xs, b.x});
      return done(b);
    }
    if (leq(fz, p)) return done(b);
    // f(z) ⋠ p: either f(p) ⪯ p and (z, p) is a violation, or p ⪯ x* with
    // f(p) ⋠ f(x*) = p
    Point pf = full_point(inst, p);
    if (leq(inst.f(pf), p)) return done({TarskiKind::Violation, b.x, pf});
    return done({TarskiKind::Violation, pf, xs});
  }

  size_t width_bound(const BitString& root) const override {
    TarskiPlusInstance inst = decode_tarski(root);
    return inst.t > 2 && inst.lattice_size() > threshold_ ? 2 : 0;
  }
  size_t size_growth(uint64_t) const override { return 0; }
  BitString dummy_instance() const override {
    TarskiPlusInstance inst;
    inst.c = {0, 1, {1}};
    inst.t = 2;
    inst.lo = {1};
    inst.hi = {1};
    return encode_tarski(inst);
  }

 private:
  static TarskiSolution answer(const TarskiPlusInstance& sub, const QueryAnswer& qa) {
    auto s = decode_tarski_solution(sub, qa.answer);
    if (!s) fail(ErrorCode::ContractViolation, "sub-answer is not a tarski solution");
    return *s;
  }

  uint64_t threshold_;
};

}  // namespace

ProblemPtr tarski_problem() { return std::make_shared<TarskiProblem>(); }

DsrPtr tarski_dsr(uint64_t brute_threshold) { return std::make_shared<TarskiDsr>(brute_threshold); }

}  // namespace tfs
