#include "tfs/plcp.hpp"

#include "tfs/bitio.hpp"
#include "tfs/error.hpp"

namespace tfs {

namespace mp = boost::multiprecision;

namespace {

constexpr size_t kLenBits = 16;

size_t bit_length(const BigInt& v) { return v == 0 ? 0 : mp::msb(v) + 1; }

void put_big(BitWriter& w, const BigInt& v) {
  size_t len = bit_length(v);
  if (len >= (size_t{1} << kLenBits)) fail(ErrorCode::InputError, "rational too large to encode");
  w.put(len, kLenBits);
  for (size_t i = len; i-- > 0;) w.put_bit(mp::bit_test(v, static_cast<unsigned>(i)));
}

BigInt get_big(BitReader& r) {
  size_t len = r.get(kLenBits);
  BigInt v = 0;
  for (size_t i = 0; i < len; ++i) {
    bool b = r.get_bit();
    if (i == 0 && !b) fail(ErrorCode::ParseError, "integer field has a leading zero");
    v = (v << 1) | (b ? 1 : 0);
  }
  return v;
}

void put_rational(BitWriter& w, const Rational& x) {
  w.put_bit(x < 0);
  put_big(w, mp::abs(mp::numerator(x)));
  put_big(w, mp::denominator(x));
}

Rational get_rational(BitReader& r) {
  bool neg = r.get_bit();
  BigInt num = get_big(r);
  BigInt den = get_big(r);
  if (den == 0) fail(ErrorCode::ParseError, "zero denominator");
  if (mp::gcd(num, den) != 1 && !(num == 0 && den == 1)) fail(ErrorCode::ParseError, "rational not in lowest terms");
  if (num == 0 && (neg || den != 1)) fail(ErrorCode::ParseError, "non-canonical zero");
  Rational x(num, den);
  return neg ? Rational(-x) : x;
}

Rational parse_rational(const nlohmann::json& e) {
  if (e.is_number_integer()) return Rational(e.get<long long>());
  if (e.is_array() && e.size() == 2) {
    auto part = [](const nlohmann::json& v) {
      return v.is_string() ? BigInt(v.get<std::string>()) : BigInt(v.get<long long>());
    };
    BigInt den = part(e[1]);
    if (den == 0) fail(ErrorCode::ParseError, "zero denominator");
    return Rational(part(e[0]), den);
  }
  if (e.is_string()) {
    std::string s = e.get<std::string>();
    try {
      auto slash = s.find('/');
      if (slash == std::string::npos) return Rational(BigInt(s));
      BigInt den(s.substr(slash + 1));
      if (den == 0) fail(ErrorCode::ParseError, "zero denominator");
      return Rational(BigInt(s.substr(0, slash)), den);
    } catch (const std::runtime_error& ex) {
      if (dynamic_cast<const Error*>(&ex)) throw;
      fail(ErrorCode::ParseError, "bad rational '" + s + "'");
    }
  }
  fail(ErrorCode::ParseError, "rational must be an integer, \"p/q\" or [p, q]");
}

}  // namespace

std::string rational_to_string(const Rational& r) {
  if (mp::denominator(r) == 1) return mp::numerator(r).str();
  return mp::numerator(r).str() + "/" + mp::denominator(r).str();
}

bool is_p_matrix(const RatMatrix& M) {
  const Eigen::Index n = M.rows();
  if (n > 12) fail(ErrorCode::BudgetError, "principal minor enumeration capped at n = 12");
  for (uint64_t mask = 1; mask < (uint64_t{1} << n); ++mask) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < n; ++i)
      if ((mask >> i) & 1) idx.push_back(i);
    RatMatrix sub(idx.size(), idx.size());
    for (size_t r = 0; r < idx.size(); ++r)
      for (size_t c = 0; c < idx.size(); ++c) sub(r, c) = M(idx[r], idx[c]);
    if (determinant(sub) <= 0) return false;
  }
  return true;
}

bool lcp_verify(const LcpInstance& inst, const RatVector& z) {
  if (z.size() != inst.n()) return false;
  for (Eigen::Index i = 0; i < z.size(); ++i)
    if (z(i) < 0) return false;
  RatVector y = inst.q + inst.M.lazyProduct(z);
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y(i) < 0 || z(i) * y(i) != 0) return false;
  return true;
}

LcpInstance lcp_minor(const LcpInstance& inst, Eigen::Index i) {
  const Eigen::Index n = inst.n();
  LcpInstance out;
  out.M.resize(n - 1, n - 1);
  out.q.resize(n - 1);
  for (Eigen::Index r = 0, rr = 0; r < n; ++r) {
    if (r == i) continue;
    out.q(rr) = inst.q(r);
    for (Eigen::Index c = 0, cc = 0; c < n; ++c) {
      if (c == i) continue;
      out.M(rr, cc++) = inst.M(r, c);
    }
    ++rr;
  }
  return out;
}

BitString encode_lcp(const LcpInstance& inst) {
  BitWriter w;
  w.put(inst.n(), 8);
  for (Eigen::Index r = 0; r < inst.n(); ++r)
    for (Eigen::Index c = 0; c < inst.n(); ++c) put_rational(w, inst.M(r, c));
  for (Eigen::Index r = 0; r < inst.n(); ++r) put_rational(w, inst.q(r));
  return w.take();
}

LcpInstance decode_lcp(const BitString& bits) {
  BitReader r(bits);
  Eigen::Index n = static_cast<Eigen::Index>(r.get(8));
  LcpInstance inst;
  inst.M.resize(n, n);
  inst.q.resize(n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) inst.M(i, j) = get_rational(r);
  for (Eigen::Index i = 0; i < n; ++i) inst.q(i) = get_rational(r);
  r.expect_end();
  return inst;
}

BitString encode_rational_vector(const RatVector& v) {
  BitWriter w;
  w.put(v.size(), 8);
  for (Eigen::Index i = 0; i < v.size(); ++i) put_rational(w, v(i));
  return w.take();
}

RatVector decode_rational_vector(const BitString& bits) {
  BitReader r(bits);
  RatVector v(static_cast<Eigen::Index>(r.get(8)));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = get_rational(r);
  r.expect_end();
  return v;
}

size_t lcp_solution_bound(const LcpInstance& inst) {
  // Every solution solves M_SS z_S = -q_S for its support S. After scaling
  // each row of [M | q] to integers, Cramer's rule and Hadamard's bound cap
  // numerator and denominator by the product of the row norms.
  const Eigen::Index n = inst.n();
  BigInt h2 = 1;
  for (Eigen::Index r = 0; r < n; ++r) {
    BigInt l = 1;
    for (Eigen::Index c = 0; c <= n; ++c) {
      const Rational& e = c < n ? inst.M(r, c) : inst.q(r);
      l = mp::lcm(l, BigInt(mp::denominator(e)));
    }
    BigInt norm2 = 0;
    for (Eigen::Index c = 0; c <= n; ++c) {
      const Rational& e = c < n ? inst.M(r, c) : inst.q(r);
      BigInt v = mp::numerator(e) * (l / mp::denominator(e));
      norm2 += v * v;
    }
    if (norm2 > 1) h2 *= norm2;
  }
  size_t b = bit_length(h2) / 2 + 1;
  return 8 + static_cast<size_t>(n) * (1 + 2 * (kLenBits + b));
}

nlohmann::json lcp_to_json(const LcpInstance& inst) {
  nlohmann::json M = nlohmann::json::array(), q = nlohmann::json::array();
  for (Eigen::Index r = 0; r < inst.n(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < inst.n(); ++c) row.push_back(rational_to_string(inst.M(r, c)));
    M.push_back(row);
    q.push_back(rational_to_string(inst.q(r)));
  }
  return {{"problem", "plcp"}, {"M", M}, {"q", q}};
}

LcpInstance lcp_from_json(const nlohmann::json& j) {
  try {
    const auto& M = j.at("M");
    const auto& q = j.at("q");
    Eigen::Index n = static_cast<Eigen::Index>(q.size());
    if (n > 255 || M.size() != q.size()) fail(ErrorCode::ParseError, "M must be n×n with n = |q| <= 255");
    LcpInstance inst;
    inst.M.resize(n, n);
    inst.q.resize(n);
    for (Eigen::Index r = 0; r < n; ++r) {
      if (M[r].size() != q.size()) fail(ErrorCode::ParseError, "M is not square");
      for (Eigen::Index c = 0; c < n; ++c) inst.M(r, c) = parse_rational(M[r][c]);
      inst.q(r) = parse_rational(q[r]);
    }
    return inst;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("plcp json: ") + e.what());
  }
}

LcpInstance plcp_random_spd(Eigen::Index n, Rng& rng, int range) {
  auto draw = [&](int lo, int hi) { return lo + static_cast<int>(uniform_below(rng, hi - lo + 1)); };
  RatMatrix B(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) B(r, c) = draw(-range, range);
  LcpInstance inst;
  inst.M = B.transpose().lazyProduct(B) + RatMatrix::Identity(n, n);
  inst.q.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) inst.q(i) = Rational(draw(-3 * range, 3 * range), draw(1, 3));
  return inst;
}

namespace {

class PlcpProblem final : public SearchProblem {
 public:
  std::string name() const override { return "plcp"; }
  int verifier_level() const override { return 0; }
  bool promise(const BitString& x) const override {
    try {
      return is_p_matrix(decode_lcp(x).M);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::BudgetError) throw;
      return false;
    }
  }
  bool verify(const BitString& x, const BitString& y) const override {
    try {
      return lcp_verify(decode_lcp(x), decode_rational_vector(y));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::BudgetError) throw;
      return false;
    }
  }
  size_t solution_bound(const BitString& x) const override { return lcp_solution_bound(decode_lcp(x)); }
  bool unique() const override { return true; }
};

class PlcpDsr final : public Dsr {
 public:
  uint64_t mu(const BitString& x) const override { return decode_lcp(x).n(); }

  Step step(const BitString& x, History h, const BitString&) const override {
    LcpInstance inst = decode_lcp(x);
    const Eigen::Index n = inst.n();
    if (n == 0) return Step::finish(encode_rational_vector(RatVector(0)));
    if (h.empty()) {
      auto z = solve_exact<Rational>(inst.M, -inst.q);
      if (z && (z->array() >= 0).all()) return Step::finish(encode_rational_vector(*z));
    }
    auto k = static_cast<Eigen::Index>(h.size());
    if (k < n) return Step::query(encode_lcp(lcp_minor(inst, k)));
    for (Eigen::Index i = 0; i < n; ++i) {
      RatVector zi = decode_rational_vector(h[i].answer);
      if (zi.size() != n - 1) continue;
      RatVector z(n);
      z << zi.head(i), Rational(0), zi.tail(n - 1 - i);
      if (lcp_verify(inst, z)) return Step::finish(encode_rational_vector(z));
    }
    fail(ErrorCode::NoBranchVerifies, "no minor answer extends to a solution");
  }

  size_t width_bound(const BitString& root) const override { return decode_lcp(root).n(); }
  size_t size_growth(uint64_t) const override { return 0; }
  BitString dummy_instance() const override { return encode_lcp(LcpInstance{}); }
};

}  // namespace

ProblemPtr plcp_problem() { return std::make_shared<PlcpProblem>(); }

DsrPtr plcp_dsr() { return std::make_shared<PlcpDsr>(); }

}  // namespace tfs
