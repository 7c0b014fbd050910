#include "tfs/dsr.hpp"

#include <algorithm>

#include "tfs/bitio.hpp"
#include "tfs/error.hpp"
#include "tfs/quantified.hpp"

namespace tfs {

namespace {

BitString random_tape(Rng& rng, size_t bits) {
  BitString t(bits);
  for (size_t i = 0; i < bits; ++i) t.set(i, rng() & 1);
  return t;
}

BitString recurse(const SearchProblem& p, const Dsr& d, const BitString& x, Rng& rng,
                  RecursionStats* stats, uint64_t depth) {
  if (stats) {
    ++stats->calls;
    stats->max_depth = std::max(stats->max_depth, depth);
  }
  BitString tape = random_tape(rng, d.randomness_bits(x.size()));
  std::vector<QueryAnswer> history;
  for (;;) {
    Step st = d.step(x, history, tape);
    if (st.done) {
      if (!p.verify(x, st.payload))
        fail(ErrorCode::BadSolution, p.name() + ": level at depth " + std::to_string(depth) +
                                         " returned a non-verifying answer");
      return st.payload;
    }
    if (stats) ++stats->queries;
    BitString answer = recurse(p, d, st.payload, rng, stats, depth + 1);
    history.push_back({std::move(st.payload), std::move(answer)});
  }
}

struct Auditor {
  const SearchProblem& p;
  const Dsr& d;
  Rng& rng;
  size_t width;
  AuditReport report;

  void record(ViolationKind k, const BitString& x, const BitString& q, std::string detail) {
    report.violations.push_back({k, x, q, std::move(detail)});
  }

  std::optional<BitString> frame(const BitString& x) {
    ++report.frames;
    BitString tape = random_tape(rng, d.randomness_bits(x.size()));
    uint64_t mx = d.mu(x);
    std::vector<QueryAnswer> history;
    for (;;) {
      Step st;
      try {
        st = d.step(x, history, tape);
      } catch (const Error& e) {
        record(ViolationKind::BadSolution, x, {}, std::string("step failed: ") + e.what());
        return std::nullopt;
      }
      if (st.done) {
        if (!p.verify(x, st.payload)) {
          record(ViolationKind::BadSolution, x, st.payload, "answer does not verify");
          return std::nullopt;
        }
        return st.payload;
      }
      const BitString& q = st.payload;
      if (history.size() >= width) {
        record(ViolationKind::WidthExceeded, x, q,
               "query " + std::to_string(history.size() + 1) + " exceeds width " +
                   std::to_string(width));
        return std::nullopt;
      }
      if (!p.promise(q)) {
        record(ViolationKind::PromiseBroken, x, q, "query outside the promise");
        return std::nullopt;
      }
      uint64_t mq = d.mu(q);
      if (mq >= mx) {
        record(ViolationKind::MuNotDecreasing, x, q,
               "mu(q)=" + std::to_string(mq) + " >= mu(x)=" + std::to_string(mx));
        return std::nullopt;
      }
      if (q.size() > x.size() + d.size_growth(mx))
        record(ViolationKind::SizeExceeded, x, q,
               "|q|=" + std::to_string(q.size()) + " > |x|+l(mu)=" +
                   std::to_string(x.size() + d.size_growth(mx)));
      auto answer = frame(q);
      if (!answer) return std::nullopt;
      history.push_back({q, std::move(*answer)});
    }
  }
};

}  // namespace

std::optional<BitString> least_violation(const EssentiallyUnique& eu, const BitString& x) {
  if (eu.least_v1) return eu.least_v1(x);
  return lex_smallest(eu.witness_length(x), [&](const BitString& b) { return eu.v1(x, b); });
}

namespace {

class UniqueProblem final : public SearchProblem {
 public:
  explicit UniqueProblem(ProblemPtr base) : base_(std::move(base)), eu_(*base_->essentially_unique()) {}

  std::string name() const override { return base_->name() + "_u"; }
  int verifier_level() const override { return base_->verifier_level(); }
  bool promise(const BitString& x) const override { return base_->promise(x); }
  bool verify(const BitString& x, const BitString& y) const override {
    auto least = least_violation(eu_, x);
    if (least) return y == *least;
    return eu_.v2(x, y);
  }
  size_t solution_bound(const BitString& x) const override { return base_->solution_bound(x); }
  bool unique() const override { return true; }
  const EssentiallyUnique* essentially_unique() const override { return &eu_; }

 private:
  ProblemPtr base_;
  EssentiallyUnique eu_;
};

class LiftedDsr final : public Dsr {
 public:
  LiftedDsr(ProblemPtr p, DsrPtr d) : p_(std::move(p)), d_(std::move(d)) {}

  uint64_t mu(const BitString& x) const override { return d_->mu(x); }
  Step step(const BitString& x, History h, const BitString& tape) const override {
    Step st = d_->step(x, h, tape);
    const EssentiallyUnique& eu = *p_->essentially_unique();
    if (st.done && eu.v1(x, st.payload)) {
      st.payload = *least_violation(eu, x);
    }
    return st;
  }
  size_t width_bound(const BitString& root) const override { return d_->width_bound(root); }
  size_t size_growth(uint64_t m) const override { return d_->size_growth(m); }
  uint64_t depth_bound(const BitString& root) const override { return d_->depth_bound(root); }
  size_t randomness_bits(size_t n) const override { return d_->randomness_bits(n); }
  double failure_prob_bound() const override { return d_->failure_prob_bound(); }
  BitString dummy_instance() const override { return d_->dummy_instance(); }

 private:
  ProblemPtr p_;
  DsrPtr d_;
};

class AmplifiedDsr final : public Dsr {
 public:
  AmplifiedDsr(ProblemPtr p, DsrPtr d, size_t trials, size_t segment, BitString tape)
      : p_(std::move(p)), d_(std::move(d)), trials_(trials), segment_(segment), tape_(std::move(tape)) {}

  uint64_t mu(const BitString& x) const override { return d_->mu(x); }

  Step step(const BitString& x, History h, const BitString&) const override {
    size_t need = std::min(segment_, d_->randomness_bits(x.size()));
    size_t pos = 0;
    for (size_t k = 0; k < trials_; ++k) {
      BitString seg = tape_.substr(k * segment_, need);
      std::vector<QueryAnswer> local;
      for (;;) {
        Step st = d_->step(x, local, seg);
        if (st.done) {
          if (p_->verify(x, st.payload)) return st;
          break;
        }
        if (pos == h.size()) return st;
        if (h[pos].query != st.payload)
          fail(ErrorCode::ContractViolation, "history does not match trial replay");
        local.push_back(h[pos++]);
      }
    }
    fail(ErrorCode::AllTrialsFailed, "all " + std::to_string(trials_) + " trials failed");
  }
  size_t width_bound(const BitString& root) const override { return trials_ * d_->width_bound(root); }
  size_t size_growth(uint64_t m) const override { return d_->size_growth(m); }
  uint64_t depth_bound(const BitString& root) const override { return d_->depth_bound(root); }
  BitString dummy_instance() const override { return d_->dummy_instance(); }

 private:
  ProblemPtr p_;
  DsrPtr d_;
  size_t trials_;
  size_t segment_;
  BitString tape_;
};

constexpr size_t kFrameDepthBits = 16;

class FramedProblem final : public SearchProblem {
 public:
  FramedProblem(ProblemPtr inner, BitString dummy) : inner_(std::move(inner)), dummy_(std::move(dummy)) {}

  std::string name() const override { return inner_->name(); }
  int verifier_level() const override { return inner_->verifier_level(); }
  bool promise(const BitString& x) const override {
    try {
      return inner_->promise(unframe_instance(x).inner);
    } catch (const Error&) {
      return false;
    }
  }
  bool verify(const BitString& x, const BitString& y) const override {
    try {
      return inner_->verify(unframe_instance(x).inner, y);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::BudgetError) throw;
      return false;
    }
  }
  size_t solution_bound(const BitString& x) const override {
    return std::max(inner_->solution_bound(unframe_instance(x).inner), inner_->solution_bound(dummy_));
  }
  bool unique() const override { return inner_->unique(); }

 private:
  ProblemPtr inner_;
  BitString dummy_;
};

class NormalizedDsr final : public Dsr {
 public:
  NormalizedDsr(DsrPtr inner, size_t width) : inner_(std::move(inner)), width_(width) {
    dummy_frame_len_ = frame_instance(0, true, inner_->dummy_instance()).size();
  }

  uint64_t mu(const BitString& x) const override { return unframe_instance(x).remaining; }

  Step step(const BitString& x, History h, const BitString& tape) const override {
    Frame f = unframe_instance(x);
    size_t real = 0;
    while (real < h.size() && !unframe_instance(h[real].query).padding) ++real;
    std::vector<QueryAnswer> inner_hist;
    inner_hist.reserve(real);
    for (size_t i = 0; i < real; ++i)
      inner_hist.push_back({unframe_instance(h[i].query).inner, h[i].answer});
    Step st = inner_->step(f.inner, inner_hist, tape);
    if (!st.done) {
      if (real < h.size())
        fail(ErrorCode::ContractViolation, "real query requested after padding began");
      if (f.remaining == 0 || real >= width_)
        fail(ErrorCode::ContractViolation, "d.s.r exceeds its depth or width bound");
      return Step::query(frame_instance(f.remaining - 1, false, st.payload));
    }
    if (f.remaining > 0 && h.size() < width_)
      return Step::query(frame_instance(f.remaining - 1, true, inner_->dummy_instance()));
    return st;
  }
  size_t width_bound(const BitString&) const override { return width_; }
  size_t size_growth(uint64_t m) const override { return inner_->size_growth(m) + dummy_frame_len_; }
  uint64_t depth_bound(const BitString& root) const override { return mu(root); }
  BitString dummy_instance() const override { return frame_instance(0, true, inner_->dummy_instance()); }

 private:
  DsrPtr inner_;
  size_t width_;
  size_t dummy_frame_len_ = 0;
};

}  // namespace

const char* violation_name(ViolationKind k) {
  switch (k) {
    case ViolationKind::MuNotDecreasing: return "MU_NOT_DECREASING";
    case ViolationKind::PromiseBroken: return "PROMISE_BROKEN";
    case ViolationKind::SizeExceeded: return "SIZE_EXCEEDED";
    case ViolationKind::WidthExceeded: return "WIDTH_EXCEEDED";
    case ViolationKind::BadSolution: return "BAD_SOLUTION";
  }
  return "?";
}

bool AuditReport::has(ViolationKind k) const {
  return std::any_of(violations.begin(), violations.end(),
                     [k](const AuditViolation& v) { return v.kind == k; });
}

BitString run_recursive(const SearchProblem& p, const Dsr& d, const BitString& x, Rng& rng,
                        RecursionStats* stats) {
  return recurse(p, d, x, rng, stats, 0);
}

AuditReport audit_dsr(const SearchProblem& p, const Dsr& d, const BitString& x, Rng& rng) {
  Auditor a{p, d, rng, d.width_bound(x), {}};
  a.frame(x);
  a.report.passed = a.report.violations.empty();
  return a.report;
}

ProblemPtr make_unique_problem(ProblemPtr p) {
  if (!p->essentially_unique())
    fail(ErrorCode::PreconditionViolation, p->name() + " has no essentially-unique verifiers");
  return std::make_shared<UniqueProblem>(std::move(p));
}

DsrPtr lift_dsr_unique(ProblemPtr p, DsrPtr d) {
  if (!p->essentially_unique())
    fail(ErrorCode::PreconditionViolation, p->name() + " has no essentially-unique verifiers");
  return std::make_shared<LiftedDsr>(std::move(p), std::move(d));
}

Amplified amplify_and_fix_randomness(ProblemPtr p, DsrPtr d, size_t n, size_t s, Rng& rng) {
  size_t r = d->randomness_bits(n);
  if (r == 0) return {std::move(d), BitString()};
  if (d->failure_prob_bound() >= 1.0)
    fail(ErrorCode::PreconditionViolation, "failure probability bound must be below 1");
  size_t trials = n + s;
  BitString tape = random_tape(rng, trials * r);
  auto amp = std::make_shared<AmplifiedDsr>(std::move(p), std::move(d), trials, r, tape);
  return {amp, tape};
}

BitString frame_instance(uint64_t remaining, bool padding, const BitString& inner) {
  if (remaining >= (uint64_t{1} << kFrameDepthBits))
    fail(ErrorCode::InputError, "recursion depth too large to frame");
  BitWriter w;
  w.put(remaining, kFrameDepthBits);
  w.put_bit(padding);
  w.put_bits(inner);
  return w.take();
}

Frame unframe_instance(const BitString& framed) {
  BitReader r(framed);
  Frame f;
  f.remaining = r.get(kFrameDepthBits);
  f.padding = r.get_bit();
  f.inner = r.get_bits(r.remaining());
  return f;
}

Normalized normalize_dsr(ProblemPtr p, DsrPtr d, const BitString& x) {
  Normalized out;
  out.depth = d->depth_bound(x);
  out.width = std::max<size_t>(1, d->width_bound(x));
  out.problem = std::make_shared<FramedProblem>(p, d->dummy_instance());
  out.dsr = std::make_shared<NormalizedDsr>(d, out.width);
  out.root = frame_instance(out.depth, false, x);
  return out;
}

}  // namespace tfs
