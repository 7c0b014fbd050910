#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tfs/bitstring.hpp"
#include "tfs/rng.hpp"

namespace tfs {

struct QueryAnswer {
  BitString query;
  BitString answer;
};

using History = std::span<const QueryAnswer>;

struct Step {
  bool done = false;
  BitString payload;

  static Step query(BitString q) { return {false, std::move(q)}; }
  static Step finish(BitString y) { return {true, std::move(y)}; }
};

// V1 marks easily checked "violation" witnesses of fixed candidate length;
// V2 marks the solution that is unique whenever no V1 witness exists.
struct EssentiallyUnique {
  std::function<bool(const BitString& x, const BitString& y)> v1;
  std::function<bool(const BitString& x, const BitString& y)> v2;
  std::function<size_t(const BitString& x)> witness_length;
  // Optional shortcut for the lex-least V1 witness; must agree with
  // enumeration over witness_length(x) bits.
  std::function<std::optional<BitString>(const BitString& x)> least_v1;
};

std::optional<BitString> least_violation(const EssentiallyUnique& eu, const BitString& x);

class SearchProblem {
 public:
  virtual ~SearchProblem() = default;
  virtual std::string name() const = 0;
  virtual int verifier_level() const = 0;
  virtual bool promise(const BitString& x) const = 0;
  // Must return false (not throw) on malformed candidates.
  virtual bool verify(const BitString& x, const BitString& y) const = 0;
  // Bound on solution bits for x and every instance a d.s.r may query below x.
  virtual size_t solution_bound(const BitString& x) const = 0;
  virtual bool unique() const { return false; }
  virtual const EssentiallyUnique* essentially_unique() const { return nullptr; }
};

class Dsr {
 public:
  virtual ~Dsr() = default;
  virtual uint64_t mu(const BitString& x) const = 0;
  // Pure function of the query/answer history so far.
  virtual Step step(const BitString& x, History history, const BitString& tape) const = 0;
  // Max queries per call anywhere in the recursion tree below root.
  virtual size_t width_bound(const BitString& root) const = 0;
  // ℓ(μ): every query q of x has |q| ≤ |x| + size_growth(μ(x)).
  virtual size_t size_growth(uint64_t mu) const = 0;
  virtual uint64_t depth_bound(const BitString& root) const { return mu(root); }
  virtual size_t randomness_bits(size_t /*n*/) const { return 0; }
  virtual double failure_prob_bound() const { return 0.0; }
  // In-promise instance solved with no queries; used for padding.
  virtual BitString dummy_instance() const = 0;
};

using ProblemPtr = std::shared_ptr<const SearchProblem>;
using DsrPtr = std::shared_ptr<const Dsr>;

struct RecursionStats {
  uint64_t calls = 0;
  uint64_t queries = 0;
  uint64_t max_depth = 0;
};

BitString run_recursive(const SearchProblem& p, const Dsr& d, const BitString& x, Rng& rng,
                        RecursionStats* stats = nullptr);

enum class ViolationKind { MuNotDecreasing, PromiseBroken, SizeExceeded, WidthExceeded, BadSolution };

const char* violation_name(ViolationKind k);

struct AuditViolation {
  ViolationKind kind;
  BitString instance;
  BitString query;
  std::string detail;
};

struct AuditReport {
  bool passed = true;
  std::vector<AuditViolation> violations;
  uint64_t frames = 0;

  bool has(ViolationKind k) const;
};

AuditReport audit_dsr(const SearchProblem& p, const Dsr& d, const BitString& x, Rng& rng);

ProblemPtr make_unique_problem(ProblemPtr p);
DsrPtr lift_dsr_unique(ProblemPtr p, DsrPtr d);

struct Amplified {
  DsrPtr dsr;
  BitString tape;
};
Amplified amplify_and_fix_randomness(ProblemPtr p, DsrPtr d, size_t n, size_t s, Rng& rng);

// Normalized form: instances are framed as (remaining depth r, padding flag,
// inner instance) and every frame with r > 0 issues exactly `width` queries,
// real ones first, then padding queries on the dummy instance.
struct Normalized {
  ProblemPtr problem;
  DsrPtr dsr;
  BitString root;
  uint64_t depth = 0;
  size_t width = 1;
};

Normalized normalize_dsr(ProblemPtr p, DsrPtr d, const BitString& x);

struct Frame {
  uint64_t remaining = 0;
  bool padding = false;
  BitString inner;
};
BitString frame_instance(uint64_t remaining, bool padding, const BitString& inner);
Frame unframe_instance(const BitString& framed);

}  // namespace tfs
