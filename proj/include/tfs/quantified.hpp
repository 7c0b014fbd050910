#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "tfs/bitstring.hpp"
#include "tfs/rng.hpp"

namespace tfs {

enum class Quantifier { Exists, Forall };

// Bounded-quantifier formula Q1 z1 Q2 z2 ... matrix(input, z1..zi) with
// alternating quantifiers starting from `leading`.
struct QuantifiedPredicate {
  Quantifier leading = Quantifier::Exists;
  std::vector<size_t> witness_lengths;
  std::function<bool(const BitString& input, const std::vector<BitString>& witnesses)> matrix;

  size_t level() const { return witness_lengths.size(); }
};

using BitPredicate = std::function<bool(const BitString&)>;

// Desk-scale cap on quantified or enumerated bits (default 24).
size_t witness_bit_cap();
void set_witness_bit_cap(size_t bits);

bool decide_quantified(const QuantifiedPredicate& q, const BitString& input);

std::optional<BitString> uniform_sample(size_t length, const BitPredicate& pred, Rng& rng);

std::optional<BitString> lex_smallest(size_t length, const BitPredicate& pred);

}  // namespace tfs
