#include "tfs/quantified.hpp"

#include <atomic>
#include <numeric>
#include <string>

#include "tfs/error.hpp"

namespace tfs {

namespace {

std::atomic<size_t> g_cap{24};

void check_cap(size_t bits) {
  if (bits > g_cap.load())
    fail(ErrorCode::BudgetError, std::to_string(bits) + " quantified bits exceed cap of " +
                                     std::to_string(g_cap.load()));
}

bool expand(const QuantifiedPredicate& q, const BitString& input,
            std::vector<BitString>& ws, size_t block) {
  if (block == q.level()) return q.matrix(input, ws);
  bool exists = (q.leading == Quantifier::Exists) == (block % 2 == 0);
  BitString z(q.witness_lengths[block]);
  ws.push_back(z);
  bool result = !exists;
  do {
    ws.back() = z;
    bool sub = expand(q, input, ws, block + 1);
    if (exists && sub) {
      result = true;
      break;
    }
    if (!exists && !sub) {
      result = false;
      break;
    }
  } while (z.increment());
  ws.pop_back();
  return result;
}

}  // namespace

size_t witness_bit_cap() { return g_cap.load(); }
void set_witness_bit_cap(size_t bits) { g_cap.store(bits); }

bool decide_quantified(const QuantifiedPredicate& q, const BitString& input) {
  check_cap(std::accumulate(q.witness_lengths.begin(), q.witness_lengths.end(), size_t{0}));
  std::vector<BitString> ws;
  return expand(q, input, ws, 0);
}

std::optional<BitString> uniform_sample(size_t length, const BitPredicate& pred, Rng& rng) {
  check_cap(length);
  std::vector<BitString> members;
  BitString z(length);
  do {
    if (pred(z)) members.push_back(z);
  } while (z.increment());
  if (members.empty()) return std::nullopt;
  return members[uniform_below(rng, members.size())];
}

std::optional<BitString> lex_smallest(size_t length, const BitPredicate& pred) {
  check_cap(length);
  BitString z(length);
  do {
    if (pred(z)) return z;
  } while (z.increment());
  return std::nullopt;
}

}  // namespace tfs
