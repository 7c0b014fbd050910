#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "tfs/dsr.hpp"
#include "tfs/local_search.hpp"

namespace tfs {

enum class EntryTag : uint8_t { Empty = 0, Pending = 1, Solved = 2 };

struct TableEntry {
  EntryTag tag = EntryTag::Empty;
  BitString instance;  // unpadded
  BitString solution;  // unpadded, empty unless Solved
};

// Payload fields hold [length | content | zero fill] in exactly s bits.
struct TableLayout {
  uint64_t d = 0;
  size_t w = 1;
  size_t s = 0;
  size_t prefix_bits = 0;

  static TableLayout for_capacity(uint64_t d, size_t w, size_t capacity);
  size_t capacity() const { return s - prefix_bits; }
  size_t entry_bits() const { return 2 + 2 * s; }
  size_t table_bits() const { return (d + 1) * w * entry_bits(); }
};

struct StackTable {
  TableLayout layout;
  std::vector<TableEntry> entries;

  explicit StackTable(const TableLayout& l) : layout(l), entries((l.d + 1) * l.w) {}
  TableEntry& at(size_t i, size_t j) { return entries[i * layout.w + j]; }
  const TableEntry& at(size_t i, size_t j) const { return entries[i * layout.w + j]; }

  BitString encode() const;
  // nullopt for bit patterns that are not canonical encodings
  static std::optional<StackTable> decode(const BitString& bits, const TableLayout& l);
  friend bool operator==(const StackTable&, const StackTable&);
};

bool operator==(const TableEntry& a, const TableEntry& b);

// Read-only data shared by S, V and W of one compiled instance. The
// problem and d.s.r are used as given (normalize first).
class CompiledContext {
 public:
  CompiledContext(ProblemPtr problem, DsrPtr dsr, BitString root, TableLayout layout, BitString tape);

  const SearchProblem& problem() const { return *problem_; }
  const Dsr& dsr() const { return *dsr_; }
  const BitString& root() const { return root_; }
  const TableLayout& layout() const { return layout_; }
  const BitString& tape() const { return tape_; }

  bool verify(const BitString& instance, const BitString& solution) const;

 private:
  struct PairHash {
    size_t operator()(const std::pair<BitString, BitString>& p) const {
      return BitStringHash{}(p.first) * 31 + BitStringHash{}(p.second);
    }
  };
  ProblemPtr problem_;
  DsrPtr dsr_;
  BitString root_;
  TableLayout layout_;
  BitString tape_;
  mutable std::mutex mu_;
  mutable std::unordered_map<std::pair<BitString, BitString>, bool, PairHash> verified_;
};

using ContextPtr = std::shared_ptr<const CompiledContext>;

// Σ_{k=i}^{d} 2 w^{d-k}: steps needed to fully process a frame at row i.
uint64_t subtree_weight(uint64_t i, uint64_t d, uint64_t w);
uint64_t target_potential(uint64_t d, uint64_t w);

StackTable source_table(const BitString& x, const TableLayout& layout);
bool is_valid(const StackTable& t, const CompiledContext& ctx);
StackTable successor(const StackTable& t, const CompiledContext& ctx);
uint64_t potential(const StackTable& t, const CompiledContext& ctx);

struct CompiledSod {
  ContextPtr ctx;
  SinkOfDagInstance instance;
  BitString source;
  uint64_t target = 0;  // potential of the solved-root table
};

struct CompiledSovl {
  ContextPtr ctx;
  SovlInstance instance;
};

CompiledSod compile_context(ContextPtr ctx);
CompiledSod compile_to_sod(ProblemPtr p, DsrPtr d, const BitString& x, const BitString& tape = {});
CompiledSovl compile_to_sovl(ProblemPtr p, DsrPtr d, const BitString& x, const BitString& tape = {});
CompiledSovl sovl_from_context(ContextPtr ctx);

enum class AnswerKind { SinkOfDag, Sovl };
BitString extract_solution(const BitString& answer, const CompiledContext& ctx, AnswerKind kind);

// One JSON object per row: {"row": i, "entries": [{"tag","inst","sol"}...]}.
std::vector<nlohmann::json> table_rows_json(const StackTable& t);

}  // namespace tfs
