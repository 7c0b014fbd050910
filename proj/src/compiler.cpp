#include "tfs/compiler.hpp"

#include <algorithm>
#include <map>

#include "tfs/bitio.hpp"
#include "tfs/error.hpp"

namespace tfs {

namespace {

void put_payload(BitWriter& w, const BitString& content, const TableLayout& l) {
  if (content.size() > l.capacity()) fail(ErrorCode::InputError, "payload exceeds table capacity");
  w.put(content.size(), l.prefix_bits);
  w.put_bits(content);
  w.put_bits(BitString(l.capacity() - content.size()));
}

std::optional<BitString> get_payload(BitReader& r, const TableLayout& l) {
  uint64_t len = r.get(l.prefix_bits);
  BitString body = r.get_bits(l.capacity());
  if (len > l.capacity()) return std::nullopt;
  for (size_t i = len; i < body.size(); ++i)
    if (body[i]) return std::nullopt;
  return body.substr(0, len);
}

uint64_t checked_add(uint64_t a, uint64_t b) {
  if (a > UINT64_MAX / 2 - b) fail(ErrorCode::BudgetError, "potential overflows 63 bits");
  return a + b;
}

uint64_t checked_mul(uint64_t a, uint64_t b) {
  if (b && a > (UINT64_MAX / 2) / b) fail(ErrorCode::BudgetError, "potential overflows 63 bits");
  return a * b;
}

bool row_empty(const StackTable& t, size_t i) {
  for (size_t j = 0; j < t.layout.w; ++j)
    if (t.at(i, j).tag != EntryTag::Empty) return false;
  return true;
}

std::optional<size_t> pending_index(const StackTable& t, size_t i) {
  for (size_t j = 0; j < t.layout.w; ++j)
    if (t.at(i, j).tag == EntryTag::Pending) return j;
  return std::nullopt;
}

// Step failures other than budget errors mean the table does not describe
// a run of the d.s.r.
std::optional<Step> try_step(const CompiledContext& ctx, const BitString& x, History h) {
  try {
    return ctx.dsr().step(x, h, ctx.tape());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::BudgetError) throw;
    return std::nullopt;
  }
}

}  // namespace

TableLayout TableLayout::for_capacity(uint64_t d, size_t w, size_t capacity) {
  TableLayout l;
  l.d = d;
  l.w = w;
  l.prefix_bits = bits_for(capacity);
  l.s = l.prefix_bits + capacity;
  return l;
}

bool operator==(const TableEntry& a, const TableEntry& b) {
  return a.tag == b.tag && a.instance == b.instance && a.solution == b.solution;
}

bool operator==(const StackTable& a, const StackTable& b) {
  return a.layout.d == b.layout.d && a.layout.w == b.layout.w && a.layout.s == b.layout.s &&
         a.entries == b.entries;
}

BitString StackTable::encode() const {
  BitWriter w;
  for (const TableEntry& e : entries) {
    w.put(static_cast<uint64_t>(e.tag), 2);
    put_payload(w, e.tag == EntryTag::Empty ? BitString() : e.instance, layout);
    put_payload(w, e.tag == EntryTag::Solved ? e.solution : BitString(), layout);
  }
  return w.take();
}

std::optional<StackTable> StackTable::decode(const BitString& bits, const TableLayout& l) {
  if (bits.size() != l.table_bits()) return std::nullopt;
  StackTable t(l);
  BitReader r(bits);
  for (TableEntry& e : t.entries) {
    uint64_t tag = r.get(2);
    if (tag > 2) return std::nullopt;
    e.tag = static_cast<EntryTag>(tag);
    auto inst = get_payload(r, l);
    auto sol = get_payload(r, l);
    if (!inst || !sol) return std::nullopt;
    // zero-length payloads are encoded as all-zero fields, so EMPTY needs
    // both lengths 0 and PENDING needs an empty solution
    if (e.tag == EntryTag::Empty && (!inst->empty() || !sol->empty())) return std::nullopt;
    if (e.tag == EntryTag::Pending && !sol->empty()) return std::nullopt;
    e.instance = std::move(*inst);
    e.solution = std::move(*sol);
  }
  return t;
}

CompiledContext::CompiledContext(ProblemPtr problem, DsrPtr dsr, BitString root, TableLayout layout,
                                 BitString tape)
    : problem_(std::move(problem)),
      dsr_(std::move(dsr)),
      root_(std::move(root)),
      layout_(layout),
      tape_(std::move(tape)) {}

bool CompiledContext::verify(const BitString& instance, const BitString& solution) const {
  auto key = std::make_pair(instance, solution);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = verified_.find(key);
    if (it != verified_.end()) return it->second;
  }
  bool ok = problem_->verify(instance, solution);
  std::lock_guard<std::mutex> lock(mu_);
  verified_.emplace(std::move(key), ok);
  return ok;
}

uint64_t subtree_weight(uint64_t i, uint64_t d, uint64_t w) {
  uint64_t total = 0, pw = 1;
  for (uint64_t k = d + 1; k-- > i;) {
    total = checked_add(total, checked_mul(2, pw));
    if (k > i) pw = checked_mul(pw, w);
  }
  return total;
}

uint64_t target_potential(uint64_t d, uint64_t w) { return subtree_weight(0, d, w); }

StackTable source_table(const BitString& x, const TableLayout& layout) {
  if (x.size() > layout.capacity()) fail(ErrorCode::InputError, "instance larger than table payload");
  StackTable t(layout);
  t.at(0, 0) = {EntryTag::Pending, x, {}};
  return t;
}

bool is_valid(const StackTable& t, const CompiledContext& ctx) {
  const TableLayout& l = t.layout;
  const TableEntry& root = t.at(0, 0);
  if (root.tag == EntryTag::Empty || root.instance != ctx.root()) return false;
  for (size_t j = 1; j < l.w; ++j)
    if (t.at(0, j).tag != EntryTag::Empty) return false;

  // (a) shape: rows after the first blank row are blank; within a row,
  // SOLVED* then at most one PENDING then EMPTY*
  bool blank_seen = false;
  for (size_t i = 0; i <= l.d; ++i) {
    bool blank = row_empty(t, i);
    if (blank_seen && !blank) return false;
    blank_seen = blank_seen || blank;
    bool closed = false;
    for (size_t j = 0; j < l.w; ++j) {
      EntryTag tag = t.at(i, j).tag;
      if (closed && tag != EntryTag::Empty) return false;
      if (tag != EntryTag::Solved) closed = true;
    }
  }

  if (root.tag == EntryTag::Solved && !ctx.verify(root.instance, root.solution)) return false;

  // (c) replay every entry against its parent frame, (b) verify solutions
  for (size_t i = 1; i <= l.d; ++i) {
    if (row_empty(t, i)) break;
    auto parent = pending_index(t, i - 1);
    if (!parent) return false;
    const BitString& px = t.at(i - 1, *parent).instance;
    std::vector<QueryAnswer> history;
    for (size_t j = 0; j < l.w; ++j) {
      const TableEntry& e = t.at(i, j);
      if (e.tag == EntryTag::Empty) break;
      auto st = try_step(ctx, px, history);
      if (!st || st->done || st->payload != e.instance) return false;
      if (e.tag == EntryTag::Solved) {
        if (!ctx.verify(e.instance, e.solution)) return false;
        history.push_back({e.instance, e.solution});
      }
    }
  }
  return true;
}

StackTable successor(const StackTable& t, const CompiledContext& ctx) {
  if (!is_valid(t, ctx)) return t;
  if (t.at(0, 0).tag == EntryTag::Solved) return t;
  const TableLayout& l = t.layout;
  size_t i = 0;
  for (size_t r = 0; r <= l.d; ++r)
    if (pending_index(t, r)) i = r;
  size_t jp = *pending_index(t, i);
  const BitString& xi = t.at(i, jp).instance;

  std::vector<QueryAnswer> history;
  if (i < l.d)
    for (size_t j = 0; j < l.w && t.at(i + 1, j).tag == EntryTag::Solved; ++j)
      history.push_back({t.at(i + 1, j).instance, t.at(i + 1, j).solution});

  auto st = try_step(ctx, xi, history);
  if (!st) return t;
  StackTable next = t;
  if (!st->done) {
    // a leaf frame asking for queries, or a full child row, breaks the
    // normalization contract; the table stays put and extraction reports it
    if (i == l.d || history.size() >= l.w || st->payload.size() > l.capacity()) return t;
    next.at(i + 1, history.size()) = {EntryTag::Pending, std::move(st->payload), {}};
    return next;
  }
  if (st->payload.size() > l.capacity()) return t;
  next.at(i, jp).tag = EntryTag::Solved;
  next.at(i, jp).solution = std::move(st->payload);
  if (i < l.d)
    for (size_t j = 0; j < l.w; ++j) next.at(i + 1, j) = TableEntry{};
  return next;
}

uint64_t potential(const StackTable& t, const CompiledContext& ctx) {
  if (!is_valid(t, ctx)) return 0;
  const TableLayout& l = t.layout;
  uint64_t total = 0;
  for (size_t i = 0; i <= l.d; ++i)
    for (size_t j = 0; j < l.w; ++j) {
      EntryTag tag = t.at(i, j).tag;
      if (tag == EntryTag::Solved) total = checked_add(total, subtree_weight(i, l.d, l.w));
      if (tag == EntryTag::Pending) total = checked_add(total, 1);
    }
  return total;
}

CompiledSod compile_context(ContextPtr ctx) {
  CompiledSod out;
  const TableLayout& l = ctx->layout();
  out.ctx = ctx;
  out.source = source_table(ctx->root(), l).encode();
  out.target = target_potential(l.d, l.w);
  out.instance.vertex_bits = l.table_bits();
  out.instance.S = [ctx](const BitString& v) {
    auto t = StackTable::decode(v, ctx->layout());
    if (!t) return v;
    return successor(*t, *ctx).encode();
  };
  out.instance.V = [ctx](const BitString& v) -> uint64_t {
    auto t = StackTable::decode(v, ctx->layout());
    return t ? potential(*t, *ctx) : 0;
  };
  return out;
}

CompiledSod compile_to_sod(ProblemPtr p, DsrPtr d, const BitString& x, const BitString& tape) {
  Normalized n = normalize_dsr(p, d, x);
  size_t growth = n.dsr->size_growth(n.depth);
  size_t capacity = std::max(n.root.size() + n.depth * growth, n.problem->solution_bound(n.root));
  TableLayout layout = TableLayout::for_capacity(n.depth, n.width, capacity);
  return compile_context(std::make_shared<CompiledContext>(n.problem, n.dsr, n.root, layout, tape));
}

namespace {

// Records the valid table seen at each potential; a second, different one
// means the problem was wrongly flagged as having unique solutions.
class UniquenessMonitor {
 public:
  void observe(uint64_t pot, const BitString& v) {
    std::lock_guard<std::mutex> lock(mu_);
    auto [it, fresh] = seen_.emplace(pot, v);
    if (!fresh && it->second != v)
      fail(ErrorCode::UniquenessViolation, "two valid tables share potential " + std::to_string(pot));
  }

 private:
  std::mutex mu_;
  std::map<uint64_t, BitString> seen_;
};

}  // namespace

CompiledSovl sovl_from_context(ContextPtr ctx) {
  if (!ctx->problem().unique())
    fail(ErrorCode::PreconditionViolation, ctx->problem().name() + " is not flagged as unique");
  CompiledSod sod = compile_context(ctx);
  CompiledSovl out;
  out.ctx = ctx;
  out.instance.sod = sod.instance;
  out.instance.source = sod.source;
  out.instance.target = sod.target;
  auto monitor = std::make_shared<UniquenessMonitor>();
  out.instance.W = [ctx, monitor](const BitString& v, uint64_t index) {
    auto t = StackTable::decode(v, ctx->layout());
    if (!t || !is_valid(*t, *ctx)) return false;
    uint64_t pot = potential(*t, *ctx);
    monitor->observe(pot, v);
    return pot == index;
  };
  return out;
}

CompiledSovl compile_to_sovl(ProblemPtr p, DsrPtr d, const BitString& x, const BitString& tape) {
  return sovl_from_context(compile_to_sod(std::move(p), std::move(d), x, tape).ctx);
}

BitString extract_solution(const BitString& answer, const CompiledContext& ctx, AnswerKind kind) {
  auto t = StackTable::decode(answer, ctx.layout());
  if (!t) fail(ErrorCode::MalformedAnswer, "answer is not a table encoding");
  if (kind == AnswerKind::SinkOfDag) *t = successor(*t, ctx);
  const TableEntry& root = t->at(0, 0);
  if (root.tag != EntryTag::Solved) fail(ErrorCode::MalformedAnswer, "row-0 entry is not SOLVED");
  return root.solution;
}

std::vector<nlohmann::json> table_rows_json(const StackTable& t) {
  static const char* tags[] = {"E", "P", "S"};
  std::vector<nlohmann::json> rows;
  for (size_t i = 0; i <= t.layout.d; ++i) {
    nlohmann::json entries = nlohmann::json::array();
    for (size_t j = 0; j < t.layout.w; ++j) {
      const TableEntry& e = t.at(i, j);
      BitWriter wi, ws;
      put_payload(wi, e.tag == EntryTag::Empty ? BitString() : e.instance, t.layout);
      put_payload(ws, e.tag == EntryTag::Solved ? e.solution : BitString(), t.layout);
      entries.push_back({{"tag", tags[static_cast<int>(e.tag)]},
                         {"inst", wi.take().to_hex()},
                         {"sol", ws.take().to_hex()}});
    }
    rows.push_back({{"row", i}, {"entries", entries}});
  }
  return rows;
}

}  // namespace tfs
