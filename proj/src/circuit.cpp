#include "tfs/circuit.hpp"

#include "tfs/error.hpp"

namespace tfs {

namespace {
constexpr size_t kIndexBits = 16;
constexpr size_t kOpBits = 3;
}  // namespace

const char* gate_op_name(GateOp op) {
  switch (op) {
    case GateOp::And: return "AND";
    case GateOp::Or: return "OR";
    case GateOp::Not: return "NOT";
    case GateOp::Xor: return "XOR";
    case GateOp::Const0: return "CONST0";
    case GateOp::Const1: return "CONST1";
  }
  return "?";
}

int gate_arity(GateOp op) {
  switch (op) {
    case GateOp::And:
    case GateOp::Or:
    case GateOp::Xor: return 2;
    case GateOp::Not: return 1;
    default: return 0;
  }
}

void Circuit::validate() const {
  for (size_t k = 0; k < gates.size(); ++k) {
    size_t self = num_inputs + k;
    const Gate& g = gates[k];
    int ar = gate_arity(g.op);
    if ((ar >= 1 && g.a >= self) || (ar >= 2 && g.b >= self))
      fail(ErrorCode::InputError, "gate " + std::to_string(k) + " reads a later node");
  }
  for (uint32_t o : outputs)
    if (o >= num_nodes()) fail(ErrorCode::InputError, "output index out of range");
}

void eval_nodes(const Circuit& c, const uint8_t* in, std::vector<uint8_t>& v) {
  v.resize(c.num_nodes());
  for (size_t i = 0; i < c.num_inputs; ++i) v[i] = in[i];
  size_t base = c.num_inputs;
  for (size_t k = 0; k < c.gates.size(); ++k) {
    const Gate& g = c.gates[k];
    uint8_t r = 0;
    switch (g.op) {
      case GateOp::And: r = v[g.a] & v[g.b]; break;
      case GateOp::Or: r = v[g.a] | v[g.b]; break;
      case GateOp::Xor: r = v[g.a] ^ v[g.b]; break;
      case GateOp::Not: r = v[g.a] ^ 1; break;
      case GateOp::Const0: r = 0; break;
      case GateOp::Const1: r = 1; break;
    }
    v[base + k] = r;
  }
}

BitString eval_circuit(const Circuit& c, const BitString& input) {
  if (input.size() != c.num_inputs)
    fail(ErrorCode::InputError, "circuit expects " + std::to_string(c.num_inputs) +
                                    " inputs, got " + std::to_string(input.size()));
  std::vector<uint8_t> v;
  eval_nodes(c, input.raw().data(), v);
  BitString out(c.outputs.size());
  for (size_t i = 0; i < c.outputs.size(); ++i) out.set(i, v[c.outputs[i]]);
  return out;
}

nlohmann::json circuit_to_json(const Circuit& c) {
  nlohmann::json gates = nlohmann::json::array();
  for (const Gate& g : c.gates) {
    nlohmann::json row = nlohmann::json::array({gate_op_name(g.op)});
    int ar = gate_arity(g.op);
    if (ar >= 1) row.push_back(g.a);
    if (ar >= 2) row.push_back(g.b);
    gates.push_back(row);
  }
  return {{"num_inputs", c.num_inputs}, {"gates", gates}, {"outputs", c.outputs}};
}

Circuit circuit_from_json(const nlohmann::json& j) {
  Circuit c;
  try {
    c.num_inputs = j.at("num_inputs").get<size_t>();
    for (const auto& row : j.at("gates")) {
      std::string name = row.at(0).get<std::string>();
      Gate g;
      if (name == "AND") g.op = GateOp::And;
      else if (name == "OR") g.op = GateOp::Or;
      else if (name == "NOT") g.op = GateOp::Not;
      else if (name == "XOR") g.op = GateOp::Xor;
      else if (name == "CONST0") g.op = GateOp::Const0;
      else if (name == "CONST1") g.op = GateOp::Const1;
      else fail(ErrorCode::ParseError, "unknown gate " + name);
      int ar = gate_arity(g.op);
      if (row.size() != static_cast<size_t>(ar) + 1)
        fail(ErrorCode::ParseError, "gate " + name + " has wrong operand count");
      if (ar >= 1) g.a = row.at(1).get<uint32_t>();
      if (ar >= 2) g.b = row.at(2).get<uint32_t>();
      c.gates.push_back(g);
    }
    c.outputs = j.at("outputs").get<std::vector<uint32_t>>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("circuit json: ") + e.what());
  }
  try {
    c.validate();
  } catch (const Error& e) {
    fail(ErrorCode::ParseError, e.what());
  }
  return c;
}

void encode_circuit(BitWriter& w, const Circuit& c) {
  if (c.num_nodes() >= (1u << kIndexBits) || c.outputs.size() >= (1u << kIndexBits))
    fail(ErrorCode::InputError, "circuit too large to encode");
  w.put(c.num_inputs, kIndexBits);
  w.put(c.gates.size(), kIndexBits);
  for (const Gate& g : c.gates) {
    int ar = gate_arity(g.op);
    w.put(static_cast<uint64_t>(g.op), kOpBits);
    w.put(ar >= 1 ? g.a : 0, kIndexBits);
    w.put(ar >= 2 ? g.b : 0, kIndexBits);
  }
  w.put(c.outputs.size(), kIndexBits);
  for (uint32_t o : c.outputs) w.put(o, kIndexBits);
}

Circuit decode_circuit(BitReader& r) {
  Circuit c;
  c.num_inputs = r.get(kIndexBits);
  size_t ng = r.get(kIndexBits);
  c.gates.resize(ng);
  for (Gate& g : c.gates) {
    uint64_t op = r.get(kOpBits);
    if (op > static_cast<uint64_t>(GateOp::Const1)) fail(ErrorCode::ParseError, "bad gate op");
    g.op = static_cast<GateOp>(op);
    g.a = static_cast<uint32_t>(r.get(kIndexBits));
    g.b = static_cast<uint32_t>(r.get(kIndexBits));
    int ar = gate_arity(g.op);
    if ((ar < 1 && g.a) || (ar < 2 && g.b)) fail(ErrorCode::ParseError, "non-canonical gate");
  }
  size_t no = r.get(kIndexBits);
  c.outputs.resize(no);
  for (uint32_t& o : c.outputs) o = static_cast<uint32_t>(r.get(kIndexBits));
  try {
    c.validate();
  } catch (const Error& e) {
    fail(ErrorCode::ParseError, e.what());
  }
  return c;
}

CircuitBuilder::CircuitBuilder(size_t num_inputs) {
  c_.num_inputs = num_inputs;
  konst_.assign(num_inputs, -1);
}

uint32_t CircuitBuilder::emit(GateOp op, uint32_t a, uint32_t b) {
  c_.gates.push_back({op, a, b});
  int8_t k = -1;
  if (op == GateOp::Const0) k = 0;
  if (op == GateOp::Const1) k = 1;
  konst_.push_back(k);
  return static_cast<uint32_t>(c_.num_nodes() - 1);
}

uint32_t CircuitBuilder::constant(bool v) {
  if (const_node_[v] < 0)
    const_node_[v] = static_cast<int32_t>(emit(v ? GateOp::Const1 : GateOp::Const0, 0, 0));
  return static_cast<uint32_t>(const_node_[v]);
}

uint32_t CircuitBuilder::op_not(uint32_t a) {
  if (known(a) >= 0) return constant(!known(a));
  return emit(GateOp::Not, a, 0);
}

uint32_t CircuitBuilder::op_and(uint32_t a, uint32_t b) {
  if (known(a) == 0 || known(b) == 0) return constant(false);
  if (known(a) == 1) return b;
  if (known(b) == 1 || a == b) return a;
  return emit(GateOp::And, a, b);
}

uint32_t CircuitBuilder::op_or(uint32_t a, uint32_t b) {
  if (known(a) == 1 || known(b) == 1) return constant(true);
  if (known(a) == 0) return b;
  if (known(b) == 0 || a == b) return a;
  return emit(GateOp::Or, a, b);
}

uint32_t CircuitBuilder::op_xor(uint32_t a, uint32_t b) {
  if (known(a) >= 0 && known(b) >= 0) return constant(known(a) != known(b));
  if (known(a) == 0) return b;
  if (known(b) == 0) return a;
  if (known(a) == 1) return op_not(b);
  if (known(b) == 1) return op_not(a);
  if (a == b) return constant(false);
  return emit(GateOp::Xor, a, b);
}

uint32_t CircuitBuilder::mux(uint32_t sel, uint32_t if_true, uint32_t if_false) {
  if (known(sel) == 1) return if_true;
  if (known(sel) == 0) return if_false;
  if (if_true == if_false) return if_true;
  if (known(if_true) == 1 && known(if_false) == 0) return sel;
  if (known(if_true) == 0 && known(if_false) == 1) return op_not(sel);
  return op_or(op_and(sel, if_true), op_and(op_not(sel), if_false));
}

Circuit CircuitBuilder::build(std::vector<uint32_t> outputs) const {
  Circuit c = c_;
  c.outputs = std::move(outputs);
  c.validate();
  return c;
}

uint32_t build_less_than(CircuitBuilder& b, const std::vector<uint32_t>& x,
                         const std::vector<uint32_t>& y) {
  // scan from the least significant end: lt = (!x & y) | (x==y & lt_rest)
  uint32_t lt = b.constant(false);
  for (size_t i = x.size(); i-- > 0;) {
    uint32_t here = b.op_and(b.op_not(x[i]), y[i]);
    lt = b.op_or(here, b.op_and(b.equal(x[i], y[i]), lt));
  }
  return lt;
}

namespace {

uint32_t shannon(CircuitBuilder& b, const std::vector<uint32_t>& sel, const std::vector<BitString>& table,
                 size_t out, size_t depth, uint64_t prefix) {
  if (depth == sel.size()) return b.constant(table[prefix][out]);
  uint32_t lo = shannon(b, sel, table, out, depth + 1, prefix << 1);
  uint32_t hi = shannon(b, sel, table, out, depth + 1, (prefix << 1) | 1);
  return b.mux(sel[depth], hi, lo);
}

}  // namespace

std::vector<uint32_t> build_table_lookup(CircuitBuilder& b, const std::vector<uint32_t>& sel,
                                         const std::vector<BitString>& table) {
  if (sel.size() > 20 || table.size() != (size_t{1} << sel.size()))
    fail(ErrorCode::InputError, "truth table size mismatch");
  size_t width = table.empty() ? 0 : table[0].size();
  std::vector<uint32_t> outs;
  for (size_t o = 0; o < width; ++o) outs.push_back(shannon(b, sel, table, o, 0, 0));
  return outs;
}

Circuit circuit_from_truth_table(size_t num_inputs, const std::vector<BitString>& table) {
  CircuitBuilder b(num_inputs);
  std::vector<uint32_t> sel;
  for (size_t i = 0; i < num_inputs; ++i) sel.push_back(b.input(i));
  return b.build(build_table_lookup(b, sel, table));
}

}  // namespace tfs
