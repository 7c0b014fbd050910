#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "tfs/bitio.hpp"
#include "tfs/bitstring.hpp"

namespace tfs {

enum class GateOp : uint8_t { And, Or, Not, Xor, Const0, Const1 };

const char* gate_op_name(GateOp op);
int gate_arity(GateOp op);

struct Gate {
  GateOp op = GateOp::Const0;
  uint32_t a = 0;
  uint32_t b = 0;
};

// Explicit gate list. Nodes 0..num_inputs-1 are inputs, gate k is node
// num_inputs + k and may only read strictly earlier nodes.
struct Circuit {
  size_t num_inputs = 0;
  std::vector<Gate> gates;
  std::vector<uint32_t> outputs;

  size_t num_nodes() const { return num_inputs + gates.size(); }
  void validate() const;
};

BitString eval_circuit(const Circuit& c, const BitString& input);

// Evaluates every node; values[i] is node i. Inputs are read from `in`
// (num_inputs bytes of 0/1). Avoids allocation when called in a loop.
void eval_nodes(const Circuit& c, const uint8_t* in, std::vector<uint8_t>& values);

nlohmann::json circuit_to_json(const Circuit& c);
Circuit circuit_from_json(const nlohmann::json& j);

void encode_circuit(BitWriter& w, const Circuit& c);
Circuit decode_circuit(BitReader& r);

// Builds circuits with constant folding so generated instances stay small.
class CircuitBuilder {
 public:
  explicit CircuitBuilder(size_t num_inputs);

  uint32_t input(size_t i) const { return static_cast<uint32_t>(i); }
  uint32_t constant(bool v);
  uint32_t op_not(uint32_t a);
  uint32_t op_and(uint32_t a, uint32_t b);
  uint32_t op_or(uint32_t a, uint32_t b);
  uint32_t op_xor(uint32_t a, uint32_t b);
  uint32_t mux(uint32_t sel, uint32_t if_true, uint32_t if_false);
  uint32_t equal(uint32_t a, uint32_t b) { return op_not(op_xor(a, b)); }

  Circuit build(std::vector<uint32_t> outputs) const;

 private:
  uint32_t emit(GateOp op, uint32_t a, uint32_t b);
  int known(uint32_t node) const { return konst_[node]; }

  Circuit c_;
  std::vector<int8_t> konst_;
  int32_t const_node_[2] = {-1, -1};
};

// Unsigned comparison a < b for MSB-first bit vectors of equal width.
uint32_t build_less_than(CircuitBuilder& b, const std::vector<uint32_t>& x,
                         const std::vector<uint32_t>& y);

// Output nodes of a lookup into table[v], v read MSB-first from `sel`.
std::vector<uint32_t> build_table_lookup(CircuitBuilder& b, const std::vector<uint32_t>& sel,
                                         const std::vector<BitString>& table);

// Circuit with `num_inputs` inputs whose outputs follow an explicit truth
// table: table[v] holds the outputs for input value v (MSB-first).
Circuit circuit_from_truth_table(size_t num_inputs,
                                 const std::vector<BitString>& table);

}  // namespace tfs
