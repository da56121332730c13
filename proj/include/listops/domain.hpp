// A Domain lowers a task description to what the expression engine needs:
// the value alphabet, the operation tokens with their evaluators, and the
// arity of the tuples excluded from the training split. Arithmetic tasks
// and the permutation-group tasks both lower to this one shape.
#pragma once

#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "listops/task.hpp"

namespace listops {

struct OpDef {
  std::string token;  // e.g. "add_10" or "OP_TOP"
  std::function<int(std::span<const int>)> eval;
};

struct Domain {
  std::vector<std::string> value_tokens;  // index == value
  std::vector<OpDef> ops;
  int exclusion_arity = 3;  // ordered-tuple width reserved for the test split
  int max_depth = 2;
  int max_args = 3;
  bool cot = true;

  std::unordered_map<std::string, int> value_of;  // token -> value
  std::unordered_map<std::string, int> op_of;     // token -> op index

  int value_count() const { return static_cast<int>(value_tokens.size()); }
  void build_maps();
};

// Arithmetic lowering; number tokens "0".."n-1", ops in canonical enum
// order, excluded tuples are ordered operand triples. Owns a copy of the
// shuffled table when the task includes shuf_add.
Domain make_domain(const TaskSpec& spec);

}  // namespace listops
