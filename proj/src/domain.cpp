#include "listops/domain.hpp"

#include <memory>

#include "listops/common.hpp"

namespace listops {

void Domain::build_maps() {
  value_of.clear();
  op_of.clear();
  for (size_t i = 0; i < value_tokens.size(); ++i) value_of[value_tokens[i]] = static_cast<int>(i);
  for (size_t i = 0; i < ops.size(); ++i) op_of[ops[i].token] = static_cast<int>(i);
}

Domain make_domain(const TaskSpec& spec_in) {
  TaskSpec spec = spec_in;
  validate_task(spec);

  Domain dom;
  dom.exclusion_arity = 3;
  dom.max_depth = spec.max_depth;
  dom.max_args = spec.max_args;
  dom.cot = spec.cot;
  for (int v = 0; v < spec.modulus; ++v) dom.value_tokens.push_back(std::to_string(v));

  std::shared_ptr<ShuffledTable> table;
  if (spec.shuffle_seed)
    table = std::make_shared<ShuffledTable>(make_shuffled_table(spec.modulus, *spec.shuffle_seed));

  for (OpKind kind : spec.ops) {
    OpDef def;
    def.token = op_token(kind, spec.modulus);
    int modulus = spec.modulus;
    if (kind == OpKind::ShufAdd) {
      def.eval = [modulus, table](std::span<const int> xs) {
        return eval_op(OpKind::ShufAdd, modulus, xs, table.get());
      };
    } else {
      def.eval = [kind, modulus](std::span<const int> xs) { return eval_op(kind, modulus, xs); };
    }
    dom.ops.push_back(std::move(def));
  }
  dom.build_maps();
  return dom;
}

}  // namespace listops
