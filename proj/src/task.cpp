#include "listops/task.hpp"

#include <algorithm>

#include "listops/common.hpp"

namespace listops {

void validate_task(TaskSpec& spec) {
  if (spec.ops.empty()) raise("EmptyOpSet", "task needs at least one operation");
  std::sort(spec.ops.begin(), spec.ops.end());
  spec.ops.erase(std::unique(spec.ops.begin(), spec.ops.end()), spec.ops.end());
  if (spec.modulus < 2) raise("InvalidModulus", "modulus must be >= 2");
  if (spec.max_depth < 1) raise("InvalidDepth", "max_depth must be >= 1");
  if (spec.max_args < 2) raise("InvalidArgs", "max_args must be >= 2");
  bool has_shuf = std::find(spec.ops.begin(), spec.ops.end(), OpKind::ShufAdd) != spec.ops.end();
  if (has_shuf && !spec.shuffle_seed)
    raise("MissingShuffleSeed", "shuf_add requires shuffle_seed");
}

std::string ops_name(const std::vector<OpKind>& ops) {
  std::string out;
  for (size_t i = 0; i < ops.size(); ++i) {
    if (i) out += '+';
    out += op_kind_name(ops[i]);
  }
  return out;
}

std::vector<OpKind> parse_ops(const std::string& text) {
  std::vector<OpKind> out;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    bool found = false;
    for (OpKind k : kAllOpKinds) {
      if (cur == op_kind_name(k)) {
        out.push_back(k);
        found = true;
        break;
      }
    }
    if (!found) raise("UnknownOp", cur);
    cur.clear();
  };
  for (char c : text) {
    if (c == '+' || c == ',' || c == ' ') {
      flush();
    } else {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  flush();
  if (out.empty()) raise("EmptyOpSet", "no operations in '" + text + "'");
  return out;
}

}  // namespace listops
