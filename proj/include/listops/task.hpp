// Task specification: which operations, which modulus, expression shape.
// One TaskSpec describes one dataset; joint training mixes several.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "listops/ops.hpp"

namespace listops {

struct TaskSpec {
  std::vector<OpKind> ops;  // nonempty, kept sorted in canonical enum order
  int modulus = 10;
  std::optional<uint64_t> shuffle_seed;  // required iff ops contains ShufAdd
  int max_depth = 2;
  int max_args = 3;
  bool cot = true;
};

// Sorts/dedups ops and checks invariants; throws Error on violation.
void validate_task(TaskSpec& spec);

// Canonical mixture name, ops joined by '+' in enum order: "max+med+add".
std::string ops_name(const std::vector<OpKind>& ops);

// Parse "add" or "max+med+add" (also accepts comma separators).
std::vector<OpKind> parse_ops(const std::string& text);

}  // namespace listops
