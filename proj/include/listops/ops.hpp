// Scalar operation semantics over residues mod n: order statistics,
// modular sum/product, alternating sum, and the shuffled addition table.
// Ground truth for data generation and for grading model output.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace listops {

enum class OpKind { Max, Min, Med, Add, Prod, Nadd, ShufAdd };

inline constexpr OpKind kAllOpKinds[] = {OpKind::Max,  OpKind::Min,  OpKind::Med, OpKind::Add,
                                         OpKind::Prod, OpKind::Nadd, OpKind::ShufAdd};

// Short lowercase name: "max", "min", "med", "add", "prod", "nadd", "shuf_add".
const char* op_kind_name(OpKind kind);

// Token used in rendered lines, e.g. "add_10".
std::string op_token(OpKind kind, int modulus);

// Symmetric n x n lookup table built by permuting the addition table's
// strict upper triangle and its diagonal separately, then mirroring.
struct ShuffledTable {
  int modulus = 0;
  uint64_t seed = 0;
  std::vector<int> cells;  // row-major n x n

  int at(int i, int j) const { return cells[static_cast<size_t>(i) * modulus + j]; }
};

ShuffledTable make_shuffled_table(int modulus, uint64_t seed);

// Evaluate one operation on residues in [0, n). `table` is required exactly
// when kind == ShufAdd (three operands fold left: table(table(a,b),c)).
int eval_op(OpKind kind, int modulus, std::span<const int> operands,
            const ShuffledTable* table = nullptr);

// Fraction of triples (a,b,c) with table(table(a,b),c) != table(a,table(b,c)).
// Enumerates all n^3 triples when sample >= n^3, otherwise samples uniformly.
double associativity_violation_fraction(const ShuffledTable& table, int sample, uint64_t seed);

}  // namespace listops
