// The 36-element group of block-diagonal pairs of S3 permutations, its three
// operations (full / top-block / bottom-block composition), and lowering to
// an expression Domain over element tokens "g0".."g35".
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "listops/domain.hpp"

namespace listops::perm {

// Canonical S3 order: lexicographic one-line notation.
inline constexpr std::array<std::array<uint8_t, 3>, 6> kS3 = {{
    {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0},
}};

int s3_index(const std::array<uint8_t, 3>& one_line);

// Index of a∘b with (a∘b)(x) = a(b(x)).
int s3_compose(int a, int b);
int s3_inverse(int a);

struct GroupElement {
  int top = 0;     // S3 index
  int bottom = 0;  // S3 index

  int id() const { return 6 * top + bottom; }
  bool operator==(const GroupElement&) const = default;
};

GroupElement element_from_id(int id);
GroupElement identity();

GroupElement op_full(GroupElement a, GroupElement b);
// Composes top blocks only; the bottom block of the first operand carries.
GroupElement op_top(GroupElement a, GroupElement b);
// Composes bottom blocks only; the top block of the first operand carries.
GroupElement op_bottom(GroupElement a, GroupElement b);
GroupElement inverse(GroupElement a);

enum class PermOp { Op, OpTop, OpBottom };

inline constexpr PermOp kAllPermOps[] = {PermOp::Op, PermOp::OpTop, PermOp::OpBottom};

// Token names "OP", "OP_TOP", "OP_BOTTOM".
const char* perm_op_token(PermOp op);

struct PermTaskSpec {
  std::vector<PermOp> ops;
  int max_depth = 2;
  int max_args = 3;
  bool cot = true;
};

void validate_perm_task(PermTaskSpec& spec);
std::string perm_ops_name(const std::vector<PermOp>& ops);
std::vector<PermOp> parse_perm_ops(const std::string& text);

// Excluded tuples are ordered element pairs (exclusion_arity 2).
Domain make_perm_domain(const PermTaskSpec& spec);

}  // namespace listops::perm
