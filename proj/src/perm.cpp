#include "listops/perm.hpp"

#include <algorithm>

#include "listops/common.hpp"

namespace listops::perm {

int s3_index(const std::array<uint8_t, 3>& one_line) {
  for (int i = 0; i < 6; ++i)
    if (kS3[static_cast<size_t>(i)] == one_line) return i;
  raise("InvalidPermutation", "not a permutation of {0,1,2}");
}

int s3_compose(int a, int b) {
  const auto& pa = kS3[static_cast<size_t>(a)];
  const auto& pb = kS3[static_cast<size_t>(b)];
  std::array<uint8_t, 3> out{};
  for (int x = 0; x < 3; ++x) out[static_cast<size_t>(x)] = pa[pb[static_cast<size_t>(x)]];
  return s3_index(out);
}

int s3_inverse(int a) {
  const auto& pa = kS3[static_cast<size_t>(a)];
  std::array<uint8_t, 3> inv{};
  for (int x = 0; x < 3; ++x) inv[pa[static_cast<size_t>(x)]] = static_cast<uint8_t>(x);
  return s3_index(inv);
}

GroupElement element_from_id(int id) {
  if (id < 0 || id >= 36) raise("InvalidElement", std::to_string(id));
  return GroupElement{id / 6, id % 6};
}

GroupElement identity() { return GroupElement{0, 0}; }

GroupElement op_full(GroupElement a, GroupElement b) {
  return GroupElement{s3_compose(a.top, b.top), s3_compose(a.bottom, b.bottom)};
}

GroupElement op_top(GroupElement a, GroupElement b) {
  return GroupElement{s3_compose(a.top, b.top), a.bottom};
}

GroupElement op_bottom(GroupElement a, GroupElement b) {
  return GroupElement{a.top, s3_compose(a.bottom, b.bottom)};
}

GroupElement inverse(GroupElement a) {
  return GroupElement{s3_inverse(a.top), s3_inverse(a.bottom)};
}

const char* perm_op_token(PermOp op) {
  switch (op) {
    case PermOp::Op: return "OP";
    case PermOp::OpTop: return "OP_TOP";
    case PermOp::OpBottom: return "OP_BOTTOM";
  }
  raise("InvalidOpKind", "unknown perm op");
}

void validate_perm_task(PermTaskSpec& spec) {
  if (spec.ops.empty()) raise("EmptyOpSet", "perm task needs at least one operation");
  std::sort(spec.ops.begin(), spec.ops.end());
  spec.ops.erase(std::unique(spec.ops.begin(), spec.ops.end()), spec.ops.end());
  if (spec.max_depth < 1) raise("InvalidDepth", "max_depth must be >= 1");
  if (spec.max_args < 2) raise("InvalidArgs", "max_args must be >= 2");
}

std::string perm_ops_name(const std::vector<PermOp>& ops) {
  std::string out;
  for (size_t i = 0; i < ops.size(); ++i) {
    if (i) out += '+';
    out += perm_op_token(ops[i]);
  }
  return out;
}

std::vector<PermOp> parse_perm_ops(const std::string& text) {
  std::vector<PermOp> out;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    bool found = false;
    for (PermOp op : kAllPermOps) {
      if (cur == perm_op_token(op)) {
        out.push_back(op);
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
      cur += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
  }
  flush();
  if (out.empty()) raise("EmptyOpSet", "no operations in '" + text + "'");
  return out;
}

Domain make_perm_domain(const PermTaskSpec& spec_in) {
  PermTaskSpec spec = spec_in;
  validate_perm_task(spec);

  Domain dom;
  dom.exclusion_arity = 2;
  dom.max_depth = spec.max_depth;
  dom.max_args = spec.max_args;
  dom.cot = spec.cot;
  for (int id = 0; id < 36; ++id) dom.value_tokens.push_back("g" + std::to_string(id));

  for (PermOp op : spec.ops) {
    OpDef def;
    def.token = perm_op_token(op);
    def.eval = [op](std::span<const int> xs) {
      if (xs.empty()) raise("EmptyOperands", perm_op_token(op));
      GroupElement acc = element_from_id(xs[0]);
      for (size_t i = 1; i < xs.size(); ++i) {
        GroupElement rhs = element_from_id(xs[i]);
        switch (op) {
          case PermOp::Op: acc = op_full(acc, rhs); break;
          case PermOp::OpTop: acc = op_top(acc, rhs); break;
          case PermOp::OpBottom: acc = op_bottom(acc, rhs); break;
        }
      }
      return acc.id();
    };
    dom.ops.push_back(std::move(def));
  }
  dom.build_maps();
  return dom;
}

}  // namespace listops::perm
