#include "listops/ops.hpp"

#include <algorithm>

#include "listops/common.hpp"
#include "listops/rng.hpp"

namespace listops {

const char* op_kind_name(OpKind kind) {
  switch (kind) {
    case OpKind::Max: return "max";
    case OpKind::Min: return "min";
    case OpKind::Med: return "med";
    case OpKind::Add: return "add";
    case OpKind::Prod: return "prod";
    case OpKind::Nadd: return "nadd";
    case OpKind::ShufAdd: return "shuf_add";
  }
  raise("InvalidOpKind", "unknown enum value");
}

std::string op_token(OpKind kind, int modulus) {
  return std::string(op_kind_name(kind)) + "_" + std::to_string(modulus);
}

ShuffledTable make_shuffled_table(int modulus, uint64_t seed) {
  if (modulus < 1) raise("InvalidModulus", "modulus must be >= 1");
  int n = modulus;
  ShuffledTable t;
  t.modulus = n;
  t.seed = seed;
  t.cells.assign(static_cast<size_t>(n) * n, 0);

  Rng rng(seed);
  std::vector<int> upper;
  upper.reserve(static_cast<size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) upper.push_back((i + j) % n);
  rng.shuffle(upper);

  std::vector<int> diag;
  diag.reserve(n);
  for (int i = 0; i < n; ++i) diag.push_back((2 * i) % n);
  rng.shuffle(diag);

  size_t u = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      int v = upper[u++];
      t.cells[static_cast<size_t>(i) * n + j] = v;
      t.cells[static_cast<size_t>(j) * n + i] = v;
    }
    t.cells[static_cast<size_t>(i) * n + i] = diag[static_cast<size_t>(i)];
  }
  return t;
}

int eval_op(OpKind kind, int modulus, std::span<const int> operands, const ShuffledTable* table) {
  if (operands.empty()) raise("EmptyOperands", op_kind_name(kind));
  for (int x : operands) {
    if (x < 0 || x >= modulus)
      raise("OperandOutOfRange", std::to_string(x) + " not in [0, " + std::to_string(modulus) + ")");
  }
  if ((kind == OpKind::ShufAdd) != (table != nullptr))
    raise("MissingTable", "table must be provided exactly for shuf_add");

  switch (kind) {
    case OpKind::Max: return *std::max_element(operands.begin(), operands.end());
    case OpKind::Min: return *std::min_element(operands.begin(), operands.end());
    case OpKind::Med: {
      std::vector<int> sorted(operands.begin(), operands.end());
      std::sort(sorted.begin(), sorted.end());
      // Even-length lists take the lower middle value.
      return sorted[(sorted.size() - 1) / 2];
    }
    case OpKind::Add: {
      long long s = 0;
      for (int x : operands) s += x;
      return static_cast<int>(s % modulus);
    }
    case OpKind::Prod: {
      long long p = 1;
      for (int x : operands) p = (p * x) % modulus;
      return static_cast<int>(p);
    }
    case OpKind::Nadd: {
      // Sum of (-1)^i x_i with the first operand positive, reduced into [0, n).
      long long s = 0;
      for (size_t i = 0; i < operands.size(); ++i) s += (i % 2 == 0) ? operands[i] : -operands[i];
      long long r = s % modulus;
      if (r < 0) r += modulus;
      return static_cast<int>(r);
    }
    case OpKind::ShufAdd: {
      int acc = operands[0];
      for (size_t i = 1; i < operands.size(); ++i) acc = table->at(acc, operands[i]);
      return acc;
    }
  }
  raise("InvalidOpKind", "unknown enum value");
}

double associativity_violation_fraction(const ShuffledTable& table, int sample, uint64_t seed) {
  if (sample < 1) raise("InvalidSample", "sample must be >= 1");
  int n = table.modulus;
  long long total = static_cast<long long>(n) * n * n;
  long long violations = 0;
  long long count = 0;
  auto check = [&](int a, int b, int c) {
    if (table.at(table.at(a, b), c) != table.at(a, table.at(b, c))) ++violations;
    ++count;
  };
  if (sample >= total) {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) check(a, b, c);
  } else {
    Rng rng(seed);
    for (int s = 0; s < sample; ++s)
      check(rng.uniform_int(0, n - 1), rng.uniform_int(0, n - 1), rng.uniform_int(0, n - 1));
  }
  return static_cast<double>(violations) / static_cast<double>(count);
}

}  // namespace listops
