// Dataset generation and the excluded-tuple train/test split.
#pragma once

#include <array>
#include <set>
#include <string>
#include <vector>

#include "listops/expr.hpp"

namespace listops {

struct DatasetSplit {
  std::vector<std::string> train;
  std::vector<std::string> test;
  std::vector<std::vector<int>> excluded;  // ordered tuples, width = exclusion_arity
  int exclusion_arity = 3;
};

// Generated equations before splitting: 5000 per unit of modulus.
int dataset_size_for(int modulus);

// Sample `count` expressions, render them, deduplicate preserving first-seen
// order. Result size is <= count.
std::vector<std::string> generate_lines(const Domain& dom, int count, Rng& rng);

// Ordered tuple occurrences of a line: every adjacent window of width
// `exclusion_arity` over the operand list of every all-leaf node in every
// reduction step.
std::vector<std::vector<int>> line_occurrences(const std::string& line, const Domain& dom);

// Excluded set: ceil(0.1 * v^arity) distinct ordered tuples chosen uniformly.
// Train lines contain no excluded tuple at any step; test lines contain at
// least one. Throws Error("EmptySplit") when either side is empty.
DatasetSplit make_split(const std::vector<std::string>& lines, const Domain& dom, Rng& rng);

// Convenience: generate + split with derived child streams of `rng`.
DatasetSplit make_dataset(const Domain& dom, int count, Rng& rng);

// File layout under dir: train.txt, test.txt, meta.txt.
void write_dataset(const std::string& dir, const DatasetSplit& split,
                   const std::string& description);
std::vector<std::string> read_lines(const std::string& path);

}  // namespace listops
