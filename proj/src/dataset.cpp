#include "listops/dataset.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <unordered_set>

#include "listops/common.hpp"
#include "listops/vocab.hpp"

namespace listops {

int dataset_size_for(int modulus) {
  if (modulus < 2) raise("InvalidModulus", "modulus must be >= 2");
  return 5000 * modulus;
}

std::vector<std::string> generate_lines(const Domain& dom, int count, Rng& rng) {
  std::vector<std::string> lines;
  lines.reserve(static_cast<size_t>(count));
  std::unordered_set<std::string> seen;
  seen.reserve(static_cast<size_t>(count) * 2);
  for (int i = 0; i < count; ++i) {
    Expr e = sample_expr(rng, dom);
    std::string line = render_cot(e, dom);
    if (seen.insert(line).second) lines.push_back(std::move(line));
  }
  return lines;
}

namespace {

void collect_occurrences(const Expr& e, int arity, std::vector<std::vector<int>>& out) {
  if (e.is_leaf()) return;
  bool all_leaf = true;
  for (const Expr& c : e.children)
    if (!c.is_leaf()) all_leaf = false;
  if (all_leaf) {
    int m = static_cast<int>(e.children.size());
    for (int start = 0; start + arity <= m; ++start) {
      std::vector<int> window;
      window.reserve(static_cast<size_t>(arity));
      for (int k = 0; k < arity; ++k)
        window.push_back(e.children[static_cast<size_t>(start + k)].value);
      out.push_back(std::move(window));
    }
  } else {
    for (const Expr& c : e.children) collect_occurrences(c, arity, out);
  }
}

uint64_t tuple_index(const std::vector<int>& tuple, int v) {
  uint64_t idx = 0;
  for (int x : tuple) idx = idx * static_cast<uint64_t>(v) + static_cast<uint64_t>(x);
  return idx;
}

}  // namespace

std::vector<std::vector<int>> line_occurrences(const std::string& line, const Domain& dom) {
  ParsedLine parsed = parse_line(line, dom);
  std::vector<std::vector<int>> out;
  for (const Expr& step : parsed.steps) collect_occurrences(step, dom.exclusion_arity, out);
  return out;
}

DatasetSplit make_split(const std::vector<std::string>& lines, const Domain& dom, Rng& rng) {
  int v = dom.value_count();
  int arity = dom.exclusion_arity;
  uint64_t total = 1;
  for (int i = 0; i < arity; ++i) total *= static_cast<uint64_t>(v);
  uint64_t n_excluded =
      static_cast<uint64_t>(std::ceil(0.1 * static_cast<double>(total)));

  // Partial Fisher-Yates over all tuple indices picks a uniform subset.
  std::vector<uint64_t> all(total);
  for (uint64_t i = 0; i < total; ++i) all[i] = i;
  for (uint64_t i = 0; i < n_excluded; ++i) {
    uint64_t j = i + static_cast<uint64_t>(rng.uniform_int(0, static_cast<int>(total - i) - 1));
    std::swap(all[i], all[j]);
  }
  std::unordered_set<uint64_t> excluded_idx(all.begin(),
                                            all.begin() + static_cast<long>(n_excluded));

  DatasetSplit split;
  split.exclusion_arity = arity;
  for (uint64_t i = 0; i < n_excluded; ++i) {
    std::vector<int> tuple(static_cast<size_t>(arity));
    uint64_t rest = all[i];
    for (int k = arity - 1; k >= 0; --k) {
      tuple[static_cast<size_t>(k)] = static_cast<int>(rest % static_cast<uint64_t>(v));
      rest /= static_cast<uint64_t>(v);
    }
    split.excluded.push_back(std::move(tuple));
  }

  for (const std::string& line : lines) {
    bool hit = false;
    for (const std::vector<int>& occ : line_occurrences(line, dom)) {
      if (excluded_idx.count(tuple_index(occ, v))) {
        hit = true;
        break;
      }
    }
    (hit ? split.test : split.train).push_back(line);
  }
  if (split.train.empty() || split.test.empty())
    raise("EmptySplit", "train " + std::to_string(split.train.size()) + ", test " +
                            std::to_string(split.test.size()));
  return split;
}

DatasetSplit make_dataset(const Domain& dom, int count, Rng& rng) {
  Rng gen_rng = rng.stream(1);
  Rng split_rng = rng.stream(2);
  std::vector<std::string> lines = generate_lines(dom, count, gen_rng);
  return make_split(lines, dom, split_rng);
}

void write_dataset(const std::string& dir, const DatasetSplit& split,
                   const std::string& description) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto write_file = [&](const std::string& name, const std::vector<std::string>& lines) {
    std::ofstream out(dir + "/" + name);
    if (!out) raise("IoError", "cannot write " + dir + "/" + name);
    for (const std::string& l : lines) out << l << '\n';
  };
  write_file("train.txt", split.train);
  write_file("test.txt", split.test);

  std::ofstream meta(dir + "/meta.txt");
  if (!meta) raise("IoError", "cannot write " + dir + "/meta.txt");
  meta << description;
  meta << "train_lines = " << split.train.size() << '\n';
  meta << "test_lines = " << split.test.size() << '\n';
  meta << "exclusion_arity = " << split.exclusion_arity << '\n';
  meta << "excluded = ";
  for (size_t i = 0; i < split.excluded.size(); ++i) {
    if (i) meta << ", ";
    for (size_t k = 0; k < split.excluded[i].size(); ++k) {
      if (k) meta << ' ';
      meta << split.excluded[i][k];
    }
  }
  meta << '\n';
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise("IoError", "cannot read " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace listops
