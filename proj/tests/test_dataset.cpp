// Expression sampling, CoT rendering, tokenization, and the excluded-tuple
// split, each checked against frozen strings or brute-force scans.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <set>

#include "listops/common.hpp"
#include "listops/dataset.hpp"
#include "listops/vocab.hpp"

using namespace listops;

namespace {

TaskSpec add10() {
  TaskSpec s;
  s.ops = {OpKind::Add};
  s.modulus = 10;
  return s;
}

int depth_of(const Expr& e) {
  if (e.is_leaf()) return 0;
  int d = 0;
  for (const Expr& c : e.children) d = std::max(d, depth_of(c));
  return 1 + d;
}

int max_arity_of(const Expr& e) {
  if (e.is_leaf()) return 0;
  int a = static_cast<int>(e.children.size());
  for (const Expr& c : e.children) a = std::max(a, max_arity_of(c));
  return a;
}

}  // namespace

TEST_CASE("frozen CoT lines") {
  Domain dom = make_domain(add10());
  // add_10(1 2 add_10(3 4))
  Expr inner = Expr::node(0, {Expr::leaf(3), Expr::leaf(4)});
  Expr e = Expr::node(0, {Expr::leaf(1), Expr::leaf(2), inner});
  CHECK(render_cot(e, dom) == "add_10(1 2 add_10(3 4))>add_10(1 2 7)>0=0<eos>");

  Expr e2 = Expr::node(0, {Expr::leaf(9), Expr::node(0, {Expr::leaf(3), Expr::leaf(4)})});
  CHECK(render_cot(e2, dom) == "add_10(9 add_10(3 4))>add_10(9 7)>6=6<eos>");

  TaskSpec max_spec;
  max_spec.ops = {OpKind::Max};
  max_spec.modulus = 10;
  Domain max_dom = make_domain(max_spec);
  Expr e3 = Expr::node(0, {Expr::leaf(3), Expr::leaf(5)});
  CHECK(render_cot(e3, max_dom) == "max_10(3 5)>5=5<eos>");
}

TEST_CASE("innermost reduction is deepest then leftmost") {
  TaskSpec spec;
  spec.ops = {OpKind::Max, OpKind::Min};
  spec.modulus = 10;
  Domain dom = make_domain(spec);
  // max_10(min_10(1 2) min_10(3 4)) -> ties at depth 2 resolve leftmost
  Expr e = Expr::node(0, {Expr::node(1, {Expr::leaf(1), Expr::leaf(2)}),
                          Expr::node(1, {Expr::leaf(3), Expr::leaf(4)})});
  Expr work = e;
  REQUIRE(reduce_once(work, dom));
  CHECK(render_expr(work, dom) == "max_10(1 min_10(3 4))");
  REQUIRE(reduce_once(work, dom));
  CHECK(render_expr(work, dom) == "max_10(1 3)");
}

TEST_CASE("cot off renders only the final answer") {
  TaskSpec spec = add10();
  spec.cot = false;
  Domain dom = make_domain(spec);
  Expr e = Expr::node(0, {Expr::leaf(1), Expr::node(0, {Expr::leaf(3), Expr::leaf(4)})});
  CHECK(render_cot(e, dom) == "add_10(1 add_10(3 4))=8<eos>");
}

TEST_CASE("vocabulary layout and size") {
  TaskSpec spec;
  spec.ops = {OpKind::Max, OpKind::Med, OpKind::Add};
  spec.modulus = 26;
  Domain dom = make_domain(spec);
  Vocab v = make_vocab(dom);
  CHECK(v.size() == 26 + 3 + 5);
  CHECK(v.tokens[0] == "0");
  CHECK(v.tokens[25] == "25");
  CHECK(v.tokens[26] == "max_26");  // canonical enum order
  CHECK(v.tokens[27] == "med_26");
  CHECK(v.tokens[28] == "add_26");
  CHECK(v.id("<eos>") == v.eos_id);
  CHECK_THROWS_AS(v.id("nope"), Error);
}

TEST_CASE("tokenize frozen example") {
  Domain dom = make_domain(add10());
  Vocab v = make_vocab(dom);
  std::vector<int> ids = tokenize("add_10(3 4)=7<eos>", v);
  REQUIRE(ids.size() == 8);
  CHECK(v.tokens[static_cast<size_t>(ids[0])] == "add_10");
  CHECK(v.tokens[static_cast<size_t>(ids[1])] == "(");
  CHECK(v.tokens[static_cast<size_t>(ids[2])] == "3");
  CHECK(v.tokens[static_cast<size_t>(ids[3])] == "4");
  CHECK(v.tokens[static_cast<size_t>(ids[4])] == ")");
  CHECK(v.tokens[static_cast<size_t>(ids[5])] == "=");
  CHECK(v.tokens[static_cast<size_t>(ids[6])] == "7");
  CHECK(v.tokens[static_cast<size_t>(ids[7])] == "<eos>");
}

TEST_CASE("multi-digit numbers are single tokens") {
  TaskSpec spec = add10();
  spec.modulus = 20;
  Domain dom = make_domain(spec);
  Vocab v = make_vocab(dom);
  std::vector<int> ids = tokenize("13", v);
  REQUIRE(ids.size() == 1);
  CHECK(ids[0] == 13);
}

TEST_CASE("round trip over generated lines") {
  TaskSpec spec;
  spec.ops = {OpKind::Max, OpKind::Min, OpKind::Med, OpKind::Add, OpKind::Prod, OpKind::Nadd};
  spec.modulus = 20;
  Domain dom = make_domain(spec);
  Vocab v = make_vocab(dom);
  Rng rng(42);
  std::vector<std::string> lines = generate_lines(dom, 1000, rng);
  CHECK(lines.size() > 900);
  for (const std::string& line : lines) {
    CHECK(detokenize(tokenize(line, v), v) == line);
  }
}

TEST_CASE("sampler respects shape bounds") {
  TaskSpec spec = add10();
  spec.max_depth = 1;
  Domain dom1 = make_domain(spec);
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    Expr e = sample_expr(rng, dom1);
    CHECK(depth_of(e) == 1);
  }

  spec.max_depth = 2;
  spec.max_args = 3;
  Domain dom2 = make_domain(spec);
  int seen_depth = 0, seen_arity = 0;
  for (int i = 0; i < 10000; ++i) {
    Expr e = sample_expr(rng, dom2);
    seen_depth = std::max(seen_depth, depth_of(e));
    seen_arity = std::max(seen_arity, max_arity_of(e));
    CHECK(depth_of(e) <= 2);
    CHECK(max_arity_of(e) <= 3);
  }
  CHECK(seen_depth == 2);
  CHECK(seen_arity == 3);

  TaskSpec single = add10();
  Domain dom3 = make_domain(single);
  Expr e = sample_expr(rng, dom3);
  CHECK(e.op == 0);  // singleton op set
}

TEST_CASE("cot replay oracle on 10000 generated lines") {
  TaskSpec spec;
  spec.ops = {OpKind::Max, OpKind::Min, OpKind::Med, OpKind::Add, OpKind::Prod, OpKind::Nadd,
              OpKind::ShufAdd};
  spec.modulus = 10;
  spec.shuffle_seed = 5;
  Domain dom = make_domain(spec);
  Rng rng(7);
  std::vector<std::string> lines = generate_lines(dom, 10000, rng);
  for (const std::string& line : lines) REQUIRE(cot_replay_ok(line, dom));
}

TEST_CASE("dataset size scales linearly") {
  CHECK(dataset_size_for(10) == 50000);
  CHECK(dataset_size_for(20) == 100000);
  CHECK(dataset_size_for(26) == 130000);
}

TEST_CASE("split excludes 100 of 1000 triples at n=10 with zero train leakage") {
  TaskSpec spec;
  spec.ops = {OpKind::Add, OpKind::Max};
  spec.modulus = 10;
  Domain dom = make_domain(spec);
  Rng rng(11);
  std::vector<std::string> lines = generate_lines(dom, 20000, rng);
  Rng split_rng(12);
  DatasetSplit split = make_split(lines, dom, split_rng);

  CHECK(split.excluded.size() == 100);
  std::set<std::vector<int>> exset(split.excluded.begin(), split.excluded.end());
  CHECK(exset.size() == 100);  // distinct

  for (const std::string& line : split.train) {
    for (const auto& occ : line_occurrences(line, dom)) REQUIRE(exset.count(occ) == 0);
  }
  for (const std::string& line : split.test) {
    bool hit = false;
    for (const auto& occ : line_occurrences(line, dom))
      if (exset.count(occ)) hit = true;
    REQUIRE(hit);
  }
  CHECK(split.train.size() + split.test.size() == lines.size());
}

TEST_CASE("split is deterministic given seed") {
  Domain dom = make_domain(add10());
  Rng rng(3);
  std::vector<std::string> lines = generate_lines(dom, 5000, rng);
  Rng ra(77), rb(77);
  DatasetSplit a = make_split(lines, dom, ra);
  DatasetSplit b = make_split(lines, dom, rb);
  CHECK(a.excluded == b.excluded);
  CHECK(a.train == b.train);
  CHECK(a.test == b.test);
}

TEST_CASE("EmptySplit when no line can reach the test side") {
  TaskSpec spec = add10();
  spec.max_depth = 1;
  spec.max_args = 2;  // no 3-ary steps, so no line contains a triple
  Domain dom = make_domain(spec);
  Rng rng(4);
  std::vector<std::string> lines = generate_lines(dom, 200, rng);
  Rng split_rng(5);
  CHECK_THROWS_AS(make_split(lines, dom, split_rng), Error);
}

TEST_CASE("dataset files round trip") {
  Domain dom = make_domain(add10());
  Rng rng(9);
  DatasetSplit split = make_dataset(dom, 5000, rng);
  std::string dir = (std::filesystem::temp_directory_path() / "listops_ds_test").string();
  std::filesystem::remove_all(dir);
  write_dataset(dir, split, "family = arithmetic\nops = add\nmod = 10\n");
  CHECK(read_lines(dir + "/train.txt") == split.train);
  CHECK(read_lines(dir + "/test.txt") == split.test);
  CHECK(!read_lines(dir + "/meta.txt").empty());
  std::filesystem::remove_all(dir);
}

TEST_CASE("parse rejects malformed lines") {
  Domain dom = make_domain(add10());
  CHECK_THROWS_AS(parse_line("add_10(1 2", dom), Error);
  CHECK_THROWS_AS(parse_line("add_10(1 2)>3", dom), Error);
  CHECK_THROWS_AS(parse_line("add_10()>0=0<eos>", dom), Error);
  CHECK_THROWS_AS(parse_line("bogus_10(1 2)=3<eos>", dom), Error);
}
