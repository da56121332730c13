// Nested expression trees, sampling, functional-notation rendering, one-step
// innermost reduction, chain-of-thought lines, and parsing back.
#pragma once

#include <string>
#include <vector>

#include "listops/domain.hpp"
#include "listops/rng.hpp"

namespace listops {

struct Expr {
  int value = -1;  // leaf payload when children empty
  int op = -1;     // index into Domain::ops otherwise
  std::vector<Expr> children;

  bool is_leaf() const { return children.empty(); }

  static Expr leaf(int v) {
    Expr e;
    e.value = v;
    return e;
  }
  static Expr node(int op, std::vector<Expr> kids) {
    Expr e;
    e.op = op;
    e.children = std::move(kids);
    return e;
  }
};

// Root is always an operation node. Arity uniform on [2, max_args], op
// uniform over the domain's ops; each child is a nested node with
// probability 0.5 while depth budget remains, else a uniform value leaf.
// Draw order per node: arity, op, then children left to right (each child:
// recurse-coin first, then its content).
Expr sample_expr(Rng& rng, const Domain& dom);

int eval_expr(const Expr& e, const Domain& dom);

// Functional notation: "add_10(1 2 add_10(3 4))".
std::string render_expr(const Expr& e, const Domain& dom);

// Replace the deepest (leftmost among ties) all-leaf node by its value.
// Returns false when the expression is already a single leaf.
bool reduce_once(Expr& e, const Domain& dom);

// "E0>E1>...>Ek=A<eos>" (or "E0=A<eos>" with cot off).
std::string render_cot(const Expr& e, const Domain& dom);

// Parse one functional-notation expression from lexed units
// starting at pos; advances pos past the expression.
Expr parse_expr(const std::vector<std::string>& units, size_t& pos, const Domain& dom);

struct ParsedLine {
  std::vector<Expr> steps;  // E0..Ek (Ek is a bare leaf when cot on)
  int answer = -1;
};

// Parse a full rendered line; throws Error("MalformedLine", ...) on junk.
ParsedLine parse_line(const std::string& line, const Domain& dom);

// Replays a CoT line: every consecutive step must equal reduce_once of the
// previous one, and the final answer must equal eval_expr of E0.
bool cot_replay_ok(const std::string& line, const Domain& dom);

}  // namespace listops
