#include "listops/expr.hpp"

#include "listops/common.hpp"
#include "listops/vocab.hpp"

namespace listops {

namespace {

Expr sample_node(Rng& rng, const Domain& dom, int depth) {
  int arity = rng.uniform_int(2, dom.max_args);
  int op = rng.uniform_int(0, static_cast<int>(dom.ops.size()) - 1);
  std::vector<Expr> kids;
  kids.reserve(arity);
  for (int i = 0; i < arity; ++i) {
    bool recurse = depth < dom.max_depth && rng.uniform01() < 0.5;
    if (recurse) {
      kids.push_back(sample_node(rng, dom, depth + 1));
    } else {
      kids.push_back(Expr::leaf(rng.uniform_int(0, dom.value_count() - 1)));
    }
  }
  return Expr::node(op, std::move(kids));
}

void render_into(const Expr& e, const Domain& dom, std::string& out) {
  if (e.is_leaf()) {
    out += dom.value_tokens[static_cast<size_t>(e.value)];
    return;
  }
  out += dom.ops[static_cast<size_t>(e.op)].token;
  out += '(';
  for (size_t i = 0; i < e.children.size(); ++i) {
    if (i) out += ' ';
    render_into(e.children[i], dom, out);
  }
  out += ')';
}

// Deepest all-leaf node wins; strict > keeps the leftmost among ties
// because traversal is pre-order left to right.
void find_reducible(Expr& e, int depth, int& best_depth, Expr*& best) {
  if (e.is_leaf()) return;
  bool all_leaf = true;
  for (const Expr& c : e.children)
    if (!c.is_leaf()) all_leaf = false;
  if (all_leaf) {
    if (depth > best_depth) {
      best_depth = depth;
      best = &e;
    }
    return;
  }
  for (Expr& c : e.children) find_reducible(c, depth + 1, best_depth, best);
}

}  // namespace

Expr sample_expr(Rng& rng, const Domain& dom) { return sample_node(rng, dom, 1); }

int eval_expr(const Expr& e, const Domain& dom) {
  if (e.is_leaf()) return e.value;
  std::vector<int> vals;
  vals.reserve(e.children.size());
  for (const Expr& c : e.children) vals.push_back(eval_expr(c, dom));
  return dom.ops[static_cast<size_t>(e.op)].eval(vals);
}

std::string render_expr(const Expr& e, const Domain& dom) {
  std::string out;
  render_into(e, dom, out);
  return out;
}

bool reduce_once(Expr& e, const Domain& dom) {
  if (e.is_leaf()) return false;
  int best_depth = -1;
  Expr* best = nullptr;
  find_reducible(e, 1, best_depth, best);
  if (!best) raise("MalformedLine", "no reducible node in non-leaf expression");
  std::vector<int> vals;
  vals.reserve(best->children.size());
  for (const Expr& c : best->children) vals.push_back(c.value);
  int v = dom.ops[static_cast<size_t>(best->op)].eval(vals);
  *best = Expr::leaf(v);
  return true;
}

std::string render_cot(const Expr& e, const Domain& dom) {
  Expr work = e;
  std::string out = render_expr(work, dom);
  if (dom.cot) {
    while (reduce_once(work, dom)) {
      out += '>';
      out += render_expr(work, dom);
    }
  } else {
    while (reduce_once(work, dom)) {
    }
  }
  out += '=';
  out += dom.value_tokens[static_cast<size_t>(work.value)];
  out += "<eos>";
  return out;
}

Expr parse_expr(const std::vector<std::string>& units, size_t& pos, const Domain& dom) {
  if (pos >= units.size()) raise("MalformedLine", "unexpected end of expression");
  const std::string& u = units[pos];
  if (auto it = dom.value_of.find(u); it != dom.value_of.end()) {
    ++pos;
    return Expr::leaf(it->second);
  }
  auto op_it = dom.op_of.find(u);
  if (op_it == dom.op_of.end()) raise("UnknownToken", u);
  ++pos;
  if (pos >= units.size() || units[pos] != "(") raise("MalformedLine", "expected ( after " + u);
  ++pos;
  std::vector<Expr> kids;
  while (pos < units.size() && units[pos] != ")") kids.push_back(parse_expr(units, pos, dom));
  if (pos >= units.size()) raise("MalformedLine", "missing )");
  ++pos;
  if (kids.empty()) raise("MalformedLine", "operation with no operands");
  return Expr::node(op_it->second, std::move(kids));
}

ParsedLine parse_line(const std::string& line, const Domain& dom) {
  std::vector<std::string> units = lex_line(line);
  ParsedLine out;
  size_t pos = 0;
  out.steps.push_back(parse_expr(units, pos, dom));
  while (pos < units.size() && units[pos] == ">") {
    ++pos;
    out.steps.push_back(parse_expr(units, pos, dom));
  }
  if (pos >= units.size() || units[pos] != "=") raise("MalformedLine", "missing = in: " + line);
  ++pos;
  if (pos >= units.size()) raise("MalformedLine", "missing answer in: " + line);
  auto it = dom.value_of.find(units[pos]);
  if (it == dom.value_of.end()) raise("MalformedLine", "answer is not a value: " + units[pos]);
  out.answer = it->second;
  ++pos;
  if (pos >= units.size() || units[pos] != "<eos>") raise("MalformedLine", "missing <eos>");
  ++pos;
  if (pos != units.size()) raise("MalformedLine", "trailing tokens");
  return out;
}

bool cot_replay_ok(const std::string& line, const Domain& dom) {
  ParsedLine parsed = parse_line(line, dom);
  if (parsed.steps.empty()) return false;
  if (eval_expr(parsed.steps.front(), dom) != parsed.answer) return false;
  if (!dom.cot) return parsed.steps.size() == 1;
  for (size_t i = 0; i + 1 < parsed.steps.size(); ++i) {
    Expr work = parsed.steps[i];
    if (!reduce_once(work, dom)) return false;
    if (render_expr(work, dom) != render_expr(parsed.steps[i + 1], dom)) return false;
  }
  const Expr& last = parsed.steps.back();
  return last.is_leaf() && last.value == parsed.answer;
}

}  // namespace listops
