// Word-level vocabulary: value tokens, operation tokens, then the five
// structural tokens "(", ")", "=", ">", "<eos>".
#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "listops/domain.hpp"

namespace listops {

enum class TokenClass { Value, Op, LParen, RParen, Equals, Step, Eos };

struct Vocab {
  std::vector<std::string> tokens;
  std::vector<TokenClass> classes;
  std::unordered_map<std::string, int> id_of;
  int lparen_id = -1, rparen_id = -1, equals_id = -1, step_id = -1, eos_id = -1;

  int size() const { return static_cast<int>(tokens.size()); }
  int id(const std::string& token) const;
};

// Value tokens first (ids 0..n-1), then op tokens in domain order, then the
// structural tokens. Size is always value_count + |ops| + 5.
Vocab make_vocab(const Domain& dom);

// Split a rendered line into units: parens/=/> are single units, "<eos>"
// is one unit, digit runs and identifier runs are units, spaces separate.
std::vector<std::string> lex_line(const std::string& line);

std::vector<int> tokenize(const std::string& line, const Vocab& vocab);

// Inverse of tokenize under the canonical spacing rule: a single space goes
// between adjacent tokens A B exactly when A is a value or ")" and B is a
// value or an operation token.
std::string detokenize(std::span<const int> ids, const Vocab& vocab);

}  // namespace listops
