#include "listops/vocab.hpp"

#include <cctype>

#include "listops/common.hpp"

namespace listops {

int Vocab::id(const std::string& token) const {
  auto it = id_of.find(token);
  if (it == id_of.end()) raise("UnknownToken", token);
  return it->second;
}

Vocab make_vocab(const Domain& dom) {
  Vocab v;
  auto push = [&](const std::string& tok, TokenClass cls) {
    v.id_of[tok] = static_cast<int>(v.tokens.size());
    v.tokens.push_back(tok);
    v.classes.push_back(cls);
  };
  for (const std::string& t : dom.value_tokens) push(t, TokenClass::Value);
  for (const OpDef& op : dom.ops) push(op.token, TokenClass::Op);
  push("(", TokenClass::LParen);
  push(")", TokenClass::RParen);
  push("=", TokenClass::Equals);
  push(">", TokenClass::Step);
  push("<eos>", TokenClass::Eos);
  v.lparen_id = v.id_of["("];
  v.rparen_id = v.id_of[")"];
  v.equals_id = v.id_of["="];
  v.step_id = v.id_of[">"];
  v.eos_id = v.id_of["<eos>"];
  return v;
}

std::vector<std::string> lex_line(const std::string& line) {
  std::vector<std::string> units;
  size_t i = 0;
  size_t n = line.size();
  while (i < n) {
    char c = line[i];
    if (c == ' ') {
      ++i;
    } else if (c == '(' || c == ')' || c == '=' || c == '>') {
      units.emplace_back(1, c);
      ++i;
    } else if (c == '<') {
      size_t j = line.find('>', i);
      if (j == std::string::npos) raise("UnknownToken", line.substr(i));
      units.push_back(line.substr(i, j - i + 1));
      i = j + 1;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < n && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
      units.push_back(line.substr(i, j - i));
      i = j;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < n && (std::isalnum(static_cast<unsigned char>(line[j])) || line[j] == '_')) ++j;
      units.push_back(line.substr(i, j - i));
      i = j;
    } else {
      raise("UnknownToken", std::string(1, c));
    }
  }
  return units;
}

std::vector<int> tokenize(const std::string& line, const Vocab& vocab) {
  std::vector<int> ids;
  for (const std::string& u : lex_line(line)) ids.push_back(vocab.id(u));
  return ids;
}

std::string detokenize(std::span<const int> ids, const Vocab& vocab) {
  std::string out;
  TokenClass prev = TokenClass::Eos;
  for (size_t i = 0; i < ids.size(); ++i) {
    int id = ids[i];
    if (id < 0 || id >= vocab.size()) raise("UnknownToken", "id " + std::to_string(id));
    TokenClass cls = vocab.classes[static_cast<size_t>(id)];
    bool prev_joins = prev == TokenClass::Value || prev == TokenClass::RParen;
    bool cur_joins = cls == TokenClass::Value || cls == TokenClass::Op;
    if (i > 0 && prev_joins && cur_joins) out += ' ';
    out += vocab.tokens[static_cast<size_t>(id)];
    prev = cls;
  }
  return out;
}

}  // namespace listops
