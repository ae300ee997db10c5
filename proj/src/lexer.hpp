#pragma once

// Tokenizer shared by the term, position, PosCE and strategy parsers.

#include <string>
#include <string_view>
#include <vector>

#include "ces/error.hpp"

namespace ces::detail {

enum class Tok {
  Ident,     // [A-Za-z_][A-Za-z0-9_]* optionally followed by #digits
  Number,    // [0-9]+
  Question,  // ?
  LParen,
  RParen,
  LBracket,
  RBracket,
  Less,
  Greater,
  Comma,
  Semicolon,
  Plus,
  Dot,
  At,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

std::vector<Token> tokenize(std::string_view text);

class TokenStream {
 public:
  explicit TokenStream(std::string_view text) : tokens_(tokenize(text)) {}

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }
  bool at(Tok kind) const { return peek().kind == kind; }
  bool at_ident(std::string_view word) const { return at(Tok::Ident) && peek().text == word; }
  Token next() {
    Token t = peek();
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }
  Token expect(Tok kind, std::string_view what);
  void expect_end();
  [[noreturn]] void fail(const std::string& message) const;

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

bool is_reserved_name(std::string_view ident);

}  // namespace ces::detail
