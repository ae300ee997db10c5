#include "lexer.hpp"

#include <cctype>

namespace ces::detail {

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  int line = 1;
  int column = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
      ++i;
    }
  };
  while (i < text.size()) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) {
      advance(1);
      continue;
    }
    if (c == '#' ) {
      // comment to end of line
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    int tl = line;
    int tc = column;
    if (std::isalpha(c) || c == '_') {
      std::size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
      if (j + 1 < text.size() && text[j] == '#' && std::isdigit(static_cast<unsigned char>(text[j + 1]))) {
        ++j;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      }
      out.push_back({Tok::Ident, std::string(text.substr(i, j - i)), tl, tc});
      advance(j - i);
      continue;
    }
    if (std::isdigit(c)) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      out.push_back({Tok::Number, std::string(text.substr(i, j - i)), tl, tc});
      advance(j - i);
      continue;
    }
    Tok kind;
    switch (c) {
      case '?': kind = Tok::Question; break;
      case '(': kind = Tok::LParen; break;
      case ')': kind = Tok::RParen; break;
      case '[': kind = Tok::LBracket; break;
      case ']': kind = Tok::RBracket; break;
      case '<': kind = Tok::Less; break;
      case '>': kind = Tok::Greater; break;
      case ',': kind = Tok::Comma; break;
      case ';': kind = Tok::Semicolon; break;
      case '+': kind = Tok::Plus; break;
      case '.': kind = Tok::Dot; break;
      case '@': kind = Tok::At; break;
      default:
        throw ParseError(std::string("unexpected character '") + static_cast<char>(c) + "'", tl, tc);
    }
    out.push_back({kind, std::string(1, static_cast<char>(c)), tl, tc});
    advance(1);
  }
  out.push_back({Tok::End, "", line, column});
  return out;
}

namespace {

const char* describe(Tok kind) {
  switch (kind) {
    case Tok::Ident: return "identifier";
    case Tok::Number: return "number";
    case Tok::Question: return "'?'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Less: return "'<'";
    case Tok::Greater: return "'>'";
    case Tok::Comma: return "','";
    case Tok::Semicolon: return "';'";
    case Tok::Plus: return "'+'";
    case Tok::Dot: return "'.'";
    case Tok::At: return "'@'";
    case Tok::End: return "end of input";
  }
  return "token";
}

}  // namespace

Token TokenStream::expect(Tok kind, std::string_view what) {
  if (!at(kind)) {
    const Token& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError("expected " + std::string(what.empty() ? describe(kind) : what) + ", found " + found,
                     t.line, t.column);
  }
  return next();
}

void TokenStream::expect_end() {
  if (!at(Tok::End)) fail("unexpected trailing input '" + peek().text + "'");
}

void TokenStream::fail(const std::string& message) const {
  throw ParseError(message, peek().line, peek().column);
}

bool is_reserved_name(std::string_view ident) { return ident.find('#') != std::string_view::npos; }

}  // namespace ces::detail
