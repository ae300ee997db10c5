#include "ces/strategy.hpp"

#include <cctype>
#include <functional>
#include <stdexcept>

#include "lexer.hpp"
#include "term_parse.hpp"

namespace ces {

namespace detail {

struct StratNode {
  explicit StratNode(Strategy::Kind k, std::string n = {}) : kind(k), name(std::move(n)) {}
  Strategy::Kind kind;
  std::string name;
  std::optional<Context> ctx;
  std::optional<Term> pattern;
  std::vector<Strategy> kids;
  std::vector<Strategy::Entry> entries;
  std::size_t hash = 0;
};

}  // namespace detail

namespace {

using detail::StratNode;
using K = Strategy::Kind;

std::size_t mix(std::size_t h, std::size_t v) { return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)); }

std::size_t node_hash(const StratNode& n) {
  std::size_t h = std::hash<int>()(static_cast<int>(n.kind));
  h = mix(h, std::hash<std::string>()(n.name));
  if (n.ctx) h = mix(h, n.ctx->hash());
  if (n.pattern) h = mix(h, n.pattern->hash());
  for (const auto& k : n.kids) h = mix(h, k.hash());
  for (const auto& e : n.entries) h = mix(mix(h, std::hash<int>()(e.index)), e.body.hash());
  return h;
}

}  // namespace

// Strategy has a private constructor; the factories build nodes here.
#define CES_MAKE(node) Strategy(std::make_shared<const StratNode>(std::move(node)))

Strategy Strategy::fail() {
  static const Strategy f = [] {
    StratNode n{K::Fail};
    n.hash = node_hash(n);
    return CES_MAKE(n);
  }();
  return f;
}

Strategy Strategy::var(std::string name) {
  StratNode n{K::Var, std::move(name)};
  n.hash = node_hash(n);
  return CES_MAKE(n);
}

Strategy Strategy::ins(Context tau) {
  StratNode n{K::Ins};
  n.ctx = std::move(tau);
  n.hash = node_hash(n);
  return CES_MAKE(n);
}

Strategy Strategy::guard(Term pattern, Strategy body) {
  StratNode n{K::Guard};
  n.pattern = std::move(pattern);
  n.kids = {std::move(body)};
  n.hash = node_hash(n);
  return CES_MAKE(n);
}

Strategy Strategy::choice(Strategy left, Strategy right) {
  StratNode n{K::Choice};
  n.kids = {std::move(left), std::move(right)};
  n.hash = node_hash(n);
  return CES_MAKE(n);
}

Strategy Strategy::choice_of(std::vector<Strategy> alternatives) {
  if (alternatives.empty()) return fail();
  Strategy acc = alternatives.back();
  for (std::size_t i = alternatives.size() - 1; i-- > 0;) acc = choice(alternatives[i], acc);
  return acc;
}

Strategy Strategy::mu(std::string name, Strategy body) {
  StratNode n{K::Mu, std::move(name)};
  n.kids = {std::move(body)};
  n.hash = node_hash(n);
  return CES_MAKE(n);
}

Strategy Strategy::conj(std::vector<Entry> entries) {
  if (entries.empty()) throw std::invalid_argument("a conjunction needs at least one entry");
  StratNode n{K::Conj};
  n.entries = std::move(entries);
  n.hash = node_hash(n);
  return CES_MAKE(n);
}

Strategy Strategy::at(Index i, Strategy body) { return conj({Entry{i, std::move(body)}}); }

Strategy Strategy::at(const Position& p, Strategy body) {
  Strategy acc = std::move(body);
  const auto& idx = p.indices();
  for (auto it = idx.rbegin(); it != idx.rend(); ++it) acc = at(*it, std::move(acc));
  return acc;
}

Strategy Strategy::most(Strategy body) {
  StratNode n{K::Most};
  n.kids = {std::move(body)};
  n.hash = node_hash(n);
  return CES_MAKE(n);
}

Strategy Strategy::if_then(Strategy cond, Strategy body) {
  StratNode n{K::IfThen};
  n.kids = {std::move(cond), std::move(body)};
  n.hash = node_hash(n);
  return CES_MAKE(n);
}

#undef CES_MAKE

Strategy::Kind Strategy::kind() const { return node_->kind; }
const std::string& Strategy::name() const { return node_->name; }
const Context& Strategy::context() const { return *node_->ctx; }
const Term& Strategy::pattern() const { return *node_->pattern; }
const Strategy& Strategy::body() const { return kind() == K::IfThen ? node_->kids[1] : node_->kids[0]; }
const Strategy& Strategy::left() const { return node_->kids[0]; }
const Strategy& Strategy::right() const { return node_->kids[1]; }
const Strategy& Strategy::cond() const { return node_->kids[0]; }
const std::vector<Strategy::Entry>& Strategy::entries() const { return node_->entries; }
std::size_t Strategy::hash() const { return node_->hash; }

bool Strategy::operator==(const Strategy& other) const {
  if (node_ == other.node_) return true;
  const StratNode& a = *node_;
  const StratNode& b = *other.node_;
  if (a.hash != b.hash || a.kind != b.kind || a.name != b.name) return false;
  if (a.ctx != b.ctx || a.pattern != b.pattern) return false;
  return a.kids == b.kids && a.entries == b.entries;
}

bool Strategy::operator<(const Strategy& other) const {
  if (node_ == other.node_) return false;
  const StratNode& a = *node_;
  const StratNode& b = *other.node_;
  if (a.kind != b.kind) return a.kind < b.kind;
  if (a.name != b.name) return a.name < b.name;
  if (a.ctx && b.ctx && !(*a.ctx == *b.ctx)) return *a.ctx < *b.ctx;
  if (a.pattern && b.pattern && !(*a.pattern == *b.pattern)) return *a.pattern < *b.pattern;
  if (a.kids.size() != b.kids.size()) return a.kids.size() < b.kids.size();
  for (std::size_t i = 0; i < a.kids.size(); ++i) {
    if (a.kids[i] != b.kids[i]) return a.kids[i] < b.kids[i];
  }
  if (a.entries.size() != b.entries.size()) return a.entries.size() < b.entries.size();
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    if (a.entries[i].index != b.entries[i].index) return a.entries[i].index < b.entries[i].index;
    if (a.entries[i].body != b.entries[i].body) return a.entries[i].body < b.entries[i].body;
  }
  return false;
}

std::string index_str(Index i) { return i == kRootIndex ? "eps" : std::to_string(i); }

// ---------------------------------------------------------------------------
// Printing. Levels: 0 = choice, 1 = guard / single jump operand.

namespace {

bool extends_right(const Strategy& s) {
  switch (s.kind()) {
    case K::Mu:
    case K::IfThen:
      return true;
    case K::Guard:
      return extends_right(s.body());
    case K::Conj:
      return s.entries().size() == 1 && extends_right(s.entries()[0].body);
    default:
      return false;
  }
}

void write(const Strategy& s, int level, std::string& out);

void write_operand(const Strategy& s, std::string& out) {
  // Operand of ';' or a single jump: a choice needs parentheses.
  if (s.is(K::Choice)) {
    out += "(";
    write(s, 0, out);
    out += ")";
  } else {
    write(s, 1, out);
  }
}

void write(const Strategy& s, int level, std::string& out) {
  switch (s.kind()) {
    case K::Fail:
      out += "fail";
      return;
    case K::Var:
      out += s.name();
      return;
    case K::Ins:
      out += "ins <" + s.context().str() + ">";
      return;
    case K::Guard:
      out += s.pattern().str() + " ; ";
      write_operand(s.body(), out);
      return;
    case K::Choice: {
      bool paren = level > 0;
      if (paren) out += "(";
      const Strategy& l = s.left();
      if (l.is(K::Choice) || extends_right(l)) {
        out += "(";
        write(l, 0, out);
        out += ")";
      } else {
        write(l, 1, out);
      }
      out += " + ";
      write(s.right(), 0, out);
      if (paren) out += ")";
      return;
    }
    case K::Mu:
      out += "mu " + s.name() + ". ";
      write(s.body(), 0, out);
      return;
    case K::Conj:
      if (s.entries().size() == 1) {
        out += "@" + index_str(s.entries()[0].index) + ".";
        write_operand(s.entries()[0].body, out);
        return;
      }
      out += "[";
      for (std::size_t i = 0; i < s.entries().size(); ++i) {
        if (i) out += ", ";
        out += "@" + index_str(s.entries()[i].index) + ".";
        write(s.entries()[i].body, 0, out);
      }
      out += "]";
      return;
    case K::Most:
      out += "most(";
      write(s.body(), 0, out);
      out += ")";
      return;
    case K::IfThen:
      out += "if ";
      write(s.cond(), 0, out);
      out += " then ";
      write(s.body(), 0, out);
      return;
  }
}

const char* kind_name(K k) {
  switch (k) {
    case K::Fail: return "fail";
    case K::Var: return "var";
    case K::Ins: return "ins";
    case K::Guard: return "guard";
    case K::Choice: return "choice";
    case K::Mu: return "mu";
    case K::Conj: return "conj";
    case K::Most: return "most";
    case K::IfThen: return "ifthen";
  }
  return "?";
}

}  // namespace

std::string Strategy::str() const {
  std::string out;
  write(*this, 0, out);
  return out;
}

nlohmann::json Strategy::to_json() const {
  nlohmann::json j;
  j["kind"] = kind_name(kind());
  switch (kind()) {
    case K::Fail:
      break;
    case K::Var:
      j["var"] = name();
      break;
    case K::Ins:
      j["ctx"] = context().str();
      break;
    case K::Guard:
      j["pattern"] = pattern().str();
      j["body"] = body().to_json();
      break;
    case K::Choice:
      j["left"] = left().to_json();
      j["right"] = right().to_json();
      break;
    case K::Mu:
      j["var"] = name();
      j["body"] = body().to_json();
      break;
    case K::Conj: {
      auto arr = nlohmann::json::array();
      for (const auto& e : entries()) {
        nlohmann::json ej;
        if (e.index == kRootIndex) {
          ej["idx"] = "eps";
        } else {
          ej["idx"] = e.index;
        }
        ej["body"] = e.body.to_json();
        arr.push_back(ej);
      }
      j["entries"] = arr;
      break;
    }
    case K::Most:
      j["body"] = body().to_json();
      break;
    case K::IfThen:
      j["cond"] = cond().to_json();
      j["body"] = body().to_json();
      break;
  }
  return j;
}

Strategy strategy_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "fail") return Strategy::fail();
  if (kind == "var") return Strategy::var(j.at("var").get<std::string>());
  if (kind == "ins") return Strategy::ins(parse_context(j.at("ctx").get<std::string>()));
  if (kind == "guard") return Strategy::guard(parse_term(j.at("pattern").get<std::string>()), strategy_from_json(j.at("body")));
  if (kind == "choice") return Strategy::choice(strategy_from_json(j.at("left")), strategy_from_json(j.at("right")));
  if (kind == "mu") return Strategy::mu(j.at("var").get<std::string>(), strategy_from_json(j.at("body")));
  if (kind == "most") return Strategy::most(strategy_from_json(j.at("body")));
  if (kind == "ifthen") return Strategy::if_then(strategy_from_json(j.at("cond")), strategy_from_json(j.at("body")));
  if (kind == "conj") {
    std::vector<Strategy::Entry> es;
    for (const auto& ej : j.at("entries")) {
      const auto& idx = ej.at("idx");
      Index i = idx.is_string() ? (idx.get<std::string>() == "eps" ? kRootIndex : -1) : idx.get<int>();
      if (i < 0) throw std::invalid_argument("bad conjunction index in JSON");
      es.push_back({i, strategy_from_json(ej.at("body"))});
    }
    return Strategy::conj(std::move(es));
  }
  throw std::invalid_argument("unknown strategy kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Parsing.
//
//   choice := seq ("+" choice)?
//   seq    := term ";" seq | "@" pos "." seq | "mu" V "." choice | "if" choice "then" choice | atom
//   atom   := "fail" | V | "ins" "<" ctx ">" | "[" entries "]" | "most" "(" choice ")" | "(" choice ")"

namespace {

using detail::Tok;
using detail::TokenStream;

bool is_keyword(const std::string& w) {
  return w == "fail" || w == "ins" || w == "mu" || w == "if" || w == "then" || w == "most" || w == "eps";
}

bool is_upper_ident(const detail::Token& t) {
  return t.kind == Tok::Ident && std::isupper(static_cast<unsigned char>(t.text[0]));
}

class StrategyParser {
 public:
  StrategyParser(std::string_view text, ParseOptions opts) : ts_(text), opts_(opts) {}

  Strategy parse_all() {
    Strategy s = choice();
    ts_.expect_end();
    return s;
  }

 private:
  Strategy choice() {
    Strategy l = seq();
    if (ts_.at(Tok::Plus)) {
      ts_.next();
      return Strategy::choice(std::move(l), choice());
    }
    return l;
  }

  std::string binder_name() {
    const detail::Token& t = ts_.peek();
    if (!is_upper_ident(t)) ts_.fail("expected an upper-case fixed-point variable");
    check_reserved(t);
    return ts_.next().text;
  }

  void check_reserved(const detail::Token& t) {
    if (!opts_.allow_reserved && detail::is_reserved_name(t.text)) {
      throw ParseError("'" + t.text + "' uses the reserved '#' suffix", t.line, t.column);
    }
  }

  Index index() {
    if (ts_.at_ident("eps")) {
      ts_.next();
      return kRootIndex;
    }
    detail::Token n = ts_.expect(Tok::Number, "index");
    int v = std::stoi(n.text);
    if (v < 1) throw ParseError("indices start at 1", n.line, n.column);
    return v;
  }

  Strategy seq() {
    const detail::Token& t = ts_.peek();
    if (t.kind == Tok::At) {
      ts_.next();
      Position p = detail::parse_position(ts_);
      ts_.expect(Tok::Dot, "'.' after position");
      if (p.is_root()) return Strategy::at(kRootIndex, seq());
      return Strategy::at(p, seq());
    }
    if (t.kind == Tok::Ident && t.text == "mu") {
      ts_.next();
      std::string x = binder_name();
      ts_.expect(Tok::Dot, "'.' after the bound variable");
      return Strategy::mu(std::move(x), choice());
    }
    if (t.kind == Tok::Ident && t.text == "if") {
      ts_.next();
      Strategy c = choice();
      if (!ts_.at_ident("then")) ts_.fail("expected 'then'");
      ts_.next();
      return Strategy::if_then(std::move(c), choice());
    }
    bool term_start = t.kind == Tok::Question ||
                      (t.kind == Tok::Ident && !is_keyword(t.text) && !is_upper_ident(t));
    if (term_start) {
      Term u = detail::parse_term_tokens(ts_);
      ts_.expect(Tok::Semicolon, "';' after a guard pattern");
      return Strategy::guard(std::move(u), seq());
    }
    return atom();
  }

  Strategy atom() {
    const detail::Token t = ts_.peek();
    if (t.kind == Tok::LParen) {
      ts_.next();
      Strategy s = choice();
      ts_.expect(Tok::RParen, "')'");
      return s;
    }
    if (t.kind == Tok::LBracket) {
      ts_.next();
      std::vector<Strategy::Entry> es;
      do {
        if (!es.empty()) ts_.next();
        ts_.expect(Tok::At, "'@'");
        Index i = index();
        ts_.expect(Tok::Dot, "'.' after index");
        es.push_back({i, choice()});
      } while (ts_.at(Tok::Comma));
      ts_.expect(Tok::RBracket, "']'");
      return Strategy::conj(std::move(es));
    }
    if (t.kind == Tok::Ident) {
      if (t.text == "fail") {
        ts_.next();
        return Strategy::fail();
      }
      if (t.text == "ins") {
        ts_.next();
        ts_.expect(Tok::Less, "'<' before context");
        Context c = detail::parse_context_tokens(ts_);
        ts_.expect(Tok::Greater, "'>' after context");
        return Strategy::ins(std::move(c));
      }
      if (t.text == "most") {
        ts_.next();
        ts_.expect(Tok::LParen, "'(' after most");
        Strategy s = choice();
        ts_.expect(Tok::RParen, "')'");
        return Strategy::most(std::move(s));
      }
      if (is_upper_ident(t)) {
        check_reserved(t);
        ts_.next();
        return Strategy::var(t.text);
      }
    }
    ts_.fail(t.kind == Tok::End ? "unexpected end of input, expected a strategy"
                                : "unexpected '" + t.text + "', expected a strategy");
  }

  TokenStream ts_;
  ParseOptions opts_;
};

}  // namespace

Strategy parse_strategy(std::string_view text, ParseOptions opts) { return StrategyParser(text, opts).parse_all(); }

}  // namespace ces
