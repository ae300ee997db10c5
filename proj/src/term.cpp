#include "ces/term.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "lexer.hpp"
#include "term_parse.hpp"

namespace ces {

// ---------------------------------------------------------------------------
// Positions

Position::Position(std::vector<int> indices) : indices_(std::move(indices)) {
  for (int i : indices_) {
    if (i < 1) throw TermError("position indices must be >= 1");
  }
}

Position Position::child(int index) const {
  std::vector<int> v = indices_;
  v.push_back(index);
  return Position(std::move(v));
}

Position Position::concat(const Position& suffix) const {
  std::vector<int> v = indices_;
  v.insert(v.end(), suffix.indices_.begin(), suffix.indices_.end());
  return Position(std::move(v));
}

Position Position::tail() const {
  return Position(std::vector<int>(indices_.begin() + 1, indices_.end()));
}

bool Position::is_prefix_of(const Position& other) const {
  if (size() > other.size()) return false;
  return std::equal(indices_.begin(), indices_.end(), other.indices_.begin());
}

std::string Position::str() const {
  if (indices_.empty()) return "eps";
  std::string out;
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (i) out += '.';
    out += std::to_string(indices_[i]);
  }
  return out;
}

PositionOrder compare_positions(const Position& p, const Position& q) {
  if (p == q) return PositionOrder::Equal;
  if (p.is_prefix_of(q)) return PositionOrder::Less;
  if (q.is_prefix_of(p)) return PositionOrder::Greater;
  return PositionOrder::Parallel;
}

Position parse_position(std::string_view text) {
  detail::TokenStream ts(text);
  Position p = detail::parse_position(ts);
  ts.expect_end();
  return p;
}

// ---------------------------------------------------------------------------
// Trees

namespace detail {

namespace {

std::size_t mix(std::size_t h, std::size_t v) { return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)); }

}  // namespace

TreePtr make_variable(std::string name) {
  std::size_t h = mix(std::hash<std::string>{}(name), 1);
  return std::make_shared<const TreeNode>(TreeNode{TreeNode::Kind::Variable, std::move(name), {}, h});
}

TreePtr make_apply(std::string symbol, std::vector<TreePtr> children) {
  std::size_t h = mix(std::hash<std::string>{}(symbol), 2);
  for (const auto& c : children) h = mix(h, c->hash);
  return std::make_shared<const TreeNode>(TreeNode{TreeNode::Kind::Apply, std::move(symbol), std::move(children), h});
}

TreePtr make_hole() {
  static const TreePtr hole = std::make_shared<const TreeNode>(TreeNode{TreeNode::Kind::Hole, "[]", {}, 0x5bd1e995});
  return hole;
}

bool tree_equal(const TreePtr& a, const TreePtr& b) {
  if (a == b) return true;
  if (a->hash != b->hash || a->kind != b->kind || a->name != b->name || a->children.size() != b->children.size())
    return false;
  for (std::size_t i = 0; i < a->children.size(); ++i) {
    if (!tree_equal(a->children[i], b->children[i])) return false;
  }
  return true;
}

namespace {

int tree_compare(const TreePtr& a, const TreePtr& b) {
  if (a == b) return 0;
  if (a->kind != b->kind) return a->kind < b->kind ? -1 : 1;
  if (int c = a->name.compare(b->name)) return c < 0 ? -1 : 1;
  if (a->children.size() != b->children.size()) return a->children.size() < b->children.size() ? -1 : 1;
  for (std::size_t i = 0; i < a->children.size(); ++i) {
    if (int c = tree_compare(a->children[i], b->children[i])) return c;
  }
  return 0;
}

void tree_write(const TreePtr& t, std::string& out) {
  switch (t->kind) {
    case TreeNode::Kind::Variable:
      out += '?';
      out += t->name;
      return;
    case TreeNode::Kind::Hole:
      out += "[]";
      return;
    case TreeNode::Kind::Apply:
      out += t->name;
      if (!t->children.empty()) {
        out += '(';
        for (std::size_t i = 0; i < t->children.size(); ++i) {
          if (i) out += ", ";
          tree_write(t->children[i], out);
        }
        out += ')';
      }
      return;
  }
}

std::optional<Position> find_hole(const TreePtr& t, int& count) {
  if (t->kind == TreeNode::Kind::Hole) {
    ++count;
    return Position{};
  }
  std::optional<Position> found;
  for (std::size_t i = 0; i < t->children.size(); ++i) {
    if (auto p = find_hole(t->children[i], count)) {
      std::vector<int> idx{static_cast<int>(i + 1)};
      idx.insert(idx.end(), p->indices().begin(), p->indices().end());
      found = Position(std::move(idx));
    }
  }
  return found;
}

TreePtr replace_tree(const TreePtr& t, const std::vector<int>& path, std::size_t at, const TreePtr& s) {
  if (at == path.size()) return s;
  std::size_t i = static_cast<std::size_t>(path[at]);
  if (t->kind != TreeNode::Kind::Apply || i > t->children.size())
    throw PositionOutOfTerm("position out of term");
  std::vector<TreePtr> kids = t->children;
  kids[i - 1] = replace_tree(kids[i - 1], path, at + 1, s);
  return make_apply(t->name, std::move(kids));
}

}  // namespace

std::string tree_str(const TreePtr& t) {
  std::string out;
  tree_write(t, out);
  return out;
}

// term := "?" ident | ident | ident "(" term ("," term)* ")" ; "[]" is the hole when allowed.
TreePtr parse_tree(TokenStream& ts, bool allow_hole) {
  if (ts.at(Tok::Question)) {
    ts.next();
    Token name = ts.expect(Tok::Ident, "variable name after '?'");
    return make_variable(name.text);
  }
  if (ts.at(Tok::LBracket)) {
    if (!allow_hole) ts.fail("hole '[]' is not allowed in a term");
    ts.next();
    ts.expect(Tok::RBracket, "']' to close the hole");
    return make_hole();
  }
  Token sym = ts.expect(Tok::Ident, "term");
  if (is_reserved_name(sym.text)) throw ParseError("'#' is not allowed in symbol names", sym.line, sym.column);
  std::vector<TreePtr> kids;
  if (ts.at(Tok::LParen)) {
    ts.next();
    kids.push_back(parse_tree(ts, allow_hole));
    while (ts.at(Tok::Comma)) {
      ts.next();
      kids.push_back(parse_tree(ts, allow_hole));
    }
    ts.expect(Tok::RParen, "')'");
  }
  return make_apply(sym.text, std::move(kids));
}

Position parse_position(TokenStream& ts) {
  if (ts.at_ident("eps")) {
    ts.next();
    return Position{};
  }
  std::vector<int> idx;
  Token first = ts.expect(Tok::Number, "position");
  idx.push_back(std::stoi(first.text));
  while (ts.at(Tok::Dot) && ts.peek(1).kind == Tok::Number) {
    ts.next();
    idx.push_back(std::stoi(ts.next().text));
  }
  for (int i : idx) {
    if (i < 1) throw ParseError("position indices start at 1", first.line, first.column);
  }
  return Position(std::move(idx));
}

Context parse_context_tokens(TokenStream& ts) {
  const Token start = ts.peek();
  TreePtr t = parse_tree(ts, true);
  int holes = 0;
  find_hole(t, holes);
  if (holes != 1)
    throw ParseError("a context needs exactly one hole '[]', found " + std::to_string(holes), start.line,
                     start.column);
  return Context::from_tree(t);
}

Term parse_term_tokens(TokenStream& ts) { return Term::from_tree(parse_tree(ts, false)); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Term

Term Term::variable(std::string name) {
  if (name.empty()) throw TermError("empty variable name");
  return Term(detail::make_variable(std::move(name)));
}

Term Term::apply(std::string symbol, std::vector<Term> children) {
  if (symbol.empty()) throw TermError("empty symbol name");
  std::vector<detail::TreePtr> kids;
  kids.reserve(children.size());
  for (auto& c : children) kids.push_back(c.node_);
  return Term(detail::make_apply(std::move(symbol), std::move(kids)));
}

Term Term::from_tree(detail::TreePtr node) {
  int holes = 0;
  detail::find_hole(node, holes);
  if (holes != 0) throw TermError("a term cannot contain a hole");
  return Term(std::move(node));
}

bool Term::is_variable() const { return node_->kind == detail::TreeNode::Kind::Variable; }
const std::string& Term::name() const { return node_->name; }
std::size_t Term::arity() const { return node_->children.size(); }

Term Term::child(std::size_t index_1based) const {
  if (index_1based < 1 || index_1based > arity()) throw PositionOutOfTerm("child index out of range");
  return Term(node_->children[index_1based - 1]);
}

std::vector<Term> Term::children() const {
  std::vector<Term> out;
  for (const auto& c : node_->children) out.push_back(Term(c));
  return out;
}

std::size_t Term::hash() const { return node_->hash; }
bool Term::operator==(const Term& other) const { return detail::tree_equal(node_, other.node_); }
bool Term::operator<(const Term& other) const { return detail::tree_compare(node_, other.node_) < 0; }
std::string Term::str() const { return detail::tree_str(node_); }

// ---------------------------------------------------------------------------
// Context

Context Context::hole() { return Context(detail::make_hole(), Position{}); }

Context Context::from_tree(detail::TreePtr node) {
  int holes = 0;
  auto pos = detail::find_hole(node, holes);
  if (holes != 1) throw TermError("a context needs exactly one hole, found " + std::to_string(holes));
  return Context(std::move(node), *pos);
}

bool Context::operator==(const Context& other) const { return detail::tree_equal(node_, other.node_); }
bool Context::operator<(const Context& other) const { return detail::tree_compare(node_, other.node_) < 0; }
std::size_t Context::hash() const { return node_->hash; }
std::string Context::str() const { return detail::tree_str(node_); }

// ---------------------------------------------------------------------------
// Signature

Signature::Signature(std::initializer_list<std::pair<std::string, int>> symbols) {
  for (const auto& [name, arity] : symbols) declare(name, arity);
}

void Signature::declare(const std::string& name, int arity) {
  if (name.empty()) throw TermError("empty symbol name");
  if (arity < 0) throw TermError("negative arity for '" + name + "'");
  auto [it, inserted] = arities_.emplace(name, arity);
  if (!inserted && it->second != arity)
    throw TermError("symbol '" + name + "' used with arities " + std::to_string(it->second) + " and " +
                    std::to_string(arity));
}

std::optional<int> Signature::arity(const std::string& name) const {
  auto it = arities_.find(name);
  if (it == arities_.end()) return std::nullopt;
  return it->second;
}

int Signature::max_arity() const {
  int m = 0;
  for (const auto& [_, a] : arities_) m = std::max(m, a);
  return m;
}

bool Signature::has_constant() const {
  return std::any_of(arities_.begin(), arities_.end(), [](const auto& kv) { return kv.second == 0; });
}

namespace {

void absorb_tree(Signature& sig, const detail::TreePtr& t) {
  if (t->kind != detail::TreeNode::Kind::Apply) return;
  sig.declare(t->name, static_cast<int>(t->children.size()));
  for (const auto& c : t->children) absorb_tree(sig, c);
}

void check_tree(const Signature& sig, const detail::TreePtr& t) {
  if (t->kind != detail::TreeNode::Kind::Apply) return;
  auto a = sig.arity(t->name);
  if (!a) throw TermError("undeclared symbol '" + t->name + "'");
  if (*a != static_cast<int>(t->children.size()))
    throw TermError("symbol '" + t->name + "' expects " + std::to_string(*a) + " arguments, got " +
                    std::to_string(t->children.size()));
  for (const auto& c : t->children) check_tree(sig, c);
}

}  // namespace

void Signature::absorb(const Term& t) { absorb_tree(*this, t.tree()); }
void Signature::absorb(const Context& c) { absorb_tree(*this, c.tree()); }
void Signature::check(const Term& t) const { check_tree(*this, t.tree()); }

Signature Signature::parse(std::string_view text) {
  Signature sig;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    auto slash = line.find('/');
    if (slash == std::string_view::npos || slash == 0 || slash + 1 == line.size())
      throw ParseError("expected 'name/arity'", line_no, static_cast<int>(first) + 1);
    std::string name(line.substr(0, slash));
    std::string arity(line.substr(slash + 1));
    if (arity.find_first_not_of("0123456789") != std::string::npos)
      throw ParseError("arity must be a natural number", line_no, static_cast<int>(first + slash) + 2);
    try {
      sig.declare(name, std::stoi(arity));
    } catch (const TermError& e) {
      throw ParseError(e.what(), line_no, static_cast<int>(first) + 1);
    }
  }
  return sig;
}

// ---------------------------------------------------------------------------
// Operations

std::vector<Position> positions(const Term& t) {
  std::vector<Position> out;
  std::function<void(const detail::TreePtr&, std::vector<int>&)> walk = [&](const detail::TreePtr& n,
                                                                              std::vector<int>& path) {
    out.emplace_back(path);
    for (std::size_t i = 0; i < n->children.size(); ++i) {
      path.push_back(static_cast<int>(i + 1));
      walk(n->children[i], path);
      path.pop_back();
    }
  };
  std::vector<int> path;
  walk(t.tree(), path);
  return out;
}

bool has_position(const Term& t, const Position& p) {
  const detail::TreeNode* n = t.tree().get();
  for (int i : p.indices()) {
    if (static_cast<std::size_t>(i) > n->children.size()) return false;
    n = n->children[static_cast<std::size_t>(i) - 1].get();
  }
  return true;
}

Term subterm_at(const Term& t, const Position& p) {
  detail::TreePtr n = t.tree();
  for (int i : p.indices()) {
    if (static_cast<std::size_t>(i) > n->children.size())
      throw PositionOutOfTerm("position " + p.str() + " is not in " + t.str());
    n = n->children[static_cast<std::size_t>(i) - 1];
  }
  return Term::from_tree(n);
}

Term replace_at(const Term& t, const Position& p, const Term& s) {
  try {
    return Term::from_tree(detail::replace_tree(t.tree(), p.indices(), 0, s.tree()));
  } catch (const PositionOutOfTerm&) {
    throw PositionOutOfTerm("position " + p.str() + " is not in " + t.str());
  }
}

int depth(const Term& t) {
  std::function<int(const detail::TreePtr&)> d = [&](const detail::TreePtr& n) {
    int m = -1;
    for (const auto& c : n->children) m = std::max(m, d(c));
    return m + 1;
  };
  return d(t.tree());
}

namespace {

bool match_into(const detail::TreePtr& pat, const detail::TreePtr& t, Substitution& sigma) {
  if (pat->kind == detail::TreeNode::Kind::Variable) {
    auto it = sigma.find(pat->name);
    if (it == sigma.end()) {
      sigma.emplace(pat->name, Term::from_tree(t));
      return true;
    }
    return detail::tree_equal(it->second.tree(), t);
  }
  if (t->kind != detail::TreeNode::Kind::Apply || pat->name != t->name ||
      pat->children.size() != t->children.size())
    return false;
  for (std::size_t i = 0; i < pat->children.size(); ++i) {
    if (!match_into(pat->children[i], t->children[i], sigma)) return false;
  }
  return true;
}

detail::TreePtr subst_tree(const Substitution& sigma, const detail::TreePtr& t) {
  if (t->kind == detail::TreeNode::Kind::Variable) {
    auto it = sigma.find(t->name);
    return it == sigma.end() ? t : it->second.tree();
  }
  if (t->children.empty()) return t;
  std::vector<detail::TreePtr> kids;
  bool changed = false;
  for (const auto& c : t->children) {
    kids.push_back(subst_tree(sigma, c));
    changed = changed || kids.back() != c;
  }
  return changed ? detail::make_apply(t->name, std::move(kids)) : t;
}

bool occurs(const std::string& var, const detail::TreePtr& t) {
  if (t->kind == detail::TreeNode::Kind::Variable) return t->name == var;
  return std::any_of(t->children.begin(), t->children.end(), [&](const auto& c) { return occurs(var, c); });
}

}  // namespace

std::optional<Substitution> match_term(const Term& pattern, const Term& t) {
  Substitution sigma;
  if (!match_into(pattern.tree(), t.tree(), sigma)) return std::nullopt;
  // Drop identity bindings so the domain is exactly the moved variables.
  for (auto it = sigma.begin(); it != sigma.end();) {
    if (it->second.is_variable() && it->second.name() == it->first)
      it = sigma.erase(it);
    else
      ++it;
  }
  return sigma;
}

Term apply_subst(const Substitution& sigma, const Term& t) {
  if (sigma.empty()) return t;
  return Term::from_tree(subst_tree(sigma, t.tree()));
}

// Robinson unification on a worklist, keeping the substitution in solved form.
std::optional<Substitution> mgu(const Term& t, const Term& u) {
  Substitution sigma;
  std::vector<std::pair<detail::TreePtr, detail::TreePtr>> work{{t.tree(), u.tree()}};
  while (!work.empty()) {
    auto [a, b] = work.back();
    work.pop_back();
    a = subst_tree(sigma, a);
    b = subst_tree(sigma, b);
    if (detail::tree_equal(a, b)) continue;
    if (a->kind != detail::TreeNode::Kind::Variable && b->kind == detail::TreeNode::Kind::Variable) std::swap(a, b);
    if (a->kind == detail::TreeNode::Kind::Variable) {
      if (occurs(a->name, b)) return std::nullopt;
      Substitution single{{a->name, Term::from_tree(b)}};
      for (auto& [_, v] : sigma) v = apply_subst(single, v);
      sigma.emplace(a->name, Term::from_tree(b));
      continue;
    }
    if (a->name != b->name || a->children.size() != b->children.size()) return std::nullopt;
    for (std::size_t i = 0; i < a->children.size(); ++i) work.emplace_back(a->children[i], b->children[i]);
  }
  return sigma;
}

Term fill(const Context& tau, const Term& t) {
  return Term::from_tree(detail::replace_tree(tau.tree(), tau.hole_position().indices(), 0, t.tree()));
}

Context merge_contexts(const Context& tau, const Context& tau2, MergeMode mode) {
  if (mode == MergeMode::LeftProject) return tau;
  return Context::from_tree(detail::replace_tree(tau.tree(), tau.hole_position().indices(), 0, tau2.tree()));
}

std::string to_string(MergeMode mode) { return mode == MergeMode::Nest ? "nest" : "leftproject"; }

MergeMode parse_merge_mode(std::string_view text) {
  if (text == "nest") return MergeMode::Nest;
  if (text == "leftproject") return MergeMode::LeftProject;
  throw TermError("unknown merge mode '" + std::string(text) + "' (expected nest or leftproject)");
}

Term parse_term(std::string_view text) {
  detail::TokenStream ts(text);
  Term t = detail::parse_term_tokens(ts);
  ts.expect_end();
  return t;
}

Context parse_context(std::string_view text) {
  detail::TokenStream ts(text);
  Context c = detail::parse_context_tokens(ts);
  ts.expect_end();
  return c;
}

}  // namespace ces
