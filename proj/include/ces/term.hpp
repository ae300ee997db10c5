#pragma once

// First-order terms, one-hole contexts, positions and substitutions.

#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ces/error.hpp"

namespace ces {

// A path of 1-based child indices from the root. Empty means the root.
class Position {
 public:
  Position() = default;
  explicit Position(std::vector<int> indices);

  static Position root() { return Position{}; }

  bool is_root() const { return indices_.empty(); }
  std::size_t size() const { return indices_.size(); }
  const std::vector<int>& indices() const { return indices_; }
  int front() const { return indices_.front(); }

  Position child(int index) const;
  Position concat(const Position& suffix) const;
  // Drops the first index; precondition: not the root.
  Position tail() const;

  // True when `this` is a (non-strict) prefix of `other`.
  bool is_prefix_of(const Position& other) const;
  bool is_strict_prefix_of(const Position& other) const {
    return size() < other.size() && is_prefix_of(other);
  }
  bool is_parallel_to(const Position& other) const {
    return !is_prefix_of(other) && !other.is_prefix_of(*this);
  }

  bool operator==(const Position&) const = default;
  // Plain lexicographic order on the index sequences (a prefix sorts first).
  std::strong_ordering operator<=>(const Position& other) const {
    return indices_ <=> other.indices_;
  }

  std::string str() const;

 private:
  std::vector<int> indices_;
};

enum class PositionOrder { Less, Greater, Equal, Parallel };

// Less iff p is a strict prefix of q; Greater iff q is a strict prefix of p.
PositionOrder compare_positions(const Position& p, const Position& q);

// Parses "eps" or dot-separated naturals ("1.2").
Position parse_position(std::string_view text);

namespace detail {

struct TreeNode;
using TreePtr = std::shared_ptr<const TreeNode>;

struct TreeNode {
  enum class Kind { Variable, Apply, Hole };
  Kind kind;
  std::string name;
  std::vector<TreePtr> children;
  std::size_t hash;
};

TreePtr make_variable(std::string name);
TreePtr make_apply(std::string symbol, std::vector<TreePtr> children);
TreePtr make_hole();
bool tree_equal(const TreePtr& a, const TreePtr& b);
std::string tree_str(const TreePtr& t);

}  // namespace detail

class Term;
class Context;

// A term over function symbols and term variables. Never contains a hole.
class Term {
 public:
  static Term variable(std::string name);
  static Term apply(std::string symbol, std::vector<Term> children = {});
  static Term constant(std::string symbol) { return apply(std::move(symbol)); }

  bool is_variable() const;
  const std::string& name() const;
  std::size_t arity() const;
  Term child(std::size_t index_1based) const;
  std::vector<Term> children() const;

  std::size_t hash() const;
  bool operator==(const Term& other) const;
  // Total order used for sets and canonical listings (structural, not semantic).
  bool operator<(const Term& other) const;

  std::string str() const;

  const detail::TreePtr& tree() const { return node_; }
  static Term from_tree(detail::TreePtr node);

 private:
  explicit Term(detail::TreePtr node) : node_(std::move(node)) {}
  detail::TreePtr node_;
};

// A term with exactly one hole.
class Context {
 public:
  // The bare hole.
  static Context hole();
  // Throws TermError unless `node` has exactly one hole.
  static Context from_tree(detail::TreePtr node);

  const Position& hole_position() const { return hole_pos_; }
  const detail::TreePtr& tree() const { return node_; }

  bool is_hole() const { return hole_pos_.is_root(); }
  bool operator==(const Context& other) const;
  bool operator<(const Context& other) const;
  std::size_t hash() const;
  std::string str() const;

 private:
  Context(detail::TreePtr node, Position hole) : node_(std::move(node)), hole_pos_(std::move(hole)) {}
  detail::TreePtr node_;
  Position hole_pos_;
};

// Function-symbol arities. Symbols used with two arities are rejected.
class Signature {
 public:
  Signature() = default;
  Signature(std::initializer_list<std::pair<std::string, int>> symbols);

  void declare(const std::string& name, int arity);
  bool contains(const std::string& name) const { return arities_.count(name) != 0; }
  std::optional<int> arity(const std::string& name) const;
  int max_arity() const;
  bool has_constant() const;
  const std::map<std::string, int>& symbols() const { return arities_; }

  // Declares every symbol of `t` (consistency-checked).
  void absorb(const Term& t);
  void absorb(const Context& c);
  // Throws TermError if `t` uses an undeclared symbol or a wrong arity.
  void check(const Term& t) const;

  // Parses lines of the form `name/arity`; blank lines and `#` comments allowed.
  static Signature parse(std::string_view text);

 private:
  std::map<std::string, int> arities_;
};

using Substitution = std::map<std::string, Term>;

std::vector<Position> positions(const Term& t);
bool has_position(const Term& t, const Position& p);
Term subterm_at(const Term& t, const Position& p);
Term replace_at(const Term& t, const Position& p, const Term& s);
int depth(const Term& t);

// The unique σ with σ(pattern) = t, if any.
std::optional<Substitution> match_term(const Term& pattern, const Term& t);
// Most general unifier with occurs-check.
std::optional<Substitution> mgu(const Term& t, const Term& u);
Term apply_subst(const Substitution& sigma, const Term& t);

Term fill(const Context& tau, const Term& t);

enum class MergeMode { Nest, LeftProject };

// Nest: τ′ grafted at τ's hole. LeftProject: τ (test-only, idempotent).
Context merge_contexts(const Context& tau, const Context& tau2, MergeMode mode = MergeMode::Nest);

std::string to_string(MergeMode mode);
MergeMode parse_merge_mode(std::string_view text);

Term parse_term(std::string_view text);
Context parse_context(std::string_view text);

}  // namespace ces
