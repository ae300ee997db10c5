#pragma once

// The strategy language: fail, fixed-point variables, root insertion,
// pattern guard, left choice, mu binder, indexed conjunction, most, if-then.

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ces/pos_strategy.hpp"
#include "ces/term.hpp"

namespace ces {

namespace detail {
struct StratNode;
}

// Conjunction index: a child number >= 1, or 0 for the root (eps).
using Index = int;
constexpr Index kRootIndex = 0;

class Strategy {
 public:
  enum class Kind { Fail, Var, Ins, Guard, Choice, Mu, Conj, Most, IfThen };
  struct Entry;

  static Strategy fail();
  static Strategy var(std::string name);
  static Strategy ins(Context tau);
  static Strategy guard(Term pattern, Strategy body);
  static Strategy choice(Strategy left, Strategy right);
  // Right-nested choice of all alternatives; fail when empty.
  static Strategy choice_of(std::vector<Strategy> alternatives);
  static Strategy mu(std::string name, Strategy body);
  // Throws std::invalid_argument on an empty entry list.
  static Strategy conj(std::vector<Entry> entries);
  static Strategy at(Index i, Strategy body);
  // Chains single-index jumps along a position; the root position is `body` itself.
  static Strategy at(const Position& p, Strategy body);
  static Strategy most(Strategy body);
  static Strategy if_then(Strategy cond, Strategy body);

  Kind kind() const;
  bool is(Kind k) const { return kind() == k; }
  // Var and Mu.
  const std::string& name() const;
  const Context& context() const;
  const Term& pattern() const;
  // Guard, Mu, Most, IfThen.
  const Strategy& body() const;
  // Choice.
  const Strategy& left() const;
  const Strategy& right() const;
  // IfThen.
  const Strategy& cond() const;
  const std::vector<Entry>& entries() const;

  std::size_t hash() const;
  bool operator==(const Strategy& other) const;
  bool operator!=(const Strategy& other) const { return !(*this == other); }
  // Structural total order (for deterministic sets).
  bool operator<(const Strategy& other) const;

  std::string str() const;
  nlohmann::json to_json() const;

 private:
  explicit Strategy(std::shared_ptr<const detail::StratNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const detail::StratNode> node_;
};

struct Strategy::Entry {
  Index index;
  Strategy body;
  bool operator==(const Entry& o) const { return index == o.index && body == o.body; }
};

struct StrategyHash {
  std::size_t operator()(const Strategy& s) const { return s.hash(); }
};

std::string index_str(Index i);

struct ParseOptions {
  // Accept engine-generated names such as X#3 and Z#0.
  bool allow_reserved = false;
};

Strategy parse_strategy(std::string_view text, ParseOptions opts = {});
Strategy strategy_from_json(const nlohmann::json& j);

// ---- structure ----

std::set<std::string> free_vars(const Strategy& s);
std::set<std::string> bound_vars(const Strategy& s);
// Capture-free replacement of free occurrences of `x`.
Strategy substitute(const Strategy& s, const std::string& x, const Strategy& by);
// The n-th iterate: mu^0 = fail, mu^(k+1) = body[X := mu^k].
Strategy mu_iterate(const std::string& x, const Strategy& body, int n);
// Number of constructor nodes.
std::size_t size(const Strategy& s);

struct Validation {
  bool closed = true;
  bool monotone = true;
  bool linear = true;
  bool well_founded = true;
  std::vector<std::string> diagnostics;
  bool ok() const { return closed && monotone && linear && well_founded; }
};

// well_founded: conjunction indices distinct, an eps entry is last and is a root insertion.
Validation validate(const Strategy& s);

// ---- semantics ----

// Fixed points are iterated depth(t)+1 times where the binder is entered.
Outcome eval(const Strategy& s, const Outcome& t);

// ---- measures ----

int star_height(const Strategy& s);
int tree_depth(const Strategy& s);

struct DepthMeasure {
  int h = 0;
  int delta = 0;
  auto operator<=>(const DepthMeasure&) const = default;
};
DepthMeasure measure(const Strategy& s);

using UnfoldMap = std::map<std::string, int>;
// Replaces every binder by its iterate. Throws IncompleteMap.
Strategy unfold(const Strategy& s, const UnfoldMap& n);
UnfoldMap constant_map(const Strategy& s, int n);

// Jumps or most() between the single free occurrence of `x` and the root.
int pi_count(const Strategy& s, const std::string& x);

struct EquivResult {
  bool equivalent = true;
  std::optional<Term> witness;
  Outcome left = Outcome::failure();
  Outcome right = Outcome::failure();
};
EquivResult equiv_on(const Strategy& s, const Strategy& s2, const std::vector<Term>& terms);

// ---- rewriting helpers ----

// True when `s` succeeds on every term (conservative).
bool always_succeeds(const Strategy& s);
// Vacuous binders, fail alternatives, trivially true conditions, fail propagation.
Strategy simplify(const Strategy& s);

class Namer {
 public:
  explicit Namer(std::string prefix = "X#") : prefix_(std::move(prefix)) {}
  std::string next() { return prefix_ + std::to_string(counter_++); }

 private:
  std::string prefix_;
  int counter_ = 0;
};

// Renames every binder to a fresh name from `namer`.
Strategy alpha_rename(const Strategy& s, Namer& namer);
// Equality up to consistent renaming of bound variables.
bool alpha_equal(const Strategy& s, const Strategy& s2);

// The embedding of a position-based strategy into the strategy language.
Strategy embed(const PosCE& e);

}  // namespace ces
