#pragma once

// Unification and combination of strategies by a prioritized reduction
// system over pre-strategies (strategies with unification tuples).

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_set>
#include <vector>

#include "ces/strategy.hpp"

namespace ces {

using StrategySet = std::unordered_set<Strategy, StrategyHash>;

// Augmented sub-strategies, with one-step unrollings of binders.
StrategySet phi(const Strategy& s);
// Fixed-point sub-strategies of `s` (syntactic binders, bodies left open).
StrategySet phi_mu(const Strategy& s);

struct MemoryEntry {
  Strategy left;
  Strategy right;
  std::string var;
};
using Memory = std::vector<MemoryEntry>;

class PreCE {
 public:
  enum class Kind { Done, Tuple, Guard, Choice, Mu, Conj, Most, IfThen };
  struct Entry;

  static PreCE done(Strategy s);
  // `pattern`: what is known about the term at this point (innermost guard pattern).
  static PreCE tuple(Strategy left, Strategy right, Memory mem, std::optional<Term> pattern = std::nullopt);
  static PreCE guard(Term u, PreCE body);
  static PreCE choice(PreCE l, PreCE r);
  static PreCE mu(std::string z, PreCE body);
  static PreCE conj(std::vector<Entry> entries);
  static PreCE most(PreCE body);
  static PreCE if_then(Strategy cond, PreCE body);

  Kind kind() const;
  bool is(Kind k) const { return kind() == k; }
  const Strategy& strategy() const;  // Done
  const Strategy& left() const;      // Tuple
  const Strategy& right() const;     // Tuple
  const Memory& memory() const;      // Tuple
  const std::optional<Term>& pattern_env() const;  // Tuple
  const Term& pattern() const;       // Guard
  const std::string& var() const;    // Mu
  const Strategy& cond() const;      // IfThen
  const std::vector<PreCE>& kids() const;
  const std::vector<Index>& indices() const;  // Conj, parallel to kids

  bool has_tuple() const;
  // Throws std::logic_error while a tuple remains.
  Strategy to_strategy() const;
  std::string str() const;

 private:
  struct Node;
  explicit PreCE(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct PreCE::Entry {
  Index index;
  PreCE body;
};

enum class FocusOrder { LeftmostOutermost, Rightmost };

struct UnifyOptions {
  MergeMode merge = MergeMode::Nest;
  // Arity bound used to expand most() when no guard pattern says more.
  // Unset: the signature's maximum arity, else the largest arity in the inputs.
  std::optional<Signature> signature;
  bool simplify = true;
  // Unification outputs may reuse a memory variable several times; feeding
  // them back in (associativity checks) needs this off.
  bool require_linear = true;
  FocusOrder order = FocusOrder::LeftmostOutermost;
  // Throw MeasureViolation on a non-decreasing step (otherwise only counted).
  bool strict_measure = true;
  // Receives one JSON line per reduction step.
  std::function<void(const std::string&)> trace;
};

struct MeasureTriple {
  long lambda = 0;
  DepthMeasure left;
  DepthMeasure right;
  auto operator<=>(const MeasureTriple&) const = default;
};

struct UnifyStats {
  long steps = 0;
  long measure_checks = 0;
  long measure_violations = 0;
  long negative_lambda = 0;
};

// One unification run: fresh-variable counter, measure base, statistics.
class UnifySession {
 public:
  explicit UnifySession(UnifyOptions opts = {});

  // Validates, alpha-renames into disjoint spaces, then reduces to normal form.
  Strategy normal_form(const Strategy& s, const Strategy& r);

  // A single reduction at the focus; nullopt when `p` has no tuple.
  // Returns the rule id and stores the result in `p`.
  std::optional<std::string> reduce_step(PreCE& p);

  std::string fresh_var() { return zs_.next(); }
  MeasureTriple measure_of(const Strategy& l, const Strategy& r, const Memory& m) const;
  const UnifyStats& stats() const { return stats_; }
  const UnifyOptions& options() const { return opts_; }

  // Sets the Λ base from the two (renamed) inputs; done by normal_form.
  void prepare(const Strategy& s, const Strategy& r);

 private:
  UnifyOptions opts_;
  Namer zs_{"Z#"};
  Namer xs_{"X#"};
  long base_lambda_ = 0;
  int max_arity_ = 0;
  UnifyStats stats_;
};

Strategy unify(const Strategy& s, const Strategy& r, const UnifyOptions& opts = {});
// (S unify R) + S + R, left-associated.
Strategy combine(const Strategy& s, const Strategy& r, const UnifyOptions& opts = {});

// Process-wide totals over every session (for suite instrumentation).
UnifyStats global_unify_stats();
void reset_global_unify_stats();

}  // namespace ces
