#pragma once

// Position-based context-embedding strategies: either the failing strategy,
// or an ordered list of context insertions at positions.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "ces/term.hpp"

namespace ces {

// A term or the failure mark.
class Outcome {
 public:
  Outcome(Term t) : term_(std::move(t)) {}  // NOLINT(google-explicit-constructor)
  static Outcome failure() { return Outcome(); }

  bool failed() const { return !term_.has_value(); }
  explicit operator bool() const { return !failed(); }
  const Term& term() const { return *term_; }

  bool operator==(const Outcome& other) const { return term_ == other.term_; }
  std::string str() const { return failed() ? "FAIL" : term_->str(); }

 private:
  Outcome() = default;
  std::optional<Term> term_;
};

struct Insertion {
  Position position;
  Context context;
  bool operator==(const Insertion&) const = default;
};

class PosCE {
 public:
  // The failing strategy.
  PosCE() = default;
  static PosCE fail() { return PosCE(); }
  // A nonempty insertion list; throws std::invalid_argument when empty.
  static PosCE of(std::vector<Insertion> entries);
  static PosCE single(Position p, Context c) { return of({Insertion{std::move(p), std::move(c)}}); }

  bool is_fail() const { return entries_.empty(); }
  const std::vector<Insertion>& entries() const { return entries_; }

  // Prefixes every position with `p` (@p.[@p1.τ1, ...] = [@p·p1.τ1, ...]).
  PosCE prefixed(const Position& p) const;

  // Structural equality (order-sensitive). Use eq_pos for the quotient.
  bool operator==(const PosCE& other) const { return entries_ == other.entries_; }
  std::string str() const;

 private:
  std::vector<Insertion> entries_;
};

struct WellFoundedReport {
  bool ok = true;
  // Offending pair of entry indices (0-based) when !ok.
  std::optional<std::pair<std::size_t, std::size_t>> offending;
  std::string diagnostic;
};

// Positions distinct and no entry's position strictly prefixes a later one.
WellFoundedReport is_well_founded(const PosCE& e);

// Sort key: descendants before ancestors, parallel positions lexicographically.
bool canonical_before(const Position& p, const Position& q);

// Permutes parallel entries into canonical order. Throws NotWellFounded.
PosCE canonicalize(const PosCE& e);

Outcome apply_pos_ce(const PosCE& e, const Outcome& t);

PosCE unify_pos(const PosCE& e, const PosCE& e2, MergeMode mode = MergeMode::Nest);
PosCE combine_pos(const PosCE& e, const PosCE& e2, MergeMode mode = MergeMode::Nest);

// Equality up to permutation of parallel positions.
bool eq_pos(const PosCE& e, const PosCE& e2);

// `fail` or `[@<pos>.<ctx>, ...]`.
PosCE parse_pos_ce(std::string_view text);

}  // namespace ces
