#include "ces/pos_strategy.hpp"

#include <algorithm>
#include <map>

#include "lexer.hpp"
#include "term_parse.hpp"

namespace ces {

PosCE PosCE::of(std::vector<Insertion> entries) {
  if (entries.empty()) throw std::invalid_argument("a position-based strategy list must be nonempty");
  PosCE e;
  e.entries_ = std::move(entries);
  return e;
}

PosCE PosCE::prefixed(const Position& p) const {
  if (p.is_root() || is_fail()) return *this;
  PosCE out = *this;
  for (auto& ins : out.entries_) ins.position = p.concat(ins.position);
  return out;
}

std::string PosCE::str() const {
  if (is_fail()) return "fail";
  std::string out = "[";
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i) out += ", ";
    out += "@" + entries_[i].position.str() + ".<" + entries_[i].context.str() + ">";
  }
  return out + "]";
}

WellFoundedReport is_well_founded(const PosCE& e) {
  const auto& v = e.entries();
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      if (v[i].position == v[j].position) {
        return {false, std::make_pair(i, j),
                "entries " + std::to_string(i) + " and " + std::to_string(j) + " share position " +
                    v[i].position.str()};
      }
      if (v[i].position.is_strict_prefix_of(v[j].position)) {
        return {false, std::make_pair(i, j),
                "entry " + std::to_string(i) + " at " + v[i].position.str() + " is an ancestor of later entry " +
                    std::to_string(j) + " at " + v[j].position.str()};
      }
    }
  }
  return {};
}

// Lexicographic where running out of indices sorts after any index: a strict
// prefix (ancestor) comes after its extensions (descendants).
bool canonical_before(const Position& p, const Position& q) {
  const auto& a = p.indices();
  const auto& b = q.indices();
  std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return a.size() > b.size();
}

PosCE canonicalize(const PosCE& e) {
  if (e.is_fail()) return e;
  if (auto wf = is_well_founded(e); !wf.ok) throw NotWellFounded(wf.diagnostic);
  std::vector<Insertion> v = e.entries();
  std::stable_sort(v.begin(), v.end(),
                   [](const Insertion& x, const Insertion& y) { return canonical_before(x.position, y.position); });
  return PosCE::of(std::move(v));
}

Outcome apply_pos_ce(const PosCE& e, const Outcome& t) {
  if (e.is_fail() || t.failed()) return Outcome::failure();
  const Term& original = t.term();
  bool any = std::any_of(e.entries().begin(), e.entries().end(),
                         [&](const Insertion& ins) { return has_position(original, ins.position); });
  if (!any) return Outcome::failure();
  // η: an entry whose position is missing leaves the term unchanged.
  Term cur = original;
  for (const auto& ins : e.entries()) {
    if (!has_position(cur, ins.position)) continue;
    cur = replace_at(cur, ins.position, fill(ins.context, subterm_at(cur, ins.position)));
  }
  return cur;
}

PosCE unify_pos(const PosCE& e, const PosCE& e2, MergeMode mode) {
  if (e.is_fail() || e2.is_fail()) return PosCE::fail();
  for (const PosCE* x : {&e, &e2}) {
    if (auto wf = is_well_founded(*x); !wf.ok) throw NotWellFounded(wf.diagnostic);
  }
  std::vector<Insertion> out = e.entries();
  for (const auto& ins : e2.entries()) {
    auto it = std::find_if(out.begin(), out.end(), [&](const Insertion& x) { return x.position == ins.position; });
    if (it == out.end()) {
      out.push_back(ins);
    } else {
      it->context = merge_contexts(it->context, ins.context, mode);
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Insertion& x, const Insertion& y) { return canonical_before(x.position, y.position); });
  return PosCE::of(std::move(out));
}

PosCE combine_pos(const PosCE& e, const PosCE& e2, MergeMode mode) {
  for (const PosCE* x : {&e, &e2}) {
    if (auto wf = is_well_founded(*x); !wf.ok) throw NotWellFounded(wf.diagnostic);
  }
  if (!e.is_fail() && !e2.is_fail()) return unify_pos(e, e2, mode);
  if (!e.is_fail()) return e;
  if (!e2.is_fail()) return e2;
  return PosCE::fail();
}

bool eq_pos(const PosCE& e, const PosCE& e2) { return canonicalize(e) == canonicalize(e2); }

PosCE parse_pos_ce(std::string_view text) {
  detail::TokenStream ts(text);
  if (ts.at_ident("fail")) {
    ts.next();
    ts.expect_end();
    return PosCE::fail();
  }
  ts.expect(detail::Tok::LBracket, "'fail' or '['");
  std::vector<Insertion> entries;
  do {
    if (!entries.empty()) ts.next();
    ts.expect(detail::Tok::At, "'@'");
    Position p = detail::parse_position(ts);
    ts.expect(detail::Tok::Dot, "'.' after position");
    ts.expect(detail::Tok::Less, "'<' before context");
    Context c = detail::parse_context_tokens(ts);
    ts.expect(detail::Tok::Greater, "'>' after context");
    entries.push_back({std::move(p), std::move(c)});
  } while (ts.at(detail::Tok::Comma));
  ts.expect(detail::Tok::RBracket, "']'");
  ts.expect_end();
  return PosCE::of(std::move(entries));
}

}  // namespace ces
