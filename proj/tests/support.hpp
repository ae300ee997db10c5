#pragma once

// Reference implementations used as test oracles. They are written against
// the printed forms and the public constructors only, and share no code
// paths with the library evaluators.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ces/oracle.hpp"
#include "ces/psi.hpp"
#include "ces/strategy.hpp"
#include "ces/term.hpp"

namespace ref {

using ces::Context;
using ces::Outcome;
using ces::Position;
using ces::PosCE;
using ces::Strategy;
using ces::Term;
using K = ces::Strategy::Kind;

inline int depth(const Term& t) {
  int d = -1;
  for (const auto& c : t.children()) d = std::max(d, ref::depth(c));
  return d + 1;
}

inline void positions_into(const Term& t, std::vector<int>& path, std::vector<Position>& out) {
  out.emplace_back(path);
  for (std::size_t i = 0; i < t.arity(); ++i) {
    path.push_back(static_cast<int>(i + 1));
    positions_into(t.children()[i], path, out);
    path.pop_back();
  }
}

inline std::vector<Position> positions(const Term& t) {
  std::vector<Position> out;
  std::vector<int> path;
  positions_into(t, path, out);
  return out;
}

inline std::optional<Term> at(const Term& t, const Position& p) {
  Term cur = t;
  for (int i : p.indices()) {
    if (i < 1 || static_cast<std::size_t>(i) > cur.arity()) return std::nullopt;
    cur = cur.children()[static_cast<std::size_t>(i - 1)];
  }
  return cur;
}

inline Term put(const Term& t, const std::vector<int>& p, std::size_t k, const Term& s) {
  if (k == p.size()) return s;
  auto kids = t.children();
  auto i = static_cast<std::size_t>(p[k] - 1);
  kids[i] = put(kids[i], p, k + 1, s);
  return Term::apply(t.name(), kids);
}

// Filling by text: the hole is the only "[]" in the printed context.
inline Term fill(const Context& c, const Term& t) {
  std::string s = c.str();
  auto h = s.find("[]");
  return ces::parse_term(s.substr(0, h) + t.str() + s.substr(h + 2));
}

inline bool match_into(const Term& u, const Term& t, std::map<std::string, Term>& sigma) {
  if (u.is_variable()) {
    auto [it, fresh] = sigma.emplace(u.name(), t);
    return fresh || it->second == t;
  }
  if (t.is_variable() || u.name() != t.name() || u.arity() != t.arity()) return false;
  for (std::size_t i = 0; i < u.arity(); ++i)
    if (!match_into(u.children()[i], t.children()[i], sigma)) return false;
  return true;
}

inline bool matches(const Term& u, const Term& t) {
  std::map<std::string, Term> sigma;
  return match_into(u, t, sigma);
}

inline Strategy subst(const Strategy& s, const std::string& x, const Strategy& by) {
  switch (s.kind()) {
    case K::Var: return s.name() == x ? by : s;
    case K::Mu: return s.name() == x ? s : Strategy::mu(s.name(), subst(s.body(), x, by));
    case K::Guard: return Strategy::guard(s.pattern(), subst(s.body(), x, by));
    case K::Most: return Strategy::most(subst(s.body(), x, by));
    case K::Choice: return Strategy::choice(subst(s.left(), x, by), subst(s.right(), x, by));
    case K::IfThen: return Strategy::if_then(subst(s.cond(), x, by), subst(s.body(), x, by));
    case K::Conj: {
      std::vector<Strategy::Entry> es;
      for (const auto& e : s.entries()) es.push_back({e.index, subst(e.body, x, by)});
      return Strategy::conj(es);
    }
    default: return s;
  }
}

// Literal semantics: a binder met at t is replaced by its (depth(t)+1)-th
// syntactic iterate, which is then evaluated. Binder names must not be
// captured, which holds for generated and alpha-renamed strategies.
inline Outcome eval(const Strategy& s, const Term& t) {
  switch (s.kind()) {
    case K::Fail:
    case K::Var: return Outcome::failure();
    case K::Ins: return ref::fill(s.context(), t);
    case K::Guard: return matches(s.pattern(), t) ? eval(s.body(), t) : Outcome::failure();
    case K::Choice: {
      Outcome l = eval(s.left(), t);
      return l.failed() ? eval(s.right(), t) : l;
    }
    case K::IfThen: return eval(s.cond(), t).failed() ? Outcome::failure() : eval(s.body(), t);
    case K::Mu: {
      Strategy it = Strategy::fail();
      for (int k = 0; k <= ref::depth(t); ++k) it = subst(s.body(), s.name(), it);
      return ref::eval(it, t);
    }
    case K::Most: {
      Term cur = t;
      bool any = false;
      for (std::size_t i = 1; i <= t.arity(); ++i) {
        Outcome r = eval(s.body(), t.children()[i - 1]);
        if (!r.failed()) {
          cur = put(cur, {static_cast<int>(i)}, 0, r.term());
          any = true;
        }
      }
      return any ? Outcome(cur) : Outcome::failure();
    }
    case K::Conj: {
      Term cur = t;
      bool any = false;
      for (const auto& e : s.entries()) {
        if (e.index == ces::kRootIndex) {
          Outcome r = eval(e.body, cur);
          if (!r.failed()) {
            cur = r.term();
            any = true;
          }
          continue;
        }
        if (static_cast<std::size_t>(e.index) > cur.arity()) continue;
        Outcome r = eval(e.body, cur.children()[static_cast<std::size_t>(e.index - 1)]);
        if (!r.failed()) {
          cur = put(cur, {e.index}, 0, r.term());
          any = true;
        }
      }
      return any ? Outcome(cur) : Outcome::failure();
    }
  }
  return Outcome::failure();
}

// Position-based semantics: insertions in list order, missing positions skipped,
// failure when no position addresses the input.
inline Outcome apply(const PosCE& e, const Term& t) {
  if (e.is_fail()) return Outcome::failure();
  bool any = false;
  for (const auto& ins : e.entries()) any = any || at(t, ins.position).has_value();
  if (!any) return Outcome::failure();
  Term cur = t;
  for (const auto& ins : e.entries()) {
    auto sub = at(cur, ins.position);
    if (sub) cur = put(cur, ins.position.indices(), 0, ref::fill(ins.context, *sub));
  }
  return cur;
}

}  // namespace ref
