#include <algorithm>
#include <functional>
#include <map>

#include "ces/strategy.hpp"

namespace ces {

using K = Strategy::Kind;

// ---------------------------------------------------------------------------
// Variables and substitution

namespace {

void collect_free(const Strategy& s, std::vector<std::string>& bound, std::set<std::string>& out) {
  switch (s.kind()) {
    case K::Var:
      if (std::find(bound.begin(), bound.end(), s.name()) == bound.end()) out.insert(s.name());
      return;
    case K::Mu:
      bound.push_back(s.name());
      collect_free(s.body(), bound, out);
      bound.pop_back();
      return;
    case K::Guard:
    case K::Most:
      collect_free(s.body(), bound, out);
      return;
    case K::Choice:
      collect_free(s.left(), bound, out);
      collect_free(s.right(), bound, out);
      return;
    case K::IfThen:
      collect_free(s.cond(), bound, out);
      collect_free(s.body(), bound, out);
      return;
    case K::Conj:
      for (const auto& e : s.entries()) collect_free(e.body, bound, out);
      return;
    default:
      return;
  }
}

int count_free(const Strategy& s, const std::string& x) {
  switch (s.kind()) {
    case K::Var:
      return s.name() == x ? 1 : 0;
    case K::Mu:
      return s.name() == x ? 0 : count_free(s.body(), x);
    case K::Guard:
    case K::Most:
      return count_free(s.body(), x);
    case K::Choice:
      return count_free(s.left(), x) + count_free(s.right(), x);
    case K::IfThen:
      return count_free(s.cond(), x) + count_free(s.body(), x);
    case K::Conj: {
      int n = 0;
      for (const auto& e : s.entries()) n += count_free(e.body, x);
      return n;
    }
    default:
      return 0;
  }
}

template <class F>
Strategy map_children(const Strategy& s, F&& f) {
  switch (s.kind()) {
    case K::Guard:
      return Strategy::guard(s.pattern(), f(s.body()));
    case K::Choice:
      return Strategy::choice(f(s.left()), f(s.right()));
    case K::Mu:
      return Strategy::mu(s.name(), f(s.body()));
    case K::Most:
      return Strategy::most(f(s.body()));
    case K::IfThen:
      return Strategy::if_then(f(s.cond()), f(s.body()));
    case K::Conj: {
      std::vector<Strategy::Entry> es;
      es.reserve(s.entries().size());
      for (const auto& e : s.entries()) es.push_back({e.index, f(e.body)});
      return Strategy::conj(std::move(es));
    }
    default:
      return s;
  }
}

}  // namespace

std::set<std::string> free_vars(const Strategy& s) {
  std::vector<std::string> bound;
  std::set<std::string> out;
  collect_free(s, bound, out);
  return out;
}

std::set<std::string> bound_vars(const Strategy& s) {
  std::set<std::string> out;
  std::function<void(const Strategy&)> go = [&](const Strategy& x) {
    if (x.is(K::Mu)) out.insert(x.name());
    map_children(x, [&](const Strategy& c) {
      go(c);
      return c;
    });
  };
  go(s);
  return out;
}

Strategy substitute(const Strategy& s, const std::string& x, const Strategy& by) {
  if (s.is(K::Var)) return s.name() == x ? by : s;
  if (s.is(K::Mu) && s.name() == x) return s;
  if (s.is(K::Mu) && free_vars(by).count(s.name()) && count_free(s.body(), x) > 0) {
    // Avoid capture: rename the binder first.
    std::string fresh = s.name() + "'";
    while (free_vars(by).count(fresh) || count_free(s.body(), fresh) > 0) fresh += "'";
    Strategy body = substitute(s.body(), s.name(), Strategy::var(fresh));
    return Strategy::mu(fresh, substitute(body, x, by));
  }
  return map_children(s, [&](const Strategy& c) { return substitute(c, x, by); });
}

Strategy mu_iterate(const std::string& x, const Strategy& body, int n) {
  Strategy acc = Strategy::fail();
  for (int i = 0; i < n; ++i) acc = substitute(body, x, acc);
  return acc;
}

std::size_t size(const Strategy& s) {
  std::size_t n = 1;
  map_children(s, [&](const Strategy& c) {
    n += size(c);
    return c;
  });
  return n;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

// True when every free occurrence of x sits beneath a numeric jump or most().
bool guarded(const Strategy& s, const std::string& x, bool below) {
  switch (s.kind()) {
    case K::Var:
      return s.name() != x || below;
    case K::Mu:
      return s.name() == x || guarded(s.body(), x, below);
    case K::Guard:
      return guarded(s.body(), x, below);
    case K::Most:
      return guarded(s.body(), x, true);
    case K::Choice:
      return guarded(s.left(), x, below) && guarded(s.right(), x, below);
    case K::IfThen:
      return guarded(s.cond(), x, below) && guarded(s.body(), x, below);
    case K::Conj:
      return std::all_of(s.entries().begin(), s.entries().end(), [&](const Strategy::Entry& e) {
        return guarded(e.body, x, below || e.index != kRootIndex);
      });
    default:
      return true;
  }
}

void validate_into(const Strategy& s, Validation& v) {
  if (s.is(K::Mu)) {
    int n = count_free(s.body(), s.name());
    if (n != 1) {
      v.linear = false;
      v.diagnostics.push_back("variable " + s.name() + " occurs " + std::to_string(n) + " times in its body");
    }
    if (!guarded(s.body(), s.name(), false)) {
      v.monotone = false;
      v.diagnostics.push_back("variable " + s.name() + " is not beneath a numeric jump or most()");
    }
  }
  if (s.is(K::Conj)) {
    const auto& es = s.entries();
    for (std::size_t i = 0; i < es.size(); ++i) {
      for (std::size_t j = i + 1; j < es.size(); ++j) {
        if (es[i].index == es[j].index) {
          v.well_founded = false;
          v.diagnostics.push_back("conjunction repeats index " + index_str(es[i].index));
        }
      }
      if (es[i].index == kRootIndex) {
        if (i + 1 != es.size() && es.size() > 1) {
          v.well_founded = false;
          v.diagnostics.push_back("root entry of a conjunction must come last");
        }
        if (!es[i].body.is(K::Ins)) {
          v.well_founded = false;
          v.diagnostics.push_back("root entry of a conjunction must be a root insertion");
        }
      }
    }
  }
  map_children(s, [&](const Strategy& c) {
    validate_into(c, v);
    return c;
  });
}

}  // namespace

Validation validate(const Strategy& s) {
  Validation v;
  auto fv = free_vars(s);
  if (!fv.empty()) {
    v.closed = false;
    std::string names;
    for (const auto& x : fv) names += (names.empty() ? "" : ", ") + x;
    v.diagnostics.push_back("free fixed-point variables: " + names);
  }
  validate_into(s, v);
  return v;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

// Binding of a fixed-point variable to the iterate mu^remaining X.body,
// closed over the environment of its binder.
struct Frame;
using Env = std::shared_ptr<const Frame>;
struct Frame {
  std::string var;
  Strategy body;
  int remaining;
  Env binder_env;
  Env next;
};

Env bind(const Env& env, const std::string& x, const Strategy& body, int remaining) {
  return std::make_shared<const Frame>(Frame{x, body, remaining, env, env});
}

const Frame* lookup(const Env& env, const std::string& x) {
  for (const Frame* f = env.get(); f; f = f->next.get()) {
    if (f->var == x) return f;
  }
  return nullptr;
}

Outcome eval_in(const Strategy& s, const Term& t, const Env& env) {
  switch (s.kind()) {
    case K::Fail:
      return Outcome::failure();
    case K::Var: {
      const Frame* f = lookup(env, s.name());
      if (!f) throw OpenStrategy("free fixed-point variable " + s.name());
      if (f->remaining == 0) return Outcome::failure();
      return eval_in(f->body, t, bind(f->binder_env, f->var, f->body, f->remaining - 1));
    }
    case K::Ins:
      return fill(s.context(), t);
    case K::Guard:
      if (!match_term(s.pattern(), t)) return Outcome::failure();
      return eval_in(s.body(), t, env);
    case K::Choice: {
      Outcome l = eval_in(s.left(), t, env);
      return l.failed() ? eval_in(s.right(), t, env) : l;
    }
    case K::Mu:
      return eval_in(s.body(), t, bind(env, s.name(), s.body(), depth(t)));
    case K::IfThen:
      if (eval_in(s.cond(), t, env).failed()) return Outcome::failure();
      return eval_in(s.body(), t, env);
    case K::Conj: {
      Term cur = t;
      bool any = false;
      for (const auto& e : s.entries()) {
        if (e.index == kRootIndex) {
          Outcome r = eval_in(e.body, cur, env);
          if (!r.failed()) {
            cur = r.term();
            any = true;
          }
          continue;
        }
        if (static_cast<std::size_t>(e.index) > cur.arity()) continue;
        Position p({e.index});
        Outcome r = eval_in(e.body, cur.child(e.index), env);
        if (!r.failed()) {
          cur = replace_at(cur, p, r.term());
          any = true;
        }
      }
      return any ? Outcome(cur) : Outcome::failure();
    }
    case K::Most: {
      Term cur = t;
      bool any = false;
      for (std::size_t i = 1; i <= t.arity(); ++i) {
        Outcome r = eval_in(s.body(), cur.child(i), env);
        if (!r.failed()) {
          cur = replace_at(cur, Position({static_cast<int>(i)}), r.term());
          any = true;
        }
      }
      return any ? Outcome(cur) : Outcome::failure();
    }
  }
  return Outcome::failure();
}

}  // namespace

Outcome eval(const Strategy& s, const Outcome& t) {
  if (t.failed()) {
    if (auto fv = free_vars(s); !fv.empty()) throw OpenStrategy("free fixed-point variable " + *fv.begin());
    return Outcome::failure();
  }
  return eval_in(s, t.term(), nullptr);
}

// ---------------------------------------------------------------------------
// Measures

int star_height(const Strategy& s) {
  int h = 0;
  map_children(s, [&](const Strategy& c) {
    h = std::max(h, star_height(c));
    return c;
  });
  return s.is(K::Mu) ? 1 + h : h;
}

int tree_depth(const Strategy& s) {
  switch (s.kind()) {
    case K::Fail:
    case K::Var:
      return 0;
    case K::Ins:
      return 1;
    case K::Mu:
      return tree_depth(s.body());
    case K::Guard:
    case K::Most:
      return 1 + tree_depth(s.body());
    case K::Choice:
      return 1 + std::max(tree_depth(s.left()), tree_depth(s.right()));
    case K::IfThen:
      return 1 + std::max(tree_depth(s.cond()), tree_depth(s.body()));
    case K::Conj: {
      // A list is a conjunction node over single jumps, each one level deep.
      int m = 0;
      for (const auto& e : s.entries()) m = std::max(m, tree_depth(e.body));
      return s.entries().size() == 1 ? 1 + m : 2 + m;
    }
  }
  return 0;
}

DepthMeasure measure(const Strategy& s) { return {star_height(s), tree_depth(s)}; }

Strategy unfold(const Strategy& s, const UnfoldMap& n) {
  if (s.is(K::Mu)) {
    auto it = n.find(s.name());
    if (it == n.end()) throw IncompleteMap("no iteration count for " + s.name());
    return mu_iterate(s.name(), unfold(s.body(), n), it->second);
  }
  return map_children(s, [&](const Strategy& c) { return unfold(c, n); });
}

UnfoldMap constant_map(const Strategy& s, int n) {
  UnfoldMap m;
  for (const auto& x : bound_vars(s)) m[x] = n;
  return m;
}

int pi_count(const Strategy& s, const std::string& x) {
  if (count_free(s, x) != 1) throw VariableNotLinear(x + " must occur exactly once and free");
  std::function<int(const Strategy&)> go = [&](const Strategy& c) -> int {
    switch (c.kind()) {
      case K::Var:
        return 0;
      case K::Guard:
      case K::Mu:
        return go(c.body());
      case K::Most:
        return 1 + go(c.body());
      case K::Choice:
        return go(count_free(c.left(), x) ? c.left() : c.right());
      case K::IfThen:
        return go(count_free(c.cond(), x) ? c.cond() : c.body());
      case K::Conj:
        for (const auto& e : c.entries()) {
          if (count_free(e.body, x)) return (e.index == kRootIndex ? 0 : 1) + go(e.body);
        }
        break;
      default:
        break;
    }
    return 0;
  };
  return go(s);
}

EquivResult equiv_on(const Strategy& s, const Strategy& s2, const std::vector<Term>& terms) {
  for (const auto& t : terms) {
    Outcome a = eval(s, t);
    Outcome b = eval(s2, t);
    if (!(a == b)) return {false, t, a, b};
  }
  return {};
}

// ---------------------------------------------------------------------------
// Simplification

bool always_succeeds(const Strategy& s) {
  switch (s.kind()) {
    case K::Ins:
      return true;
    case K::Guard:
      return s.pattern().is_variable() && always_succeeds(s.body());
    case K::Choice:
      return always_succeeds(s.left()) || always_succeeds(s.right());
    case K::IfThen:
      return always_succeeds(s.cond()) && always_succeeds(s.body());
    case K::Mu:
      // The body runs at least once; a variable never counts as succeeding.
      return always_succeeds(s.body());
    case K::Conj:
      return std::any_of(s.entries().begin(), s.entries().end(), [](const Strategy::Entry& e) {
        return e.index == kRootIndex && always_succeeds(e.body);
      });
    default:
      return false;
  }
}

namespace {

Strategy simplify_once(const Strategy& s) {
  Strategy c = map_children(s, simplify_once);
  switch (c.kind()) {
    case K::Mu:
      if (c.body().is(K::Fail)) return c.body();
      if (count_free(c.body(), c.name()) == 0) return c.body();
      return c;
    case K::Choice:
      if (c.left().is(K::Fail)) return c.right();
      if (c.right().is(K::Fail)) return c.left();
      if (always_succeeds(c.left())) return c.left();
      return c;
    case K::Guard:
    case K::Most:
      return c.body().is(K::Fail) ? c.body() : c;
    case K::IfThen:
      if (c.cond().is(K::Fail) || c.body().is(K::Fail)) return Strategy::fail();
      if (always_succeeds(c.cond())) return c.body();
      return c;
    case K::Conj: {
      std::vector<Strategy::Entry> es;
      for (const auto& e : c.entries()) {
        if (!e.body.is(K::Fail)) es.push_back(e);
      }
      if (es.empty()) return Strategy::fail();
      if (es.size() == c.entries().size()) return c;
      return Strategy::conj(std::move(es));
    }
    default:
      return c;
  }
}

}  // namespace

Strategy simplify(const Strategy& s) {
  Strategy cur = s;
  for (;;) {
    Strategy next = simplify_once(cur);
    if (next == cur) return cur;
    cur = next;
  }
}

// ---------------------------------------------------------------------------
// Renaming

namespace {

Strategy rename_in(const Strategy& s, std::map<std::string, std::string>& scope, Namer& namer) {
  if (s.is(K::Var)) {
    auto it = scope.find(s.name());
    return it == scope.end() ? s : Strategy::var(it->second);
  }
  if (s.is(K::Mu)) {
    std::string fresh = namer.next();
    auto saved = scope;
    scope[s.name()] = fresh;
    Strategy body = rename_in(s.body(), scope, namer);
    scope = std::move(saved);
    return Strategy::mu(fresh, body);
  }
  return map_children(s, [&](const Strategy& c) { return rename_in(c, scope, namer); });
}

using Scope = std::vector<std::pair<std::string, std::string>>;

bool alpha_eq(const Strategy& a, const Strategy& b, Scope& scope) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case K::Fail:
      return true;
    case K::Var: {
      int ia = -1;
      int ib = -1;
      for (int i = static_cast<int>(scope.size()) - 1; i >= 0; --i) {
        if (ia < 0 && scope[i].first == a.name()) ia = i;
        if (ib < 0 && scope[i].second == b.name()) ib = i;
      }
      if (ia < 0 && ib < 0) return a.name() == b.name();
      return ia == ib;
    }
    case K::Ins:
      return a.context() == b.context();
    case K::Guard:
      return a.pattern() == b.pattern() && alpha_eq(a.body(), b.body(), scope);
    case K::Most:
      return alpha_eq(a.body(), b.body(), scope);
    case K::Choice:
      return alpha_eq(a.left(), b.left(), scope) && alpha_eq(a.right(), b.right(), scope);
    case K::IfThen:
      return alpha_eq(a.cond(), b.cond(), scope) && alpha_eq(a.body(), b.body(), scope);
    case K::Mu: {
      scope.emplace_back(a.name(), b.name());
      bool r = alpha_eq(a.body(), b.body(), scope);
      scope.pop_back();
      return r;
    }
    case K::Conj: {
      if (a.entries().size() != b.entries().size()) return false;
      for (std::size_t i = 0; i < a.entries().size(); ++i) {
        if (a.entries()[i].index != b.entries()[i].index) return false;
        if (!alpha_eq(a.entries()[i].body, b.entries()[i].body, scope)) return false;
      }
      return true;
    }
  }
  return false;
}

}  // namespace

Strategy alpha_rename(const Strategy& s, Namer& namer) {
  std::map<std::string, std::string> scope;
  return rename_in(s, scope, namer);
}

bool alpha_equal(const Strategy& s, const Strategy& s2) {
  Scope scope;
  return alpha_eq(s, s2, scope);
}

// ---------------------------------------------------------------------------
// Embedding of position-based strategies

namespace {

Strategy embed_entries(const std::vector<Insertion>& entries) {
  std::optional<Context> root;
  std::vector<Index> order;
  std::map<Index, std::vector<Insertion>> groups;
  for (const auto& ins : entries) {
    if (ins.position.is_root()) {
      root = ins.context;
      continue;
    }
    Index i = ins.position.front();
    if (!groups.count(i)) order.push_back(i);
    groups[i].push_back({ins.position.tail(), ins.context});
  }
  if (order.empty() && root) return Strategy::ins(*root);
  std::vector<Strategy::Entry> es;
  for (Index i : order) es.push_back({i, embed_entries(groups[i])});
  if (root) es.push_back({kRootIndex, Strategy::ins(*root)});
  return Strategy::conj(std::move(es));
}

}  // namespace

Strategy embed(const PosCE& e) {
  if (e.is_fail()) return Strategy::fail();
  if (auto wf = is_well_founded(e); !wf.ok) throw NotWellFounded(wf.diagnostic);
  return embed_entries(e.entries());
}

}  // namespace ces
