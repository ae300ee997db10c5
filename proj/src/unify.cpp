#include "ces/unify.hpp"

#include <algorithm>
#include <atomic>
#include <deque>

#include <json.hpp>

namespace ces {

using K = Strategy::Kind;
using PK = PreCE::Kind;

// ---------------------------------------------------------------------------
// Closures

namespace {

template <class F>
void for_each_phi_child(const Strategy& s, F&& f) {
  switch (s.kind()) {
    case K::Guard:
    case K::Most:
      f(s.body());
      return;
    case K::Choice:
      f(s.left());
      f(s.right());
      return;
    case K::IfThen:
      f(s.cond());
      f(s.body());
      return;
    case K::Conj:
      if (s.entries().size() == 1) {
        f(s.entries()[0].body);
      } else {
        for (const auto& e : s.entries()) f(Strategy::at(e.index, e.body));
      }
      return;
    case K::Mu:
      f(substitute(s.body(), s.name(), s));
      f(s.body());
      return;
    default:
      return;
  }
}

}  // namespace

StrategySet phi(const Strategy& s) {
  StrategySet seen{s};
  std::deque<Strategy> work{s};
  while (!work.empty()) {
    Strategy cur = work.front();
    work.pop_front();
    for_each_phi_child(cur, [&](const Strategy& c) {
      if (seen.insert(c).second) work.push_back(c);
    });
  }
  return seen;
}

StrategySet phi_mu(const Strategy& s) {
  StrategySet out;
  std::function<void(const Strategy&)> go = [&](const Strategy& x) {
    switch (x.kind()) {
      case K::Mu:
        out.insert(x);
        go(x.body());
        return;
      case K::Guard:
      case K::Most:
        go(x.body());
        return;
      case K::Choice:
        go(x.left());
        go(x.right());
        return;
      case K::IfThen:
        go(x.cond());
        go(x.body());
        return;
      case K::Conj:
        for (const auto& e : x.entries()) go(e.body);
        return;
      default:
        return;
    }
  };
  go(s);
  return out;
}

// ---------------------------------------------------------------------------
// Pre-strategies

struct PreCE::Node {
  explicit Node(Kind k) : kind(k) {}
  Kind kind;
  std::optional<Strategy> s1;  // Done strategy, tuple left, IfThen condition
  std::optional<Strategy> s2;  // tuple right
  Memory mem;
  std::optional<Term> pattern;  // guard pattern or tuple pattern environment
  std::string var;
  std::vector<PreCE> kids;
  std::vector<Index> indices;
  bool has_tuple = false;
};

namespace {

bool any_tuple(const std::vector<PreCE>& kids) {
  return std::any_of(kids.begin(), kids.end(), [](const PreCE& k) { return k.has_tuple(); });
}

}  // namespace

PreCE PreCE::done(Strategy s) {
  Node n{Kind::Done};
  n.s1 = std::move(s);
  return PreCE(std::make_shared<const Node>(std::move(n)));
}

PreCE PreCE::tuple(Strategy left, Strategy right, Memory mem, std::optional<Term> pattern) {
  Node n{Kind::Tuple};
  n.s1 = std::move(left);
  n.s2 = std::move(right);
  n.mem = std::move(mem);
  n.pattern = std::move(pattern);
  n.has_tuple = true;
  return PreCE(std::make_shared<const Node>(std::move(n)));
}

PreCE PreCE::guard(Term u, PreCE body) {
  Node n{Kind::Guard};
  n.pattern = std::move(u);
  n.kids = {std::move(body)};
  n.has_tuple = any_tuple(n.kids);
  return PreCE(std::make_shared<const Node>(std::move(n)));
}

PreCE PreCE::choice(PreCE l, PreCE r) {
  Node n{Kind::Choice};
  n.kids = {std::move(l), std::move(r)};
  n.has_tuple = any_tuple(n.kids);
  return PreCE(std::make_shared<const Node>(std::move(n)));
}

PreCE PreCE::mu(std::string z, PreCE body) {
  Node n{Kind::Mu};
  n.var = std::move(z);
  n.kids = {std::move(body)};
  n.has_tuple = any_tuple(n.kids);
  return PreCE(std::make_shared<const Node>(std::move(n)));
}

PreCE PreCE::conj(std::vector<Entry> entries) {
  if (entries.empty()) throw std::invalid_argument("a conjunction needs at least one entry");
  Node n{Kind::Conj};
  for (auto& e : entries) {
    n.indices.push_back(e.index);
    n.kids.push_back(std::move(e.body));
  }
  n.has_tuple = any_tuple(n.kids);
  return PreCE(std::make_shared<const Node>(std::move(n)));
}

PreCE PreCE::most(PreCE body) {
  Node n{Kind::Most};
  n.kids = {std::move(body)};
  n.has_tuple = any_tuple(n.kids);
  return PreCE(std::make_shared<const Node>(std::move(n)));
}

PreCE PreCE::if_then(Strategy cond, PreCE body) {
  Node n{Kind::IfThen};
  n.s1 = std::move(cond);
  n.kids = {std::move(body)};
  n.has_tuple = any_tuple(n.kids);
  return PreCE(std::make_shared<const Node>(std::move(n)));
}

PreCE::Kind PreCE::kind() const { return node_->kind; }
const Strategy& PreCE::strategy() const { return *node_->s1; }
const Strategy& PreCE::left() const { return *node_->s1; }
const Strategy& PreCE::right() const { return *node_->s2; }
const Memory& PreCE::memory() const { return node_->mem; }
const std::optional<Term>& PreCE::pattern_env() const { return node_->pattern; }
const Term& PreCE::pattern() const { return *node_->pattern; }
const std::string& PreCE::var() const { return node_->var; }
const Strategy& PreCE::cond() const { return *node_->s1; }
const std::vector<PreCE>& PreCE::kids() const { return node_->kids; }
const std::vector<Index>& PreCE::indices() const { return node_->indices; }
bool PreCE::has_tuple() const { return node_->has_tuple; }

Strategy PreCE::to_strategy() const {
  switch (kind()) {
    case PK::Done:
      return strategy();
    case PK::Tuple:
      throw std::logic_error("pre-strategy still contains a tuple");
    case PK::Guard:
      return Strategy::guard(pattern(), kids()[0].to_strategy());
    case PK::Choice:
      return Strategy::choice(kids()[0].to_strategy(), kids()[1].to_strategy());
    case PK::Mu:
      return Strategy::mu(var(), kids()[0].to_strategy());
    case PK::Most:
      return Strategy::most(kids()[0].to_strategy());
    case PK::IfThen:
      return Strategy::if_then(cond(), kids()[0].to_strategy());
    case PK::Conj: {
      std::vector<Strategy::Entry> es;
      for (std::size_t i = 0; i < kids().size(); ++i) es.push_back({indices()[i], kids()[i].to_strategy()});
      return Strategy::conj(std::move(es));
    }
  }
  return Strategy::fail();
}

std::string PreCE::str() const {
  switch (kind()) {
    case PK::Done:
      return strategy().str();
    case PK::Tuple:
      return "<" + left().str() + " | " + right().str() + " | M" + std::to_string(memory().size()) + ">";
    case PK::Guard:
      return pattern().str() + " ; (" + kids()[0].str() + ")";
    case PK::Choice:
      return "(" + kids()[0].str() + ") + (" + kids()[1].str() + ")";
    case PK::Mu:
      return "mu " + var() + ". (" + kids()[0].str() + ")";
    case PK::Most:
      return "most(" + kids()[0].str() + ")";
    case PK::IfThen:
      return "if " + cond().str() + " then (" + kids()[0].str() + ")";
    case PK::Conj: {
      std::string out = "[";
      for (std::size_t i = 0; i < kids().size(); ++i) {
        if (i) out += ", ";
        out += "@" + index_str(indices()[i]) + ".(" + kids()[i].str() + ")";
      }
      return out + "]";
    }
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Session

namespace {

std::atomic<long> g_steps{0};
std::atomic<long> g_checks{0};
std::atomic<long> g_violations{0};
std::atomic<long> g_negative{0};

int max_arity_in(const Strategy& s) {
  int m = 0;
  std::function<void(const detail::TreePtr&)> tree = [&](const detail::TreePtr& t) {
    m = std::max(m, static_cast<int>(t->children.size()));
    for (const auto& c : t->children) tree(c);
  };
  std::function<void(const Strategy&)> go = [&](const Strategy& x) {
    switch (x.kind()) {
      case K::Ins:
        tree(x.context().tree());
        return;
      case K::Guard:
        tree(x.pattern().tree());
        go(x.body());
        return;
      case K::Mu:
      case K::Most:
        go(x.body());
        return;
      case K::Choice:
        go(x.left());
        go(x.right());
        return;
      case K::IfThen:
        go(x.cond());
        go(x.body());
        return;
      case K::Conj:
        for (const auto& e : x.entries()) {
          m = std::max(m, e.index);
          go(e.body);
        }
        return;
      default:
        return;
    }
  };
  go(s);
  return m;
}

long mu_count(const StrategySet& set) {
  return std::count_if(set.begin(), set.end(), [](const Strategy& s) { return s.is(K::Mu); });
}

std::optional<Term> shift(const std::optional<Term>& env, Index i) {
  if (!env || env->is_variable() || static_cast<std::size_t>(i) > env->arity()) return std::nullopt;
  Term c = env->child(i);
  if (c.is_variable()) return std::nullopt;
  return c;
}

bool conj_shaped(const Strategy& s) { return s.is(K::Conj) || s.is(K::Ins); }

struct Shape {
  std::vector<Strategy::Entry> numeric;
  std::optional<Context> root;
};

Shape shape_of(const Strategy& s) {
  Shape sh;
  if (s.is(K::Ins)) {
    sh.root = s.context();
    return sh;
  }
  for (const auto& e : s.entries()) {
    if (e.index == kRootIndex) {
      if (!e.body.is(K::Ins)) throw ValidationFailure("root entry of a conjunction must be a root insertion");
      sh.root = e.body.context();
    } else {
      sh.numeric.push_back(e);
    }
  }
  return sh;
}

const Strategy::Entry* find_index(const std::vector<Strategy::Entry>& es, Index i) {
  for (const auto& e : es) {
    if (e.index == i) return &e;
  }
  return nullptr;
}

const MemoryEntry* recall(const Memory& m, const Strategy& l, const Strategy& r) {
  for (const auto& e : m) {
    if (e.left == l && e.right == r) return &e;
  }
  return nullptr;
}

std::string dm_json(const DepthMeasure& d) { return "[" + std::to_string(d.h) + "," + std::to_string(d.delta) + "]"; }

}  // namespace

UnifySession::UnifySession(UnifyOptions opts) : opts_(std::move(opts)) {}

void UnifySession::prepare(const Strategy& s, const Strategy& r) {
  StrategySet ps = phi(s);
  StrategySet pr = phi(r);
  // Binders reachable through unrolling count as fixed-point sub-strategies:
  // the memory may pair any of them.
  base_lambda_ = mu_count(ps) * static_cast<long>(pr.size()) + static_cast<long>(ps.size()) * mu_count(pr);
  if (opts_.signature) {
    max_arity_ = opts_.signature->max_arity();
  } else {
    max_arity_ = std::max(max_arity_in(s), max_arity_in(r));
  }
}

MeasureTriple UnifySession::measure_of(const Strategy& l, const Strategy& r, const Memory& m) const {
  return {base_lambda_ - static_cast<long>(m.size()), measure(l), measure(r)};
}

namespace {

struct Rewrite {
  std::string rule;
  PreCE result;
};

}  // namespace

// The list rule: both sides have the shape [@i.S_i ..., @eps.tau?].
static PreCE list_rule(const Strategy& cond_l, const Strategy& cond_r, const Shape& a, const Shape& b,
                       const Memory& m, const std::optional<Term>& env, MergeMode mode) {
  std::vector<PreCE::Entry> es;
  for (const auto& e : a.numeric) {
    if (const auto* f = find_index(b.numeric, e.index)) {
      es.push_back({e.index, PreCE::choice(PreCE::tuple(e.body, f->body, m, shift(env, e.index)),
                                           PreCE::done(Strategy::choice(e.body, f->body)))});
    }
  }
  for (const auto& e : a.numeric) {
    if (!find_index(b.numeric, e.index)) es.push_back({e.index, PreCE::done(e.body)});
  }
  for (const auto& f : b.numeric) {
    if (!find_index(a.numeric, f.index)) es.push_back({f.index, PreCE::done(f.body)});
  }
  if (a.root && b.root) {
    es.push_back({kRootIndex, PreCE::done(Strategy::ins(merge_contexts(*a.root, *b.root, mode)))});
  } else if (a.root || b.root) {
    es.push_back({kRootIndex, PreCE::done(Strategy::ins(a.root ? *a.root : *b.root))});
  }
  return PreCE::if_then(cond_l, PreCE::if_then(cond_r, PreCE::conj(std::move(es))));
}

std::optional<std::string> UnifySession::reduce_step(PreCE& p) {
  if (!p.has_tuple()) return std::nullopt;

  // Locate the focus.
  std::vector<std::size_t> path;
  const PreCE* cur = &p;
  while (!cur->is(PK::Tuple)) {
    const auto& ks = cur->kids();
    std::size_t pick = ks.size();
    if (opts_.order == FocusOrder::LeftmostOutermost) {
      for (std::size_t i = 0; i < ks.size(); ++i) {
        if (ks[i].has_tuple()) {
          pick = i;
          break;
        }
      }
    } else {
      for (std::size_t i = ks.size(); i-- > 0;) {
        if (ks[i].has_tuple()) {
          pick = i;
          break;
        }
      }
    }
    path.push_back(pick);
    cur = &ks[pick];
  }

  const Strategy& L = cur->left();
  const Strategy& R = cur->right();
  const Memory& M = cur->memory();
  const std::optional<Term>& env = cur->pattern_env();

  auto apply = [&]() -> Rewrite {
    if (L.is(K::Fail)) return {"1a", PreCE::done(Strategy::fail())};
    if (R.is(K::Fail)) return {"1b", PreCE::done(Strategy::fail())};
    if (L.is(K::Ins) && R.is(K::Ins)) {
      return {"2", PreCE::done(Strategy::ins(merge_contexts(L.context(), R.context(), opts_.merge)))};
    }
    if (L.is(K::Guard)) return {"3a", PreCE::guard(L.pattern(), PreCE::tuple(L.body(), R, M, L.pattern()))};
    if (R.is(K::Guard)) return {"3b", PreCE::guard(R.pattern(), PreCE::tuple(L, R.body(), M, R.pattern()))};
    if (L.is(K::Conj) && R.is(K::Conj) && L.entries().size() == 1 && R.entries().size() == 1 &&
        L.entries()[0].index != kRootIndex && L.entries()[0].index == R.entries()[0].index) {
      Index i = L.entries()[0].index;
      return {"4a", PreCE::conj({{i, PreCE::tuple(L.entries()[0].body, R.entries()[0].body, M, shift(env, i))}})};
    }
    if (conj_shaped(L) && conj_shaped(R)) {
      return {"4b", list_rule(L, R, shape_of(L), shape_of(R), M, env, opts_.merge)};
    }
    if (L.is(K::Choice)) {
      return {"5a", PreCE::choice(PreCE::tuple(L.left(), R, M, env), PreCE::tuple(L.right(), R, M, env))};
    }
    if (R.is(K::Choice)) {
      return {"5b", PreCE::choice(PreCE::tuple(L, R.left(), M, env), PreCE::tuple(L, R.right(), M, env))};
    }
    if (L.is(K::IfThen)) return {"6a", PreCE::if_then(L.cond(), PreCE::tuple(L.body(), R, M, env))};
    if (R.is(K::IfThen)) return {"6b", PreCE::if_then(R.cond(), PreCE::tuple(L, R.body(), M, env))};
    if (L.is(K::Most) && R.is(K::Most)) {
      return {"7a", PreCE::if_then(L, PreCE::if_then(R, PreCE::most(PreCE::choice(
                                                           PreCE::tuple(L.body(), R.body(), M),
                                                           PreCE::done(Strategy::choice(L.body(), R.body()))))))};
    }
    if ((L.is(K::Most) && conj_shaped(R)) || (R.is(K::Most) && conj_shaped(L))) {
      bool left_most = L.is(K::Most);
      const Strategy& m = left_most ? L : R;
      int k = (env && !env->is_variable()) ? static_cast<int>(env->arity()) : max_arity_;
      std::string rule = left_most ? "7b" : "7c";
      if (k == 0) return {rule, PreCE::done(Strategy::fail())};
      Shape expanded;
      for (int i = 1; i <= k; ++i) expanded.numeric.push_back({i, m.body()});
      // The expansion is immediately unified by the list rule; the condition keeps most().
      if (left_most) return {rule, list_rule(L, R, expanded, shape_of(R), M, env, opts_.merge)};
      return {rule, list_rule(L, R, shape_of(L), expanded, M, env, opts_.merge)};
    }
    if (L.is(K::Mu)) {
      if (const auto* hit = recall(M, L, R)) return {"8a", PreCE::done(Strategy::var(hit->var))};
      std::string z = fresh_var();
      Memory m2 = M;
      m2.push_back({L, R, z});
      return {"8a", PreCE::mu(z, PreCE::tuple(substitute(L.body(), L.name(), L), R, std::move(m2)))};
    }
    if (R.is(K::Mu)) {
      if (const auto* hit = recall(M, L, R)) return {"8b", PreCE::done(Strategy::var(hit->var))};
      std::string z = fresh_var();
      Memory m2 = M;
      m2.push_back({L, R, z});
      return {"8b", PreCE::mu(z, PreCE::tuple(L, substitute(R.body(), R.name(), R), std::move(m2)))};
    }
    throw std::logic_error("no reduction rule applies to <" + L.str() + " | " + R.str() + ">");
  };

  Rewrite rw = apply();

  // Termination measure: every tuple produced must be strictly below the focus.
  MeasureTriple before = measure_of(L, R, M);
  if (before.lambda < 0) {
    ++stats_.negative_lambda;
    ++g_negative;
    if (opts_.strict_measure) throw MeasureViolation("negative lambda at rule " + rw.rule);
  }
  std::vector<MeasureTriple> after;
  std::function<void(const PreCE&)> collect = [&](const PreCE& q) {
    if (q.is(PK::Tuple)) {
      after.push_back(measure_of(q.left(), q.right(), q.memory()));
      return;
    }
    for (const auto& k : q.kids()) collect(k);
  };
  collect(rw.result);
  for (const auto& a : after) {
    ++stats_.measure_checks;
    ++g_checks;
    if (!(a < before)) {
      ++stats_.measure_violations;
      ++g_violations;
      if (opts_.strict_measure) {
        throw MeasureViolation("rule " + rw.rule + " did not decrease the measure on <" + L.str() + " | " +
                               R.str() + ">");
      }
    }
  }
  ++stats_.steps;
  ++g_steps;

  if (opts_.trace) {
    std::string ps;
    for (std::size_t i = 0; i < path.size(); ++i) ps += (i ? "." : "") + std::to_string(path[i]);
    nlohmann::json line;
    line["rule"] = rw.rule;
    line["path"] = ps.empty() ? "eps" : ps;
    line["lambda"] = before.lambda;
    line["dl"] = nlohmann::json::parse(dm_json(before.left));
    line["dr"] = nlohmann::json::parse(dm_json(before.right));
    line["mem"] = M.size();
    auto arr = nlohmann::json::array();
    for (const auto& a : after) {
      arr.push_back({{"lambda", a.lambda},
                     {"dl", nlohmann::json::parse(dm_json(a.left))},
                     {"dr", nlohmann::json::parse(dm_json(a.right))}});
    }
    line["after"] = arr;
    opts_.trace(line.dump());
  }

  // Rebuild along the path.
  std::function<PreCE(const PreCE&, std::size_t)> rebuild = [&](const PreCE& q, std::size_t depth) -> PreCE {
    if (depth == path.size()) return rw.result;
    std::size_t i = path[depth];
    PreCE child = rebuild(q.kids()[i], depth + 1);
    switch (q.kind()) {
      case PK::Guard:
        return PreCE::guard(q.pattern(), child);
      case PK::Choice:
        return i == 0 ? PreCE::choice(child, q.kids()[1]) : PreCE::choice(q.kids()[0], child);
      case PK::Mu:
        return PreCE::mu(q.var(), child);
      case PK::Most:
        return PreCE::most(child);
      case PK::IfThen:
        return PreCE::if_then(q.cond(), child);
      case PK::Conj: {
        std::vector<PreCE::Entry> es;
        for (std::size_t j = 0; j < q.kids().size(); ++j) es.push_back({q.indices()[j], j == i ? child : q.kids()[j]});
        return PreCE::conj(std::move(es));
      }
      default:
        throw std::logic_error("focus path through a leaf");
    }
  };
  p = rebuild(p, 0);
  return rw.rule;
}

Strategy UnifySession::normal_form(const Strategy& s, const Strategy& r) {
  for (const Strategy* x : {&s, &r}) {
    Validation v = validate(*x);
    if (!opts_.require_linear) v.linear = true;
    if (!v.ok()) {
      std::string msg = "cannot unify " + x->str() + ":";
      for (const auto& d : v.diagnostics) msg += " " + d + ";";
      throw ValidationFailure(msg);
    }
  }
  Strategy a = alpha_rename(s, xs_);
  Strategy b = alpha_rename(r, xs_);
  prepare(a, b);
  PreCE p = PreCE::tuple(a, b, {});
  while (reduce_step(p)) {
  }
  Strategy out = p.to_strategy();
  return opts_.simplify ? simplify(out) : out;
}

Strategy unify(const Strategy& s, const Strategy& r, const UnifyOptions& opts) {
  UnifySession session(opts);
  return session.normal_form(s, r);
}

Strategy combine(const Strategy& s, const Strategy& r, const UnifyOptions& opts) {
  Strategy out = Strategy::choice(Strategy::choice(unify(s, r, opts), s), r);
  return opts.simplify ? simplify(out) : out;
}

UnifyStats global_unify_stats() { return {g_steps.load(), g_checks.load(), g_violations.load(), g_negative.load()}; }

void reset_global_unify_stats() {
  g_steps = 0;
  g_checks = 0;
  g_violations = 0;
  g_negative = 0;
}

}  // namespace ces
