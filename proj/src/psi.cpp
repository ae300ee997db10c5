#include "ces/psi.hpp"

#include <memory>

namespace ces {

using K = Strategy::Kind;

namespace {

// Same iterate bookkeeping as the evaluator: remaining unfoldings of a binder.
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

PosCE psi_in(const Strategy& s, const Term& t, const Env& env);

PosCE psi_conj(const std::vector<Strategy::Entry>& entries, const Term& t, const Env& env) {
  std::vector<PosCE> children;
  std::vector<PosCE> roots;
  for (const auto& e : entries) {
    if (e.index == kRootIndex) {
      roots.push_back(psi_in(e.body, t, env));
    } else if (static_cast<std::size_t>(e.index) <= t.arity()) {
      children.push_back(psi_in(e.body, t.child(e.index), env).prefixed(Position({e.index})));
    }
  }
  children.insert(children.end(), roots.begin(), roots.end());
  PosCE out = theta(children);
  return canonicalize(out);
}

PosCE psi_in(const Strategy& s, const Term& t, const Env& env) {
  switch (s.kind()) {
    case K::Fail:
      return PosCE::fail();
    case K::Var: {
      const Frame* f = nullptr;
      for (const Frame* g = env.get(); g; g = g->next.get()) {
        if (g->var == s.name()) {
          f = g;
          break;
        }
      }
      if (!f) throw OpenStrategy("free fixed-point variable " + s.name());
      if (f->remaining == 0) return PosCE::fail();
      return psi_in(f->body, t, bind(f->binder_env, f->var, f->body, f->remaining - 1));
    }
    case K::Ins:
      return PosCE::single(Position::root(), s.context());
    case K::Guard:
      return match_term(s.pattern(), t) ? psi_in(s.body(), t, env) : PosCE::fail();
    case K::Choice: {
      PosCE l = psi_in(s.left(), t, env);
      return l.is_fail() ? psi_in(s.right(), t, env) : l;
    }
    case K::Mu:
      return psi_in(s.body(), t, bind(env, s.name(), s.body(), depth(t)));
    case K::IfThen:
      return psi_in(s.cond(), t, env).is_fail() ? PosCE::fail() : psi_in(s.body(), t, env);
    case K::Conj:
      return psi_conj(s.entries(), t, env);
    case K::Most: {
      std::vector<Strategy::Entry> es;
      for (std::size_t i = 1; i <= t.arity(); ++i) es.push_back({static_cast<Index>(i), s.body()});
      return psi_conj(es, t, env);
    }
  }
  return PosCE::fail();
}

}  // namespace

PosCE theta(const std::vector<PosCE>& conjuncts) {
  std::vector<Insertion> all;
  for (const auto& c : conjuncts) all.insert(all.end(), c.entries().begin(), c.entries().end());
  return all.empty() ? PosCE::fail() : PosCE::of(std::move(all));
}

PosCE psi(const Strategy& s, const Term& t) { return psi_in(s, t, nullptr); }

}  // namespace ces
