#include <doctest.h>

#include "support.hpp"

using namespace ces;

namespace {

Term T(const char* s) { return parse_term(s); }
Strategy S(const char* s) { return parse_strategy(s); }
PosCE E(const char* s) { return parse_pos_ce(s); }

// Outermost-first positions where `u` matches, skipping below a hit:
// what a top-down traversal of (u ; ins c) rewrites.
void outermost_hits(const Term& u, const Term& t, std::vector<int>& path, std::vector<Position>& out) {
  if (ref::matches(u, t)) {
    out.emplace_back(path);
    return;
  }
  for (std::size_t i = 0; i < t.arity(); ++i) {
    path.push_back(static_cast<int>(i + 1));
    outermost_hits(u, t.children()[i], path, out);
    path.pop_back();
  }
}

}  // namespace

TEST_CASE("psi, definition cases") {
  Context tau = parse_context("list([], i)");
  CHECK(psi(Strategy::ins(tau), T("a")) == PosCE::single(Position::root(), tau));
  CHECK(psi(S("fail"), T("g(a, b)")).is_fail());
  CHECK(psi(S("b ; ins <f([])>"), T("a")).is_fail());
  CHECK(psi(S("@2.ins <f([])>"), T("f(a)")).is_fail());
  CHECK(psi(S("[@2.ins <f([])>, @1.ins <g([], a)>]"), T("g(a, b)")) == E("[@1.<g([], a)>, @2.<f([])>]"));
  CHECK(psi(S("[@1.ins <f([])>, @eps.ins <g([], a)>]"), T("f(a)")) == E("[@1.<f([])>, @eps.<g([], a)>]"));
  CHECK(psi(S("most(ins <f([])>)"), T("g(a, b)")) == E("[@1.<f([])>, @2.<f([])>]"));
  CHECK(psi(S("if a ; ins <[]> then ins <f([])>"), T("a")) == E("[@eps.<f([])>]"));
  CHECK_THROWS_AS(psi(S("@1.X"), T("f(a)")), OpenStrategy);
}

TEST_CASE("psi of a top-down traversal") {
  // the pattern matches only the subterm at position 1
  Strategy td = S("mu X. (d(?v, i) ; ins <list([], i)>) + most(X)");
  CHECK(psi(td, T("d(d(u, i), x)")) == E("[@1.<list([], i)>]"));

  // brute force: all outermost matches get the context, nothing else
  Signature sig = default_signature();
  for (const char* pat : {"g(?x, b)", "f(?x)", "a", "g(f(?x), ?y)"}) {
    Strategy s = Strategy::mu("X", Strategy::choice(Strategy::guard(T(pat), S("ins <f([])>")),
                                                    Strategy::most(Strategy::var("X"))));
    for (const auto& t : all_terms(sig, 2)) {
      std::vector<Position> hits;
      std::vector<int> path;
      outermost_hits(T(pat), t, path, hits);
      std::vector<Insertion> es;
      for (const auto& p : hits) es.push_back({p, parse_context("f([])")});
      PosCE want = es.empty() ? PosCE::fail() : canonicalize(PosCE::of(es));
      CHECK_MESSAGE(eq_pos(psi(s, t), want), pat << " on " << t.str());
    }
  }
}

TEST_CASE("theta") {
  PosCE a = E("[@1.<f([])>]");
  CHECK(theta({a, PosCE::fail()}) == a);
  CHECK(theta({PosCE::fail(), PosCE::fail()}).is_fail());
  CHECK(theta({}).is_fail());
  PosCE b = E("[@2.<f([])>]");
  CHECK(theta({a, b}) == E("[@1.<f([])>, @2.<f([])>]"));
}

TEST_CASE("homomorphism: the image acts like the strategy") {
  GenConfig cfg;
  for (std::uint64_t i = 0; i < 3000; ++i) {
    Rng rng(51, i);
    Strategy s = gen_strategy(cfg, rng);
    Term t = gen_term(cfg.signature, 3, rng);
    PosCE e = psi(s, t);
    CHECK(is_well_founded(e).ok);
    for (const auto& ins : e.entries()) CHECK(has_position(t, ins.position));
    CHECK_MESSAGE(ref::apply(e, t) == ref::eval(s, t), s.str() << " on " << t.str());
  }
}

TEST_CASE("equal images mean equal results, not conversely") {
  // psi equality is sufficient for equivalence...
  GenConfig cfg;
  const auto terms = all_terms(cfg.signature, 2);
  for (std::uint64_t i = 0; i < 200; ++i) {
    Strategy s = gen_strategy(cfg, i);
    Namer n("V");
    Strategy r = alpha_rename(simplify(s), n);
    for (const auto& t : terms)
      if (eq_pos(psi(s, t), psi(r, t))) CHECK(eval(s, t) == eval(r, t));
  }
  // ...but the identity insertion shows it is not necessary
  Term t = T("f(a)");
  CHECK(eval(S("ins <[]>"), t) == eval(S("@1.ins <[]>"), t));
  CHECK_FALSE(eq_pos(psi(S("ins <[]>"), t), psi(S("@1.ins <[]>"), t)));
}
