#include <doctest.h>

#include "support.hpp"

using namespace ces;

namespace {

Term T(const char* s) { return parse_term(s); }
Position P(const char* s) { return parse_position(s); }
PosCE E(const char* s) { return parse_pos_ce(s); }

// A well-founded list over positions of depth <= 2 with arity <= 2.
PosCE gen_pos(Rng& rng, const Signature& sig) {
  static const std::vector<const char*> all = {"1.1", "1.2", "2.1", "2.2", "1", "2", "eps"};
  std::vector<Insertion> es;
  for (const char* p : all)
    if (rng.chance(0.35)) es.push_back({P(p), gen_context(sig, rng)});
  if (es.empty()) return PosCE::fail();
  // shuffle parallel entries; canonicalize restores the order
  return canonicalize(PosCE::of(es));
}

}  // namespace

TEST_CASE("well-foundedness") {
  CHECK(is_well_founded(E("[@1.<list([], i)>, @2.<list([], j)>]")).ok);
  auto dup = is_well_founded(E("[@1.<f([])>, @1.<g([], a)>]"));
  CHECK_FALSE(dup.ok);
  CHECK(dup.offending == std::pair<std::size_t, std::size_t>{0, 1});
  CHECK_FALSE(is_well_founded(E("[@eps.<f([])>, @1.<f([])>]")).ok);
  CHECK(is_well_founded(E("[@1.<f([])>, @eps.<f([])>]")).ok);
  CHECK(is_well_founded(PosCE::fail()).ok);
}

TEST_CASE("canonicalize") {
  CHECK(canonicalize(E("[@2.<f([])>, @1.<g([], a)>]")) == E("[@1.<g([], a)>, @2.<f([])>]"));
  CHECK(canonicalize(E("[@1.<f([])>, @eps.<g([], a)>]")) == E("[@1.<f([])>, @eps.<g([], a)>]"));
  CHECK(canonicalize(PosCE::fail()).is_fail());
  CHECK_THROWS_AS(canonicalize(E("[@eps.<f([])>, @1.<f([])>]")), NotWellFounded);
}

TEST_CASE("apply_pos_ce, worked examples") {
  CHECK(apply_pos_ce(E("[@eps.<list([], i)>]"), T("var(x, reg(omega, one))")) ==
        Outcome(T("list(var(x, reg(omega, one)), i)")));
  CHECK(apply_pos_ce(E("[@1.<list([], i)>, @2.<list([], j)>]"), T("d(u, x)")) ==
        Outcome(T("d(list(u, i), list(x, j))")));
  CHECK(apply_pos_ce(E("[@3.<f([])>]"), T("f(a)")).failed());
  CHECK(apply_pos_ce(E("[@3.<f([])>, @1.<f([])>]"), T("f(a)")) == Outcome(T("f(f(a))")));
  CHECK(apply_pos_ce(PosCE::fail(), T("a")).failed());
  CHECK(apply_pos_ce(E("[@eps.<f([])>]"), Outcome::failure()).failed());
}

TEST_CASE("apply_pos_ce against the reference") {
  Signature sig = default_signature();
  for (std::uint64_t i = 0; i < 1000; ++i) {
    Rng rng(21, i);
    PosCE e = gen_pos(rng, sig);
    Term t = gen_term(sig, 3, rng);
    CHECK(apply_pos_ce(e, t) == ref::apply(e, t));
  }
}

TEST_CASE("unify_pos") {
  // E'' from the position-based example, with p1=1.1, p2=1.2, p3=2, q1=3, q2=4
  PosCE e = E("[@1.1.<list([], i)>, @1.2.<f([])>, @2.<g([], a)>]");
  PosCE e2 = E("[@1.1.<list([], j)>, @3.<g(b, [])>, @4.<f(f([]))>]");
  PosCE want = E("[@1.1.<list(list([], j), i)>, @1.2.<f([])>, @2.<g([], a)>, @3.<g(b, [])>, @4.<f(f([]))>]");
  CHECK(eq_pos(unify_pos(e, e2), want));
  CHECK(unify_pos(PosCE::fail(), e).is_fail());
  CHECK(unify_pos(e, PosCE::fail()).is_fail());
  // ancestors stay after descendants
  CHECK(unify_pos(E("[@eps.<f([])>]"), E("[@1.<f([])>]")) == E("[@1.<f([])>, @eps.<f([])>]"));
}

TEST_CASE("unify_pos laws on generated lists") {
  Signature sig = default_signature();
  const auto terms = all_terms(sig, 2);
  PosCE id = E("[@eps.<[]>]");
  for (std::uint64_t i = 0; i < 300; ++i) {
    Rng rng(22, i);
    PosCE a = gen_pos(rng, sig), b = gen_pos(rng, sig), c = gen_pos(rng, sig);
    PosCE ab = unify_pos(a, b);
    CHECK(is_well_founded(ab).ok);
    CHECK(eq_pos(unify_pos(ab, c), unify_pos(a, unify_pos(b, c))));
    CHECK(eq_pos(unify_pos(a, a, MergeMode::LeftProject), a));
    // The identity insertion is neutral semantically, not as a list, and only
    // where the list addresses the term at all: [@2.1.t] fails on f(a) while
    // [@2.1.t, @eps.[]] leaves it unchanged. Lists built by psi always do.
    for (const auto& t : terms) {
      if (apply_pos_ce(a, t).failed()) continue;
      CHECK(apply_pos_ce(unify_pos(id, a), t) == apply_pos_ce(a, t));
      CHECK(apply_pos_ce(unify_pos(a, id), t) == apply_pos_ce(a, t));
    }
  }
}

TEST_CASE("combine_pos") {
  PosCE e = E("[@1.<f([])>]");
  CHECK(combine_pos(e, PosCE::fail()) == e);
  CHECK(combine_pos(PosCE::fail(), e) == e);
  CHECK(combine_pos(PosCE::fail(), PosCE::fail()).is_fail());
  PosCE e2 = E("[@2.<f([])>]");
  CHECK(combine_pos(e, e2) == unify_pos(e, e2));
}

TEST_CASE("eq_pos") {
  CHECK(eq_pos(E("[@1.<f([])>, @2.<g([], a)>]"), E("[@2.<g([], a)>, @1.<f([])>]")));
  CHECK_FALSE(eq_pos(E("[@1.<f([])>]"), E("[@1.<g([], a)>]")));
  CHECK(eq_pos(PosCE::fail(), PosCE::fail()));
  CHECK_THROWS_AS(PosCE::of({}), std::invalid_argument);
}

TEST_CASE("PosCE text round-trip") {
  Signature sig = demo_signature();
  for (std::uint64_t i = 0; i < 200; ++i) {
    Rng rng(23, i);
    PosCE e = gen_pos(rng, sig);
    CHECK(parse_pos_ce(e.str()) == e);
  }
  CHECK(E("fail").is_fail());
  CHECK_THROWS_AS(E("[@1.<f([])>"), ParseError);
}
