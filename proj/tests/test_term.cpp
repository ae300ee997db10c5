#include <doctest.h>

#include <algorithm>
#include <set>

#include "support.hpp"

using namespace ces;

namespace {

Term T(const char* s) { return parse_term(s); }
Context C(const char* s) { return parse_context(s); }
Position P(const char* s) { return parse_position(s); }

std::set<std::string> as_set(const std::vector<Position>& ps) {
  std::set<std::string> out;
  for (const auto& p : ps) out.insert(p.str());
  return out;
}

}  // namespace

TEST_CASE("positions") {
  CHECK(as_set(positions(T("a"))) == std::set<std::string>{"eps"});
  CHECK(as_set(positions(T("d(u, x)"))) == std::set<std::string>{"eps", "1", "2"});
  CHECK(as_set(positions(T("g(f(a), b)"))) == std::set<std::string>{"eps", "1", "1.1", "2"});

  GenConfig cfg;
  for (std::uint64_t i = 0; i < 300; ++i) {
    Term t = gen_term(cfg, i);
    CHECK(as_set(positions(t)) == as_set(ref::positions(t)));
    for (const auto& p : ref::positions(t)) {
      CHECK(has_position(t, p));
      CHECK(subterm_at(t, p) == *ref::at(t, p));
    }
    CHECK_FALSE(has_position(t, Position({3})));
  }
}

TEST_CASE("compare_positions") {
  CHECK(compare_positions(P("1"), P("1.2")) == PositionOrder::Less);
  CHECK(compare_positions(P("1"), P("2")) == PositionOrder::Parallel);
  CHECK(compare_positions(P("2.1"), P("2")) == PositionOrder::Greater);
  CHECK(compare_positions(P("eps"), P("eps")) == PositionOrder::Equal);
  CHECK(compare_positions(P("eps"), P("3.1")) == PositionOrder::Less);
}

TEST_CASE("subterm_at and replace_at") {
  CHECK(subterm_at(T("d(u, x)"), P("2")) == T("x"));
  CHECK(subterm_at(T("g(f(a), b)"), P("eps")) == T("g(f(a), b)"));
  CHECK(subterm_at(T("g(f(a), b)"), P("1.1")) == T("a"));
  CHECK_THROWS_AS(subterm_at(T("f(a)"), P("2")), PositionOutOfTerm);
  CHECK(replace_at(T("d(u, x)"), P("2"), T("?y")) == T("d(u, ?y)"));
  CHECK(replace_at(T("g(a, b)"), P("eps"), T("b")) == T("b"));
  CHECK(replace_at(T("g(a, b)"), P("1"), T("f(a)")) == T("g(f(a), b)"));
}

TEST_CASE("depth") {
  CHECK(depth(T("a")) == 0);
  CHECK(depth(T("?x")) == 0);
  CHECK(depth(T("f(a)")) == 1);
  CHECK(depth(T("d(list(u, i), list(x, j))")) == 2);
  GenConfig cfg;
  for (std::uint64_t i = 0; i < 200; ++i) {
    Term t = gen_term(cfg, i);
    CHECK(depth(t) == ref::depth(t));
  }
}

TEST_CASE("match_term") {
  auto s = match_term(T("f(?x)"), T("f(a)"));
  REQUIRE(s);
  CHECK(s->at("x") == T("a"));
  CHECK_FALSE(match_term(T("g(?x, ?x)"), T("g(a, b)")));
  auto v = match_term(T("?x"), T("g(a, b)"));
  REQUIRE(v);
  CHECK(v->at("x") == T("g(a, b)"));

  // against the reference matcher on generated patterns and terms
  Signature sig = default_signature();
  for (std::uint64_t i = 0; i < 500; ++i) {
    Rng rng(7, i);
    Term t = gen_term(sig, 3, rng);
    Term u = gen_term(sig, 2, rng);
    // punch variables into u so that some of them match
    std::vector<Position> ps = positions(u);
    Term pat = replace_at(u, ps[static_cast<std::size_t>(rng.below(static_cast<int>(ps.size())))], T("?x"));
    auto got = match_term(pat, t);
    CHECK(got.has_value() == ref::matches(pat, t));
    if (got) CHECK(apply_subst(*got, pat) == t);
  }
}

TEST_CASE("mgu") {
  auto s = mgu(T("g(?x, b)"), T("g(a, ?y)"));
  REQUIRE(s);
  CHECK(apply_subst(*s, T("g(?x, b)")) == T("g(a, b)"));
  CHECK(s->size() == 2);
  CHECK_FALSE(mgu(T("?x"), T("f(?x)")));
  auto e = mgu(T("a"), T("a"));
  REQUIRE(e);
  CHECK(e->empty());
  // unifier property on generated pairs
  Signature sig = default_signature();
  for (std::uint64_t i = 0; i < 300; ++i) {
    Rng rng(11, i);
    Term t = gen_term(sig, 2, rng), u = gen_term(sig, 2, rng);
    auto pt = positions(t), pu = positions(u);
    t = replace_at(t, pt[static_cast<std::size_t>(rng.below(static_cast<int>(pt.size())))], T("?x"));
    u = replace_at(u, pu[static_cast<std::size_t>(rng.below(static_cast<int>(pu.size())))], T("?y"));
    if (auto g = mgu(t, u)) {
      CHECK(apply_subst(*g, t) == apply_subst(*g, u));
      for (const auto& [k, v] : *g) CHECK(v != Term::variable(k));
    }
  }
}

TEST_CASE("apply_subst") {
  CHECK(apply_subst({{"x", T("a")}}, T("f(?x)")) == T("f(a)"));
  CHECK(apply_subst({}, T("g(?x, a)")) == T("g(?x, a)"));
  CHECK(apply_subst({{"x", T("g(a, b)")}}, T("g(?x, ?y)")) == T("g(g(a, b), ?y)"));
}

TEST_CASE("fill and merge") {
  CHECK(fill(C("list([], i)"), T("var(x, reg(omega, one))")) == T("list(var(x, reg(omega, one)), i)"));
  CHECK(fill(Context::hole(), T("g(a, b)")) == T("g(a, b)"));
  CHECK(fill(C("list(list([], j), i)"), T("x")) == T("list(list(x, j), i)"));
  CHECK(merge_contexts(C("list([], i)"), C("list([], j)")) == C("list(list([], j), i)"));
  CHECK(merge_contexts(Context::hole(), C("g([], b)")) == C("g([], b)"));
  CHECK(merge_contexts(C("f([])"), C("g([], b)"), MergeMode::LeftProject) == C("f([])"));

  // fill(merge(c1, c2), t) = fill(c1, fill(c2, t)), checked against the textual filler
  Signature sig = default_signature();
  for (std::uint64_t i = 0; i < 300; ++i) {
    Rng rng(5, i);
    Context c1 = gen_context(sig, rng), c2 = gen_context(sig, rng);
    Term t = gen_term(sig, 2, rng);
    CHECK(fill(c1, t) == ref::fill(c1, t));
    CHECK(fill(merge_contexts(c1, c2), t) == ref::fill(c1, ref::fill(c2, t)));
    CHECK(ref::at(fill(c1, t), c1.hole_position()) == t);
  }
}

TEST_CASE("contexts need exactly one hole") {
  CHECK_THROWS_AS(parse_context("g([], [])"), ParseError);
  CHECK_THROWS_AS(parse_context("g(a, b)"), ParseError);
  CHECK(C("g(a, f([]))").hole_position() == P("2.1"));
}

TEST_CASE("signatures") {
  Signature s;
  s.absorb(T("g(a, f(b))"));
  CHECK(s.arity("g") == 2);
  CHECK(s.max_arity() == 2);
  CHECK_THROWS_AS(s.absorb(T("g(a)")), TermError);
  Signature p = Signature::parse("# demo\na/0\n\nf/1\n");
  CHECK(p.arity("f") == 1);
  CHECK(p.has_constant());
  CHECK_THROWS(Signature::parse("f/x"));
  CHECK_THROWS_AS(default_signature().check(T("h(a)")), TermError);
}

TEST_CASE("printing round-trips") {
  GenConfig cfg;
  cfg.signature = demo_signature();
  for (std::uint64_t i = 0; i < 300; ++i) {
    Rng rng(3, i);
    Term t = gen_term(cfg.signature, 3, rng);
    CHECK(parse_term(t.str()) == t);
    Context c = gen_context(cfg.signature, rng);
    CHECK(parse_context(c.str()) == c);
    for (const auto& p : positions(t)) CHECK(parse_position(p.str()) == p);
  }
  CHECK(T("?x").str() == "?x");
  CHECK(T("g(a,b)").str() == "g(a, b)");
}

TEST_CASE("parse errors carry a location") {
  try {
    parse_term("g(a,\n  )");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 3);
  }
  CHECK_THROWS_AS(parse_position("1.0"), ParseError);
}
