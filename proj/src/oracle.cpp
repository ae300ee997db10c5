#include "ces/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <stdexcept>

#include "ces/psi.hpp"

namespace ces {

using nlohmann::json;
using K = Strategy::Kind;

Signature default_signature() { return Signature{{"a", 0}, {"b", 0}, {"f", 1}, {"g", 2}}; }

Signature demo_signature() {
  Signature s = default_signature();
  for (auto [n, a] : std::initializer_list<std::pair<const char*, int>>{
           {"list", 2}, {"index", 2}, {"var", 2}, {"reg", 2}, {"d", 2}, {"i", 0}, {"j", 0},
           {"u", 0}, {"x", 0}, {"omega", 0}, {"one", 0}})
    s.declare(n, a);
  return s;
}

// ---------------------------------------------------------------- rng

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  g_.seed(seq);
}

// Plain modulo keeps the stream identical across standard libraries;
// std::uniform_int_distribution does not promise that.
int Rng::below(int n) { return n <= 1 ? 0 : static_cast<int>(g_() % static_cast<std::uint64_t>(n)); }

bool Rng::chance(double p) { return static_cast<double>(g_() >> 11) * 0x1.0p-53 < p; }

// ---------------------------------------------------------------- terms

std::vector<Term> all_terms(const Signature& sig, int n) {
  std::vector<Term> level;
  for (const auto& [name, ar] : sig.symbols())
    if (ar == 0) level.push_back(Term::constant(name));
  for (int d = 1; d <= n; ++d) {
    std::vector<Term> next;
    for (const auto& [name, ar] : sig.symbols()) {
      if (ar == 0) {
        next.push_back(Term::constant(name));
        continue;
      }
      // odometer over level^ar
      std::vector<std::size_t> idx(static_cast<std::size_t>(ar), 0);
      while (true) {
        std::vector<Term> kids;
        for (auto k : idx) kids.push_back(level[k]);
        next.push_back(Term::apply(name, std::move(kids)));
        int pos = ar - 1;
        while (pos >= 0 && ++idx[static_cast<std::size_t>(pos)] == level.size()) idx[static_cast<std::size_t>(pos--)] = 0;
        if (pos < 0) break;
      }
    }
    level = std::move(next);
  }
  return level;
}

namespace {

std::vector<std::pair<std::string, int>> symbol_list(const Signature& sig) {
  return {sig.symbols().begin(), sig.symbols().end()};
}

std::vector<std::pair<std::string, int>> constants(const Signature& sig) {
  std::vector<std::pair<std::string, int>> out;
  for (const auto& s : sig.symbols())
    if (s.second == 0) out.push_back(s);
  return out;
}

}  // namespace

Term gen_term(const Signature& sig, int max_depth, Rng& rng) {
  auto consts = constants(sig);
  if (consts.empty()) throw TermError("signature has no constant");
  if (max_depth <= 0 || rng.chance(0.2)) return Term::constant(consts[static_cast<std::size_t>(rng.below(static_cast<int>(consts.size())))].first);
  auto syms = symbol_list(sig);
  const auto& [name, ar] = syms[static_cast<std::size_t>(rng.below(static_cast<int>(syms.size())))];
  std::vector<Term> kids;
  for (int k = 0; k < ar; ++k) kids.push_back(gen_term(sig, max_depth - 1, rng));
  return Term::apply(name, std::move(kids));
}

Term gen_term(const GenConfig& cfg, std::uint64_t i) {
  Rng rng(cfg.seed, i * 2 + 1);
  return gen_term(cfg.signature, cfg.max_term_depth, rng);
}

namespace {

detail::TreePtr gen_context_tree(const Signature& sig, int budget, Rng& rng) {
  std::vector<std::pair<std::string, int>> fns;
  for (const auto& s : sig.symbols())
    if (s.second > 0) fns.push_back(s);
  if (budget <= 0 || fns.empty() || rng.chance(0.25)) return detail::make_hole();
  const auto& [name, ar] = fns[static_cast<std::size_t>(rng.below(static_cast<int>(fns.size())))];
  int hole = rng.below(ar);
  std::vector<detail::TreePtr> kids;
  for (int k = 0; k < ar; ++k)
    kids.push_back(k == hole ? gen_context_tree(sig, budget - 1, rng) : gen_term(sig, 1, rng).tree());
  return detail::make_apply(name, std::move(kids));
}

Term gen_pattern(const Signature& sig, Rng& rng) {
  static const char* names[] = {"x", "y", "z"};
  if (rng.chance(0.15)) return Term::variable(names[rng.below(3)]);
  Term t = gen_term(sig, 2, rng);
  std::function<Term(const Term&, bool)> punch = [&](const Term& s, bool top) -> Term {
    if (!top && rng.chance(0.4)) return Term::variable(names[rng.below(3)]);
    std::vector<Term> kids;
    for (const auto& c : s.children()) kids.push_back(punch(c, false));
    return Term::apply(s.name(), std::move(kids));
  };
  return punch(t, true);
}

struct Pending {
  std::string name;
  bool guarded;
};

class StrategyGen {
 public:
  StrategyGen(const GenConfig& cfg, Rng& rng) : cfg_(cfg), rng_(rng), max_arity_(cfg.signature.max_arity()) {}

  Strategy gen(int b, std::vector<Pending> pend, int mu_left) {
    if (pend.empty()) return closed(b, mu_left);
    return open(b, std::move(pend), mu_left);
  }

  std::string fresh() { return "X" + std::to_string(counter_++); }

 private:
  Strategy ins() { return Strategy::ins(gen_context(cfg_.signature, rng_)); }

  int pick(std::initializer_list<int> weights) {
    int total = 0;
    for (int w : weights) total += w;
    int r = rng_.below(total);
    int k = 0;
    for (int w : weights) {
      if (r < w) return k;
      r -= w;
      ++k;
    }
    return k - 1;
  }

  Strategy closed(int b, int mu_left) {
    if (b <= 0) return Strategy::fail();
    if (b == 1) return rng_.chance(0.9) ? ins() : Strategy::fail();
    bool can_mu = mu_left > 0 && max_arity_ > 0;
    switch (pick({2, 1, 4, 4, 4, max_arity_ > 0 ? 2 : 0, 2, can_mu ? 7 : 0})) {
      case 0: return ins();
      case 1: return Strategy::fail();
      case 2: return Strategy::guard(gen_pattern(cfg_.signature, rng_), gen(b - 1, {}, mu_left));
      case 3: return Strategy::choice(gen(b - 1, {}, mu_left), gen(b - 1, {}, mu_left));
      case 4: return conj(b, {}, mu_left);
      case 5: return Strategy::most(gen(b - 1, {}, mu_left));
      case 6: return Strategy::if_then(gen(b - 1, {}, mu_left), gen(b - 1, {}, mu_left));
      default: return mu(b, {}, mu_left);
    }
  }

  Strategy open(int b, std::vector<Pending> pend, int mu_left) {
    bool lone = pend.size() == 1 && pend[0].guarded;
    if (lone && (b <= 1 || rng_.chance(0.3))) return Strategy::var(pend[0].name);
    if (b <= 0 || max_arity_ == 0) return force(pend);
    bool can_mu = mu_left > 0;
    switch (pick({3, 5, 5, 2, 2, can_mu ? 3 : 0})) {
      case 0: return Strategy::guard(gen_pattern(cfg_.signature, rng_), gen(b - 1, pend, mu_left));
      case 1: {
        if (rng_.chance(0.5)) return Strategy::choice(gen(b - 1, {}, mu_left), gen(b - 1, pend, mu_left));
        return Strategy::choice(gen(b - 1, pend, mu_left), gen(b - 1, {}, mu_left));
      }
      case 2: return conj(b, pend, mu_left);
      case 3: {
        for (auto& p : pend) p.guarded = true;
        return Strategy::most(gen(b - 1, pend, mu_left));
      }
      case 4: return Strategy::if_then(gen(b - 1, {}, mu_left), gen(b - 1, pend, mu_left));
      default: return mu(b, pend, mu_left);
    }
  }

  // Out of budget with variables still to place; the caller's depth check rejects it.
  Strategy force(const std::vector<Pending>& pend) {
    if (pend.size() == 1 && pend[0].guarded) return Strategy::var(pend[0].name);
    std::vector<Strategy::Entry> es;
    for (const auto& p : pend) es.push_back({1, Strategy::var(p.name)});
    if (es.size() == 1) return Strategy::conj(std::move(es));
    // distinct indices are impossible beyond the arity; nest instead
    Strategy acc = Strategy::at(1, Strategy::var(pend.back().name));
    for (std::size_t k = pend.size() - 1; k-- > 0;)
      acc = Strategy::choice(Strategy::at(1, Strategy::var(pend[k].name)), acc);
    return acc;
  }

  Strategy mu(int b, std::vector<Pending> pend, int mu_left) {
    std::string x = fresh();
    pend.push_back({x, false});
    return Strategy::mu(x, gen(b, std::move(pend), mu_left - 1));
  }

  Strategy conj(int b, const std::vector<Pending>& pend, int mu_left) {
    std::vector<Index> idx;
    for (int k = 1; k <= max_arity_; ++k) idx.push_back(k);
    for (std::size_t k = idx.size(); k > 1; --k) std::swap(idx[k - 1], idx[static_cast<std::size_t>(rng_.below(static_cast<int>(k)))]);
    int numeric = idx.empty() ? 0 : 1 + rng_.below(std::min<int>(3, static_cast<int>(idx.size())));
    bool root = idx.empty() || rng_.chance(0.3);
    if (!pend.empty() && numeric == 0) return force(pend);
    idx.resize(static_cast<std::size_t>(numeric));
    int entries = numeric + (root ? 1 : 0);
    int sub = entries == 1 ? b - 1 : b - 2;
    std::vector<std::vector<Pending>> share(idx.size());
    for (auto p : pend) {
      p.guarded = true;
      share[static_cast<std::size_t>(rng_.below(numeric))].push_back(p);
    }
    std::vector<Strategy::Entry> es;
    for (std::size_t k = 0; k < idx.size(); ++k) es.push_back({idx[k], gen(sub, share[k], mu_left)});
    if (root) es.push_back({kRootIndex, ins()});
    return Strategy::conj(std::move(es));
  }

  const GenConfig& cfg_;
  Rng& rng_;
  int max_arity_;
  int counter_ = 0;
};

bool within_bounds(const GenConfig& cfg, const Strategy& s) {
  return tree_depth(s) <= cfg.max_strategy_depth && star_height(s) <= cfg.max_mu_nesting && validate(s).ok();
}

}  // namespace

Context gen_context(const Signature& sig, Rng& rng) { return Context::from_tree(gen_context_tree(sig, 2, rng)); }

Strategy gen_strategy(const GenConfig& cfg, Rng& rng) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    StrategyGen g(cfg, rng);
    Strategy s = g.gen(cfg.max_strategy_depth, {}, cfg.max_mu_nesting);
    if (within_bounds(cfg, s)) return s;
  }
  return Strategy::fail();
}

Strategy gen_strategy(const GenConfig& cfg, std::uint64_t i) {
  Rng rng(cfg.seed, i * 2);
  return gen_strategy(cfg, rng);
}

namespace {

// Body T of a binder mu X. T, with X placed under a jump or most().
std::pair<std::string, Strategy> gen_mu_body(const GenConfig& cfg, Rng& rng) {
  GenConfig inner = cfg;
  inner.max_mu_nesting = std::max(0, cfg.max_mu_nesting - 1);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    StrategyGen g(cfg, rng);
    std::string x = g.fresh();
    Strategy body = g.gen(cfg.max_strategy_depth, {{x, false}}, inner.max_mu_nesting);
    if (within_bounds(cfg, Strategy::mu(x, body))) return {x, body};
  }
  return {"X0", Strategy::choice(Strategy::ins(Context::hole()), Strategy::most(Strategy::var("X0")))};
}

}  // namespace

// ---------------------------------------------------------------- reports

void Report::fail(long index, json inputs, json expected, json got, const std::string& check) {
  ++failure_count;
  ++failures_by_check[check.empty() ? "unnamed" : check];
  if (failures.size() >= 20) return;
  json f = {{"index", index}, {"inputs", std::move(inputs)}, {"expected", std::move(expected)}, {"got", std::move(got)}};
  if (!check.empty()) f["check"] = check;
  failures.push_back(std::move(f));
}

json Report::to_json(bool with_time) const {
  json j = {{"suite", suite}, {"seed", seed}, {"cases", cases}, {"failure_count", failure_count},
            {"failures", failures}};
  if (outputs_checked) j["outputs_checked"] = outputs_checked;
  if (!failures_by_check.empty()) j["failures_by_check"] = failures_by_check;
  if (!extra.empty()) j["extra"] = extra;
  if (with_time) j["wall_time_ms"] = wall_time_ms;
  return j;
}

namespace {

class Timer {
 public:
  explicit Timer(Report& r) : r_(r), start_(std::chrono::steady_clock::now()) {}
  ~Timer() {
    r_.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  Report& r_;
  std::chrono::steady_clock::time_point start_;
};

Report start(const std::string& name, const GenConfig& cfg) {
  Report r;
  r.suite = name;
  r.seed = cfg.seed;
  r.extra["merge"] = to_string(cfg.merge_mode);
  return r;
}

UnifyOptions options_for(const GenConfig& cfg, MergeMode mode) {
  UnifyOptions o;
  o.merge = mode;
  o.signature = cfg.signature;
  o.strict_measure = false;
  return o;
}

// Runs `f` and turns measure violations or exceptions into report entries.
template <class F>
std::optional<Strategy> guarded_run(Report& rep, long index, const json& inputs, const char* what, F&& f) {
  UnifyStats before = global_unify_stats();
  try {
    Strategy out = f();
    UnifyStats after = global_unify_stats();
    if (after.measure_violations != before.measure_violations)
      rep.fail(index, inputs, "strictly decreasing measure",
               after.measure_violations - before.measure_violations, std::string(what) + ":measure");
    ++rep.outputs_checked;
    if (!validate(out).monotone) rep.fail(index, inputs, "monotone output", out.str(), std::string(what) + ":monotone");
    return out;
  } catch (const std::exception& e) {
    rep.fail(index, inputs, "normal form", e.what(), std::string(what) + ":exception");
    return std::nullopt;
  }
}

// The position-based image must act on t exactly as the strategy does.
void homomorphism_on(Report& rep, long index, const json& inputs, const Strategy& s, const Term& t) {
  PosCE e = psi(s, t);
  Outcome via = apply_pos_ce(e, t);
  Outcome direct = eval(s, t);
  if (!(via == direct))
    rep.fail(index, {{"case", inputs}, {"strategy", s.str()}, {"t", t.str()}}, direct.str(), via.str(),
             "homomorphism");
}

struct Equiv {
  bool ok = true;
  std::optional<Term> witness;
  std::string left, right;
};

// Equivalence up to depth n is semantic: same result on every listed term.
// With `via_psi` the stronger position-based images must coincide as well
// (they can differ on equivalent strategies, e.g. ins <[]> against @1.ins <[]>).
Equiv equiv_n(const Strategy& a, const Strategy& b, const std::vector<Term>& terms, bool via_psi = false) {
  for (const auto& t : terms) {
    if (via_psi) {
      PosCE l = psi(a, t), r = psi(b, t);
      if (!eq_pos(l, r)) return {false, t, l.str(), r.str()};
    } else {
      Outcome l = eval(a, t), r = eval(b, t);
      if (!(l == r)) return {false, t, l.str(), r.str()};
    }
  }
  return {};
}

json case_inputs(const GenConfig& cfg, long index, std::initializer_list<std::pair<const char*, std::string>> kv) {
  json j = {{"seed", cfg.seed}, {"index", index}};
  for (const auto& [k, v] : kv) j[k] = v;
  return j;
}

Report theorem(const GenConfig& cfg, bool combination) {
  Report rep = start(combination ? "theorem2" : "theorem1", cfg);
  Timer timer(rep);
  UnifyOptions opts = options_for(cfg, cfg.merge_mode);
  for (long i = 0; i < cfg.cases; ++i) {
    Rng rng(cfg.seed, static_cast<std::uint64_t>(i));
    Strategy s = gen_strategy(cfg, rng);
    Strategy r = gen_strategy(cfg, rng);
    std::vector<Term> ts;
    for (int k = 0; k < 3; ++k) ts.push_back(gen_term(cfg.signature, cfg.max_term_depth, rng));
    json in = case_inputs(cfg, i, {{"S", s.str()}, {"R", r.str()}});
    in["terms"] = json::array();
    for (const auto& t : ts) in["terms"].push_back(t.str());
    ++rep.cases;
    auto u = guarded_run(rep, i, in, combination ? "combine" : "unify",
                         [&] { return combination ? combine(s, r, opts) : unify(s, r, opts); });
    if (!u) continue;
    for (const auto& t : ts) {
      PosCE lhs = psi(*u, t);
      PosCE ps = psi(s, t), pr = psi(r, t);
      PosCE rhs = combination ? combine_pos(ps, pr, cfg.merge_mode) : unify_pos(ps, pr, cfg.merge_mode);
      if (!eq_pos(lhs, rhs)) {
        json at = in;
        at["t"] = t.str();
        rep.fail(i, at, rhs.str(), lhs.str(), "psi");
      }
      homomorphism_on(rep, i, in, *u, t);
      homomorphism_on(rep, i, in, s, t);
      homomorphism_on(rep, i, in, r, t);
    }
  }
  return rep;
}

}  // namespace

Report check_homomorphism(const GenConfig& cfg) {
  Report rep = start("homomorphism", cfg);
  Timer timer(rep);
  for (long i = 0; i < cfg.cases; ++i) {
    Rng rng(cfg.seed, static_cast<std::uint64_t>(i));
    Strategy s = gen_strategy(cfg, rng);
    Term t = gen_term(cfg.signature, cfg.max_term_depth, rng);
    ++rep.cases;
    PosCE e = psi(s, t);
    if (auto wf = is_well_founded(e); !wf.ok)
      rep.fail(i, case_inputs(cfg, i, {{"S", s.str()}, {"t", t.str()}}), "well-founded", e.str(), "well_founded");
    homomorphism_on(rep, i, case_inputs(cfg, i, {{"S", s.str()}, {"t", t.str()}}), s, t);
  }
  return rep;
}

Report check_theorem1(const GenConfig& cfg) { return theorem(cfg, false); }
Report check_theorem2(const GenConfig& cfg) { return theorem(cfg, true); }

std::optional<json> check_unfold_oracle(const Strategy& s, const Strategy& r, int n, const Signature& sig,
                                        int shift, MergeMode mode, std::vector<Strategy>* outputs) {
  for (const auto* x : {&s, &r})
    if (!validate(*x).ok()) throw ValidationFailure("unfold oracle input is not valid: " + x->str());
  UnifyOptions opts;
  opts.merge = mode;
  opts.signature = sig;
  opts.strict_measure = false;
  int m = n + shift;
  Strategy lhs = unify(s, r, opts);
  Strategy su = unfold(s, constant_map(s, m)), ru = unfold(r, constant_map(r, m));
  Strategy rhs = unify(su, ru, opts);
  if (outputs) *outputs = {lhs, rhs};
  Equiv eq = equiv_n(lhs, rhs, all_terms(sig, n), true);
  if (eq.ok) return std::nullopt;
  return json{{"n", n}, {"unfold_at", m}, {"t", eq.witness->str()}, {"unified", eq.left},
              {"unified_unfoldings", eq.right}};
}

Report check_unfold_suite(const GenConfig& cfg, int shift) {
  Report rep = start(shift == 0 ? "unfold" : "unfold-shifted", cfg);
  rep.extra["unfold_at"] = shift == 0 ? "n" : "n+" + std::to_string(shift);
  Timer timer(rep);
  for (long i = 0; i < cfg.cases; ++i) {
    Rng rng(cfg.seed, static_cast<std::uint64_t>(i));
    Strategy s = gen_strategy(cfg, rng);
    Strategy r = gen_strategy(cfg, rng);
    json in = case_inputs(cfg, i, {{"S", s.str()}, {"R", r.str()}});
    ++rep.cases;
    for (int n = 0; n <= 2; ++n) {
      try {
        UnifyStats before = global_unify_stats();
        std::vector<Strategy> outs;
        auto bad = check_unfold_oracle(s, r, n, cfg.signature, shift, cfg.merge_mode, &outs);
        long v = global_unify_stats().measure_violations - before.measure_violations;
        if (v) rep.fail(i, in, "strictly decreasing measure", v, "unify:measure");
        for (const auto& o : outs) {
          ++rep.outputs_checked;
          if (!validate(o).monotone) rep.fail(i, in, "monotone output", o.str(), "unify:monotone");
        }
        if (bad) rep.fail(i, in, "equivalent up to depth n", *bad, "equiv_n");
      } catch (const std::exception& e) {
        rep.fail(i, in, "normal form", e.what(), "exception");
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------- algebra

namespace {

Strategy context_ins(const char* ctx) { return Strategy::ins(parse_context(ctx)); }

}  // namespace

Report check_algebra(const GenConfig& cfg) {
  Report rep = start("algebra", cfg);
  Timer timer(rep);
  UnifyOptions opts = options_for(cfg, cfg.merge_mode);
  UnifyOptions lp = options_for(cfg, MergeMode::LeftProject);
  UnifyOptions nested = opts;  // second-level inputs are earlier outputs
  nested.require_linear = false;
  const std::vector<Term> terms = all_terms(cfg.signature, 2);
  std::map<std::string, long> checked;

  auto law = [&](long i, const json& in, const char* name, const Strategy& a, const Strategy& b) {
    ++checked[name];
    Equiv eq = equiv_n(a, b, terms);
    if (!eq.ok) {
      json at = in;
      at["t"] = eq.witness->str();
      rep.fail(i, at, eq.right, eq.left, name);
    }
  };

  for (long i = 0; i < cfg.cases; ++i) {
    Rng rng(cfg.seed, static_cast<std::uint64_t>(i));
    Strategy s1 = gen_strategy(cfg, rng), s2 = gen_strategy(cfg, rng), s3 = gen_strategy(cfg, rng);
    json in = case_inputs(cfg, i, {{"S1", s1.str()}, {"S2", s2.str()}, {"S3", s3.str()}});
    ++rep.cases;
    auto run = [&](const char* what, auto&& f) { return guarded_run(rep, i, in, what, f); };

    auto u12 = run("unify", [&] { return unify(s1, s2, opts); });
    auto u23 = run("unify", [&] { return unify(s2, s3, opts); });
    if (u12 && u23) {
      auto l = run("unify", [&] { return unify(*u12, s3, nested); });
      auto r = run("unify", [&] { return unify(s1, *u23, nested); });
      if (l && r) law(i, in, "assoc_unify", *l, *r);
    }
    auto c12 = run("combine", [&] { return combine(s1, s2, opts); });
    auto c23 = run("combine", [&] { return combine(s2, s3, opts); });
    if (c12 && c23) {
      auto l = run("combine", [&] { return combine(*c12, s3, nested); });
      auto r = run("combine", [&] { return combine(s1, *c23, nested); });
      if (l && r) law(i, in, "assoc_combine", *l, *r);
    }

    const Strategy id = Strategy::ins(Context::hole());
    const Strategy fl = Strategy::fail();
    if (auto x = run("unify", [&] { return unify(id, s1, opts); })) law(i, in, "neutral_unify_left", *x, s1);
    if (auto x = run("unify", [&] { return unify(s1, id, opts); })) law(i, in, "neutral_unify_right", *x, s1);
    if (auto x = run("combine", [&] { return combine(fl, s1, opts); })) law(i, in, "neutral_combine_left", *x, s1);
    if (auto x = run("combine", [&] { return combine(s1, fl, opts); })) law(i, in, "neutral_combine_right", *x, s1);
    if (auto x = run("unify", [&] { return unify(fl, s1, opts); })) law(i, in, "absorbing_left", *x, fl);
    if (auto x = run("unify", [&] { return unify(s1, fl, opts); })) law(i, in, "absorbing_right", *x, fl);

    // congruence: an alpha-variant, and an eval-equivalent syntactic variant
    Namer vn("V");
    const Strategy variants[] = {alpha_rename(s1, vn), Strategy::choice(s1, fl)};
    if (u12)
      for (const auto& v : variants)
        if (auto x = run("unify", [&] { return unify(v, s2, opts); })) law(i, in, "congruence_unify", *x, *u12);
    if (c12)
      for (const auto& v : variants)
        if (auto x = run("combine", [&] { return combine(v, s2, opts); })) law(i, in, "congruence_combine", *x, *c12);

    // pointwise non-degeneracy
    if (u12) {
      ++checked["nondegeneracy_pointwise"];
      for (const auto& t : terms) {
        bool lhs = psi(*u12, t).is_fail();
        bool rhs = psi(s1, t).is_fail() || psi(s2, t).is_fail();
        if (lhs != rhs) {
          json at = in;
          at["t"] = t.str();
          rep.fail(i, at, rhs, lhs, "nondegeneracy_pointwise");
          break;
        }
      }
    }

    if (auto x = run("unify", [&] { return unify(s1, s1, lp); })) law(i, in, "idempotence_leftproject", *x, s1);
  }

  // Laws that must break: recorded as confirmed counterexamples.
  json expected = json::array();
  UnifyOptions nest = options_for(cfg, MergeMode::Nest);
  nest.signature = demo_signature();
  const std::vector<Term> small = all_terms(default_signature(), 1);
  auto expect_break = [&](const char* name, const Strategy& a, const Strategy& b) {
    Equiv eq = equiv_n(a, b, small);
    json rec = {{"law", name}, {"left", a.str()}, {"right", b.str()}, {"broken", !eq.ok}};
    if (!eq.ok) {
      rec["t"] = eq.witness->str();
      rec["left_result"] = eq.left;
      rec["right_result"] = eq.right;
    } else {
      rep.fail(-1, rec, "counterexample", "law held", name);
    }
    expected.push_back(rec);
  };
  Strategy li = context_ins("list([], i)"), lj = context_ins("list([], j)");
  expect_break("idempotence_nest", unify(li, li, nest), li);
  expect_break("commutativity_nest", unify(li, lj, nest), unify(lj, li, nest));
  {
    // neither side is fail-equivalent, the unification is
    Strategy sa = Strategy::guard(parse_term("a"), li), sb = Strategy::guard(parse_term("b"), li);
    Strategy u = unify(sa, sb, nest);
    bool all_fail = std::all_of(small.begin(), small.end(), [&](const Term& t) { return psi(u, t).is_fail(); });
    bool sides_fail = std::all_of(small.begin(), small.end(), [&](const Term& t) { return psi(sa, t).is_fail(); }) ||
                      std::all_of(small.begin(), small.end(), [&](const Term& t) { return psi(sb, t).is_fail(); });
    json rec = {{"law", "nondegeneracy_only_if"}, {"left", sa.str()}, {"right", sb.str()},
                {"broken", all_fail && !sides_fail}};
    if (!(all_fail && !sides_fail)) rep.fail(-1, rec, "counterexample", "law held", "nondegeneracy_only_if");
    expected.push_back(rec);
  }
  rep.extra["expected_counterexamples"] = expected;
  rep.extra["checks"] = checked;
  return rep;
}

// ---------------------------------------------------------------- fixed points

Report check_fixed_point(const GenConfig& cfg, int shift) {
  Report rep = start(shift == 0 ? "fixedpoint" : "fixedpoint-shifted", cfg);
  rep.extra["iterations"] = shift == 0 ? "depth(t)+m" : "depth(t)+m+" + std::to_string(shift);
  Timer timer(rep);
  for (long i = 0; i < cfg.cases; ++i) {
    Rng rng(cfg.seed, static_cast<std::uint64_t>(i));
    auto [x, body] = gen_mu_body(cfg, rng);
    Term t = gen_term(cfg.signature, cfg.max_term_depth, rng);
    Strategy fix = Strategy::mu(x, body);
    json in = case_inputs(cfg, i, {{"T", body.str()}, {"X", x}, {"t", t.str()}});
    ++rep.cases;
    Outcome want = eval(fix, t);
    for (int m = 0; m <= 2; ++m) {
      Outcome got = eval(mu_iterate(x, body, depth(t) + m + shift), t);
      if (!(got == want)) {
        json at = in;
        at["m"] = m;
        rep.fail(i, at, want.str(), got.str(), "iterate");
      }
    }
    homomorphism_on(rep, i, in, fix, t);
  }
  return rep;
}

namespace {

// Top-down traversal replayed directly: first success at the root, else in every child.
Outcome td_replay(const Strategy& s, const Term& t) {
  Outcome here = eval(s, t);
  if (!here.failed()) return here;
  Term cur = t;
  bool any = false;
  for (std::size_t k = 1; k <= t.arity(); ++k) {
    Outcome r = td_replay(s, t.child(k));
    if (!r.failed()) {
      cur = replace_at(cur, Position({static_cast<int>(k)}), r.term());
      any = true;
    }
  }
  return any ? Outcome(cur) : Outcome::failure();
}

}  // namespace

Report check_topdown(const GenConfig& cfg, int term_depth) {
  Report rep = start("topdown", cfg);
  Timer timer(rep);
  const std::vector<Term> terms = all_terms(cfg.signature, term_depth);
  for (long i = 0; i < cfg.cases; ++i) {
    Strategy s = gen_strategy(cfg, static_cast<std::uint64_t>(i));
    Strategy td = Strategy::mu("TD", Strategy::choice(s, Strategy::most(Strategy::var("TD"))));
    ++rep.cases;
    for (const auto& t : terms) {
      Outcome want = td_replay(s, t), got = eval(td, t);
      if (!(want == got)) {
        rep.fail(i, case_inputs(cfg, i, {{"S", s.str()}, {"t", t.str()}}), want.str(), got.str(), "topdown");
        break;
      }
    }
  }
  rep.extra["terms_per_case"] = terms.size();
  return rep;
}

Report run_suite(const std::string& name, const GenConfig& cfg) {
  if (name == "theorem1") return check_theorem1(cfg);
  if (name == "theorem2") return check_theorem2(cfg);
  if (name == "unfold") return check_unfold_suite(cfg, 0);
  if (name == "unfold-shifted") return check_unfold_suite(cfg, 1);
  if (name == "algebra") return check_algebra(cfg);
  if (name == "homomorphism") return check_homomorphism(cfg);
  if (name == "fixedpoint") return check_fixed_point(cfg, 0);
  if (name == "fixedpoint-shifted") return check_fixed_point(cfg, 1);
  if (name == "topdown") return check_topdown(cfg);
  throw std::invalid_argument("unknown suite: " + name);
}

}  // namespace ces
