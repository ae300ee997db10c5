#pragma once

// Seeded generators and differential suites over the strategy engine.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "ces/pos_strategy.hpp"
#include "ces/strategy.hpp"
#include "ces/unify.hpp"

namespace ces {

// {a/0, b/0, f/1, g/2}
Signature default_signature();
// The default plus the symbols used by the worked examples (list, index, var, reg, d, ...).
Signature demo_signature();

struct GenConfig {
  Signature signature = default_signature();
  int max_term_depth = 3;
  // Bound on tree_depth of generated strategies.
  int max_strategy_depth = 4;
  // Bound on star height.
  int max_mu_nesting = 2;
  std::uint64_t seed = 0;
  int cases = 100;
  MergeMode merge_mode = MergeMode::Nest;
};

class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream);
  int below(int n);
  bool chance(double p);
  std::mt19937_64& engine() { return g_; }

 private:
  std::mt19937_64 g_;
};

// Every ground term of depth <= n, in a fixed order.
std::vector<Term> all_terms(const Signature& sig, int n);

Term gen_term(const GenConfig& cfg, std::uint64_t i);
Term gen_term(const Signature& sig, int max_depth, Rng& rng);
Context gen_context(const Signature& sig, Rng& rng);
// Closed, monotone, linear and well-founded by construction.
Strategy gen_strategy(const GenConfig& cfg, std::uint64_t i);
Strategy gen_strategy(const GenConfig& cfg, Rng& rng);

struct Report {
  std::string suite;
  std::uint64_t seed = 0;
  long cases = 0;
  long failure_count = 0;
  std::vector<nlohmann::json> failures;  // first few, with reproduction data
  std::map<std::string, long> failures_by_check;  // all of them, by check name
  long outputs_checked = 0;                        // unifier outputs validated for monotonicity
  double wall_time_ms = 0;
  nlohmann::json extra = nlohmann::json::object();

  bool ok() const { return failure_count == 0; }
  void fail(long index, nlohmann::json inputs, nlohmann::json expected, nlohmann::json got,
            const std::string& check = "");
  // Deterministic unless `with_time`.
  nlohmann::json to_json(bool with_time = true) const;
};

// eval(S, t) against the position-based image applied to t.
Report check_homomorphism(const GenConfig& cfg);
Report check_theorem1(const GenConfig& cfg);
Report check_theorem2(const GenConfig& cfg);

// Compares S unify R against the unification of unfoldings at n + shift,
// over all terms of depth <= n. nullopt when equivalent.
std::optional<nlohmann::json> check_unfold_oracle(const Strategy& s, const Strategy& r, int n,
                                                  const Signature& sig, int shift = 0,
                                                  MergeMode mode = MergeMode::Nest,
                                                  std::vector<Strategy>* outputs = nullptr);
// Over generated pairs and n in {0, 1, 2}.
Report check_unfold_suite(const GenConfig& cfg, int shift = 0);

Report check_algebra(const GenConfig& cfg);

// Fixed-point stabilization: iterate depth(t)+m+shift against the binder, m in {0,1,2}.
Report check_fixed_point(const GenConfig& cfg, int shift = 0);
// TD(S) = mu X. (S + most(X)) against a direct recursive replay.
Report check_topdown(const GenConfig& cfg, int term_depth = 3);

Report run_suite(const std::string& name, const GenConfig& cfg);

}  // namespace ces
