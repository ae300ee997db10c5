#include "ces/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ces/oracle.hpp"
#include "ces/psi.hpp"
#include "ces/unify.hpp"

namespace ces {

namespace {

using nlohmann::json;

// Failure of an input: reported on stderr, exit 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Source {
  std::string name;
  std::string text;
};

// A file path if one exists, otherwise the text itself.
Source load(const std::string& arg) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(arg, ec)) {
    std::ifstream in(arg);
    std::stringstream ss;
    ss << in.rdbuf();
    return {arg, ss.str()};
  }
  return {"<arg>", arg};
}

template <class F>
auto parsed(const Source& src, F&& f) {
  try {
    return f(src.text);
  } catch (const ParseError& e) {
    throw InputError(src.name + ":" + e.what());
  } catch (const TermError& e) {
    throw InputError(src.name + ": " + e.what());
  }
}

Strategy read_strategy(const std::string& arg) {
  // engine-generated names (X#1, Z#0) are accepted so printed outputs feed back in
  return parsed(load(arg), [](const std::string& t) { return parse_strategy(t, {.allow_reserved = true}); });
}

Term read_term(const std::string& arg) {
  return parsed(load(arg), [](const std::string& t) { return parse_term(t); });
}

void absorb(Signature& sig, const Strategy& s) {
  using K = Strategy::Kind;
  switch (s.kind()) {
    case K::Ins:
      sig.absorb(s.context());
      return;
    case K::Guard:
      sig.absorb(s.pattern());
      absorb(sig, s.body());
      return;
    case K::Mu:
    case K::Most:
      absorb(sig, s.body());
      return;
    case K::Choice:
      absorb(sig, s.left());
      absorb(sig, s.right());
      return;
    case K::IfThen:
      absorb(sig, s.cond());
      absorb(sig, s.body());
      return;
    case K::Conj:
      for (const auto& e : s.entries()) absorb(sig, e.body);
      return;
    default:
      return;
  }
}

// Declared signature checked against the inputs, or one inferred from them.
Signature signature_for(const std::string& file, const std::vector<Strategy>& ss, const std::vector<Term>& ts) {
  Signature inferred;
  std::optional<Signature> declared;
  if (!file.empty()) {
    Source src = load(file);
    if (src.name == "<arg>") throw InputError("signature file not found: " + file);
    declared = parsed(src, [](const std::string& t) { return Signature::parse(t); });
    inferred = *declared;
  }
  try {
    for (const auto& s : ss) absorb(inferred, s);
    for (const auto& t : ts) inferred.absorb(t);
  } catch (const TermError& e) {
    throw InputError(std::string("inconsistent arities: ") + e.what());
  }
  if (declared && inferred.symbols() != declared->symbols()) {
    for (const auto& [name, ar] : inferred.symbols())
      if (!declared->contains(name)) throw InputError("undeclared symbol: " + name + "/" + std::to_string(ar));
  }
  return inferred;
}

UnfoldMap parse_map(const std::string& text) {
  UnfoldMap m;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw InputError("--map: expected X=n, got '" + item + "'");
    try {
      std::size_t used = 0;
      int n = std::stoi(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1 || n < 0) throw std::invalid_argument("");
      m[item.substr(0, eq)] = n;
    } catch (const std::logic_error&) {
      throw InputError("--map: bad count in '" + item + "'");
    }
  }
  return m;
}

struct Flags {
  std::string term, strategy, left, right, map, signature, suite;
  std::string merge = "nest";
  int n = -1;
  int depth = 3;
  int cases = 100;
  std::uint64_t seed = 0;
  bool json = false;
  bool trace = false;
  bool no_time = false;
};

int cmd_apply(const Flags& f, std::ostream& out) {
  Strategy s = read_strategy(f.strategy);
  Term t = read_term(f.term);
  signature_for(f.signature, {s}, {t});
  if (auto fv = free_vars(s); !fv.empty()) throw InputError("free fixed-point variable " + *fv.begin());
  Outcome r = eval(s, t);
  out << r.str() << "\n";
  return r.failed() ? 1 : 0;
}

int cmd_unify(const Flags& f, bool combination, std::ostream& out, std::ostream& err) {
  Strategy s = read_strategy(f.left);
  Strategy r = read_strategy(f.right);
  UnifyOptions opts;
  opts.merge = parse_merge_mode(f.merge);
  opts.signature = signature_for(f.signature, {s, r}, {});
  if (f.trace) opts.trace = [&err](const std::string& line) { err << line << "\n"; };
  Strategy u = Strategy::fail();
  try {
    u = combination ? combine(s, r, opts) : unify(s, r, opts);
  } catch (const ValidationFailure& e) {
    throw InputError(e.what());
  }
  if (f.json)
    out << json{{"strategy", u.str()}, {"ast", u.to_json()}}.dump() << "\n";
  else
    out << u.str() << "\n";
  return 0;
}

int cmd_psi(const Flags& f, std::ostream& out) {
  Strategy s = read_strategy(f.strategy);
  Term t = read_term(f.term);
  signature_for(f.signature, {s}, {t});
  if (auto fv = free_vars(s); !fv.empty()) throw InputError("free fixed-point variable " + *fv.begin());
  out << psi(s, t).str() << "\n";
  return 0;
}

int cmd_check(const Flags& f, std::ostream& out) {
  Strategy s = read_strategy(f.strategy);
  signature_for(f.signature, {s}, {});
  Validation v = validate(s);
  if (f.json) {
    out << json{{"closed", v.closed},
                {"monotone", v.monotone},
                {"linear", v.linear},
                {"well_founded", v.well_founded},
                {"star_height", star_height(s)},
                {"tree_depth", tree_depth(s)},
                {"diagnostics", v.diagnostics}}
               .dump()
        << "\n";
  } else {
    auto yn = [](bool b) { return b ? "yes" : "no"; };
    out << "closed: " << yn(v.closed) << "\nmonotone: " << yn(v.monotone) << "\nlinear: " << yn(v.linear)
        << "\nwell_founded: " << yn(v.well_founded) << "\nstar_height: " << star_height(s)
        << "\ntree_depth: " << tree_depth(s) << "\n";
    for (const auto& d : v.diagnostics) out << "violation: " << d << "\n";
  }
  return v.ok() ? 0 : 1;
}

int cmd_unfold(const Flags& f, std::ostream& out) {
  Strategy s = read_strategy(f.strategy);
  signature_for(f.signature, {s}, {});
  if ((f.n >= 0) == !f.map.empty()) throw InputError("unfold needs exactly one of --n and --map");
  UnfoldMap m = f.n >= 0 ? constant_map(s, f.n) : parse_map(f.map);
  try {
    out << unfold(s, m).str() << "\n";
  } catch (const IncompleteMap& e) {
    throw InputError(e.what());
  }
  return 0;
}

int cmd_verify(const Flags& f, std::ostream& out) {
  GenConfig cfg;
  if (!f.signature.empty()) cfg.signature = signature_for(f.signature, {}, {});
  if (!cfg.signature.has_constant()) throw InputError("signature needs a constant");
  cfg.max_term_depth = f.depth;
  cfg.cases = f.cases;
  cfg.seed = f.seed;
  cfg.merge_mode = parse_merge_mode(f.merge);
  Report r = run_suite(f.suite, cfg);
  out << r.to_json(!f.no_time).dump(2) << "\n";
  return r.ok() ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Unification and combination of context-embedding strategies", "ces"};
  app.require_subcommand(1, 1);
  Flags f;

  auto add_sig = [&](CLI::App* c) {
    c->add_option("--signature", f.signature, "File of name/arity lines");
  };
  auto add_merge = [&](CLI::App* c) {
    c->add_option("--merge", f.merge, "Context merge")->check(CLI::IsMember({"nest", "leftproject"}));
  };

  auto* apply = app.add_subcommand("apply", "Apply a strategy to a term");
  apply->add_option("--term", f.term, "Term or file")->required();
  apply->add_option("--strategy", f.strategy, "Strategy or file")->required();
  add_sig(apply);

  CLI::App* pair[2];
  const char* names[2] = {"unify", "combine"};
  for (int k = 0; k < 2; ++k) {
    auto* c = pair[k] = app.add_subcommand(names[k], k == 0 ? "Unify two strategies" : "Combine two strategies");
    c->add_option("--left", f.left, "Strategy or file")->required();
    c->add_option("--right", f.right, "Strategy or file")->required();
    c->add_flag("--json", f.json, "Also print the syntax tree as JSON");
    c->add_flag("--trace", f.trace, "One JSON line per reduction step on stderr");
    add_merge(c);
    add_sig(c);
  }

  auto* psi_cmd = app.add_subcommand("psi", "Position-based image of a strategy on a term");
  psi_cmd->add_option("--term", f.term, "Term or file")->required();
  psi_cmd->add_option("--strategy", f.strategy, "Strategy or file")->required();
  add_sig(psi_cmd);

  auto* check = app.add_subcommand("check", "Validate a strategy");
  check->add_option("--strategy", f.strategy, "Strategy or file")->required();
  check->add_flag("--json", f.json, "JSON output");
  add_sig(check);

  auto* unf = app.add_subcommand("unfold", "Replace fixed points by iterates");
  unf->add_option("--strategy", f.strategy, "Strategy or file")->required();
  unf->add_option("--n", f.n, "Same count for every binder")->check(CLI::NonNegativeNumber);
  unf->add_option("--map", f.map, "Per-binder counts, X=3,Y=2");
  add_sig(unf);

  auto* verify = app.add_subcommand("verify", "Run a seeded oracle suite");
  verify->add_option("--suite", f.suite, "Suite name")
      ->required()
      ->check(CLI::IsMember({"theorem1", "theorem2", "unfold", "algebra", "homomorphism", "unfold-shifted",
                             "fixedpoint", "fixedpoint-shifted", "topdown"}));
  verify->add_option("--cases", f.cases, "Number of generated cases")->check(CLI::NonNegativeNumber);
  verify->add_option("--seed", f.seed, "Generator seed");
  verify->add_option("--depth", f.depth, "Maximum generated term depth")->check(CLI::NonNegativeNumber);
  verify->add_flag("--no-time", f.no_time, "Omit wall_time_ms from the report");
  add_merge(verify);
  add_sig(verify);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 2;
  }

  // Output is buffered so that nothing reaches stdout on exit 2.
  std::ostringstream buf;
  int code = 0;
  try {
    if (*apply) code = cmd_apply(f, buf);
    else if (*pair[0]) code = cmd_unify(f, false, buf, err);
    else if (*pair[1]) code = cmd_unify(f, true, buf, err);
    else if (*psi_cmd) code = cmd_psi(f, buf);
    else if (*check) code = cmd_check(f, buf);
    else if (*unf) code = cmd_unfold(f, buf);
    else if (*verify) code = cmd_verify(f, buf);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  out << buf.str();
  return code;
}

}  // namespace ces
