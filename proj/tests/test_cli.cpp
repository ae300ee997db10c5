#include <doctest.h>

#include <json.hpp>
#include <sstream>

#include "ces/cli.hpp"
#include "support.hpp"

using namespace ces;

namespace {

struct Run {
  int rc;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int rc = run_cli(args, out, err);
  return {rc, out.str(), err.str()};
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == ' ')) s.pop_back();
  return s;
}

const std::string kS = CES_DATA_DIR "/s.ces";
const std::string kS2 = CES_DATA_DIR "/sprime.ces";

}  // namespace

TEST_CASE("apply") {
  auto r = cli({"apply", "--term", "var(x, reg(omega, one))", "--strategy", "ins <list([], i)>"});
  CHECK(r.rc == 0);
  CHECK(trim(r.out) == "list(var(x, reg(omega, one)), i)");
  r = cli({"apply", "--term", "a", "--strategy", "fail"});
  CHECK(r.rc == 1);
  CHECK(trim(r.out) == "FAIL");
  r = cli({"apply", "--term", "g(f(a), b)", "--strategy", kS});
  CHECK(trim(r.out) == "f(g(f(a), b))");
}

TEST_CASE("unify and combine on the data files") {
  auto r = cli({"unify", "--left", kS, "--right", kS2});
  REQUIRE(r.rc == 0);
  Strategy s = parse_strategy("mu X. (g(?x, b) ; ins <f([])>) + @1.X");
  Strategy s2 = parse_strategy("mu Y. (g(f(?w), ?z) ; ins <g([], b)>) + @1.Y");
  Strategy got = parse_strategy(trim(r.out), {.allow_reserved = true});
  CHECK(alpha_equal(got, unify(s, s2)));

  auto j = cli({"combine", "--left", kS, "--right", kS2, "--json"});
  REQUIRE(j.rc == 0);
  auto doc = nlohmann::json::parse(j.out);
  Strategy c = combine(s, s2);
  CHECK(alpha_equal(strategy_from_json(doc["ast"]), c));
  CHECK(alpha_equal(parse_strategy(doc["strategy"].get<std::string>(), {.allow_reserved = true}), c));

  // the printed result can be fed back in
  auto again = cli({"apply", "--term", "g(f(a), b)", "--strategy", trim(r.out)});
  CHECK(again.rc == 0);
  CHECK(trim(again.out) == "f(g(g(f(a), b), b))");

  auto lp = cli({"unify", "--left", "ins <list([], i)>", "--right", "ins <list([], j)>", "--merge", "leftproject"});
  CHECK(trim(lp.out) == "ins <list([], i)>");
}

TEST_CASE("trace goes to stderr as JSON lines") {
  auto r = cli({"unify", "--left", "a ; ins <f([])>", "--right", "ins <f([])>", "--trace"});
  CHECK(r.rc == 0);
  std::istringstream lines(r.err);
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) {
    auto j = nlohmann::json::parse(line);
    CHECK(j.contains("rule"));
    ++n;
  }
  CHECK(n == 2);
  CHECK(trim(r.out) == "a ; ins <f(f([]))>");
}

TEST_CASE("psi, check, unfold") {
  auto p = cli({"psi", "--strategy", kS, "--term", "f(g(a, b))"});
  CHECK(trim(p.out) == "[@1.<f([])>]");
  CHECK(cli({"psi", "--strategy", kS, "--term", "a"}).out == "fail\n");

  auto ok = cli({"check", "--strategy", kS});
  CHECK(ok.rc == 0);
  CHECK(ok.out.find("monotone: yes") != std::string::npos);
  auto bad = cli({"check", "--strategy", "mu X. X"});
  CHECK(bad.rc == 1);
  CHECK(bad.out.find("violation:") != std::string::npos);

  CHECK(trim(cli({"unfold", "--strategy", kS, "--n", "1"}).out) == "g(?x, b) ; ins <f([])> + @1.fail");
  CHECK(trim(cli({"unfold", "--strategy", kS, "--map", "X=0"}).out) == "fail");
  CHECK(cli({"unfold", "--strategy", kS}).rc == 2);
}

TEST_CASE("verify") {
  auto a = cli({"verify", "--suite", "theorem2", "--cases", "20", "--seed", "3", "--no-time"});
  auto b = cli({"verify", "--suite", "theorem2", "--cases", "20", "--seed", "3", "--no-time"});
  CHECK(a.rc == 0);
  CHECK(a.out == b.out);
  auto j = nlohmann::json::parse(a.out);
  CHECK(j["suite"] == "theorem2");
  CHECK(j["cases"] == 20);
  CHECK_FALSE(j.contains("wall_time_ms"));
  CHECK(nlohmann::json::parse(cli({"verify", "--suite", "homomorphism", "--cases", "5"}).out).contains("wall_time_ms"));
  CHECK(cli({"verify", "--suite", "unfold", "--cases", "200"}).rc == 1);
}

TEST_CASE("input errors") {
  auto r = cli({"apply", "--term", "g(a", "--strategy", "fail"});
  CHECK(r.rc == 2);
  CHECK(r.out.empty());
  CHECK(r.err.rfind("error: <arg>:1:", 0) == 0);
  CHECK(cli({"apply", "--term", "h(a)", "--strategy", "fail", "--signature", CES_DATA_DIR "/missing.sig"}).rc == 2);
  CHECK(cli({"frobnicate"}).rc == 2);
  CHECK(cli({"unify", "--left", "mu X. X", "--right", "fail"}).rc == 2);
}
