#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>

#include "helpers.hpp"

namespace {

struct RunOut {
  int exitCode;
  std::string out;
};

RunOut run_cli(const std::string& args) {
#ifdef LGT_CLI_PATH
  std::string cmd = std::string(LGT_CLI_PATH) + " " + args + " 2>/dev/null";
#else
  std::string cmd = "./lgt " + args + " 2>/dev/null";
#endif
  std::array<char, 4096> buf{};
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
  int status = pclose(p);
  int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return {code, out};
}

std::string prog(const std::string& name) {
  return lgt::testing::programs_dir() + "/" + name;
}

}  // namespace

TEST_CASE("run prints the append result and exits zero") {
  auto r = run_cli("run " + prog("append.lgt"));
  CHECK(r.exitCode == 0);
  CHECK(lgt::congruent(lgt::parse_template(r.out.substr(0, r.out.find('\n'))),
                       lgt::parse_template("cons(1, cons(2, Y), X)")));
}

TEST_CASE("run prints the pop result") {
  auto r = run_cli("run " + prog("pop.lgt"));
  CHECK(r.exitCode == 0);
  CHECK(lgt::congruent(lgt::parse_template(r.out.substr(0, r.out.find('\n'))),
                       lgt::parse_template("cons(1, Y, X)")));
}

TEST_CASE("run reports fuel exhaustion with a nonzero exit") {
  auto r = run_cli("run --fuel 100 " + prog("diverging.lgt"));
  CHECK(r.exitCode == 1);
}

TEST_CASE("run with --trace emits one line per step") {
  auto r = run_cli("run --trace " + prog("pop.lgt"));
  CHECK(r.exitCode == 0);
  CHECK(r.out.find("Rd-Beta") != std::string::npos);
  CHECK(r.out.find("Rd-Case1") != std::string::npos);
}

TEST_CASE("typecheck prints the arrow types") {
  auto a = run_cli("typecheck " + prog("typed_append.lgt"));
  CHECK(a.exitCode == 0);
  CHECK(a.out == "(nodes(Y, X) -> nodes(Y, X) -> nodes(Y, X))(Z)\n");
  auto p = run_cli("typecheck " + prog("typed_pop.lgt"));
  CHECK(p.exitCode == 0);
  CHECK(p.out == "(nodes(Y, X) -> nodes(Y, X))(Z)\n");
}

TEST_CASE("typecheck rejects untyped programs") {
  auto r = run_cli("typecheck " + prog("append.lgt"));
  CHECK(r.exitCode == 1);
}

TEST_CASE("verify accepts the concatenation goal") {
  auto r = run_cli("verify " + prog("nodes.lgt") +
                   " --goal 'nu Z. ($x[Z, X] : nodes(Z, X), $y[Y, Z] : nodes(Y, Z))"
                   " : nodes(Y, X)'");
  CHECK(r.exitCode == 0);
  CHECK(r.out.find("ACCEPT") != std::string::npos);
}

TEST_CASE("verify accepts a bare fusion at the list type") {
  auto r = run_cli("verify " + prog("nodes.lgt") + " --goal 'X >< Y : nodes(Y, X)'");
  CHECK(r.exitCode == 0);
  CHECK(r.out.find("ACCEPT") != std::string::npos);
}

TEST_CASE("verify rejects a free-link mismatch") {
  auto r = run_cli("verify " + prog("nodes.lgt") + " --goal 'zero(X) : nodes(Y, X)'");
  CHECK(r.exitCode == 1);
  CHECK(r.out.find("REJECT") != std::string::npos);
}

TEST_CASE("verify cross-checks context-free goals against the oracle") {
  auto r = run_cli("verify " + prog("nodes.lgt") +
                   " --with-oracle 3 --goal 'cons(zero, Y, X) : nodes(Y, X)'");
  CHECK(r.exitCode == 0);
  CHECK(r.out.find("ACCEPT") != std::string::npos);
  CHECK(r.out.find("derivable") != std::string::npos);
}

TEST_CASE("a parse error exits with the usage code") {
  auto r = run_cli("verify " + prog("nodes.lgt") + " --goal '((( : nodes(Y, X)'");
  CHECK(r.exitCode == 2);
}

TEST_CASE("dot output is deterministic and well formed") {
  auto a = run_cli("dot " + prog("append.lgt") + " --trace");
  auto b = run_cli("dot " + prog("append.lgt") + " --trace");
  CHECK(a.exitCode == 0);
  CHECK(a.out == b.out);
  // one digraph per trace row: initial expression plus three beta steps
  size_t count = 0, pos = 0;
  while ((pos = a.out.find("digraph", pos)) != std::string::npos) {
    count++;
    pos++;
  }
  CHECK(count == 4);
  CHECK(a.out.find("shape=diamond") != std::string::npos);  // free links
  CHECK(a.out.find("shape=box") != std::string::npos);      // atoms
}

TEST_CASE("dot renders a plain value graph") {
  auto r = run_cli("dot " + prog("value_graph.lgt"));
  CHECK(r.exitCode == 0);
  CHECK(r.out.find("digraph") != std::string::npos);
  CHECK(r.out.find("style=filled") != std::string::npos);  // the fusion dot
}

TEST_CASE("the empty graph renders to an empty digraph") {
  std::string d = lgt::dot_of_value(lgt::term_null());
  CHECK(d == "digraph g0 {\n}\n");
}

TEST_CASE("missing files exit with the usage code") {
  auto r = run_cli("run " + prog("no_such_file.lgt"));
  CHECK(r.exitCode == 2);
}

TEST_CASE("a separate --types file wins over embedded definitions") {
  auto r = run_cli("typecheck --types " + prog("nodes.lgt") + " " + prog("typed_pop.lgt"));
  CHECK(r.exitCode == 0);
  CHECK(r.out == "(nodes(Y, X) -> nodes(Y, X))(Z)\n");
}
