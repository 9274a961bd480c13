// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "hyperbmc/external.hpp"
#include "support/generators.hpp"

using namespace hyperbmc;

TEST(SolverOutcome, ExitCodes) {
  EXPECT_TRUE(interpret_solver_outcome(10, ""));
  EXPECT_FALSE(interpret_solver_outcome(20, ""));
  EXPECT_TRUE(interpret_solver_outcome(0, "r SAT\n"));
  EXPECT_FALSE(interpret_solver_outcome(0, "r UNSAT\nmore\n"));
  EXPECT_THROW(interpret_solver_outcome(127, ""), SolverNotFound);
  EXPECT_THROW(interpret_solver_outcome(0, "s cnf 1\n"), UnparsableOutput);
}

TEST(SolverOutcome, UnparsableKeepsHead) {
  std::string noise(500, 'z');
  try {
    interpret_solver_outcome(1, noise);
    FAIL();
  } catch (const UnparsableOutput& e) {
    EXPECT_EQ(e.head().size(), 200u);
  }
}

namespace {

PrenexQBF small_true() {
  PrenexQBF q;
  q.matrix = q.circuit.var(0);
  q.blocks = {{Quantifier::kExists, {0}}};
  q.var_names[0] = "x";
  return q;
}

}  // namespace

TEST(RunExternal, ExitStatusProtocol) {
  EXPECT_TRUE(run_external("test -s {file} && exit 10", small_true()).value);
  EXPECT_FALSE(run_external("exit 20 # {file}", small_true()).value);
  EXPECT_TRUE(run_external("echo 'r SAT' # {file}", small_true()).value);
  EXPECT_FALSE(run_external("printf 'r UNSAT\\n' # {file}", small_true()).value);
}

TEST(RunExternal, SeesTheQcirDocument) {
  EXPECT_TRUE(run_external("grep -q '^exists(x)$' {file} && exit 10 || exit 20", small_true()).value);
}

TEST(RunExternal, Errors) {
  EXPECT_THROW(run_external("true", small_true()), ConfigError);
  EXPECT_THROW(run_external("/nonexistent/solver {file}", small_true()), SolverNotFound);
  EXPECT_THROW(run_external("echo hello {file}", small_true()), UnparsableOutput);
  EXPECT_THROW(run_external("sleep 5; exit 10 # {file}", small_true(), ExternalOptions{0.3}), Timeout);
}

TEST(RunExternal, TemporaryFileRemoved) {
  auto out = run_external("echo {file} >&2; exit 10", small_true());
  EXPECT_TRUE(out.value);
  EXPECT_FALSE(out.outer_witness);
}

TEST(RunExternal, AgreesWithBuiltinThroughReferenceScript) {
  // A shell-level solver that round-trips the file through the builtin reader.
  std::string script = std::string(HYPERBMC_TEST_SOLVER) + " {file}";
  testkit::Rng rng(4);
  for (int i = 0; i < 20; ++i) {
    auto q = testkit::random_qbf(rng, 6);
    EXPECT_EQ(run_external(script, q).value, solve(q).value);
  }
}
