// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "hyperbmc/oracle.hpp"
#include "support/generators.hpp"

using namespace hyperbmc;
using namespace hyperbmc::ltl;

namespace {

constexpr BoundedSemantics kPes{Semantics::kPes, false};
constexpr BoundedSemantics kOpt{Semantics::kOpt, false};
constexpr BoundedSemantics kHpes{Semantics::kHpes, false};
constexpr BoundedSemantics kHopt{Semantics::kHopt, false};
constexpr BoundedSemantics kClassic{Semantics::kClassic, false};

ModelMap single(const std::string& text, const std::vector<std::string>& vars = {"A"}) {
  auto k = std::make_shared<const KripkeStructure>(parse_kripke(text));
  ModelMap m;
  for (const auto& v : vars) m[v] = k;
  return m;
}

const char* kLoopA = "ap a; states s0; init s0; label s0 {a}; trans s0 -> s0;";
const char* kLoopAHalt = "ap a; states s0; init s0; halt s0; label s0 {a}; trans s0 -> s0;";
// p holds at step 1 only
const char* kPAtOne = "ap p; states s0 s1 s2; init s0; label s0 {}; label s1 {p}; label s2 {};"
                      "trans s0 -> s1; trans s1 -> s2; trans s2 -> s2;";

}  // namespace

TEST(EvalBody, AtomAtStepZero) {
  auto m = single(kLoopA);
  auto pre = enumerate_prefixes(*m.at("A"), 0).front();
  EXPECT_TRUE(eval_body(m, {{"A", pre}}, 0, atom("a", "A"), 0, kPes));
  EXPECT_FALSE(eval_body(m, {{"A", pre}}, 0, neg_atom("a", "A"), 0, kPes));
}

TEST(EvalBody, NextAtBound) {
  auto m = single(kLoopA);
  auto pre = enumerate_prefixes(*m.at("A"), 2).front();
  EXPECT_FALSE(eval_body(m, {{"A", pre}}, 2, next(atom("a", "A")), 2, kPes));
  EXPECT_TRUE(eval_body(m, {{"A", pre}}, 2, next(atom("a", "A")), 2, kOpt));
  EXPECT_TRUE(eval_body(m, {{"A", pre}}, 1, next(atom("a", "A")), 2, kPes));
}

TEST(EvalBody, EventuallyAtBoundOne) {
  auto m = single(kPAtOne);
  auto pre = enumerate_prefixes(*m.at("A"), 1).front();
  auto fp = until(top(), atom("p", "A"));
  EXPECT_FALSE(eval_body(m, {{"A", pre}}, 0, fp, 1, kPes));
  EXPECT_TRUE(eval_body(m, {{"A", pre}}, 0, fp, 1, kOpt));
  EXPECT_TRUE(eval_body(m, {{"A", pre}}, 0, fp, 1, kClassic));
}

TEST(EvalBody, UnassignedVariable) {
  auto m = single(kLoopA);
  auto pre = enumerate_prefixes(*m.at("A"), 0).front();
  EXPECT_THROW(eval_body(m, {{"A", pre}}, 0, atom("a", "B"), 0, kPes), ValidationError);
}

TEST(CheckBounded, Examples) {
  auto m = single(kLoopA);
  EXPECT_TRUE(check_bounded(m, parse_formula("exists A. a[A]"), 0, kPes));
  auto ga = parse_formula("forall A. G a[A]");
  EXPECT_FALSE(check_bounded(m, ga, 2, kPes));
  EXPECT_TRUE(check_bounded(m, ga, 2, kOpt));

  auto h = single(kLoopAHalt);
  EXPECT_TRUE(check_bounded(h, ga, 2, kHopt));
  EXPECT_TRUE(check_bounded(h, ga, 2, kHpes));
  EXPECT_FALSE(check_bounded(h, ga, 2, BoundedSemantics{Semantics::kHpes, true}));
}

TEST(CheckBounded, HaltingUntilNeedsAllTracesHalted) {
  // A halts at once; B keeps running, so halting rules fall back to pessimism.
  auto a = std::make_shared<const KripkeStructure>(parse_kripke(kLoopAHalt));
  auto b = std::make_shared<const KripkeStructure>(
      parse_kripke("ap a; states t0 t1; init t0; halt t1; label t0 {}; label t1 {a}; trans t0 -> t0; trans t0 -> t1; trans t1 -> t1;"));
  ModelMap m{{"A", a}, {"B", b}};
  auto f = parse_formula("forall A. forall B. F a[A]");
  EXPECT_FALSE(check_bounded(m, f, 0, kPes));
  EXPECT_FALSE(check_bounded(m, f, 0, kHpes));  // B at t0 is not halted
  EXPECT_TRUE(check_bounded(m, parse_formula("forall A. F a[A]"), 0, kHpes));
}

TEST(CheckBounded, ExplosionGuard) {
  auto m = single("ap a; states s0 s1; init s0; label s0 {}; label s1 {a};"
                  "trans s0 -> s0; trans s0 -> s1; trans s1 -> s0; trans s1 -> s1;");
  EXPECT_THROW(check_bounded(m, parse_formula("forall A. G a[A]"), 12, kPes, 1000), ExplosionGuard);
}

TEST(CheckBoundedWith, FixedPrefixes) {
  auto m = single(kPAtOne, {"A", "B"});
  auto f = parse_formula("exists A. forall B. F (p[A] & p[B])");
  auto pre = enumerate_prefixes(*m.at("A"), 2).front();
  EXPECT_TRUE(check_bounded_with(m, f, 2, kPes, {{"A", pre}}));
  auto broken = pre;
  broken.states[1] = 2;
  EXPECT_FALSE(check_bounded_with(m, f, 2, kPes, {{"A", broken}}));
}

TEST(CheckBoundedWith, ProgressionFallbackAgreesWithEnumeration) {
  testkit::Rng rng(3);
  for (int round = 0; round < 200; ++round) {
    auto f = testkit::random_formula(rng, 2, 3, testkit::ap_names(2));
    f.prefix.resize(1);
    f.prefix[0].var = "A";
    std::set<std::string> used;
    collect_variables(f.body, used);
    if (used.count("B") || used.count("C")) continue;
    auto m = testkit::random_models(rng, f, 4, testkit::ap_names(2));
    for (auto kind : {Semantics::kPes, Semantics::kOpt, Semantics::kHpes, Semantics::kHopt, Semantics::kClassic}) {
      BoundedSemantics sem{kind, false};
      bool enumerated = check_bounded_with(m, f, 3, sem, {});
      bool progressed = check_bounded_with(m, f, 3, sem, {}, 0);
      ASSERT_EQ(enumerated, progressed) << to_string(f) << " " << to_string(kind);
    }
  }
}

TEST(Semantics, DualPairs) {
  EXPECT_EQ(dual(Semantics::kPes), Semantics::kOpt);
  EXPECT_EQ(dual(Semantics::kOpt), Semantics::kPes);
  EXPECT_EQ(dual(Semantics::kHpes), Semantics::kHopt);
  EXPECT_EQ(dual(Semantics::kHopt), Semantics::kHpes);
  EXPECT_EQ(dual(Semantics::kClassic), Semantics::kClassicDual);
  EXPECT_EQ(dual(dual(Semantics::kClassic)), Semantics::kClassic);
}

TEST(OracleProperty, NegationDuality) {
  testkit::Rng rng(101);
  for (int round = 0; round < 400; ++round) {
    auto f = testkit::random_formula(rng, 2, 3, testkit::ap_names(2));
    auto m = testkit::random_models(rng, f, 3, testkit::ap_names(2));
    for (std::size_t k = 0; k <= 3; ++k)
      for (auto kind : {Semantics::kPes, Semantics::kOpt, Semantics::kHpes, Semantics::kHopt, Semantics::kClassic}) {
        BoundedSemantics sem{kind, false};
        ASSERT_EQ(check_bounded(m, f, k, sem), !check_bounded(m, negate(f), k, dual(sem)))
            << to_string(f) << " k=" << k << " " << to_string(kind);
      }
  }
}

TEST(OracleProperty, Monotonicity) {
  testkit::Rng rng(202);
  for (int round = 0; round < 200; ++round) {
    auto f = testkit::random_formula(rng, 2, 3, testkit::ap_names(2));
    auto m = testkit::random_models(rng, f, 4, testkit::ap_names(2));
    for (auto kind : {Semantics::kPes, Semantics::kOpt, Semantics::kHpes, Semantics::kHopt}) {
      BoundedSemantics sem{kind, false};
      bool pessimistic = kind == Semantics::kPes || kind == Semantics::kHpes;
      std::vector<bool> v;
      for (std::size_t k = 0; k <= 4; ++k) v.push_back(check_bounded(m, f, k, sem));
      for (std::size_t k = 0; k < v.size(); ++k)
        for (std::size_t j = k + 1; j < v.size(); ++j) {
          if (pessimistic) ASSERT_TRUE(!v[k] || v[j]) << to_string(f) << " " << to_string(kind);
          else ASSERT_TRUE(v[k] || !v[j]) << to_string(f) << " " << to_string(kind);
        }
    }
  }
}

TEST(OracleProperty, LeavableHaltStateBreaksHaltingMonotonicity) {
  // s0 halts but may also move on; the halted reading at k=0 is not final.
  auto m = single("ap a; states s0 s1; init s0; halt s0; label s0 {a}; label s1 {};"
                  "trans s0 -> s0; trans s0 -> s1; trans s1 -> s1;");
  auto ga = parse_formula("forall A. G a[A]");
  EXPECT_TRUE(check_bounded(m, ga, 0, kHpes));
  EXPECT_FALSE(check_bounded(m, ga, 1, kHpes));
}

TEST(OracleProperty, InfiniteInferenceOnAcyclicHaltingStructures) {
  testkit::Rng rng(303);
  for (int round = 0; round < 300; ++round) {
    auto f = testkit::random_formula(rng, 2, 3, testkit::ap_names(2));
    auto m = testkit::random_models(rng, f, 4, testkit::ap_names(2), true);
    bool truth = testkit::InfiniteEvaluator(m, 4).holds(f);
    for (std::size_t k = 0; k <= 4; ++k) {
      if (check_bounded(m, f, k, kHpes) || check_bounded(m, f, k, kPes)) { ASSERT_TRUE(truth) << to_string(f); }
      if (!check_bounded(m, f, k, kHopt) || !check_bounded(m, f, k, kOpt)) { ASSERT_FALSE(truth) << to_string(f); }
    }
    // Once every run has halted, the halting rules are exact.
    ASSERT_EQ(check_bounded(m, f, 4, kHpes), truth) << to_string(f);
    ASSERT_EQ(check_bounded(m, f, 4, kHopt), truth) << to_string(f);
  }
}
