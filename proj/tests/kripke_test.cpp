// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <functional>

#include "hyperbmc/kripke.hpp"
#include "support/generators.hpp"

using namespace hyperbmc;

namespace {

std::size_t dfs_count(const KripkeStructure& k, StateId s, std::size_t steps) {
  if (steps == 0) return 1;
  std::size_t n = 0;
  for (StateId t : k.successors(s)) n += dfs_count(k, t, steps - 1);
  return n;
}

}  // namespace

TEST(Kripke, SmallestDocument) {
  auto k = parse_kripke("ap a; states s0; init s0; label s0 {a}; trans s0 -> s0;");
  EXPECT_EQ(k.num_states(), 1u);
  EXPECT_EQ(k.label_names(0), std::vector<std::string>{"a"});
  EXPECT_TRUE(k.has_transition(0, 0));
  EXPECT_FALSE(k.has_halt_states());
}

TEST(Kripke, MissingTransitionsNameTheState) {
  try {
    parse_kripke("ap a; states s0 s1; init s0; label s0 {a}; label s1 {}; trans s0 -> s1;");
    FAIL() << "expected a totality error";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.kind(), ValidationKind::kNonTotal);
    EXPECT_EQ(e.subject(), "s1");
  }
}

TEST(Kripke, FigureOneLabelsRoundTrip) {
  const char* doc = R"(# four-state example with a and b
ap a b;
states s_init s1 s2 s3;
init s_init;
label s_init {a}; label s1 {}; label s2 {}; label s3 {b};
trans s_init -> s1; trans s_init -> s2; trans s1 -> s3; trans s2 -> s3; trans s3 -> s3;
)";
  auto k = parse_kripke(doc);
  EXPECT_EQ(k.label_names(*k.find_state("s_init")), std::vector<std::string>{"a"});
  EXPECT_EQ(k.label_names(*k.find_state("s3")), std::vector<std::string>{"b"});
  auto again = parse_kripke(render_kripke(k));
  EXPECT_EQ(render_kripke(again), render_kripke(k));
  for (StateId s = 0; s < k.num_states(); ++s) EXPECT_EQ(again.label_names(s), k.label_names(s));
}

TEST(Kripke, SyntaxErrorsCarryPositions) {
  try {
    parse_kripke("ap a;\nstates s0;\ninit s0\nlabel s0 {};");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_GE(e.line(), 3u);
  }
  EXPECT_THROW(parse_kripke("ap a a; states s0; init s0; label s0 {}; trans s0 -> s0;"), ValidationError);
  EXPECT_THROW(parse_kripke("ap a; states s0; init s1; label s0 {}; trans s0 -> s0;"), ValidationError);
  EXPECT_THROW(parse_kripke("ap a; states s0; label s0 {}; trans s0 -> s0;"), ValidationError);
  EXPECT_THROW(parse_kripke("ap a; states s0; init s0; label s0 {b}; trans s0 -> s0;"), ValidationError);
  EXPECT_THROW(parse_kripke("ap a; states s0; init s0; trans s0 -> s0;"), ValidationError);
}

TEST(Kripke, ValidateCases) {
  auto cycle = parse_kripke("ap a; states s0 s1; init s0; label s0 {}; label s1 {a}; trans s0 -> s1; trans s1 -> s0;");
  EXPECT_NO_THROW(cycle.validate());

  try {
    parse_kripke("ap a; states s0 s1; init s0; halt s0; label s0 {}; label s1 {}; trans s0 -> s1; trans s1 -> s1;");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.kind(), ValidationKind::kHaltNotAbsorbing);
    EXPECT_EQ(e.subject(), "s0");
  }

  auto acyclic = parse_kripke(
      "ap a; states s0 s1 s2; init s0; halt s1 s2; label s0 {a}; label s1 {}; label s2 {a};"
      "trans s0 -> s1; trans s0 -> s2; trans s1 -> s1; trans s2 -> s2;");
  EXPECT_NO_THROW(acyclic.validate());
}

TEST(Kripke, ReservedNamesRejected) {
  KripkeStructure k;
  EXPECT_THROW(k.add_ap("@halt"), ValidationError);
}

TEST(Kripke, EnumerateSmallCases) {
  auto one = parse_kripke("ap a; states s0; init s0; label s0 {a}; trans s0 -> s0;");
  auto p = enumerate_prefixes(one, 2);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0].letters.size(), 3u);

  auto branch = parse_kripke("ap a; states s0 s1; init s0; label s0 {}; label s1 {a}; trans s0 -> s0; trans s0 -> s1; trans s1 -> s1;");
  EXPECT_EQ(enumerate_prefixes(branch, 1).size(), 2u);

  auto binary = parse_kripke("ap a; states s0 s1; init s0; label s0 {}; label s1 {a};"
                             "trans s0 -> s0; trans s0 -> s1; trans s1 -> s0; trans s1 -> s1;");
  EXPECT_EQ(enumerate_prefixes(binary, 3).size(), 8u);
  EXPECT_EQ(dfs_count(binary, 0, 3), 8u);
}

TEST(Kripke, EnumerationIsDeterministicAndCapped) {
  auto binary = parse_kripke("ap a; states s0 s1; init s0; label s0 {}; label s1 {a};"
                             "trans s0 -> s0; trans s0 -> s1; trans s1 -> s0; trans s1 -> s1;");
  EXPECT_EQ(enumerate_prefixes(binary, 4), enumerate_prefixes(binary, 4));
  EXPECT_THROW(enumerate_prefixes(binary, 10, 100), ExplosionGuard);
}

TEST(KripkeProperty, PrefixCountMatchesDfsAndLettersValid) {
  testkit::Rng rng(11);
  for (int round = 0; round < 300; ++round) {
    auto k = testkit::random_structure(rng, 4, testkit::ap_names(2));
    for (std::size_t bound = 0; bound <= 4; ++bound) {
      auto prefixes = enumerate_prefixes(k, bound);
      ASSERT_EQ(prefixes.size(), dfs_count(k, k.init(), bound));
      ASSERT_EQ(prefixes.size(), count_prefixes(k, bound));
      for (const auto& pre : prefixes) {
        ASSERT_TRUE(is_initialized_path(k, pre.states));
        for (std::size_t i = 0; i < pre.states.size(); ++i) ASSERT_EQ(pre.letters[i], k.label_names(pre.states[i]));
      }
    }
    auto text = render_kripke(k);
    ASSERT_EQ(render_kripke(parse_kripke(text)), text);
  }
}
