#include <gtest/gtest.h>

#include <sstream>

#include "test_support.hpp"

namespace markagg {
namespace {

TEST(Propensity, MassAction) {
  const ReactionNetwork dimer({"A", "B"}, {{{2, 0}, {0, 1}, 0.5}}, {4, 0});
  EXPECT_DOUBLE_EQ(propensity(dimer, {4, 0}, 0), 3.0);
  EXPECT_EQ(propensity(dimer, {1, 0}, 0), 0.0);
  const ReactionNetwork gene = gene_expression_network(3, 0.2, 0.3, 5.0, 0.7);
  EXPECT_DOUBLE_EQ(propensity(gene, {0, 1, 2, 1}, 2), 10.0);
  EXPECT_DOUBLE_EQ(propensity(gene, {0, 1, 2, 1}, 3), 0.7);
  EXPECT_EQ(propensity(gene, {1, 0, 2, 1}, 2), 0.0);
}

TEST(Propensity, LargeBinomial) {
  EXPECT_DOUBLE_EQ(detail::binomial(10, 3), 120.0);
  EXPECT_DOUBLE_EQ(detail::binomial(60, 30), 118264581564861424.0);
  EXPECT_NEAR(detail::binomial(200, 100) / 9.054851465610328e58, 1.0, 1e-9);
}

TEST(Network, Validation) {
  EXPECT_THROW(ReactionNetwork({"A", "A"}, {}, {0, 0}), Error);
  EXPECT_THROW(ReactionNetwork({"A"}, {}, {-1}), Error);
  EXPECT_THROW(ReactionNetwork({"A"}, {{{1}, {0}, 0.0}}, {1}), Error);
  EXPECT_THROW(ReactionNetwork({"A"}, {{{1, 0}, {0}, 1.0}}, {1}), Error);
}

TEST(Reachable, GeneCounts) {
  for (std::int64_t np = 1; np <= 20; ++np) {
    const auto states = enumerate_reachable(gene_expression_network(np), 100000);
    EXPECT_EQ(states.size(), static_cast<std::size_t>(2 * (np + 1)));
    for (const auto& s : states) {
      EXPECT_EQ(s[0] + s[1], 1);
      EXPECT_EQ(s[2] + s[3], np);
    }
  }
}

TEST(Reachable, Cap) {
  try {
    enumerate_reachable(gene_expression_network(10), 21);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kStateSpaceExceeded);
  }
  EXPECT_EQ(enumerate_reachable(gene_expression_network(10), 22).size(), 22u);
}

TEST(Generator, HandEnumeratedGene) {
  const ReactionNetwork net = gene_expression_network(1, 0.2, 0.3, 5.0, 0.7);
  const Generator g = build_generator(net, enumerate_reachable(net, 100));
  const std::vector<CountVector> expected_states{{0, 1, 0, 1}, {1, 0, 0, 1}, {0, 1, 1, 0}, {1, 0, 1, 0}};
  ASSERT_EQ(g.states, expected_states);
  const Matrix expected{{-1.0, 0.3, 0.7, 0.0},
                        {0.2, -0.9, 0.0, 0.7},
                        {5.0, 0.0, -5.3, 0.3},
                        {0.0, 0.0, 0.2, -0.2}};
  EXPECT_LE(max_abs_diff(g.R, expected), 1e-15);
}

TEST(Generator, TwoState) {
  const ReactionNetwork net({"Off", "On"}, {{{1, 0}, {0, 1}, 2.0}, {{0, 1}, {1, 0}, 3.0}}, {1, 0});
  const Generator g = build_generator(net, enumerate_reachable(net, 10));
  EXPECT_EQ(g.R, (Matrix{{-2.0, 2.0}, {3.0, -3.0}}));
  const Uniformized u = uniformize(g);
  EXPECT_EQ(u.lambda_used, 4.0);
  EXPECT_EQ(u.P.matrix(), (Matrix{{0.5, 0.5}, {0.75, 0.25}}));
  const Uniformized tight = uniformize(g, 3.0);
  EXPECT_LE(max_abs_diff(tight.P.matrix(), Matrix{{1.0 / 3, 2.0 / 3}, {1.0, 0.0}}), 1e-15);
}

TEST(Generator, RowsSumToZero) {
  const ReactionNetwork net = gene_expression_network(15);
  const Generator g = build_generator(net, enumerate_reachable(net, 1000));
  for (std::size_t s = 0; s < g.R.rows(); ++s) {
    double sum = 0.0;
    for (std::size_t t = 0; t < g.R.cols(); ++t) {
      sum += g.R(s, t);
      if (s != t) {
        EXPECT_GE(g.R(s, t), 0.0);
      }
    }
    EXPECT_NEAR(sum, 0.0, 1e-12);
  }
}

TEST(Generator, TargetOutsideStateList) {
  const ReactionNetwork net = gene_expression_network(2);
  auto states = enumerate_reachable(net, 100);
  states.pop_back();
  try {
    build_generator(net, states);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kTargetNotInStateList);
  }
}

TEST(Uniformize, Errors) {
  const ReactionNetwork net = gene_expression_network(10);
  const Generator g = build_generator(net, enumerate_reachable(net, 100));
  try {
    uniformize(g, 10.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kLambdaTooSmall);
  }
  EXPECT_EQ(uniformize(g).lambda_used, 11.01);
}

TEST(Uniformize, EmptyNetwork) {
  const ReactionNetwork net({"A"}, {}, {3});
  const Generator g = build_generator(net, enumerate_reachable(net, 10));
  const Uniformized u = uniformize(g);
  EXPECT_EQ(u.P.matrix(), (Matrix{{1.0}}));
  EXPECT_EQ(u.lambda_used, 1.0);
}

TEST(Uniformize, StationaryMatchesGeneratorNullVector) {
  for (std::int64_t np : {5, 10, 25}) {
    const ReactionNetwork net = gene_expression_network(np);
    const Generator g = build_generator(net, enumerate_reachable(net, 1000));
    const Distribution mu = stationary_distribution(uniformize(g).P, true);
    // mu R = 0 solved directly: P = R + I has the same null space.
    Matrix shifted = g.R;
    for (std::size_t s = 0; s < shifted.rows(); ++s) shifted(s, s) += 1.0;
    const auto oracle = testing::stationary_oracle(shifted);
    EXPECT_LE(max_abs_diff(mu.values(), oracle), 1e-9) << "n_P=" << np;
  }
}

TEST(Uniformize, GeneOnClassIsLumpable) {
  const double rates[][4] = {{0.01, 0.01, 1.0, 0.1}, {0.5, 0.2, 3.0, 0.4}, {2.0, 0.05, 0.7, 1.3}};
  for (const auto& c : rates)
    for (std::int64_t np : {3, 10, 30}) {
      const ReactionNetwork net = gene_expression_network(np, c[0], c[1], c[2], c[3]);
      const Generator g = build_generator(net, enumerate_reachable(net, 1000));
      const FixedClass on = select_states(g.states, parse_predicate(net, "gene-on"));
      std::vector<std::size_t> assignment(g.states.size());
      for (std::size_t s = 0; s < g.states.size(); ++s) assignment[s] = g.states[s][1] > 0 ? 0 : 1;
      const Partition part = partition_from_classes(assignment);
      ASSERT_EQ(part.members(part.class_of(on.states.front())), on.states);
      EXPECT_LE(lumpability_check(uniformize(g).P, part, 1e-12).max_violation, 1e-12);
    }
}

TEST(Uniformize, LumpabilityInvariantUnderLambda) {
  const ReactionNetwork net = gene_expression_network(2, 0.5, 0.5, 1.0, 1.0);
  const Generator g = build_generator(net, enumerate_reachable(net, 100));
  const double base = uniformize(g).lambda_used;
  auto lumpable_set = [&](double lambda) {
    const StochasticMatrix p = uniformize(g, lambda).P;
    std::vector<std::vector<int>> out;
    for (std::size_t m = 1; m <= g.states.size(); ++m)
      for (const auto& part : enumerate_partitions(g.states.size(), m))
        if (lumpability_check(p, part, 1e-10).lumpable) out.push_back(part.labels());
    return out;
  };
  const auto reference = lumpable_set(base);
  EXPECT_GT(reference.size(), 2u);
  for (double f : {1.7, 10.0, 1e6}) EXPECT_EQ(lumpable_set(base * f), reference) << f;
}

TEST(Predicate, Parsing) {
  const ReactionNetwork net = gene_expression_network(10);
  const auto states = enumerate_reachable(net, 100);
  EXPECT_EQ(select_states(states, parse_predicate(net, "gene-on")).states.size(), 11u);
  EXPECT_EQ(select_states(states, parse_predicate(net, "P>9")).states.size(), 2u);
  EXPECT_EQ(select_states(states, parse_predicate(net, " P >= 9 ")).states.size(), 4u);
  EXPECT_EQ(select_states(states, parse_predicate(net, "P0==0")).states.size(), 2u);
  EXPECT_EQ(select_states(states, parse_predicate(net, "P<1")).states.size(), 2u);
  EXPECT_EQ(select_states(states, parse_predicate(net, "P<=1")).states.size(), 4u);
  for (const char* bad : {"P>", ">3", "Q>1", "P~3", "P>3x"}) EXPECT_THROW(parse_predicate(net, bad), Error) << bad;
  try {
    select_states(states, parse_predicate(net, "P>10"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kInvalidFixedSet);
  }
}

}  // namespace
}  // namespace markagg
