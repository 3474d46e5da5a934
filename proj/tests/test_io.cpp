#include <gtest/gtest.h>

#include <sstream>

#include "test_support.hpp"

namespace markagg {
namespace {

const std::string kData = MARKAGG_DATA_DIR;

template <typename Reader>
auto parse(const std::string& text, Reader reader) {
  std::istringstream in(text);
  return reader(in);
}

Matrix read_matrix_text(const std::string& text) { return parse(text, [](std::istream& in) { return io::read_matrix(in); }); }

Errc parse_error(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return Errc::kParse;
}

TEST(MatrixFile, CommentsAndBlankLines) {
  const Matrix m = read_matrix_text("# header\n2\n\n0.5 0.5\n# mid\n\t1 0\r\n");
  EXPECT_EQ(m, (Matrix{{0.5, 0.5}, {1.0, 0.0}}));
}

TEST(MatrixFile, RoundTripIsExact) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const StochasticMatrix p = testing::random_regular(rng, 2 + trial % 9);
    std::ostringstream out;
    io::write_matrix(out, p.matrix());
    EXPECT_EQ(read_matrix_text(out.str()), p.matrix());
  }
}

TEST(MatrixFile, Errors) {
  EXPECT_EQ(parse_error([] { read_matrix_text(""); }), Errc::kParse);
  EXPECT_EQ(parse_error([] { read_matrix_text("2 2\n1 0\n0 1\n"); }), Errc::kParse);
  EXPECT_EQ(parse_error([] { read_matrix_text("2\n1 0\n"); }), Errc::kParse);
  EXPECT_EQ(parse_error([] { read_matrix_text("2\n1 0\n0 1 0\n"); }), Errc::kParse);
  EXPECT_EQ(parse_error([] { read_matrix_text("2\n1 0\n0 one\n"); }), Errc::kParse);
  EXPECT_EQ(parse_error([] { read_matrix_text("0\n"); }), Errc::kParse);
}

TEST(MatrixFile, DataFiles) {
  auto load = [](const std::string& name) {
    return io::read_file(kData + "/" + name, [](std::istream& in) { return io::read_matrix(in); });
  };
  EXPECT_EQ(validate_stochastic(load("example1.txt"), false).matrix(), testing::example1().matrix());
  EXPECT_EQ(validate_stochastic(load("example3.txt"), false).matrix(), testing::example3().matrix());
  EXPECT_LE(max_abs_diff(load("example4.txt"), testing::example4().matrix()), 1e-16);
  try {
    validate_stochastic(load("malformed_rowsum.txt"), false);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kRowSumViolation);
    EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos);
  }
  EXPECT_EQ(parse_error([&] { load("does_not_exist.txt"); }), Errc::kParse);
}

TEST(PartitionFile, ReadCanonicalises) {
  const Partition g = parse("# labels\n3 3 1 2\n", [](std::istream& in) { return io::read_partition(in); });
  EXPECT_EQ(g.labels(), (std::vector<int>{1, 1, 2, 3}));
  std::ostringstream out;
  io::write_partition(out, g);
  EXPECT_EQ(out.str(), "1 1 2 3\n");
  EXPECT_EQ(parse_error([] { parse("1 2\n1 2\n", [](std::istream& in) { return io::read_partition(in); }); }),
            Errc::kParse);
  EXPECT_EQ(parse("5 9 5\n", [](std::istream& in) { return io::read_partition(in); }).labels(),
            (std::vector<int>{1, 2, 1}));
  EXPECT_EQ(parse_error([] { parse("1 0\n", [](std::istream& in) { return io::read_partition(in); }); }),
            Errc::kParse);
}

TEST(FixedFile, OneBased) {
  const FixedClass f = parse("3 1\n5\n", [](std::istream& in) { return io::read_fixed(in); });
  EXPECT_EQ(f.states, (std::vector<std::size_t>{2, 0, 4}));
  std::ostringstream out;
  io::write_fixed(out, normalize_fixed(f, 5));
  EXPECT_EQ(out.str(), "1 3 5\n");
  EXPECT_EQ(parse_error([] { parse("0 1\n", [](std::istream& in) { return io::read_fixed(in); }); }),
            Errc::kInvalidFixedSet);
  EXPECT_EQ(parse_error([] { parse("# none\n", [](std::istream& in) { return io::read_fixed(in); }); }),
            Errc::kInvalidFixedSet);
}

TEST(DistributionFile, Read) {
  const Distribution d = parse("0.25 0.75\n", [](std::istream& in) { return io::read_distribution(in); });
  EXPECT_EQ(d.values()[1], 0.75);
  EXPECT_THROW(parse("0.5 0.6\n", [](std::istream& in) { return io::read_distribution(in); }), Error);
}

ReactionNetwork read_network_text(const std::string& text) {
  return parse(text, [](std::istream& in) { return io::read_reaction_network(in); });
}

TEST(NetworkFile, GeneFileMatchesBuiltin) {
  const ReactionNetwork file = io::read_file(kData + "/gene_expression.rn", [](std::istream& in) {
    return io::read_reaction_network(in);
  });
  const ReactionNetwork builtin = gene_expression_network(10);
  EXPECT_EQ(file.species(), builtin.species());
  EXPECT_EQ(file.initial_state(), builtin.initial_state());
  ASSERT_EQ(file.reactions().size(), builtin.reactions().size());
  for (std::size_t k = 0; k < builtin.reactions().size(); ++k) {
    EXPECT_EQ(file.reactions()[k].consumed, builtin.reactions()[k].consumed);
    EXPECT_EQ(file.reactions()[k].produced, builtin.reactions()[k].produced);
    EXPECT_EQ(file.reactions()[k].rate, builtin.reactions()[k].rate);
  }
}

TEST(NetworkFile, CoefficientsAndEmptySides) {
  const ReactionNetwork net = read_network_text(
      "SPECIES\nA B\nINIT\nA = 4\nREACTIONS\n2*A -> B @ 0.5\n0 -> A @ 1e-3\nB -> 0 @ 2\n");
  ASSERT_EQ(net.reactions().size(), 3u);
  EXPECT_EQ(net.reactions()[0].consumed, (CountVector{2, 0}));
  EXPECT_EQ(net.reactions()[0].produced, (CountVector{0, 1}));
  EXPECT_EQ(net.reactions()[1].consumed, (CountVector{0, 0}));
  EXPECT_EQ(net.reactions()[2].produced, (CountVector{0, 0}));
  EXPECT_EQ(net.initial_state(), (CountVector{4, 0}));
  EXPECT_DOUBLE_EQ(propensity(net, net.initial_state(), 0), 3.0);
}

TEST(NetworkFile, NoReactions) {
  const ReactionNetwork net = read_network_text("SPECIES\nA\nINIT\nA = 2\nREACTIONS\n");
  EXPECT_TRUE(net.reactions().empty());
  const Generator g = build_generator(net, enumerate_reachable(net, 10));
  EXPECT_EQ(uniformize(g).P.matrix(), (Matrix{{1.0}}));
}

TEST(NetworkFile, Errors) {
  for (const char* bad : {"A\n", "SPECIES\nINIT\n", "SPECIES\nA\nINIT\nB = 1\n", "SPECIES\nA\nINIT\nA 1\n",
                          "SPECIES\nA\nREACTIONS\nA -> @ 1\n", "SPECIES\nA\nREACTIONS\nA -> 0\n",
                          "SPECIES\nA\nREACTIONS\nC -> 0 @ 1\n", "SPECIES\nA\nREACTIONS\nA -> 0 @ -1\n",
                          "SPECIES\nA\nREACTIONS\n-1*A -> 0 @ 1\n", "SPECIES\nA A\n"})
    EXPECT_EQ(parse_error([&] { read_network_text(bad); }), Errc::kParse) << bad;
}

TEST(Legend, Format) {
  const ReactionNetwork net = gene_expression_network(1);
  std::ostringstream out;
  io::write_legend(out, net, enumerate_reachable(net, 10));
  EXPECT_EQ(out.str(),
            "1\tG0=0,G1=1,P0=0,P=1\n2\tG0=1,G1=0,P0=0,P=1\n3\tG0=0,G1=1,P0=1,P=0\n4\tG0=1,G1=0,P0=1,P=0\n");
}

TEST(Format, Numbers) {
  EXPECT_EQ(io::format_number(0.1, 17), "0.10000000000000001");
  EXPECT_EQ(io::format_number(1.0 / 3, 12), "0.333333333333");
  const std::vector<double> v{0.5, 0.25};
  EXPECT_EQ(io::format_vector(v), "0.5 0.25");
}

}  // namespace
}  // namespace markagg
