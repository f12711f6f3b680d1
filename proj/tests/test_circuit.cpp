#include <doctest.h>

#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "pgc/circuit.hpp"
#include "pgc/errors.hpp"
#include "pgc/text_format.hpp"

using pgc::MarginalQuery;

TEST_CASE("compact circuit expands to the joint table") {
  const auto c = fixture::compact_pgc();
  const auto joint = pgc::expand_joint(*c);
  REQUIRE(joint.size() == 8);
  for (std::size_t r = 0; r < 8; ++r) CHECK(joint[r] == doctest::Approx(fixture::kJoint[r]).epsilon(1e-12));
  CHECK(c->size() == 14);
}

TEST_CASE("marginals of the running example") {
  const auto c = fixture::compact_pgc();
  CHECK(pgc::marginal(*c, {}) == doctest::Approx(1.0));
  CHECK(pgc::marginal(*c, {{}, {1, 2}}) == doctest::Approx(0.04));
  CHECK(pgc::marginal(*c, {{0, 2}, {1}}) == doctest::Approx(0.08));
  CHECK(pgc::marginal(*c, {{0}, {}}) == doctest::Approx(0.3));
  CHECK(pgc::likelihood(*c, std::vector<std::uint8_t>{1, 0, 1}) == doctest::Approx(0.08));
  CHECK(pgc::log_likelihood(*c, std::vector<std::uint8_t>{1, 0, 1}) ==
        doctest::Approx(std::log(0.08)));
}

TEST_CASE("every marginal pattern matches the summed joint") {
  const auto c = fixture::compact_pgc();
  const auto joint = oracle::joint_by_mobius(*c);
  for (std::uint32_t code = 0; code < 27; ++code) {
    MarginalQuery q;
    std::uint32_t ones = 0, zeros = 0;
    for (std::uint32_t i = 0, k = code; i < 3; ++i, k /= 3) {
      if (k % 3 == 1) q.ones.push_back(i), ones |= 1u << i;
      if (k % 3 == 2) q.zeros.push_back(i), zeros |= 1u << i;
    }
    CHECK(pgc::marginal(*c, q) == doctest::Approx(oracle::marginal_from_joint(joint, ones, zeros)));
  }
}

TEST_CASE("bad queries are contract violations") {
  const auto c = fixture::compact_pgc();
  CHECK_THROWS_AS(pgc::marginal(*c, {{3}, {}}), pgc::ContractViolation);
  CHECK_THROWS_AS(pgc::marginal(*c, {{0}, {0}}), pgc::ContractViolation);
  CHECK_THROWS_AS(pgc::likelihood(*c, std::vector<std::uint8_t>{1, 0}), pgc::ContractViolation);
}

TEST_CASE("truth-table decoding puts the first variable first") {
  CHECK(pgc::assignment_from_index(5, 3) == std::vector<std::uint8_t>{1, 0, 1});
  CHECK(pgc::assignment_from_index(1, 3) == std::vector<std::uint8_t>{0, 0, 1});
}

TEST_CASE("syntax validation reports each problem") {
  using pgc::SyntaxIssue;
  auto has = [](const std::vector<pgc::SyntaxViolation>& v, SyntaxIssue issue) {
    for (const auto& x : v) {
      if (x.issue == issue) return true;
    }
    return false;
  };
  CHECK(has(pgc::validate_syntax({}, 1), SyntaxIssue::kEmpty));
  std::vector<pgc::Node> fwd{pgc::VarLeaf{0}, pgc::ProductNode{{2}}, pgc::ProductNode{{0, 1}}};
  const auto fwd_issues = pgc::validate_syntax(fwd, 1);
  CHECK(has(fwd_issues, SyntaxIssue::kNotTopological));
  REQUIRE_FALSE(fwd_issues.empty());
  CHECK(fwd_issues.front().message.find("not topologically ordered") != std::string::npos);
  std::vector<pgc::Node> oob{pgc::VarLeaf{0}, pgc::ProductNode{{7}}};
  CHECK(has(pgc::validate_syntax(oob, 1), SyntaxIssue::kChildOutOfRange));
  std::vector<pgc::Node> badvar{pgc::VarLeaf{4}};
  CHECK(has(pgc::validate_syntax(badvar, 2), SyntaxIssue::kVarOutOfRange));
  std::vector<pgc::Node> roots{pgc::VarLeaf{0}, pgc::VarLeaf{1}};
  const auto root_issues = pgc::validate_syntax(roots, 2);
  CHECK(has(root_issues, SyntaxIssue::kMultipleRoots));
  CHECK(root_issues.front().message.find("multiple roots") != std::string::npos);
  std::vector<pgc::Node> empty_sum{pgc::SumNode{}};
  CHECK(has(pgc::validate_syntax(empty_sum, 0), SyntaxIssue::kEmptyInternalNode));
  CHECK(pgc::validate_syntax(std::vector<pgc::Node>{pgc::ConstLeaf{1.0}}, 0).empty());
  CHECK_THROWS_AS(pgc::NodeCircuit(roots, 2), pgc::ContractViolation);
}

TEST_CASE("a constant circuit is the empty distribution") {
  const pgc::NodeCircuit c({pgc::ConstLeaf{1.0}}, 0);
  CHECK(pgc::marginal(c, {}) == 1.0);
  CHECK(pgc::expand_joint(c) == std::vector<double>{1.0});
}

TEST_CASE("enumeration refuses large circuits") {
  pgc::CircuitBuilder b;
  std::vector<pgc::NodeId> vars;
  for (std::size_t i = 0; i < 21; ++i) vars.push_back(b.var(i));
  b.product(vars);
  const auto c = std::move(b).build(21);
  CHECK_THROWS_AS(pgc::expand_joint(*c), pgc::RefusalError);
  CHECK(pgc::marginal(*c, {{0, 1}, {}}) == doctest::Approx(1.0));
}

TEST_CASE("semantic validation flags corrupted weights") {
  CHECK(pgc::validate_semantics(*fixture::compact_pgc()).ok());
  pgc::CircuitBuilder b;
  const auto z1 = b.var(0);
  const auto one = b.constant(1.0);
  b.sum({{z1, 1.2}, {one, -0.2}});
  const auto bad = std::move(b).build(1);
  const auto rep = pgc::validate_semantics(*bad);
  CHECK_FALSE(rep.nonnegative);
  CHECK(rep.normalized);
  CHECK(rep.max_violation == doctest::Approx(0.2));
}

TEST_CASE("ring evaluation at cap zero is numeric evaluation") {
  const auto c = fixture::compact_pgc();
  const std::vector<double> z{0.3, -1.2, 2.0};
  std::vector<pgc::Poly> leaves;
  for (double v : z) leaves.push_back(pgc::Poly::constant(v, 0));
  CHECK(c->evaluate_ring(leaves, 0).coef(0) == doctest::Approx(c->evaluate_numeric(z)));
}

TEST_CASE("pgc text format round trips") {
  const auto c = fixture::compact_pgc();
  std::stringstream ss;
  pgc::write_pgc(ss, *c);
  const auto back = pgc::read_pgc(ss);
  CHECK(back->num_vars() == 3);
  CHECK(pgc::expand_joint(*back) == pgc::expand_joint(*c));
  std::stringstream again;
  pgc::write_pgc(again, *back);
  std::stringstream first;
  pgc::write_pgc(first, *c);
  CHECK(again.str() == first.str());
}

TEST_CASE("pgc parse errors carry line numbers") {
  std::stringstream bad_kind("pgc 1 2\nv 1\nq 0\n");
  try {
    pgc::read_pgc(bad_kind);
    FAIL("expected a parse error");
  } catch (const pgc::ParseError& e) {
    CHECK(e.line() == 3);
  }
  std::stringstream bad_var("# comment\npgc 2 1\nv 3\n");
  CHECK_THROWS_AS(pgc::read_pgc(bad_var), pgc::ParseError);
  std::stringstream short_file("pgc 2 3\nv 1\nv 2\n");
  CHECK_THROWS_AS(pgc::read_pgc(short_file), pgc::ParseError);
  std::stringstream cyclic("pgc 1 2\np 1\nv 1\n");
  CHECK_THROWS_AS(pgc::read_pgc(cyclic), pgc::ParseError);
  std::stringstream bad_weight("pgc 1 2\nv 1\ns 0:abc\n");
  CHECK_THROWS_AS(pgc::read_pgc(bad_weight), pgc::ParseError);
}

TEST_CASE("format_real round trips awkward doubles") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 5e-324}) {
    CHECK(pgc::parse_real(pgc::format_real(v), 1) == v);
  }
}
