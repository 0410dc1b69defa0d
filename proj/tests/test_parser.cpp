#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>

#include "gfuzz/earley.hpp"
#include "gfuzz/generator.hpp"
#include "gfuzz/learner.hpp"
#include "test_helpers.hpp"

using namespace gfuzz;

namespace {

bool trees_equal(const DerivationTree::Node& a, const DerivationTree::Node& b) {
  if (a.symbol != b.symbol || a.choice != b.choice ||
      a.children.size() != b.children.size())
    return false;
  for (size_t i = 0; i < a.children.size(); ++i)
    if (!trees_equal(a.children[i], b.children[i])) return false;
  return true;
}

}  // namespace

TEST_CASE("\"[]\" has the unique parse found by enumeration") {
  Grammar g = test::list_grammar();
  EarleyParser parser(g);
  DerivationTree tree = parser.parse("[]");
  CHECK(tree.yield() == "[]");
  CHECK(tree.root.symbol == "start");
  CHECK(tree.root.choice == 0);
  REQUIRE(tree.root.children.size() == 1);
  CHECK(tree.root.children[0].symbol == "list");
  CHECK(tree.root.children[0].choice == 0);

  // Oracle: every derivation up to height 6 yields "[]" exactly once, and
  // that derivation is the parser's tree.
  auto all = test::derivations_up_to_height(g, 6);
  std::vector<const DerivationTree*> matching;
  for (const auto& t : all)
    if (t.yield() == "[]") matching.push_back(&t);
  REQUIRE(matching.size() == 1);
  CHECK(trees_equal(matching[0]->root, tree.root));
}

TEST_CASE("\"[1,1]\" choice census matches the enumeration oracle") {
  Grammar g = test::list_grammar();
  EarleyParser parser(g);
  DerivationTree tree = parser.parse("[1,1]");
  CHECK(tree.yield() == "[1,1]");

  auto all = test::derivations_up_to_height(g, 7);
  std::vector<const DerivationTree*> matching;
  for (const auto& t : all)
    if (t.yield() == "[1,1]") matching.push_back(&t);
  REQUIRE(matching.size() == 1);
  CHECK(trees_equal(matching[0]->root, tree.root));

  ChoiceCounts counts = count_choices({tree}, g);
  CHECK(counts.at(g, "start", 0) == 1);
  CHECK(counts.at(g, "list", 0) == 0);
  CHECK(counts.at(g, "list", 1) == 1);
  CHECK(counts.at(g, "items", 0) == 1);
  CHECK(counts.at(g, "items", 1) == 1);
  CHECK(counts.at(g, "item", 0) == 2);
  CHECK(counts.at(g, "item", 1) == 0);
}

TEST_CASE("parse failure reports furthest offset and expected terminals") {
  Grammar g = test::list_grammar();
  EarleyParser parser(g);
  try {
    parser.parse("[2]");
    FAIL("expected parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset == 1);
    CHECK(std::find(e.expected.begin(), e.expected.end(), "]") != e.expected.end());
    CHECK(std::find(e.expected.begin(), e.expected.end(), "1") != e.expected.end());
  }
}

TEST_CASE("count_choices: single \"[]\" tree and empty sequence") {
  Grammar g = test::list_grammar();
  EarleyParser parser(g);
  ChoiceCounts counts = count_choices({parser.parse("[]")}, g);
  CHECK(counts.at(g, "list", 0) == 1);
  CHECK(counts.at(g, "list", 1) == 0);
  CHECK(counts.at(g, "items", 0) == 0);
  CHECK(counts.at(g, "item", 0) == 0);

  ChoiceCounts empty = count_choices({}, g);
  CHECK(empty.total() == 0);
}

TEST_CASE("count_choices rejects trees that do not fit the grammar") {
  Grammar g = test::list_grammar();
  DerivationTree bogus;
  bogus.root.symbol = "nothere";
  bogus.root.choice = 0;
  CHECK_THROWS_AS(count_choices({bogus}, g), GrammarError);
  DerivationTree bad_choice;
  bad_choice.root.symbol = "list";
  bad_choice.root.choice = 7;
  CHECK_THROWS_AS(count_choices({bad_choice}, g), GrammarError);
}

TEST_CASE("learn_probabilities: relative frequency, uniform fallback, zero stays zero") {
  Grammar g = parse_grammar_text("a : \"x\" | \"y\" ;");
  ChoiceCounts counts(g);
  counts.add(0, 0, 7);
  counts.add(0, 1, 3);
  ProbabilisticGrammar pg = learn_probabilities(g, counts);
  CHECK(pg.prob("a", 0) == doctest::Approx(0.7));
  CHECK(pg.prob("a", 1) == doctest::Approx(0.3));

  ProbabilisticGrammar uniform = learn_probabilities(g, ChoiceCounts(g));
  CHECK(uniform.prob("a", 0) == doctest::Approx(0.5));

  ChoiceCounts onesided(g);
  onesided.add(0, 0, 5);
  ProbabilisticGrammar zero = learn_probabilities(g, onesided);
  CHECK(zero.prob("a", 0) == 1.0);
  CHECK(zero.prob("a", 1) == 0.0);
}

TEST_CASE("learn_from_corpus on the toy list grammar") {
  Grammar g = test::list_grammar();
  SUBCASE("single \"[]\"") {
    auto result = learn_from_corpus(g, {"[]"});
    CHECK(result.pg.prob("list", 0) == 1.0);
    CHECK(result.pg.prob("list", 1) == 0.0);
    CHECK(result.pg.prob("items", 0) == doctest::Approx(0.5));
    CHECK(result.pg.prob("item", 0) == doctest::Approx(0.5));
  }
  SUBCASE("\"[]\" and \"[1,1]\"") {
    auto result = learn_from_corpus(g, {"[]", "[1,1]"});
    CHECK(result.pg.prob("list", 0) == doctest::Approx(0.5));
    CHECK(result.pg.prob("list", 1) == doctest::Approx(0.5));
    CHECK(result.pg.prob("items", 0) == doctest::Approx(0.5));
    CHECK(result.pg.prob("items", 1) == doctest::Approx(0.5));
    CHECK(result.pg.prob("item", 0) == 1.0);
    CHECK(result.pg.prob("item", 1) == 0.0);
  }
  SUBCASE("unparseable texts are skipped and reported") {
    auto result = learn_from_corpus(g, {"oops", "[]"});
    CHECK(result.failed == 1);
    CHECK(result.parsed == 1);
    CHECK_FALSE(result.statuses[0].ok);
    CHECK(result.statuses[1].ok);
    CHECK(result.pg.prob("list", 0) == 1.0);
  }
  SUBCASE("all texts unparseable is an error") {
    CHECK_THROWS_AS(learn_from_corpus(g, {"oops", "nope"}), GrammarError);
  }
}

TEST_CASE("disambiguation is deterministic and prefers the lowest choice index") {
  // "x" parses via choice 0 or choice 1; the tree must use choice 0.
  Grammar g = parse_grammar_text("s : a | b ; a : \"x\" ; b : \"x\" ;");
  EarleyParser parser(g);
  DerivationTree t1 = parser.parse("x");
  CHECK(t1.root.choice == 0);
  CHECK(t1.root.children[0].symbol == "a");
  DerivationTree t2 = parser.parse("x");
  CHECK(trees_equal(t1.root, t2.root));
}

TEST_CASE("left-recursive grammars parse") {
  Grammar g = parse_grammar_text(
      "expr : term | expr \"+\" term ; term : \"1\" | \"(\" expr \")\" ;");
  EarleyParser parser(g);
  DerivationTree tree = parser.parse("1+1+(1+1)");
  CHECK(tree.yield() == "1+1+(1+1)");
}

TEST_CASE("epsilon choices parse and count") {
  Grammar g = parse_grammar_text("s : \"a\" t \"b\" ; t : \"\" | \"x\" t ;");
  EarleyParser parser(g);
  CHECK(parser.parse("ab").yield() == "ab");
  CHECK(parser.parse("axxb").yield() == "axxb");
  ChoiceCounts counts = count_choices({parser.parse("axxb")}, g);
  CHECK(counts.at(g, "t", 0) == 1);
  CHECK(counts.at(g, "t", 1) == 2);
}

TEST_CASE("empty input parses iff start is nullable") {
  Grammar nullable = parse_grammar_text("s : \"\" | \"a\" s ;");
  EarleyParser p1(nullable);
  CHECK(p1.parse("").yield().empty());
  CHECK(p1.parse("aaa").yield() == "aaa");

  Grammar strict = test::list_grammar();
  EarleyParser p2(strict);
  CHECK_THROWS_AS(p2.parse(""), ParseError);
}

TEST_CASE("yield round-trip on generated inputs") {
  Grammar g = test::list_grammar();
  ProbabilisticGrammar pg = uniform_probabilities(g);
  EarleyParser parser(g);
  Rng rng(1234);
  Generator generator(pg, GeneratorLimits{16, 10000});
  for (int i = 0; i < 200; ++i) {
    Individual ind = generator.generate(rng);
    DerivationTree tree = parser.parse(ind.text);
    CHECK(tree.yield() == ind.text);
  }
}

TEST_CASE("count conservation: per-rule totals equal node counts") {
  Grammar g = test::list_grammar();
  EarleyParser parser(g);
  DerivationTree tree = parser.parse("[1,[],1]");
  ChoiceCounts counts = count_choices({tree}, g);
  CHECK(counts.total() == tree.expansion_count());
}
