#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "resprod/errors.hpp"
#include "resprod/formula.hpp"
#include "resprod/stalk.hpp"

using namespace resprod;

namespace {

RingFormula rf(const char* s) { return parse_ring_formula(s); }

bool sat(const FiniteRing& r, const char* s) { return eval_stalk_formula(r, rf(s), {}); }

}  // namespace

TEST_CASE("construction and validation") {
  FiniteRing z4 = FiniteRing::zmod(4);
  CHECK(z4.size() == 4);
  CHECK(z4.name_of(z4.add(3, 2)) == "1");
  CHECK(z4.name_of(z4.mul(3, 3)) == "1");
  CHECK(z4.name_of(z4.neg(1)) == "3");
  CHECK(z4.idempotents() == std::vector<Elem>{0, 1});

  FiniteRing z6 = FiniteRing::zmod(6);
  CHECK(z6.idempotents() == std::vector<Elem>{0, 1, 3, 4});
  CHECK(!is_connected(z6));
  CHECK(is_connected(z4));
  CHECK(is_connected(FiniteRing::zmod(9)));
  CHECK(is_connected(FiniteRing::gf4()));

  CHECK_THROWS_AS(FiniteRing::zmod(1), BadCarrierError);
  CHECK_THROWS_AS(FiniteRing::zmod(0), BadCarrierError);

  FiniteRing g = FiniteRing::gf4();
  Elem a = *g.index_of("a"), b = *g.index_of("b");
  CHECK(g.mul(a, a) == b);
  CHECK(g.mul(a, b) == g.one());
  CHECK(g.mul(b, b) == a);
  CHECK(g.add(a, b) == g.one());
  CHECK(g.add(a, a) == g.zero());
  CHECK(!g.index_of("c").has_value());
}

TEST_CASE("table specs and their errors") {
  FiniteRing z2 = make_ring("table(0 1; 0 1, 1 0; 0 0, 0 1)");
  CHECK(z2.size() == 2);
  CHECK(z2.add(1, 1) == 0);

  CHECK(make_ring("zmod(6)").size() == 6);
  CHECK(make_ring(" gf4 ").size() == 4);

  // broken multiplication: 1*1 = 0
  CHECK_THROWS_AS(make_ring("table(0 1; 0 1, 1 0; 0 0, 0 0)"), RingAxiomError);
  // non-associative addition via a latin square that is not a group table
  CHECK_THROWS_AS(
      make_ring("table(0 1 c; 0 1 c, 1 0 c, c c 0; 0 0 0, 0 1 c, 0 c c)"),
      RingAxiomError);
  CHECK_THROWS_AS(make_ring("table(0 1; 0 1, 1 0; 0 0, 0 x)"), BadCarrierError);
  CHECK_THROWS_AS(make_ring("table(0 1; 0 1; 0 0, 0 1)"), BadCarrierError);
  CHECK_THROWS_AS(make_ring("table(0 0; 0 0, 0 0; 0 0, 0 0)"), BadCarrierError);
  CHECK_THROWS_AS(make_ring("table(0; 0; 0)"), BadCarrierError);
  CHECK_THROWS_AS(make_ring("ring(3)"), ParseError);
  CHECK_THROWS_AS(make_ring("zmod(x)"), ParseError);
  CHECK_THROWS_AS(make_ring("zmod(99999999999)"), BadCarrierError);

  // render/parse round trip preserves the tables
  FiniteRing g = FiniteRing::gf4();
  FiniteRing g2 = make_ring(render_spec(g));
  CHECK(g2.size() == g.size());
  for (Elem x = 0; x < g.size(); ++x)
    for (Elem y = 0; y < g.size(); ++y) {
      CHECK(g2.add(x, y) == g.add(x, y));
      CHECK(g2.mul(x, y) == g.mul(x, y));
    }
}

TEST_CASE("stalk satisfaction") {
  FiniteRing g = FiniteRing::gf4();
  CHECK(!sat(g, "E x. (x*x = x & ~x = 0 & ~x = 1)"));
  CHECK(sat(g, "E x. (x*x + x = 1)"));
  CHECK(sat(FiniteRing::zmod(4), "A x. (x+x+x+x = 0)"));
  CHECK(!sat(FiniteRing::zmod(4), "A x. (x+x = 0)"));
  CHECK(sat(FiniteRing::zmod(6), "E x. (x*x = x & ~x = 0 & ~x = 1)"));
  CHECK(sat(g, "A x. (~x = 0 -> E y. x*y = 1)"));
  CHECK(!sat(FiniteRing::zmod(4), "A x. (~x = 0 -> E y. x*y = 1)"));
  CHECK(sat(g, "A x. A y. x*y = y*x"));
  CHECK(sat(g, "A x. x + -x = 0"));

  FiniteRing z5 = FiniteRing::zmod(5);
  CHECK(eval_stalk_formula(z5, rf("x*x = y"), {{"x", 2}, {"y", 4}}));
  CHECK(!eval_stalk_formula(z5, rf("x*x = y"), {{"x", 2}, {"y", 3}}));
  CHECK_THROWS_AS(eval_stalk_formula(z5, rf("x = 0"), {}), EvalError);
  CHECK_THROWS_AS(eval_stalk_formula(z5, rf("x = 0"), {{"x", 9}}), EvalError);
}

TEST_CASE("satisfaction is invariant under carrier renaming") {
  // gf4 with the carrier listed as 0 1 b a (a relabeled permutation)
  FiniteRing g = FiniteRing::gf4();
  FiniteRing p = make_ring(
      "table(0 1 B A;"
      " 0 1 B A, 1 0 A B, B A 0 1, A B 1 0;"
      " 0 0 0 0, 0 1 B A, 0 B A 1, 0 A 1 B)");
  std::vector<const char*> sentences = {
      "E x. (x*x = x & ~x = 0 & ~x = 1)",
      "E x. (x*x + x = 1)",
      "A x. (~x = 0 -> E y. x*y = 1)",
      "A x. x + x = 0",
      "E x. E y. (~x = y & x*x*x = 1 & y*y*y = 1 & ~x = 1 & ~y = 1)",
  };
  for (const char* s : sentences) CHECK(sat(g, s) == sat(p, s));

  std::mt19937 rng(31337);
  // random sentences over a small grammar, quantified over all variables
  for (int iter = 0; iter < 50; ++iter) {
    std::string inner;
    auto term = [&] {
      const char* leaves[] = {"x", "y", "0", "1"};
      std::string t = leaves[rng() % 4];
      for (int i = static_cast<int>(rng() % 3); i > 0; --i) {
        const char* ops[] = {" + ", " * "};
        t = "(" + t + ops[rng() % 2] + leaves[rng() % 4] + ")";
      }
      return t;
    };
    inner = term() + " = " + term();
    if (rng() & 1) inner = "~(" + inner + ")";
    std::string sentence = "A x. E y. " + inner;
    CHECK(sat(g, sentence.c_str()) == sat(p, sentence.c_str()));
  }
}

TEST_CASE("restricting formulas") {
  FiniteRing g = FiniteRing::gf4();
  std::set<Elem> prime = validate_restricting_formula(g, rf("x*x = x"));
  CHECK(prime == std::set<Elem>{0, 1});

  CHECK_THROWS_AS(validate_restricting_formula(g, rf("x = 0")), NotUnitalSubringError);
  CHECK_THROWS_AS(validate_restricting_formula(FiniteRing::zmod(4), rf("x*x = x")),
                  NotUnitalSubringError);
  try {
    validate_restricting_formula(FiniteRing::zmod(4), rf("x*x = x"));
    FAIL("expected NotUnitalSubringError");
  } catch (const NotUnitalSubringError& e) {
    CHECK(std::string(e.what()).find("1 + 1 = 2") != std::string::npos);
  }
  CHECK_THROWS_AS(validate_restricting_formula(g, rf("x = y")), ShapeError);
  CHECK_THROWS_AS(validate_restricting_formula(g, rf("0 = 0")), ShapeError);

  // whole ring always qualifies
  CHECK(validate_restricting_formula(g, rf("x = x")).size() == 4);

  // the subset carries a ring structure of its own
  FiniteRing f2 = restrict_to(g, prime);
  CHECK(f2.size() == 2);
  CHECK(f2.add(1, 1) == 0);
  CHECK(is_connected(f2));
  CHECK(sat(f2, "A x. (x = 0 | x = 1)"));

  // zmod(9): the image of 3 generates {0,3,6}, not unital
  CHECK_THROWS_AS(
      validate_restricting_formula(FiniteRing::zmod(9), rf("E y. x = y+y+y")),
      NotUnitalSubringError);
  // but the full zmod(9) restricted to squares-closure: x = x works
  FiniteRing z9 = FiniteRing::zmod(9);
  CHECK(restrict_to(z9, validate_restricting_formula(z9, rf("x = x"))).size() == 9);
}
