// Acceptance gate: runs the seven release criteria and prints one PASS/FAIL
// line each.  Exit status is nonzero when any criterion fails or overruns its
// time budget.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "resprod/boolalg.hpp"
#include "resprod/errors.hpp"
#include "resprod/fv.hpp"
#include "resprod/rprod.hpp"
#include "resprod/tarski_qe.hpp"

using namespace resprod;

namespace {

int g_failed_checks = 0;

void expect(bool ok, const char* what) {
  if (ok) return;
  ++g_failed_checks;
  std::fprintf(stderr, "    check failed: %s\n", what);
}

RPModel gf4_idem() { return make_model("gf4", "x * x = x"); }
RPModel gf4_full() { return make_model("gf4", "x = x"); }
RPModel z2_triv() { return make_model("zmod(2)", "x = x"); }
RPModel z2_z4() { return make_model("zmod(2)", "x = x", {{0, "zmod(4)"}}); }

std::vector<RPElement> bind_sorted(const RingFormula& f,
                                   const std::map<std::string, RPElement>& env) {
  std::vector<RPElement> argv;
  for (const auto& v : free_vars(f)) argv.push_back(env.at(v));
  return argv;
}

RingTerm rand_term(std::mt19937& rng, const std::vector<std::string>& vars, int depth) {
  if (depth == 0 || std::uniform_int_distribution<int>(0, 2)(rng) == 0) {
    int k = std::uniform_int_distribution<int>(0, 3)(rng);
    if (k == 0) return RingTerm::zero();
    if (k == 1) return RingTerm::one();
    return RingTerm::var(vars[std::uniform_int_distribution<std::size_t>(0, vars.size() - 1)(rng)]);
  }
  int k = std::uniform_int_distribution<int>(0, 2)(rng);
  if (k == 0) return RingTerm::neg(rand_term(rng, vars, depth - 1));
  RingTerm l = rand_term(rng, vars, depth - 1);
  RingTerm r = rand_term(rng, vars, depth - 1);
  return k == 1 ? RingTerm::add(l, r) : RingTerm::mul(l, r);
}

RingFormula rand_matrix(std::mt19937& rng, const std::vector<std::string>& vars, int atom_count) {
  std::vector<RingFormula> atoms;
  for (int k = 0; k < atom_count; ++k)
    atoms.push_back(RingFormula::eq(rand_term(rng, vars, 2), rand_term(rng, vars, 2)));
  RingFormula f = atoms[0];
  if (std::uniform_int_distribution<int>(0, 1)(rng)) f = RingFormula::not_(f);
  for (std::size_t k = 1; k < atoms.size(); ++k) {
    RingFormula a = atoms[k];
    if (std::uniform_int_distribution<int>(0, 1)(rng)) a = RingFormula::not_(a);
    switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
      case 0: f = RingFormula::and_(f, a); break;
      case 1: f = RingFormula::or_(f, a); break;
      default: f = RingFormula::implies(f, a); break;
    }
  }
  return f;
}

RingFormula close_exists(const std::vector<std::string>& vars, RingFormula matrix) {
  for (auto it = vars.rbegin(); it != vars.rend(); ++it)
    matrix = RingFormula::exists(*it, matrix);
  return matrix;
}

RingFormula close_forall(const std::vector<std::string>& vars, RingFormula matrix) {
  for (auto it = vars.rbegin(); it != vars.rend(); ++it)
    matrix = RingFormula::forall(*it, matrix);
  return matrix;
}

FinCofSet random_fincof(std::mt19937& rng) {
  std::set<Index> support;
  int n = static_cast<int>(rng() % 7);
  for (int i = 0; i < n; ++i) support.insert(rng() % 13);
  if (rng() & 1) return FinCofSet::finite(support);
  return FinCofSet::cofinite(support);
}

struct FormulaGen {
  std::mt19937 rng;
  int next_fresh = 0;

  explicit FormulaGen(std::uint32_t seed) : rng(seed) {}

  BoolTerm term(const std::vector<std::string>& scope, int depth) {
    std::uniform_int_distribution<int> pick(0, depth > 0 ? 5 : 1);
    switch (pick(rng)) {
      case 0:
      case 1: {
        if (scope.empty() || rng() % 5 == 0) return rng() & 1 ? BoolTerm::zero() : BoolTerm::one();
        return BoolTerm::var(scope[rng() % scope.size()]);
      }
      case 2: return BoolTerm::meet(term(scope, depth - 1), term(scope, depth - 1));
      case 3: return BoolTerm::join(term(scope, depth - 1), term(scope, depth - 1));
      case 4: return BoolTerm::diff(term(scope, depth - 1), term(scope, depth - 1));
      default: return BoolTerm::complement(term(scope, depth - 1));
    }
  }

  BoolFormula atom(const std::vector<std::string>& scope) {
    switch (rng() % 5) {
      case 0: return BoolFormula::count_at_least(1 + rng() % 3, term(scope, 2));
      case 1: return BoolFormula::count_at_least(1 + rng() % 3, term(scope, 1));
      case 2: return BoolFormula::fin(term(scope, 2));
      case 3: return BoolFormula::leq(term(scope, 1), term(scope, 1));
      default: return BoolFormula::equal(term(scope, 1), term(scope, 1));
    }
  }

  BoolFormula formula(std::vector<std::string> scope, int cdepth, int qbudget) {
    int roll = static_cast<int>(rng() % 10);
    if (cdepth == 0 || roll < 3) return atom(scope);
    if (roll < 5 && qbudget > 0) {
      std::string q = "q" + std::to_string(next_fresh++);
      scope.push_back(q);
      BoolFormula body = formula(scope, cdepth - 1, qbudget - 1);
      return rng() & 1 ? BoolFormula::exists(q, body) : BoolFormula::forall(q, body);
    }
    switch (roll % 4) {
      case 0: return BoolFormula::not_(formula(scope, cdepth - 1, qbudget));
      case 1:
        return BoolFormula::and_(formula(scope, cdepth - 1, qbudget),
                                 formula(scope, cdepth - 1, qbudget));
      case 2:
        return BoolFormula::or_(formula(scope, cdepth - 1, qbudget),
                                formula(scope, cdepth - 1, qbudget));
      default:
        return BoolFormula::implies(formula(scope, cdepth - 1, qbudget),
                                    formula(scope, cdepth - 1, qbudget));
    }
  }
};

// --- 1: Boolean values compose homomorphically --------------------------------

void criterion_values() {
  std::mt19937 rng(1001);
  const std::vector<std::string> xy = {"x", "y"};
  for (const RPModel& m : {gf4_idem(), z2_triv()}) {
    for (int k = 0; k < 200; ++k) {
      RingFormula t1 = rand_matrix(rng, xy, 2);
      RingFormula t2 = rand_matrix(rng, xy, 2);
      std::map<std::string, RPElement> env = {{"x", random_element(m, rng)},
                                              {"y", random_element(m, rng)}};
      FinCofSet v1 = boolean_value(m, t1, bind_sorted(t1, env));
      FinCofSet v2 = boolean_value(m, t2, bind_sorted(t2, env));
      RingFormula conj = RingFormula::and_(t1, t2);
      RingFormula disj = RingFormula::or_(t1, t2);
      RingFormula nt1 = RingFormula::not_(t1);
      expect(boolean_value(m, conj, bind_sorted(conj, env)) == v1.meet(v2),
             "value of a conjunction is the meet");
      expect(boolean_value(m, disj, bind_sorted(disj, env)) == v1.join(v2),
             "value of a disjunction is the join");
      expect(boolean_value(m, nt1, bind_sorted(nt1, env)) == v1.complement(),
             "value of a negation is the complement");
    }
  }
}

// --- 2: axiom checker, clean and fault-injected --------------------------------

void criterion_axioms() {
  for (const RPModel& m : {gf4_idem(), z2_triv(), z2_z4()}) {
    AxiomReport rep = check_axioms(m, 100, 99);
    expect(rep.all_passed(), "check-axioms passes with 100 samples");
    expect(rep.render().find("FAIL") == std::string::npos, "clean report has no FAIL line");
  }

  BooleanValueHook flip = [](const FinCofSet& s) {
    FinCofSet bit = FinCofSet::finite({0});
    return s.contains(0) ? s.diff(bit) : s.join(bit);
  };
  AxiomReport rep = check_axioms(z2_z4(), 100, 99, flip);
  expect(!rep.all_passed(), "fault-injected run fails");
  bool named = false;
  for (const auto& c : rep.checks)
    if (!c.passed && !c.axiom.empty() && rep.render().find(c.axiom) != std::string::npos)
      named = true;
  expect(named, "failing report names the broken axiom");
}

// --- 3: sentence decisions over the finite/cofinite algebra --------------------

void criterion_sentences() {
  std::vector<std::string> valid = {
      "~(Fin(1))",
      "A x. (x = 0 | E y. ((y <= x & C1(y)) & ~(C2(y))))",
  };
  for (int n = 1; n <= 5; ++n) {
    valid.push_back("A x. (~(C" + std::to_string(n + 1) + "(x)) -> Fin(x))");
    valid.push_back("A x. (~(Fin(x)) -> E y. ((y <= x & C" + std::to_string(n) +
                    "(y)) & ~(Fin(x \\ y))))");
  }
  for (const std::string& s : valid)
    expect(decide_sentence(parse_bool_formula(s)), ("valid: " + s).c_str());
  for (const char* s : {"Fin(1)", "C1(0)"})
    expect(!decide_sentence(parse_bool_formula(s)), "refutable sentence decided false");
}

// --- 4: quantifier elimination vs. bounded witness search ----------------------

void criterion_qe_oracle() {
  FormulaGen gen(41001);
  std::mt19937 envrng(41002);
  int completed = 0, attempts = 0;
  while (completed < 300 && attempts < 600) {
    ++attempts;
    BoolFormula f = gen.formula({"g", "h"}, 3, 2);
    std::vector<std::pair<bool, bool>> results;
    bool overflow = false;
    for (int a = 0; a < 20 && !overflow; ++a) {
      std::map<std::string, FinCofSet> env{{"g", random_fincof(envrng)},
                                           {"h", random_fincof(envrng)}};
      bool mine = evaluate_with_params(f, env);
      try {
        results.emplace_back(mine, bounded_witness_evaluate(f, env));
      } catch (const ResourceLimitError&) {
        overflow = true;  // oracle budget blown: redraw the formula
      }
    }
    if (overflow) continue;
    ++completed;
    for (const auto& [mine, oracle] : results)
      expect(mine == oracle, "evaluate_with_params agrees with the witness oracle");
  }
  expect(completed == 300, "300 formulas cross-validated within the attempt budget");
}

// --- 5: reduction pipeline vs. direct product semantics ------------------------

void criterion_pipeline() {
  RPModel mi = gf4_idem();
  RPModel mf = gf4_full();
  RPModel m2 = z2_triv();
  RPModel mz = z2_z4();

  RingFormula sigma = parse_ring_formula("E x. E u. (u * (x * x + x) = 1)");
  expect(!decide_in_model(mi, sigma), "unit-of-x^2+x fails in the restricted product");
  expect(decide_in_model(mf, sigma), "unit-of-x^2+x holds in the full product");
  expect(decide_in_model(mi, sigma) == sigma1_decide(mi, sigma), "sigma matches direct (idem)");
  expect(decide_in_model(mf, sigma) == sigma1_decide(mf, sigma), "sigma matches direct (full)");

  RingFormula mid = parse_ring_formula("E x. ((x * x = x & ~(x = 0)) & ~(x = 1))");
  expect(decide_in_model(m2, mid), "a proper idempotent exists over zmod(2)");
  expect(decide_in_model(m2, mid) == sigma1_decide(m2, mid), "mid matches direct");

  RingFormula pow = parse_ring_formula("A x. (x * x * x * x = x)");
  expect(decide_in_model(mi, pow), "x^4 = x holds in the restricted gf4 product");
  expect(decide_in_model(mf, pow), "x^4 = x holds in the full gf4 product");
  expect(!decide_in_model(mz, pow), "x^4 = x fails with a zmod(4) coordinate");
  for (const RPModel& m : {mi, mf, mz})
    expect(decide_in_model(m, pow) == pi1_decide(m, pow), "pow matches direct");

  std::mt19937 rng(51001);
  for (const RPModel& m : {mi, mf, m2, mz}) {
    for (int k = 0; k < 25; ++k) {
      std::vector<std::string> vars = {"x"};
      if (rng() & 1) vars.push_back("y");
      RingFormula matrix = rand_matrix(rng, vars, 1 + static_cast<int>(rng() % 3));
      if (k & 1) {
        RingFormula s = close_forall(vars, matrix);
        expect(decide_in_model(m, s) == pi1_decide(m, s), "universal sentence matches direct");
      } else {
        RingFormula s = close_exists(vars, matrix);
        expect(decide_in_model(m, s) == sigma1_decide(m, s), "existential sentence matches direct");
      }
    }
  }
}

// --- 6: reductions render identically across fresh builds ----------------------

void criterion_regression() {
  struct Row {
    const char* cfg;
    const char* theta;
  };
  const Row rows[] = {
      {"tail = gf4\nphi = \"x * x = x\"\n", "E x. E u. (u * (x * x + x) = 1)"},
      {"tail = zmod(2)\nphi = \"x = x\"\n", "E x. ((x * x = x & ~(x = 0)) & ~(x = 1))"},
      {"tail = gf4\nphi = \"x = x\"\n", "A x. (x * x * x * x = x)"},
      {"tail = zmod(2)\nphi = \"x = x\"\nexception 0 = zmod(4)\n", "A x. (x * x * x * x = x)"},
  };
  for (const Row& row : rows) {
    auto once = [&row] {
      RPModel m = parse_model_config(row.cfg);
      ReduceOptions opt;
      opt.prune_model = m;
      return render(reduce(parse_ring_formula(row.theta), m.phi(), opt));
    };
    std::string a = once();
    std::string b = once();
    expect(!a.empty() && a == b, "pruned reduction is byte-stable across fresh parses");
  }

  // same answer whether the model came from a config or the factory
  {
    RPModel from_cfg = parse_model_config(rows[0].cfg);
    RPModel from_api = gf4_idem();
    ReduceOptions oc, oa;
    oc.prune_model = from_cfg;
    oa.prune_model = from_api;
    RingFormula theta = parse_ring_formula(rows[0].theta);
    expect(render(reduce(theta, from_cfg.phi(), oc)) == render(reduce(theta, from_api.phi(), oa)),
           "config-built and factory-built models reduce identically");
  }

  RingFormula phi = parse_ring_formula("x * x = x");
  expect(render(reduce(parse_ring_formula("x + u = 1"), phi)) ==
             render(reduce(parse_ring_formula("x + u = 1"), phi)),
         "unpruned reduction is byte-stable");
  expect(render(reduce(parse_ring_formula("x = 0"), phi)) ==
             "cell y0: x = 0\n"
             "cell y1: ~(x = 0)\n"
             "psi: y0 = 1\n"
             "trace: atomic -> 2 cells\n",
         "atomic reduction matches the pinned rendering");
}

// --- 7: sharp pairs never exist off the degenerate case ------------------------

void criterion_probe() {
  const std::vector<std::set<Index>> supports = {{0}, {2, 5}, {1, 2, 3}};
  for (const RPModel& m : {gf4_idem(), z2_z4()}) {
    for (const auto& sup : supports) {
      std::map<Index, Elem> exc;
      for (Index i : sup) exc[i] = 1;
      RPElement e = make_element(m, 0, exc);
      expect(ring_mul(e, e) == e, "probe target is idempotent");
      expect(!sharp_probe(m, e, 20000).has_value(),
             "no unit pair separates a finite idempotent");
    }
    expect(sharp_probe(m, make_element(m, 0), 100).has_value(), "zero is degenerate");
  }

  for (const RPModel& m : {gf4_idem(), z2_z4()}) {
    FinCharacterization chr = fin_defining_characterization(m.phi());
    std::mt19937 rng(71001);
    for (int k = 0; k < 50; ++k) {
      RPElement g = random_element(m, rng);
      RPElement h = random_element(m, rng);
      std::map<std::string, RPElement> env;
      auto fv = free_vars(chr.condition);
      auto it = fv.begin();
      env.emplace(*it++, g);
      env.emplace(*it, h);
      expect(is_fin(boolean_value(m, chr.condition, bind_sorted(chr.condition, env))),
             "probed value is finite for arbitrary pairs");
    }
  }
}

bool run(int id, const char* name, double limit_s, const std::function<void()>& body) {
  g_failed_checks = 0;
  std::string threw;
  auto t0 = std::chrono::steady_clock::now();
  try {
    body();
  } catch (const std::exception& e) {
    ++g_failed_checks;
    threw = e.what();
  }
  double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool over = limit_s > 0 && dt > limit_s;
  bool ok = g_failed_checks == 0 && !over;
  std::printf("%s criterion %d: %s (%.2fs)\n", ok ? "PASS" : "FAIL", id, name, dt);
  if (!threw.empty()) std::printf("    unexpected exception: %s\n", threw.c_str());
  if (over) std::printf("    over the %.0fs budget\n", limit_s);
  return ok;
}

}  // namespace

int main() {
  int failed = 0;
  failed += !run(1, "Boolean values compose homomorphically", 30, criterion_values);
  failed += !run(2, "axiom checker, clean and fault-injected", 60, criterion_axioms);
  failed += !run(3, "sentence decisions over the finite/cofinite algebra", 5, criterion_sentences);
  failed += !run(4, "quantifier elimination vs. bounded witness search", 300, criterion_qe_oracle);
  failed += !run(5, "reduction pipeline vs. direct product semantics", 600, criterion_pipeline);
  failed += !run(6, "reductions render identically across fresh builds", 0, criterion_regression);
  failed += !run(7, "sharp pairs never exist off the degenerate case", 60, criterion_probe);
  if (failed) std::printf("%d of 7 criteria failed\n", failed);
  else std::printf("all 7 criteria passed\n");
  return failed ? 1 : 0;
}
