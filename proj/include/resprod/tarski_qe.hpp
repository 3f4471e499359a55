#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "resprod/boolalg.hpp"
#include "resprod/formula.hpp"

namespace resprod {

namespace qe {

// Constraint on the atom count of one minterm: a lower bound (from C_n
// literals), an optional strict upper bound (from ¬C_n literals, which also
// force finiteness), and a finiteness flag (from Fin/¬Fin literals).
enum class FinFlag { Unconstrained, MustBeFinite, MustBeInfinite };

struct Constraint {
  std::uint64_t lower = 0;
  std::optional<std::uint64_t> upper;  // count < *upper; implies finite
  FinFlag flag = FinFlag::Unconstrained;

  bool operator==(const Constraint& o) const {
    return lower == o.lower && upper == o.upper && flag == o.flag;
  }
};

// Does a finite count k satisfy the constraint?
bool admits_finite(const Constraint& c, std::uint64_t k);
// Does an infinite count satisfy it?
bool admits_infinite(const Constraint& c);

// Constraints on a parent minterm cell that are realizable as a disjoint
// split into a part satisfying a and a part satisfying b.  Zero, one, or two
// options; options are disjoint alternatives.
std::vector<Constraint> split_options(const Constraint& a, const Constraint& b);

}  // namespace qe

// Quantifier elimination for the theory of infinite atomic Boolean algebras
// with the finite-element predicate.  The output is quantifier-free over
// atoms C_n(t) and Fin(t) on minterm terms of the free variables (with the
// true/false constants rendered as "0 = 0" / "~(0 = 0)"), in a canonical
// deterministically ordered disjunctive normal form, and is equivalent to
// the input in every model of the theory.
BoolFormula eliminate_quantifiers(const BoolFormula& f);

// Canonical DNF of a quantifier-free formula; idempotent, byte-stable.
BoolFormula normalize_qf(const BoolFormula& f);

// Truth value of a sentence (free_vars empty) in the theory.
bool decide_sentence(const BoolFormula& f);

// Truth of f in the finite/cofinite standard model at the given parameters.
bool evaluate_with_params(const BoolFormula& f, const std::map<std::string, FinCofSet>& env);

// Truth of a quantifier-free formula at the given parameters (no elimination).
bool evaluate_qf(const BoolFormula& f, const std::map<std::string, FinCofSet>& env);

struct WitnessOptions {
  std::uint32_t depth_bound = 3;      // max quantifier depth accepted
  std::uint64_t eval_cap = 2'000'000; // atom-evaluation budget
  std::uint64_t split_cap = 24;       // max explicit atoms drawn per cell
};

// Independent reference oracle: evaluates quantifiers by explicit witness
// search over eventually periodic sets assembled cellwise from the minterm
// partition of the sets in scope (finitely many atoms from a cell, the cell
// minus finitely many atoms, or an infinite/co-infinite half of the cell).
bool bounded_witness_evaluate(const BoolFormula& f,
                              const std::map<std::string, FinCofSet>& env,
                              const WitnessOptions& options = {});

}  // namespace resprod
