#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace resprod {

// Terms of the ring language: variables, 0, 1, -t, t + t, t * t.
class RingTerm {
public:
  enum class Kind { Var, Zero, One, Neg, Add, Mul };

  static RingTerm var(std::string name);
  static RingTerm zero();
  static RingTerm one();
  static RingTerm neg(RingTerm t);
  static RingTerm add(RingTerm l, RingTerm r);
  static RingTerm mul(RingTerm l, RingTerm r);

  Kind kind() const;
  const std::string& name() const;  // Var
  RingTerm lhs() const;             // Add, Mul
  RingTerm rhs() const;             // Add, Mul
  RingTerm sub() const;             // Neg

  bool operator==(const RingTerm& o) const;
  bool operator!=(const RingTerm& o) const { return !(*this == o); }

  struct Node;

private:
  friend class RingFormula;
  explicit RingTerm(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

// First-order formulas over the ring language.
class RingFormula {
public:
  enum class Kind { Eq, Not, And, Or, Implies, Exists, Forall };

  static RingFormula eq(RingTerm l, RingTerm r);
  static RingFormula not_(RingFormula f);
  static RingFormula and_(RingFormula l, RingFormula r);
  static RingFormula or_(RingFormula l, RingFormula r);
  static RingFormula implies(RingFormula l, RingFormula r);
  static RingFormula exists(std::string var, RingFormula body);
  static RingFormula forall(std::string var, RingFormula body);

  Kind kind() const;
  RingTerm term_lhs() const;  // Eq
  RingTerm term_rhs() const;  // Eq
  RingFormula lhs() const;    // And, Or, Implies
  RingFormula rhs() const;
  RingFormula sub() const;    // Not
  const std::string& var() const;  // Exists, Forall
  RingFormula body() const;        // Exists, Forall

  bool operator==(const RingFormula& o) const;
  bool operator!=(const RingFormula& o) const { return !(*this == o); }

  struct Node;

private:
  explicit RingFormula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

// Terms of the Boolean-algebra language: variables, 0, 1, meet, join,
// complement, difference.
class BoolTerm {
public:
  enum class Kind { Var, Zero, One, Meet, Join, Compl, Diff };

  static BoolTerm var(std::string name);
  static BoolTerm zero();
  static BoolTerm one();
  static BoolTerm meet(BoolTerm l, BoolTerm r);
  static BoolTerm join(BoolTerm l, BoolTerm r);
  static BoolTerm complement(BoolTerm t);
  static BoolTerm diff(BoolTerm l, BoolTerm r);

  Kind kind() const;
  const std::string& name() const;  // Var
  BoolTerm lhs() const;             // Meet, Join, Diff
  BoolTerm rhs() const;
  BoolTerm sub() const;             // Compl

  bool operator==(const BoolTerm& o) const;
  bool operator!=(const BoolTerm& o) const { return !(*this == o); }

  struct Node;

private:
  friend class BoolFormula;
  explicit BoolTerm(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

// Formulas of the Boolean-algebra language with the finiteness predicate:
// atoms t1 = t2, t1 <= t2, Cn(t) ("t has at least n atoms below it", n >= 1)
// and Fin(t), closed under ~ & | -> and quantifiers.
class BoolFormula {
public:
  enum class Kind { Equal, Leq, Count, Fin, Not, And, Or, Implies, Exists, Forall };

  static BoolFormula equal(BoolTerm l, BoolTerm r);
  static BoolFormula leq(BoolTerm l, BoolTerm r);
  static BoolFormula count_at_least(std::uint32_t n, BoolTerm t);  // n >= 1
  static BoolFormula fin(BoolTerm t);
  static BoolFormula not_(BoolFormula f);
  static BoolFormula and_(BoolFormula l, BoolFormula r);
  static BoolFormula or_(BoolFormula l, BoolFormula r);
  static BoolFormula implies(BoolFormula l, BoolFormula r);
  static BoolFormula exists(std::string var, BoolFormula body);
  static BoolFormula forall(std::string var, BoolFormula body);

  Kind kind() const;
  BoolTerm term_lhs() const;  // Equal, Leq
  BoolTerm term_rhs() const;
  BoolTerm term() const;      // Count, Fin
  std::uint32_t count() const;  // Count
  BoolFormula lhs() const;    // And, Or, Implies
  BoolFormula rhs() const;
  BoolFormula sub() const;    // Not
  const std::string& var() const;  // Exists, Forall
  BoolFormula body() const;        // Exists, Forall

  bool operator==(const BoolFormula& o) const;
  bool operator!=(const BoolFormula& o) const { return !(*this == o); }

  struct Node;

private:
  explicit BoolFormula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

// Parsing.  Both parsers report 1-based line/column positions and the tokens
// acceptable at the point of failure, and alpha-rename shadowed binders so
// that no variable is bound twice on one branch.
RingFormula parse_ring_formula(const std::string& text);
RingTerm parse_ring_term(const std::string& text);
BoolFormula parse_bool_formula(const std::string& text);
BoolTerm parse_bool_term(const std::string& text);

// Rendering.  Fully parenthesized and deterministic; parse(render(a)) == a.
std::string render(const RingTerm& t);
std::string render(const RingFormula& f);
std::string render(const BoolTerm& t);
std::string render(const BoolFormula& f);

std::set<std::string> free_vars(const RingFormula& f);
std::set<std::string> free_vars(const BoolFormula& f);
std::set<std::string> term_vars(const RingTerm& t);
std::set<std::string> term_vars(const BoolTerm& t);

// Capture-avoiding substitution of a term for a free variable.
RingFormula substitute(const RingFormula& f, const std::string& var, const RingTerm& term);
BoolFormula substitute(const BoolFormula& f, const std::string& var, const BoolTerm& term);
// Simultaneous capture-avoiding substitution.
BoolFormula substitute_all(const BoolFormula& f, const std::map<std::string, BoolTerm>& map);

// A finite partition of logical space by ring formulas.
struct Partition {
  std::vector<RingFormula> cells;
};

// All 2^l sign combinations of the given formulas, ordered lexicographically
// in sign patterns with the positive sign first; the empty input yields the
// single trivial cell "0 = 0".
Partition sign_partition(std::span<const RingFormula> formulas);

// Rewrites a ring formula using only ~, & and E (| -> A are expanded).
RingFormula to_nae_normal_form(const RingFormula& f);

// First name of the form base, base', base'', ... not present in avoid.
std::string fresh_name(const std::string& base, const std::set<std::string>& avoid);

std::uint32_t max_count_index(const BoolFormula& f);  // 0 when no Cn atom occurs
std::uint32_t quantifier_depth(const BoolFormula& f);
std::uint32_t quantifier_depth(const RingFormula& f);

}  // namespace resprod
