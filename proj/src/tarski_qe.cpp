#include "resprod/tarski_qe.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <set>
#include <tuple>

#include "resprod/errors.hpp"
#include "resprod/evset.hpp"

namespace resprod {

namespace qe {

bool admits_finite(const Constraint& c, std::uint64_t k) {
  if (c.flag == FinFlag::MustBeInfinite) return false;
  if (k < c.lower) return false;
  return !c.upper || k < *c.upper;
}

bool admits_infinite(const Constraint& c) {
  return !c.upper && c.flag != FinFlag::MustBeFinite;
}

}  // namespace qe

namespace {

using qe::Constraint;
using qe::FinFlag;

// nullopt = unsatisfiable.  Satisfiable constraints are put in canonical
// form: an upper bound forces finiteness (a bounded set is finite), so the
// flag collapses to Unconstrained; MustBeInfinite absorbs every lower bound.
std::optional<Constraint> canon(Constraint c) {
  if (c.upper) {
    if (c.flag == FinFlag::MustBeInfinite) return std::nullopt;
    if (c.lower >= *c.upper) return std::nullopt;
    c.flag = FinFlag::Unconstrained;
  }
  if (c.flag == FinFlag::MustBeInfinite) c.lower = 0;
  return c;
}

bool is_trivial(const Constraint& c) {
  return c.lower == 0 && !c.upper && c.flag == FinFlag::Unconstrained;
}

std::optional<Constraint> merge_and(const Constraint& a, const Constraint& b) {
  Constraint c;
  c.lower = std::max(a.lower, b.lower);
  if (a.upper && b.upper) c.upper = std::min(*a.upper, *b.upper);
  else c.upper = a.upper ? a.upper : b.upper;
  if (a.flag == b.flag || b.flag == FinFlag::Unconstrained) c.flag = a.flag;
  else if (a.flag == FinFlag::Unconstrained) c.flag = b.flag;
  else return std::nullopt;  // MustBeFinite against MustBeInfinite
  return canon(c);
}

// Does every value satisfying a also satisfy b?
bool constraint_implies(const Constraint& a, const Constraint& b) {
  if (b.upper && (!a.upper || *a.upper > *b.upper)) return false;
  if (a.flag != FinFlag::MustBeInfinite && a.lower < b.lower) return false;
  switch (b.flag) {
    case FinFlag::Unconstrained: break;
    case FinFlag::MustBeFinite:
      if (a.flag != FinFlag::MustBeFinite && !a.upper) return false;
      break;
    case FinFlag::MustBeInfinite:
      if (a.flag != FinFlag::MustBeInfinite) return false;
      break;
  }
  return true;
}

}  // namespace

namespace qe {

std::vector<Constraint> split_options(const Constraint& a, const Constraint& b) {
  bool finA = a.flag != FinFlag::MustBeInfinite;
  bool finB = b.flag != FinFlag::MustBeInfinite;
  bool infA = admits_infinite(a);
  bool infB = admits_infinite(b);

  std::optional<Constraint> finite_opt;
  if (finA && finB) {
    Constraint c;
    c.lower = a.lower + b.lower;
    if (a.upper && b.upper) c.upper = *a.upper + *b.upper - 1;
    c.flag = c.upper ? FinFlag::Unconstrained : FinFlag::MustBeFinite;
    finite_opt = canon(c);
  }
  bool infinite_opt = infA || infB;

  if (finite_opt && infinite_opt) {
    // The infinite side has no upper bound, so neither does the sum; an
    // infinite count also exceeds every lower bound, so the union of the two
    // options is a single unconstrained-finiteness interval.
    return {Constraint{finite_opt->lower, std::nullopt, FinFlag::Unconstrained}};
  }
  if (finite_opt) return {*finite_opt};
  if (infinite_opt) return {Constraint{0, std::nullopt, FinFlag::MustBeInfinite}};
  return {};
}

}  // namespace qe

namespace {

using MintermId = std::uint32_t;

// A conjunction of per-minterm constraints; minterms not listed are
// unconstrained.  Items sorted by minterm id.
struct Conjunct {
  std::vector<std::pair<MintermId, Constraint>> items;
};

// Disjunction of conjuncts; empty = false, a conjunct with no items = true.
struct Dnf {
  std::vector<Conjunct> disjuncts;
};

constexpr std::size_t kDnfCap = 200000;
constexpr std::size_t kSubsumeLimit = 4096;
constexpr std::size_t kVarCap = 20;

void check_var_cap(const std::vector<std::string>& vars) {
  if (vars.size() > kVarCap)
    throw ResourceLimitError("formula has " + std::to_string(vars.size()) +
                             " variables in scope; the minterm translation caps at " +
                             std::to_string(kVarCap));
}

Dnf dnf_false() { return {}; }
Dnf dnf_true() { return Dnf{{Conjunct{}}}; }

std::tuple<std::uint64_t, std::uint64_t, int> constraint_key(const Constraint& c) {
  return {c.lower, c.upper ? *c.upper + 1 : 0, static_cast<int>(c.flag)};
}

bool conjunct_less(const Conjunct& a, const Conjunct& b) {
  auto project = [](const Conjunct& c) {
    std::vector<std::tuple<MintermId, std::uint64_t, std::uint64_t, int>> key;
    key.reserve(c.items.size());
    for (const auto& [m, cons] : c.items) {
      auto [l, u, f] = constraint_key(cons);
      key.emplace_back(m, l, u, f);
    }
    return key;
  };
  return project(a) < project(b);
}

bool conjunct_eq(const Conjunct& a, const Conjunct& b) {
  if (a.items.size() != b.items.size()) return false;
  for (std::size_t i = 0; i < a.items.size(); ++i)
    if (a.items[i].first != b.items[i].first || !(a.items[i].second == b.items[i].second))
      return false;
  return true;
}

// a implies b: every constraint of b is implied by a's constraint there.
bool conjunct_implies(const Conjunct& a, const Conjunct& b) {
  std::size_t i = 0;
  for (const auto& [m, cons_b] : b.items) {
    while (i < a.items.size() && a.items[i].first < m) ++i;
    if (i >= a.items.size() || a.items[i].first != m) {
      if (!constraint_implies(Constraint{}, cons_b)) return false;
      continue;
    }
    if (!constraint_implies(a.items[i].second, cons_b)) return false;
  }
  return true;
}

void canon_dnf(Dnf& d) {
  if (d.disjuncts.size() > kDnfCap)
    throw ResourceLimitError("quantifier elimination intermediate form too large");
  std::sort(d.disjuncts.begin(), d.disjuncts.end(), conjunct_less);
  d.disjuncts.erase(std::unique(d.disjuncts.begin(), d.disjuncts.end(), conjunct_eq),
                    d.disjuncts.end());
  if (d.disjuncts.size() > kSubsumeLimit) return;
  std::vector<Conjunct> kept;
  for (std::size_t i = 0; i < d.disjuncts.size(); ++i) {
    bool redundant = false;
    for (std::size_t j = 0; j < d.disjuncts.size() && !redundant; ++j) {
      if (i == j) continue;
      // Drop i if it implies j; ties broken toward the earlier element.
      if (conjunct_implies(d.disjuncts[i], d.disjuncts[j]) &&
          (!conjunct_implies(d.disjuncts[j], d.disjuncts[i]) || j < i))
        redundant = true;
    }
    if (!redundant) kept.push_back(d.disjuncts[i]);
  }
  d.disjuncts = std::move(kept);
}

std::optional<Conjunct> conj_and(const Conjunct& a, const Conjunct& b) {
  Conjunct out;
  std::size_t i = 0, j = 0;
  while (i < a.items.size() || j < b.items.size()) {
    if (j >= b.items.size() || (i < a.items.size() && a.items[i].first < b.items[j].first)) {
      out.items.push_back(a.items[i++]);
    } else if (i >= a.items.size() || b.items[j].first < a.items[i].first) {
      out.items.push_back(b.items[j++]);
    } else {
      auto merged = merge_and(a.items[i].second, b.items[j].second);
      if (!merged) return std::nullopt;
      if (!is_trivial(*merged)) out.items.emplace_back(a.items[i].first, *merged);
      ++i;
      ++j;
    }
  }
  return out;
}

Dnf dnf_and(const Dnf& a, const Dnf& b) {
  Dnf out;
  if (a.disjuncts.size() * b.disjuncts.size() > kDnfCap)
    throw ResourceLimitError("quantifier elimination conjunction too large");
  for (const auto& ca : a.disjuncts)
    for (const auto& cb : b.disjuncts)
      if (auto merged = conj_and(ca, cb)) out.disjuncts.push_back(std::move(*merged));
  canon_dnf(out);
  return out;
}

Dnf dnf_or(const Dnf& a, const Dnf& b) {
  Dnf out = a;
  out.disjuncts.insert(out.disjuncts.end(), b.disjuncts.begin(), b.disjuncts.end());
  canon_dnf(out);
  return out;
}

// --- translation from formulas ---------------------------------------------

// Minterm ids are bitmasks over the sorted variable list; bit i set means
// vars[i] appears positively.
std::vector<MintermId> term_minterms(const BoolTerm& t, const std::vector<std::string>& vars) {
  std::vector<MintermId> out;
  auto eval = [&](const BoolTerm& u, MintermId id) {
    auto rec = [&](const BoolTerm& v, auto&& self) -> bool {
      switch (v.kind()) {
        case BoolTerm::Kind::Var: {
          auto it = std::lower_bound(vars.begin(), vars.end(), v.name());
          assert(it != vars.end() && *it == v.name());
          return (id >> (it - vars.begin())) & 1;
        }
        case BoolTerm::Kind::Zero: return false;
        case BoolTerm::Kind::One: return true;
        case BoolTerm::Kind::Compl: return !self(v.sub(), self);
        case BoolTerm::Kind::Meet: return self(v.lhs(), self) && self(v.rhs(), self);
        case BoolTerm::Kind::Join: return self(v.lhs(), self) || self(v.rhs(), self);
        case BoolTerm::Kind::Diff: return self(v.lhs(), self) && !self(v.rhs(), self);
      }
      throw std::logic_error("unreachable");
    };
    return rec(u, rec);
  };
  for (MintermId id = 0; id < (MintermId{1} << vars.size()); ++id)
    if (eval(t, id)) out.push_back(id);
  return out;
}

void compositions(std::uint64_t total, std::size_t parts,
                  const std::function<void(const std::vector<std::uint64_t>&)>& emit) {
  std::vector<std::uint64_t> current(parts, 0);
  std::uint64_t produced = 0;
  auto rec = [&](std::size_t idx, std::uint64_t rest, auto&& self) -> void {
    if (idx + 1 == parts) {
      current[idx] = rest;
      if (++produced > 2000000)
        throw ResourceLimitError("cardinality literal expansion too large");
      emit(current);
      return;
    }
    for (std::uint64_t v = 0; v <= rest; ++v) {
      current[idx] = v;
      self(idx + 1, rest - v, self);
    }
  };
  if (parts == 0) return;  // callers handle the empty-term cases directly
  rec(0, total, rec);
}

Dnf translate(const BoolFormula& f, const std::vector<std::string>& vars, bool positive);

// ♯(t) ≥ n over the minterms of t: some distribution of n atoms.
Dnf translate_count(std::uint32_t n, const BoolTerm& t, const std::vector<std::string>& vars,
                    bool positive) {
  std::vector<MintermId> cover = term_minterms(t, vars);
  Dnf out;
  if (positive) {
    if (cover.empty()) return dnf_false();  // ♯(0) = 0 < n
    compositions(n, cover.size(), [&](const std::vector<std::uint64_t>& parts) {
      Conjunct c;
      for (std::size_t i = 0; i < cover.size(); ++i)
        if (parts[i] > 0)
          c.items.emplace_back(cover[i], Constraint{parts[i], std::nullopt, FinFlag::Unconstrained});
      out.disjuncts.push_back(std::move(c));
    });
  } else {
    // ♯(t) ≤ n−1: distribute the slack as per-minterm upper bounds.
    if (cover.empty()) return dnf_true();
    compositions(n - 1, cover.size(), [&](const std::vector<std::uint64_t>& parts) {
      Conjunct c;
      for (std::size_t i = 0; i < cover.size(); ++i)
        c.items.emplace_back(cover[i], Constraint{0, parts[i] + 1, FinFlag::Unconstrained});
      out.disjuncts.push_back(std::move(c));
    });
  }
  canon_dnf(out);
  return out;
}

// t = 0 expressed as ♯(t) < 1.
Dnf zero_pin(const BoolTerm& t, const std::vector<std::string>& vars, bool positive) {
  if (positive) return translate_count(1, t, vars, false);
  return translate_count(1, t, vars, true);
}

Dnf translate_fin(const BoolTerm& t, const std::vector<std::string>& vars, bool positive) {
  std::vector<MintermId> cover = term_minterms(t, vars);
  Dnf out;
  if (positive) {
    Conjunct c;
    for (MintermId m : cover)
      c.items.emplace_back(m, Constraint{0, std::nullopt, FinFlag::MustBeFinite});
    out.disjuncts.push_back(std::move(c));
  } else {
    for (MintermId m : cover) {
      Conjunct c;
      c.items.emplace_back(m, Constraint{0, std::nullopt, FinFlag::MustBeInfinite});
      out.disjuncts.push_back(std::move(c));
    }
  }
  canon_dnf(out);
  return out;
}

Dnf translate(const BoolFormula& f, const std::vector<std::string>& vars, bool positive) {
  switch (f.kind()) {
    case BoolFormula::Kind::Equal: {
      BoolTerm d1 = BoolTerm::diff(f.term_lhs(), f.term_rhs());
      BoolTerm d2 = BoolTerm::diff(f.term_rhs(), f.term_lhs());
      if (positive) return dnf_and(zero_pin(d1, vars, true), zero_pin(d2, vars, true));
      return dnf_or(zero_pin(d1, vars, false), zero_pin(d2, vars, false));
    }
    case BoolFormula::Kind::Leq:
      return zero_pin(BoolTerm::diff(f.term_lhs(), f.term_rhs()), vars, positive);
    case BoolFormula::Kind::Count:
      return translate_count(f.count(), f.term(), vars, positive);
    case BoolFormula::Kind::Fin:
      return translate_fin(f.term(), vars, positive);
    case BoolFormula::Kind::Not:
      return translate(f.sub(), vars, !positive);
    case BoolFormula::Kind::And: {
      Dnf l = translate(f.lhs(), vars, positive);
      Dnf r = translate(f.rhs(), vars, positive);
      return positive ? dnf_and(l, r) : dnf_or(l, r);
    }
    case BoolFormula::Kind::Or: {
      Dnf l = translate(f.lhs(), vars, positive);
      Dnf r = translate(f.rhs(), vars, positive);
      return positive ? dnf_or(l, r) : dnf_and(l, r);
    }
    case BoolFormula::Kind::Implies: {
      Dnf l = translate(f.lhs(), vars, !positive);
      Dnf r = translate(f.rhs(), vars, positive);
      return positive ? dnf_or(l, r) : dnf_and(l, r);
    }
    case BoolFormula::Kind::Exists:
    case BoolFormula::Kind::Forall:
      throw EvalError("quantifier reached quantifier-free translation");
  }
  throw std::logic_error("unreachable");
}

// --- elimination ------------------------------------------------------------

Dnf eliminate_var(const Dnf& d, const std::vector<std::string>& vars, const std::string& y) {
  std::size_t yi =
      std::lower_bound(vars.begin(), vars.end(), y) - vars.begin();
  assert(yi < vars.size() && vars[yi] == y);
  MintermId low_mask = (MintermId{1} << yi) - 1;

  Dnf out;
  for (const Conjunct& c : d.disjuncts) {
    // Pair each parent minterm's two children: with y (A) and without (B).
    std::map<MintermId, std::pair<Constraint, Constraint>> parents;
    Constraint trivial;
    for (const auto& [m, cons] : c.items) {
      MintermId parent = (m & low_mask) | ((m >> (yi + 1)) << yi);
      auto [it, inserted] = parents.try_emplace(parent, trivial, trivial);
      if ((m >> yi) & 1) it->second.first = cons;
      else it->second.second = cons;
    }
    Conjunct reduced;
    bool dead = false;
    for (const auto& [parent, ab] : parents) {
      std::vector<Constraint> options = qe::split_options(ab.first, ab.second);
      if (options.empty()) {
        dead = true;
        break;
      }
      // The options always merge into a single constraint (the finite and
      // infinite alternatives coexist only with no upper bound).
      Constraint chosen = options.front();
      if (!is_trivial(chosen)) reduced.items.emplace_back(parent, chosen);
    }
    if (!dead) out.disjuncts.push_back(std::move(reduced));
  }
  canon_dnf(out);
  return out;
}

// --- back to formulas -------------------------------------------------------

BoolTerm minterm_term(MintermId id, const std::vector<std::string>& vars) {
  if (vars.empty()) return BoolTerm::one();
  BoolTerm t = (id & 1) ? BoolTerm::var(vars[0]) : BoolTerm::complement(BoolTerm::var(vars[0]));
  for (std::size_t i = 1; i < vars.size(); ++i) {
    BoolTerm v = ((id >> i) & 1) ? BoolTerm::var(vars[i])
                                 : BoolTerm::complement(BoolTerm::var(vars[i]));
    t = BoolTerm::meet(t, v);
  }
  return t;
}

BoolFormula dnf_to_formula(const Dnf& d, const std::vector<std::string>& vars) {
  BoolFormula truth = BoolFormula::equal(BoolTerm::zero(), BoolTerm::zero());
  if (d.disjuncts.empty()) return BoolFormula::not_(truth);

  std::optional<BoolFormula> out;
  for (const Conjunct& c : d.disjuncts) {
    std::optional<BoolFormula> conj;
    auto push = [&](BoolFormula atom) {
      conj = conj ? BoolFormula::and_(*conj, atom) : atom;
    };
    for (const auto& [m, cons] : c.items) {
      BoolTerm t = minterm_term(m, vars);
      if (cons.lower > UINT32_MAX || (cons.upper && *cons.upper > UINT32_MAX))
        throw ResourceLimitError("cardinality bound exceeds representable count index");
      if (cons.lower >= 1)
        push(BoolFormula::count_at_least(static_cast<std::uint32_t>(cons.lower), t));
      if (cons.upper)
        push(BoolFormula::not_(
            BoolFormula::count_at_least(static_cast<std::uint32_t>(*cons.upper), t)));
      if (cons.flag == FinFlag::MustBeFinite) push(BoolFormula::fin(t));
      if (cons.flag == FinFlag::MustBeInfinite) push(BoolFormula::not_(BoolFormula::fin(t)));
    }
    BoolFormula cf = conj ? *conj : truth;
    out = out ? BoolFormula::or_(*out, cf) : cf;
  }
  return *out;
}

std::vector<std::string> sorted_free_vars(const BoolFormula& f) {
  auto fv = free_vars(f);
  return {fv.begin(), fv.end()};
}

BoolFormula eliminate_rec(const BoolFormula& f) {
  switch (f.kind()) {
    case BoolFormula::Kind::Equal:
    case BoolFormula::Kind::Leq:
    case BoolFormula::Kind::Count:
    case BoolFormula::Kind::Fin:
      return f;
    case BoolFormula::Kind::Not:
      return BoolFormula::not_(eliminate_rec(f.sub()));
    case BoolFormula::Kind::And:
      return BoolFormula::and_(eliminate_rec(f.lhs()), eliminate_rec(f.rhs()));
    case BoolFormula::Kind::Or:
      return BoolFormula::or_(eliminate_rec(f.lhs()), eliminate_rec(f.rhs()));
    case BoolFormula::Kind::Implies:
      return BoolFormula::implies(eliminate_rec(f.lhs()), eliminate_rec(f.rhs()));
    case BoolFormula::Kind::Exists: {
      // Peel the whole quantifier block so the minterm translation and the
      // conversion back to a formula run once per block, not once per
      // variable; the intermediate form would otherwise feed its own output
      // back through the translation and blow up on nested blocks.
      std::vector<std::string> block;
      BoolFormula inner = f;
      while (inner.kind() == BoolFormula::Kind::Exists) {
        block.push_back(inner.var());
        inner = inner.body();
      }
      BoolFormula body = eliminate_rec(inner);
      std::set<std::string> fv = free_vars(body);
      bool any = false;
      for (const std::string& v : block) any = any || fv.count(v) > 0;
      if (!any) return body;
      std::vector<std::string> vars = sorted_free_vars(body);
      check_var_cap(vars);
      Dnf d = translate(body, vars, true);
      // Innermost first; a name bound twice in one block is dead by the time
      // the outer binder is reached and gets skipped.
      for (auto it = block.rbegin(); it != block.rend(); ++it) {
        if (!std::binary_search(vars.begin(), vars.end(), *it)) continue;
        d = eliminate_var(d, vars, *it);
        vars.erase(std::lower_bound(vars.begin(), vars.end(), *it));
      }
      return dnf_to_formula(d, vars);
    }
    case BoolFormula::Kind::Forall: {
      BoolFormula inner =
          eliminate_rec(BoolFormula::exists(f.var(), BoolFormula::not_(f.body())));
      return BoolFormula::not_(inner);
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace

BoolFormula normalize_qf(const BoolFormula& f) {
  if (quantifier_depth(f) != 0) throw EvalError("normalize_qf expects a quantifier-free formula");
  std::vector<std::string> vars = sorted_free_vars(f);
  check_var_cap(vars);
  return dnf_to_formula(translate(f, vars, true), vars);
}

BoolFormula eliminate_quantifiers(const BoolFormula& f) {
  return normalize_qf(eliminate_rec(f));
}

bool evaluate_qf(const BoolFormula& f, const std::map<std::string, FinCofSet>& env) {
  switch (f.kind()) {
    case BoolFormula::Kind::Equal:
      return bool_term_eval(f.term_lhs(), env) == bool_term_eval(f.term_rhs(), env);
    case BoolFormula::Kind::Leq:
      return bool_term_eval(f.term_lhs(), env).subset_of(bool_term_eval(f.term_rhs(), env));
    case BoolFormula::Kind::Count:
      return count_at_least(bool_term_eval(f.term(), env), f.count());
    case BoolFormula::Kind::Fin:
      return is_fin(bool_term_eval(f.term(), env));
    case BoolFormula::Kind::Not:
      return !evaluate_qf(f.sub(), env);
    case BoolFormula::Kind::And:
      return evaluate_qf(f.lhs(), env) && evaluate_qf(f.rhs(), env);
    case BoolFormula::Kind::Or:
      return evaluate_qf(f.lhs(), env) || evaluate_qf(f.rhs(), env);
    case BoolFormula::Kind::Implies:
      return !evaluate_qf(f.lhs(), env) || evaluate_qf(f.rhs(), env);
    case BoolFormula::Kind::Exists:
    case BoolFormula::Kind::Forall:
      throw EvalError("evaluate_qf expects a quantifier-free formula");
  }
  throw std::logic_error("unreachable");
}

bool decide_sentence(const BoolFormula& f) {
  if (!free_vars(f).empty()) throw EvalError("decide_sentence expects a sentence");
  return evaluate_qf(eliminate_quantifiers(f), {});
}

bool evaluate_with_params(const BoolFormula& f, const std::map<std::string, FinCofSet>& env) {
  for (const auto& v : free_vars(f))
    if (!env.count(v)) throw EvalError("unbound variable '" + v + "'");
  return evaluate_qf(eliminate_quantifiers(f), env);
}

// --- bounded witness search -------------------------------------------------

namespace {

struct WitnessCtx {
  const WitnessOptions& opt;
  std::uint64_t evals = 0;

  void charge() {
    if (++evals > opt.eval_cap)
      throw ResourceLimitError("witness search evaluation budget exceeded");
  }
};

EvSet ev_term_eval(const BoolTerm& t, const std::map<std::string, EvSet>& env) {
  switch (t.kind()) {
    case BoolTerm::Kind::Var: {
      auto it = env.find(t.name());
      if (it == env.end()) throw EvalError("unbound variable '" + t.name() + "'");
      return it->second;
    }
    case BoolTerm::Kind::Zero: return EvSet::empty();
    case BoolTerm::Kind::One: return EvSet::full();
    case BoolTerm::Kind::Compl: return ev_term_eval(t.sub(), env).complement();
    case BoolTerm::Kind::Meet:
      return ev_term_eval(t.lhs(), env).meet(ev_term_eval(t.rhs(), env));
    case BoolTerm::Kind::Join:
      return ev_term_eval(t.lhs(), env).join(ev_term_eval(t.rhs(), env));
    case BoolTerm::Kind::Diff:
      return ev_term_eval(t.lhs(), env).diff(ev_term_eval(t.rhs(), env));
  }
  throw std::logic_error("unreachable");
}

bool wit_eval(const BoolFormula& f, std::map<std::string, EvSet>& env, WitnessCtx& ctx);

BoolFormula constant_formula(bool b) {
  BoolFormula t = BoolFormula::equal(BoolTerm::zero(), BoolTerm::zero());
  return b ? t : BoolFormula::not_(t);
}

// Freeze every maximal subformula not mentioning y to its truth value under
// env, folding constants through the connectives.  This shrinks the set of
// variables the witness partition has to refine against.
BoolFormula freeze_without(const BoolFormula& f, const std::string& y,
                           std::map<std::string, EvSet>& env, WitnessCtx& ctx) {
  if (!free_vars(f).count(y)) return constant_formula(wit_eval(f, env, ctx));
  auto is_const = [](const BoolFormula& g, bool value) {
    if (value)
      return g.kind() == BoolFormula::Kind::Equal &&
             g.term_lhs().kind() == BoolTerm::Kind::Zero &&
             g.term_rhs().kind() == BoolTerm::Kind::Zero;
    return g.kind() == BoolFormula::Kind::Not &&
           g.sub().kind() == BoolFormula::Kind::Equal &&
           g.sub().term_lhs().kind() == BoolTerm::Kind::Zero &&
           g.sub().term_rhs().kind() == BoolTerm::Kind::Zero;
  };
  switch (f.kind()) {
    case BoolFormula::Kind::Not: {
      BoolFormula s = freeze_without(f.sub(), y, env, ctx);
      if (is_const(s, true)) return constant_formula(false);
      if (is_const(s, false)) return constant_formula(true);
      return BoolFormula::not_(s);
    }
    case BoolFormula::Kind::And: {
      BoolFormula l = freeze_without(f.lhs(), y, env, ctx);
      if (is_const(l, false)) return l;
      BoolFormula r = freeze_without(f.rhs(), y, env, ctx);
      if (is_const(l, true)) return r;
      if (is_const(r, false)) return r;
      if (is_const(r, true)) return l;
      return BoolFormula::and_(l, r);
    }
    case BoolFormula::Kind::Or: {
      BoolFormula l = freeze_without(f.lhs(), y, env, ctx);
      if (is_const(l, true)) return l;
      BoolFormula r = freeze_without(f.rhs(), y, env, ctx);
      if (is_const(l, false)) return r;
      if (is_const(r, true)) return r;
      if (is_const(r, false)) return l;
      return BoolFormula::or_(l, r);
    }
    case BoolFormula::Kind::Implies: {
      BoolFormula l = freeze_without(f.lhs(), y, env, ctx);
      if (is_const(l, false)) return constant_formula(true);
      BoolFormula r = freeze_without(f.rhs(), y, env, ctx);
      if (is_const(l, true)) return r;
      if (is_const(r, true)) return r;
      if (is_const(r, false)) return BoolFormula::not_(l);
      return BoolFormula::implies(l, r);
    }
    default:
      // Atoms and quantified subformulas that do mention y stay as they are.
      return f;
  }
}

bool wit_exists(const BoolFormula& f, std::map<std::string, EvSet>& env, WitnessCtx& ctx) {
  const std::string& y = f.var();
  BoolFormula body = freeze_without(f.body(), y, env, ctx);
  if (!free_vars(body).count(y)) return wit_eval(body, env, ctx);

  std::set<std::string> occ = free_vars(body);
  occ.erase(y);
  std::vector<EvSet> base;
  for (const auto& v : occ) {
    auto it = env.find(v);
    if (it == env.end()) throw EvalError("unbound variable '" + v + "'");
    base.push_back(it->second);
  }

  // Piece sizes must reach every atom count the body can distinguish: a
  // C-index of M refined through d nested quantifiers separates counts up
  // to M·2^d.
  std::uint64_t budget = std::max<std::uint64_t>(1, max_count_index(body));
  budget <<= std::min<std::uint32_t>(quantifier_depth(body), 20);
  if (budget > ctx.opt.split_cap)
    throw ResourceLimitError("witness search split budget exceeded");

  std::vector<std::vector<EvSet>> pieces;
  for (MintermId id = 0; id < (MintermId{1} << base.size()); ++id) {
    EvSet cell = EvSet::full();
    for (std::size_t i = 0; i < base.size(); ++i)
      cell = ((id >> i) & 1) ? cell.meet(base[i]) : cell.diff(base[i]);
    if (cell.is_empty()) continue;
    std::set<EvSet> family;
    for (std::uint64_t j = 0; j <= budget; ++j) {
      EvSet p = cell.take_first(j);
      family.insert(p);
      family.insert(cell.diff(p));
      if (p == cell) break;
    }
    if (!cell.is_finite()) {
      EvSet h = cell.half();
      family.insert(h);
      family.insert(cell.diff(h));
    }
    pieces.emplace_back(family.begin(), family.end());
  }

  std::optional<EvSet> saved;
  if (auto it = env.find(y); it != env.end()) saved = it->second;
  std::vector<std::size_t> choice(pieces.size(), 0);
  bool found = false;
  while (!found) {
    EvSet witness = EvSet::empty();
    for (std::size_t i = 0; i < pieces.size(); ++i)
      witness = witness.join(pieces[i][choice[i]]);
    env.insert_or_assign(y, witness);
    found = wit_eval(body, env, ctx);
    if (found) break;
    std::size_t i = 0;
    for (; i < pieces.size(); ++i) {
      if (++choice[i] < pieces[i].size()) break;
      choice[i] = 0;
    }
    if (i == pieces.size()) break;
  }
  if (saved) env.insert_or_assign(y, *saved);
  else env.erase(y);
  return found;
}

bool wit_eval(const BoolFormula& f, std::map<std::string, EvSet>& env, WitnessCtx& ctx) {
  switch (f.kind()) {
    case BoolFormula::Kind::Equal:
      ctx.charge();
      return ev_term_eval(f.term_lhs(), env) == ev_term_eval(f.term_rhs(), env);
    case BoolFormula::Kind::Leq:
      ctx.charge();
      return ev_term_eval(f.term_lhs(), env).subset_of(ev_term_eval(f.term_rhs(), env));
    case BoolFormula::Kind::Count: {
      ctx.charge();
      EvSet s = ev_term_eval(f.term(), env);
      if (!s.is_finite()) return true;
      return *s.size() >= f.count();
    }
    case BoolFormula::Kind::Fin:
      ctx.charge();
      return ev_term_eval(f.term(), env).is_finite();
    case BoolFormula::Kind::Not:
      return !wit_eval(f.sub(), env, ctx);
    case BoolFormula::Kind::And:
      return wit_eval(f.lhs(), env, ctx) && wit_eval(f.rhs(), env, ctx);
    case BoolFormula::Kind::Or:
      return wit_eval(f.lhs(), env, ctx) || wit_eval(f.rhs(), env, ctx);
    case BoolFormula::Kind::Implies:
      return !wit_eval(f.lhs(), env, ctx) || wit_eval(f.rhs(), env, ctx);
    case BoolFormula::Kind::Exists:
      return wit_exists(f, env, ctx);
    case BoolFormula::Kind::Forall:
      return !wit_exists(BoolFormula::exists(f.var(), BoolFormula::not_(f.body())), env, ctx);
  }
  throw std::logic_error("unreachable");
}

}  // namespace

bool bounded_witness_evaluate(const BoolFormula& f, const std::map<std::string, FinCofSet>& env,
                              const WitnessOptions& options) {
  if (quantifier_depth(f) > options.depth_bound)
    throw ResourceLimitError("witness search depth bound exceeded");
  for (const auto& v : free_vars(f))
    if (!env.count(v)) throw EvalError("unbound variable '" + v + "'");
  std::map<std::string, EvSet> ev_env;
  for (const auto& [k, s] : env) ev_env.emplace(k, EvSet::from_fincof(s));
  WitnessCtx ctx{options};
  return wit_eval(f, ev_env, ctx);
}

}  // namespace resprod
