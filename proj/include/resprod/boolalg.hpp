#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "resprod/formula.hpp"

namespace resprod {

using Index = std::uint64_t;

// A finite or cofinite subset of the natural numbers, in canonical form:
// the finite support together with a polarity.  Finite polarity means the
// set IS the support; cofinite means it is the complement of the support.
class FinCofSet {
public:
  static FinCofSet finite(std::set<Index> support);
  static FinCofSet cofinite(std::set<Index> support);
  static FinCofSet empty() { return finite({}); }
  static FinCofSet full() { return cofinite({}); }

  bool is_finite() const { return finite_; }
  const std::set<Index>& support() const { return support_; }

  bool contains(Index i) const;
  bool is_empty() const { return finite_ && support_.empty(); }

  FinCofSet meet(const FinCofSet& o) const;
  FinCofSet join(const FinCofSet& o) const;
  FinCofSet diff(const FinCofSet& o) const;
  FinCofSet complement() const;
  bool subset_of(const FinCofSet& o) const { return diff(o).is_empty(); }

  // Cardinality; nullopt for cofinite sets.
  std::optional<std::uint64_t> size() const;
  // The n smallest members, in increasing order.
  std::vector<Index> first_elements(std::size_t n) const;

  bool operator==(const FinCofSet& o) const {
    return finite_ == o.finite_ && support_ == o.support_;
  }
  bool operator!=(const FinCofSet& o) const { return !(*this == o); }
  bool operator<(const FinCofSet& o) const {
    if (finite_ != o.finite_) return finite_;
    return support_ < o.support_;
  }

private:
  FinCofSet(std::set<Index> s, bool fin) : support_(std::move(s)), finite_(fin) {}
  std::set<Index> support_;
  bool finite_;
};

// Evaluate a Boolean term under an environment.  Throws EvalError when a
// variable of the term is unbound.
FinCofSet bool_term_eval(const BoolTerm& t, const std::map<std::string, FinCofSet>& env);

// |s| >= n; cofinite sets satisfy every bound.  Requires n >= 1.
bool count_at_least(const FinCofSet& s, std::uint64_t n);

// Membership in the ideal of finite elements.
bool is_fin(const FinCofSet& s);

// Size classified relative to a cutoff N >= 1: the exact count when it is
// finite and below N, "finite but at least N" otherwise, or infinite.
struct SizeDescriptor {
  enum class Kind { Exact, AtLeastFinite, Infinite };

  static SizeDescriptor exact(std::uint64_t k) { return {Kind::Exact, k}; }
  static SizeDescriptor at_least_finite(std::uint64_t cutoff) {
    return {Kind::AtLeastFinite, cutoff};
  }
  static SizeDescriptor infinite() { return {Kind::Infinite, 0}; }

  Kind kind;
  std::uint64_t value;  // Exact: the count; AtLeastFinite: the cutoff.

  bool operator==(const SizeDescriptor& o) const {
    return kind == o.kind && value == o.value;
  }
  bool operator!=(const SizeDescriptor& o) const { return !(*this == o); }
};

SizeDescriptor descriptor_of(const FinCofSet& s, std::uint64_t cutoff);

// Literal syntax: "{1,2,5}" and "co{1,2}".
std::string render(const FinCofSet& s);
FinCofSet parse_fincof(const std::string& text);
std::string render(const SizeDescriptor& d);

}  // namespace resprod
