#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "resprod/boolalg.hpp"

namespace resprod {

// An eventually periodic subset of the naturals: membership below `threshold`
// is given by an explicit prefix, and from `threshold` on by a set of residues
// modulo `period`.  This class of sets contains every finite/cofinite set, is
// closed under the Boolean operations, and — unlike FinCofSet — is closed
// under taking every other element, which is what witness search needs to
// split an infinite set into two infinite halves.
class EvSet {
public:
  static EvSet empty();
  static EvSet full();
  static EvSet from_fincof(const FinCofSet& s);

  // Membership for n >= threshold must be period-periodic; the constructor
  // samples one representative per residue class.
  static EvSet sample(std::uint64_t threshold, std::uint64_t period,
                      const std::function<bool(Index)>& member);

  bool contains(Index n) const;
  bool is_empty() const;
  bool is_finite() const;  // no residue class survives
  std::optional<std::uint64_t> size() const;
  std::uint64_t count_below(Index n) const;  // |S ∩ [0, n)|

  EvSet meet(const EvSet& o) const;
  EvSet join(const EvSet& o) const;
  EvSet diff(const EvSet& o) const;
  EvSet complement() const;
  bool subset_of(const EvSet& o) const { return diff(o).is_empty(); }

  std::vector<Index> first_elements(std::size_t n) const;
  // The first min(k, |S|) elements, as a set.
  EvSet take_first(std::uint64_t k) const;
  // The elements of even rank in the increasing enumeration; for infinite S
  // both the result and its complement in S are infinite.
  EvSet half() const;

  // Exact FinCofSet value when the set is finite or cofinite.
  std::optional<FinCofSet> to_fincof() const;

  std::uint64_t threshold() const { return threshold_; }
  std::uint64_t period() const { return period_; }

  bool operator==(const EvSet& o) const {
    return threshold_ == o.threshold_ && period_ == o.period_ && prefix_ == o.prefix_ &&
           residues_ == o.residues_;
  }
  bool operator!=(const EvSet& o) const { return !(*this == o); }
  bool operator<(const EvSet& o) const;

  std::string render() const;

private:
  EvSet(std::uint64_t t, std::uint64_t p, std::set<Index> pre, std::set<Index> res);
  void canonicalize();

  std::uint64_t threshold_ = 0;
  std::uint64_t period_ = 1;
  std::set<Index> prefix_;    // members below threshold_
  std::set<Index> residues_;  // residue classes mod period_ occupied from threshold_ on
};

}  // namespace resprod
