#include "resprod/evset.hpp"

#include <numeric>

#include "resprod/errors.hpp"

namespace resprod {

namespace {
constexpr std::uint64_t kPeriodCap = 1u << 20;
}

EvSet::EvSet(std::uint64_t t, std::uint64_t p, std::set<Index> pre, std::set<Index> res)
    : threshold_(t), period_(p), prefix_(std::move(pre)), residues_(std::move(res)) {
  canonicalize();
}

void EvSet::canonicalize() {
  if (residues_.empty()) period_ = 1;
  // Smallest divisor of the period under which the residue set is invariant.
  for (std::uint64_t d = 1; d < period_; ++d) {
    if (period_ % d != 0) continue;
    bool invariant = true;
    for (std::uint64_t r = 0; r < period_ && invariant; ++r)
      if (residues_.count(r) != residues_.count((r + d) % period_)) invariant = false;
    if (invariant) {
      std::set<Index> reduced;
      for (Index r : residues_)
        if (r < d) reduced.insert(r);
      residues_ = std::move(reduced);
      period_ = d;
      break;
    }
  }
  // Pull the threshold down while the last prefix slot agrees with the
  // periodic rule.
  while (threshold_ > 0) {
    Index n = threshold_ - 1;
    bool in_prefix = prefix_.count(n) > 0;
    bool periodic = residues_.count(n % period_) > 0;
    if (in_prefix != periodic) break;
    prefix_.erase(n);
    --threshold_;
  }
}

EvSet EvSet::empty() { return EvSet(0, 1, {}, {}); }
EvSet EvSet::full() { return EvSet(0, 1, {}, {0}); }

EvSet EvSet::from_fincof(const FinCofSet& s) {
  Index t = s.support().empty() ? 0 : *s.support().rbegin() + 1;
  if (s.is_finite()) return EvSet(t, 1, s.support(), {});
  std::set<Index> pre;
  for (Index i = 0; i < t; ++i)
    if (!s.support().count(i)) pre.insert(i);
  return EvSet(t, 1, std::move(pre), {0});
}

EvSet EvSet::sample(std::uint64_t threshold, std::uint64_t period,
                    const std::function<bool(Index)>& member) {
  if (period == 0 || period > kPeriodCap)
    throw ResourceLimitError("eventually periodic set period out of range");
  std::set<Index> pre, res;
  for (Index i = 0; i < threshold; ++i)
    if (member(i)) pre.insert(i);
  for (Index r = 0; r < period; ++r) {
    Index rep = threshold + (r + period - threshold % period) % period;
    if (member(rep)) res.insert(rep % period);
  }
  return EvSet(threshold, period, std::move(pre), std::move(res));
}

bool EvSet::contains(Index n) const {
  if (n < threshold_) return prefix_.count(n) > 0;
  return residues_.count(n % period_) > 0;
}

bool EvSet::is_empty() const { return prefix_.empty() && residues_.empty(); }
bool EvSet::is_finite() const { return residues_.empty(); }

std::optional<std::uint64_t> EvSet::size() const {
  if (!residues_.empty()) return std::nullopt;
  return prefix_.size();
}

std::uint64_t EvSet::count_below(Index n) const {
  std::uint64_t count = 0;
  Index cut = std::min<Index>(n, threshold_);
  for (Index i : prefix_) {
    if (i >= cut) break;
    ++count;
  }
  if (n > threshold_) {
    std::uint64_t span = n - threshold_;
    std::uint64_t windows = span / period_, rest = span % period_;
    count += windows * residues_.size();
    for (std::uint64_t j = 0; j < rest; ++j)
      if (residues_.count((threshold_ + j) % period_)) ++count;
  }
  return count;
}

namespace {
std::uint64_t lcm_capped(std::uint64_t a, std::uint64_t b) {
  std::uint64_t l = std::lcm(a, b);
  if (l > (1u << 20)) throw ResourceLimitError("eventually periodic set period overflow");
  return l;
}
}  // namespace

EvSet EvSet::meet(const EvSet& o) const {
  return sample(std::max(threshold_, o.threshold_), lcm_capped(period_, o.period_),
                [&](Index n) { return contains(n) && o.contains(n); });
}
EvSet EvSet::join(const EvSet& o) const {
  return sample(std::max(threshold_, o.threshold_), lcm_capped(period_, o.period_),
                [&](Index n) { return contains(n) || o.contains(n); });
}
EvSet EvSet::diff(const EvSet& o) const {
  return sample(std::max(threshold_, o.threshold_), lcm_capped(period_, o.period_),
                [&](Index n) { return contains(n) && !o.contains(n); });
}
EvSet EvSet::complement() const {
  return sample(threshold_, period_, [&](Index n) { return !contains(n); });
}

std::vector<Index> EvSet::first_elements(std::size_t n) const {
  std::vector<Index> out;
  for (Index i : prefix_) {
    if (out.size() == n) return out;
    out.push_back(i);
  }
  if (!residues_.empty())
    for (Index i = threshold_; out.size() < n; ++i)
      if (residues_.count(i % period_)) out.push_back(i);
  return out;
}

EvSet EvSet::take_first(std::uint64_t k) const {
  std::vector<Index> elems = first_elements(k);
  std::set<Index> pre(elems.begin(), elems.end());
  Index t = pre.empty() ? 0 : *pre.rbegin() + 1;
  return EvSet(t, 1, std::move(pre), {});
}

EvSet EvSet::half() const {
  if (residues_.empty()) {
    std::set<Index> pre;
    std::uint64_t rank = 0;
    for (Index i : prefix_)
      if (rank++ % 2 == 0) pre.insert(i);
    return EvSet(threshold_, 1, std::move(pre), {});
  }
  // Rank parity at n >= threshold is (n mod p)-periodic for p = period when
  // each window holds an even number of members, else for p = 2·period.
  std::uint64_t p = residues_.size() % 2 == 0 ? period_ : 2 * period_;
  if (p > kPeriodCap) throw ResourceLimitError("eventually periodic set period overflow");
  return sample(threshold_, p,
                [&](Index n) { return contains(n) && count_below(n) % 2 == 0; });
}

std::optional<FinCofSet> EvSet::to_fincof() const {
  if (residues_.empty()) return FinCofSet::finite(prefix_);
  if (residues_.size() == period_) {
    std::set<Index> gaps;
    for (Index i = 0; i < threshold_; ++i)
      if (!prefix_.count(i)) gaps.insert(i);
    return FinCofSet::cofinite(std::move(gaps));
  }
  return std::nullopt;
}

bool EvSet::operator<(const EvSet& o) const {
  if (threshold_ != o.threshold_) return threshold_ < o.threshold_;
  if (period_ != o.period_) return period_ < o.period_;
  if (prefix_ != o.prefix_) return prefix_ < o.prefix_;
  return residues_ < o.residues_;
}

std::string EvSet::render() const {
  std::string out = "{";
  bool first = true;
  for (Index i : prefix_) {
    if (!first) out += ",";
    first = false;
    out += std::to_string(i);
  }
  out += "}";
  if (!residues_.empty()) {
    out += "+[" + std::to_string(threshold_) + ":mod" + std::to_string(period_) + "=";
    first = true;
    for (Index r : residues_) {
      if (!first) out += ",";
      first = false;
      out += std::to_string(r);
    }
    out += "]";
  }
  return out;
}

}  // namespace resprod
