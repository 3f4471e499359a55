#include "resprod/boolalg.hpp"

#include <algorithm>
#include <cctype>

#include "resprod/errors.hpp"

namespace resprod {

FinCofSet FinCofSet::finite(std::set<Index> support) {
  return FinCofSet(std::move(support), true);
}
FinCofSet FinCofSet::cofinite(std::set<Index> support) {
  return FinCofSet(std::move(support), false);
}

bool FinCofSet::contains(Index i) const {
  return support_.count(i) ? finite_ : !finite_;
}

namespace {
std::set<Index> set_union(const std::set<Index>& a, const std::set<Index>& b) {
  std::set<Index> out = a;
  out.insert(b.begin(), b.end());
  return out;
}
std::set<Index> set_inter(const std::set<Index>& a, const std::set<Index>& b) {
  std::set<Index> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::inserter(out, out.end()));
  return out;
}
std::set<Index> set_minus(const std::set<Index>& a, const std::set<Index>& b) {
  std::set<Index> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::inserter(out, out.end()));
  return out;
}
}  // namespace

FinCofSet FinCofSet::meet(const FinCofSet& o) const {
  if (finite_ && o.finite_) return finite(set_inter(support_, o.support_));
  if (finite_ && !o.finite_) return finite(set_minus(support_, o.support_));
  if (!finite_ && o.finite_) return finite(set_minus(o.support_, support_));
  return cofinite(set_union(support_, o.support_));
}

FinCofSet FinCofSet::join(const FinCofSet& o) const {
  if (finite_ && o.finite_) return finite(set_union(support_, o.support_));
  if (finite_ && !o.finite_) return cofinite(set_minus(o.support_, support_));
  if (!finite_ && o.finite_) return cofinite(set_minus(support_, o.support_));
  return cofinite(set_inter(support_, o.support_));
}

FinCofSet FinCofSet::complement() const { return FinCofSet(support_, !finite_); }

FinCofSet FinCofSet::diff(const FinCofSet& o) const { return meet(o.complement()); }

std::optional<std::uint64_t> FinCofSet::size() const {
  if (!finite_) return std::nullopt;
  return support_.size();
}

std::vector<Index> FinCofSet::first_elements(std::size_t n) const {
  std::vector<Index> out;
  if (finite_) {
    for (Index i : support_) {
      if (out.size() == n) break;
      out.push_back(i);
    }
    return out;
  }
  for (Index i = 0; out.size() < n; ++i)
    if (!support_.count(i)) out.push_back(i);
  return out;
}

FinCofSet bool_term_eval(const BoolTerm& t, const std::map<std::string, FinCofSet>& env) {
  switch (t.kind()) {
    case BoolTerm::Kind::Var: {
      auto it = env.find(t.name());
      if (it == env.end()) throw EvalError("unbound variable '" + t.name() + "'");
      return it->second;
    }
    case BoolTerm::Kind::Zero: return FinCofSet::empty();
    case BoolTerm::Kind::One: return FinCofSet::full();
    case BoolTerm::Kind::Compl: return bool_term_eval(t.sub(), env).complement();
    case BoolTerm::Kind::Meet:
      return bool_term_eval(t.lhs(), env).meet(bool_term_eval(t.rhs(), env));
    case BoolTerm::Kind::Join:
      return bool_term_eval(t.lhs(), env).join(bool_term_eval(t.rhs(), env));
    case BoolTerm::Kind::Diff:
      return bool_term_eval(t.lhs(), env).diff(bool_term_eval(t.rhs(), env));
  }
  throw std::logic_error("unreachable");
}

bool count_at_least(const FinCofSet& s, std::uint64_t n) {
  if (n < 1) throw EvalError("count_at_least requires n >= 1");
  if (!s.is_finite()) return true;
  return s.support().size() >= n;
}

bool is_fin(const FinCofSet& s) { return s.is_finite(); }

SizeDescriptor descriptor_of(const FinCofSet& s, std::uint64_t cutoff) {
  if (cutoff < 1) throw EvalError("descriptor cutoff must be >= 1");
  if (!s.is_finite()) return SizeDescriptor::infinite();
  std::uint64_t n = s.support().size();
  return n < cutoff ? SizeDescriptor::exact(n) : SizeDescriptor::at_least_finite(cutoff);
}

std::string render(const FinCofSet& s) {
  std::string out = s.is_finite() ? "{" : "co{";
  bool first = true;
  for (Index i : s.support()) {
    if (!first) out += ",";
    first = false;
    out += std::to_string(i);
  }
  return out + "}";
}

FinCofSet parse_fincof(const std::string& text) {
  size_t i = 0;
  auto skip_ws = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  auto err = [&](const std::string& msg, std::vector<std::string> exp = {}) -> ParseError {
    return ParseError(msg, 1, static_cast<int>(i) + 1, std::move(exp));
  };
  skip_ws();
  bool fin = true;
  if (text.compare(i, 2, "co") == 0) {
    fin = false;
    i += 2;
  }
  skip_ws();
  if (i >= text.size() || text[i] != '{') throw err("malformed set literal", {"{"});
  ++i;
  std::set<Index> support;
  skip_ws();
  if (i < text.size() && text[i] == '}') {
    ++i;
  } else {
    while (true) {
      skip_ws();
      if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i])))
        throw err("expected an index", {"natural number"});
      Index v = 0;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        Index d = static_cast<Index>(text[i] - '0');
        if (v > (UINT64_MAX - d) / 10) throw err("index out of range");
        v = v * 10 + d;
        ++i;
      }
      support.insert(v);
      skip_ws();
      if (i < text.size() && text[i] == ',') {
        ++i;
        continue;
      }
      if (i < text.size() && text[i] == '}') {
        ++i;
        break;
      }
      throw err("malformed set literal", {",", "}"});
    }
  }
  skip_ws();
  if (i != text.size()) throw err("trailing input after set literal");
  return fin ? FinCofSet::finite(std::move(support)) : FinCofSet::cofinite(std::move(support));
}

std::string render(const SizeDescriptor& d) {
  switch (d.kind) {
    case SizeDescriptor::Kind::Exact: return "exact(" + std::to_string(d.value) + ")";
    case SizeDescriptor::Kind::AtLeastFinite:
      return "atLeastFinite(" + std::to_string(d.value) + ")";
    case SizeDescriptor::Kind::Infinite: return "infinite";
  }
  throw std::logic_error("unreachable");
}

}  // namespace resprod
