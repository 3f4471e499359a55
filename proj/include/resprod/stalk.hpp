#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "resprod/formula.hpp"

namespace resprod {

using Elem = std::uint32_t;

// A finite commutative unital ring given by explicit operation tables.
// Element 0 is the ring zero and element 1 the ring one; the full axiom set
// is verified exhaustively at construction.
class FiniteRing {
public:
  static FiniteRing zmod(std::uint32_t n);  // integers mod n, n >= 2
  static FiniteRing gf4();                  // the 4-element field {0,1,a,b}
  // names[0] is zero, names[1] is one; tables are row-major element indices.
  static FiniteRing from_tables(std::vector<std::string> names,
                                std::vector<std::vector<Elem>> add,
                                std::vector<std::vector<Elem>> mul);

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name_of(Elem x) const { return names_.at(x); }
  std::optional<Elem> index_of(const std::string& name) const;

  Elem zero() const { return 0; }
  Elem one() const { return 1; }
  Elem add(Elem x, Elem y) const { return add_.at(x).at(y); }
  Elem mul(Elem x, Elem y) const { return mul_.at(x).at(y); }
  Elem neg(Elem x) const { return neg_.at(x); }

  std::vector<Elem> idempotents() const;

private:
  FiniteRing() = default;
  void validate() const;

  std::vector<std::string> names_;
  std::vector<std::vector<Elem>> add_, mul_;
  std::vector<Elem> neg_;
};

// Textual ring specifications: "zmod(6)", "gf4", or
// "table(<names>; <add rows>; <mul rows>)" where <names> is a
// whitespace-separated list (first = zero, second = one) and each rows block
// is a comma-separated list of whitespace-separated element names.
FiniteRing make_ring(const std::string& spec);
std::string render_spec(const FiniteRing& r);  // always a table(...) form

// 0 and 1 are the only idempotents.
bool is_connected(const FiniteRing& r);

// Tarskian satisfaction; quantifiers range over the whole carrier.
bool eval_stalk_formula(const FiniteRing& r, const RingFormula& f,
                        const std::map<std::string, Elem>& env);

// The set defined by phi (one free variable), verified to be a unital
// subring: contains 0 and 1, closed under +, *, and additive inverse.
std::set<Elem> validate_restricting_formula(const FiniteRing& r, const RingFormula& phi);

// The ring structure induced on a subset that contains 0, 1 and is closed
// under the operations (as returned by validate_restricting_formula).
FiniteRing restrict_to(const FiniteRing& r, const std::set<Elem>& elements);

}  // namespace resprod
