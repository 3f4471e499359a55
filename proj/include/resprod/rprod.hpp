#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "resprod/boolalg.hpp"
#include "resprod/formula.hpp"
#include "resprod/stalk.hpp"

namespace resprod {

// Restricted product over index set ℕ: one connected tail stalk at all but
// finitely many indices, finitely many connected exceptional stalks, and a
// restricting formula phi that defines a unital subring in every stalk.
class RPModel {
public:
  const FiniteRing& tail() const { return data_->tail; }
  const RingFormula& phi() const { return data_->phi; }
  const std::string& phi_var() const { return data_->phi_var; }
  const std::set<Elem>& phi_tail() const { return data_->phi_tail; }
  const std::map<Index, FiniteRing>& exceptional() const { return data_->exceptional; }
  const FiniteRing& stalk_at(Index i) const;
  const std::set<Elem>& phi_at(Index i) const;

  bool same_as(const RPModel& o) const { return data_ == o.data_; }

private:
  struct Data {
    Data(FiniteRing t, RingFormula p, std::string v)
        : tail(std::move(t)), phi(std::move(p)), phi_var(std::move(v)) {}
    FiniteRing tail;
    RingFormula phi;
    std::string phi_var;
    std::set<Elem> phi_tail;
    std::map<Index, FiniteRing> exceptional;
    std::map<Index, std::set<Elem>> phi_exceptional;
  };
  explicit RPModel(std::shared_ptr<const Data> d) : data_(std::move(d)) {}
  std::shared_ptr<const Data> data_;

  friend RPModel make_model(const std::string&, const std::string&,
                            const std::vector<std::pair<Index, std::string>>&);
};

RPModel make_model(const std::string& tail_spec, const std::string& phi_text,
                   const std::vector<std::pair<Index, std::string>>& exceptional_specs = {});

// Plain-text model configuration:
//   tail = <RingSpec>
//   phi = "<ring formula>"
//   exception <index> = <RingSpec>
// Blank lines and lines starting with '#' are ignored.
RPModel parse_model_config(const std::string& text);

// An eventually-default element: the tail default (which satisfies phi) at
// all but the explicitly listed indices.  At an exceptional index without an
// explicit value the default is carried over by element name.
class RPElement {
public:
  const RPModel& model() const { return model_; }
  Elem default_value() const { return default_; }
  const std::map<Index, Elem>& exceptions() const { return exceptions_; }
  Elem at(Index i) const;

  bool operator==(const RPElement& o) const {
    return model_.same_as(o.model_) && default_ == o.default_ && exceptions_ == o.exceptions_;
  }
  bool operator!=(const RPElement& o) const { return !(*this == o); }

private:
  RPElement(RPModel m, Elem d, std::map<Index, Elem> e)
      : model_(std::move(m)), default_(d), exceptions_(std::move(e)) {}
  RPModel model_;
  Elem default_;
  std::map<Index, Elem> exceptions_;

  friend RPElement make_element(const RPModel&, Elem, const std::map<Index, Elem>&);
};

// Canonical form: exceptions that equal the value the default yields at that
// index are dropped.
RPElement make_element(const RPModel& m, Elem default_value,
                       const std::map<Index, Elem>& exceptions = {});

// Element literals: "default=<elem>" optionally followed by
// "; <index>:=<elem>, <index>:=<elem>, ...".
RPElement parse_element(const RPModel& m, const std::string& text);
std::string render_element(const RPElement& e);

RPElement ring_add(const RPElement& f, const RPElement& g);
RPElement ring_mul(const RPElement& f, const RPElement& g);
RPElement ring_neg(const RPElement& f);

// {i : stalk_i ⊨ theta(args(i))}; args bind the sorted free variables of
// theta in order.  Always finite or cofinite.
FinCofSet boolean_value(const RPModel& m, const RingFormula& theta,
                        const std::vector<RPElement>& args);

// Direct semantics for purely existential / purely universal sentences, by
// enumeration of truth patterns over the matrix's atomic equations.
bool sigma1_decide(const RPModel& m, const RingFormula& sentence);
bool pi1_decide(const RPModel& m, const RingFormula& sentence);

// A witness g for ∃w theta with [[∃w theta]] ∖ [[theta(args, g)]] finite,
// provided [[∃w theta]] ∖ [[∃w (phi(w) ∧ theta)]] is finite.
RPElement patch_witness(const RPModel& m, const RingFormula& theta,
                        const std::string& witness_var,
                        const std::map<std::string, RPElement>& args);

struct AxiomCheck {
  std::string axiom;
  bool passed;
  std::string detail;
};

struct AxiomReport {
  std::vector<AxiomCheck> checks;
  bool all_passed() const;
  std::string render() const;
};

// Applied to every Boolean value computed during check_axioms; lets tests
// inject faults without touching the model.
using BooleanValueHook = std::function<FinCofSet(const FinCofSet&)>;

AxiomReport check_axioms(const RPModel& m, std::size_t samples, std::uint64_t seed,
                         const BooleanValueHook& hook = {});

// Searches pairs (g, h) with exceptions only on the support of the finite
// idempotent e for e ≤ [[g·h = 1 ∧ phi(g) ∧ ¬phi(h)]]; examines at most
// search_bound candidate pairs.
std::optional<std::pair<RPElement, RPElement>> sharp_probe(const RPModel& m, const RPElement& e,
                                                           std::uint64_t search_bound);

struct FinCharacterization {
  RingFormula condition;  // g·h = 1 ∧ phi(g) ∧ ¬phi(h), phi inlined
  std::string text;       // the full ∃g∃h (e ≤ [[...]]) template
  bool degenerate;        // ¬phi unsatisfiable on the built-in test stalks
};

FinCharacterization fin_defining_characterization(const RingFormula& phi);

RPElement random_element(const RPModel& m, std::mt19937& rng);

}  // namespace resprod
