#pragma once

#include <optional>
#include <string>
#include <vector>

#include "resprod/formula.hpp"
#include "resprod/rprod.hpp"

namespace resprod {

// Output of the reduction: a partition of ring formulas (cell i carries the
// Boolean variable y<i>) and a Boolean formula psi such that a ring formula
// holds of a tuple in the restricted product iff psi holds of the cells'
// Boolean values at that tuple.
struct ReductionResult {
  Partition cells;
  BoolFormula psi;
  std::vector<std::string> trace;  // one line per recursion step
};

// Cells in order, then psi, then the trace; byte-stable on equal inputs.
std::string render(const ReductionResult& r);

struct ReduceOptions {
  std::size_t max_cells = 4096;
  // With a model given, cells that an exhaustive check over its stalks
  // refutes are dropped.  Without it every sign combination is kept, which
  // double-exponentiates across nested quantifiers.
  std::optional<RPModel> prune_model;
};

ReductionResult reduce(const RingFormula& theta, const RingFormula& phi,
                       const ReduceOptions& options = {});

bool decide_in_model(const RPModel& m, const RingFormula& theta,
                     std::size_t max_cells = 4096);
bool evaluate_in_model(const RPModel& m, const RingFormula& theta,
                       const std::vector<RPElement>& args,
                       std::size_t max_cells = 4096);

}  // namespace resprod
