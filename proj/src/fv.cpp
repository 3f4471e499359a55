#include "resprod/fv.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <utility>

#include "resprod/errors.hpp"
#include "resprod/stalk.hpp"
#include "resprod/tarski_qe.hpp"

namespace resprod {
namespace {

// Per-stalk bound on the assignments enumerated when testing whether a
// candidate cell is realizable; past that the cell is kept unexamined.
constexpr std::size_t kPruneAssignCap = std::size_t{1} << 16;

std::string cell_name(std::size_t i) { return "y" + std::to_string(i); }

struct Reduction {
  std::vector<RingFormula> cells;
  BoolFormula psi;
};

struct Ctx {
  RingFormula phi;
  std::string phi_var;
  std::size_t max_cells;
  std::vector<const FiniteRing*> stalks;  // empty = keep every cell
  std::vector<std::string> trace;
};

void check_cap(const Ctx& ctx, std::size_t n) {
  if (n > ctx.max_cells)
    throw ResourceLimitError("reduction needs " + std::to_string(n) +
                             " cells; the cap is " +
                             std::to_string(ctx.max_cells));
}

// Walks assignments of vars over the carrier of r, calling fn(env) until it
// returns true.  Returns false if the space exceeds kPruneAssignCap.
template <typename Fn>
std::optional<bool> for_some_assignment(const FiniteRing& r,
                                        const std::vector<std::string>& vars,
                                        Fn&& fn) {
  std::size_t n = r.size();
  std::size_t count = 1;
  for (std::size_t k = 0; k < vars.size(); ++k) {
    if (count > kPruneAssignCap / n) return std::nullopt;
    count *= n;
  }
  std::map<std::string, Elem> env;
  for (std::size_t t = 0; t < count; ++t) {
    std::size_t code = t;
    for (std::size_t k = 0; k < vars.size(); ++k) {
      env[vars[k]] = static_cast<Elem>(code % n);
      code /= n;
    }
    if (fn(env)) return true;
  }
  return false;
}

// True when some stalk of the model has an assignment satisfying f, and also
// when the check is too large to run; only a definite refutation prunes.
bool possibly_satisfiable(const Ctx& ctx, const RingFormula& f) {
  std::set<std::string> fv = free_vars(f);
  std::vector<std::string> vars(fv.begin(), fv.end());
  for (const FiniteRing* r : ctx.stalks) {
    std::optional<bool> hit =
        for_some_assignment(*r, vars, [&](const std::map<std::string, Elem>& env) {
          return eval_stalk_formula(*r, f, env);
        });
    if (!hit || *hit) return true;
  }
  return false;
}

// Sign vectors of fs (true = negated) realized at some stalk/assignment of
// the model, ascending; ordering matches the index order of sign_partition.
std::optional<std::set<std::vector<bool>>> realized_sign_vectors(
    const Ctx& ctx, const std::vector<RingFormula>& fs) {
  std::set<std::string> all;
  for (const RingFormula& f : fs) {
    std::set<std::string> fv = free_vars(f);
    all.insert(fv.begin(), fv.end());
  }
  std::vector<std::string> vars(all.begin(), all.end());
  std::set<std::vector<bool>> out;
  for (const FiniteRing* r : ctx.stalks) {
    std::optional<bool> ran =
        for_some_assignment(*r, vars, [&](const std::map<std::string, Elem>& env) {
          std::vector<bool> v(fs.size());
          for (std::size_t j = 0; j < fs.size(); ++j)
            v[j] = !eval_stalk_formula(*r, fs[j], env);
          out.insert(std::move(v));
          return false;
        });
    if (!ran) return std::nullopt;
  }
  return out;
}

Reduction rec(Ctx& ctx, const RingFormula& f);

Reduction atomic_rule(Ctx& ctx, const RingFormula& f) {
  std::vector<RingFormula> cand;
  cand.push_back(f);
  cand.push_back(RingFormula::not_(f));
  std::vector<RingFormula> cells;
  std::optional<std::size_t> pos;
  for (std::size_t i = 0; i < cand.size(); ++i) {
    if (!ctx.stalks.empty() && !possibly_satisfiable(ctx, cand[i])) continue;
    if (i == 0) pos = cells.size();
    cells.push_back(std::move(cand[i]));
  }
  std::string line = "atomic -> " + std::to_string(cells.size()) + " cells";
  if (cells.size() < 2)
    line += " (pruned " + std::to_string(2 - cells.size()) + ")";
  ctx.trace.push_back(std::move(line));
  BoolTerm val = pos ? BoolTerm::var(cell_name(*pos)) : BoolTerm::zero();
  return {std::move(cells), BoolFormula::equal(std::move(val), BoolTerm::one())};
}

Reduction and_rule(Ctx& ctx, Reduction a, Reduction b) {
  std::size_t p = a.cells.size();
  std::size_t q = b.cells.size();
  if (ctx.stalks.empty())
    check_cap(ctx, p * q);
  else if (p > (std::size_t{1} << 20) / q)
    throw ResourceLimitError("refining " + std::to_string(p) + " x " +
                             std::to_string(q) + " cells is past the limit");
  struct Origin {
    std::size_t i, j;
  };
  std::vector<Origin> keep;
  std::vector<RingFormula> cells;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < q; ++j) {
      RingFormula c = RingFormula::and_(a.cells[i], b.cells[j]);
      if (!ctx.stalks.empty() && !possibly_satisfiable(ctx, c)) continue;
      keep.push_back({i, j});
      cells.push_back(std::move(c));
    }
  check_cap(ctx, cells.size());
  auto joins = [&](bool by_row, std::size_t count) {
    std::map<std::string, BoolTerm> sub;
    for (std::size_t r = 0; r < count; ++r) {
      std::optional<BoolTerm> t;
      for (std::size_t k = 0; k < keep.size(); ++k) {
        if ((by_row ? keep[k].i : keep[k].j) != r) continue;
        BoolTerm v = BoolTerm::var(cell_name(k));
        t = t ? BoolTerm::join(std::move(*t), std::move(v)) : std::move(v);
      }
      sub.emplace(cell_name(r), t ? std::move(*t) : BoolTerm::zero());
    }
    return sub;
  };
  BoolFormula psi = BoolFormula::and_(substitute_all(a.psi, joins(true, p)),
                                      substitute_all(b.psi, joins(false, q)));
  std::string line = "and " + std::to_string(p) + "x" + std::to_string(q) +
                     " -> " + std::to_string(cells.size()) + " cells";
  if (cells.size() < p * q)
    line += " (pruned " + std::to_string(p * q - cells.size()) + ")";
  ctx.trace.push_back(std::move(line));
  return {std::move(cells), std::move(psi)};
}

Reduction exists_rule(Ctx& ctx, const std::string& x, Reduction child) {
  std::size_t m = child.cells.size();
  RingFormula phi_x = substitute(ctx.phi, ctx.phi_var, RingTerm::var(x));
  std::vector<RingFormula> fs;
  fs.reserve(2 * m);
  for (const RingFormula& c : child.cells) fs.push_back(RingFormula::exists(x, c));
  for (const RingFormula& c : child.cells)
    fs.push_back(RingFormula::exists(x, RingFormula::and_(phi_x, c)));

  std::vector<std::vector<bool>> signs;  // signs[c][j]: true = fs[j] negated
  std::vector<RingFormula> cells;
  bool pruned = false;
  if (!ctx.stalks.empty()) {
    if (auto realized = realized_sign_vectors(ctx, fs)) {
      signs.assign(realized->begin(), realized->end());
      pruned = true;
      check_cap(ctx, signs.size());
      for (const auto& v : signs) {
        std::optional<RingFormula> cell;
        for (std::size_t j = 0; j < fs.size(); ++j) {
          RingFormula lit = v[j] ? RingFormula::not_(fs[j]) : fs[j];
          cell = cell ? RingFormula::and_(std::move(*cell), std::move(lit))
                      : std::move(lit);
        }
        cells.push_back(std::move(*cell));
      }
    }
  }
  if (!pruned) {
    if (2 * m >= 63 || (std::size_t{1} << (2 * m)) > ctx.max_cells)
      throw ResourceLimitError("reduction needs 2^" + std::to_string(2 * m) +
                               " cells; the cap is " +
                               std::to_string(ctx.max_cells));
    cells = sign_partition(fs).cells;
    std::size_t total = std::size_t{1} << (2 * m);
    for (std::size_t c = 0; c < total; ++c) {
      std::vector<bool> v(2 * m);
      for (std::size_t j = 0; j < 2 * m; ++j) v[j] = (c >> (2 * m - 1 - j)) & 1;
      signs.push_back(std::move(v));
    }
  }

  // z_j stands for the value of child cell j once the witness is fixed.
  std::map<std::string, BoolTerm> zsub;
  for (std::size_t j = 0; j < m; ++j)
    zsub.emplace(cell_name(j), BoolTerm::var("z" + std::to_string(j)));
  BoolFormula inner = substitute_all(child.psi, zsub);

  auto joins_from = [&](std::size_t offset) {
    std::vector<BoolTerm> out;
    for (std::size_t j = 0; j < m; ++j) {
      std::optional<BoolTerm> t;
      for (std::size_t c = 0; c < signs.size(); ++c) {
        if (signs[c][offset + j]) continue;
        BoolTerm v = BoolTerm::var(cell_name(c));
        t = t ? BoolTerm::join(std::move(*t), std::move(v)) : std::move(v);
      }
      out.push_back(t ? std::move(*t) : BoolTerm::zero());
    }
    return out;
  };
  std::vector<BoolTerm> zmax = joins_from(0);   // joins of cells where E_j holds
  std::vector<BoolTerm> vmax = joins_from(m);   // joins of cells where W_j holds

  auto zvar = [](std::size_t j) { return BoolTerm::var("z" + std::to_string(j)); };
  std::optional<BoolTerm> un;
  for (std::size_t j = 0; j < m; ++j)
    un = un ? BoolTerm::join(std::move(*un), zvar(j)) : zvar(j);
  BoolFormula body = BoolFormula::equal(std::move(*un), BoolTerm::one());
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      body = BoolFormula::and_(
          std::move(body),
          BoolFormula::equal(BoolTerm::meet(zvar(i), zvar(j)), BoolTerm::zero()));
  for (std::size_t j = 0; j < m; ++j)
    body = BoolFormula::and_(
        std::move(body),
        BoolFormula::and_(BoolFormula::leq(zvar(j), std::move(zmax[j])),
                          BoolFormula::fin(BoolTerm::diff(zvar(j), std::move(vmax[j])))));
  body = BoolFormula::and_(std::move(body), std::move(inner));
  BoolFormula psi = std::move(body);
  for (std::size_t j = m; j-- > 0;)
    psi = BoolFormula::exists("z" + std::to_string(j), std::move(psi));

  std::string line = "exists " + x + " " + std::to_string(m) + " -> " +
                     std::to_string(cells.size()) + " cells";
  if (pruned) {
    if (2 * m <= 62) {
      std::size_t total = std::size_t{1} << (2 * m);
      if (cells.size() < total)
        line += " (pruned " + std::to_string(total - cells.size()) + ")";
    } else {
      line += " (of 2^" + std::to_string(2 * m) + ")";
    }
  }
  ctx.trace.push_back(std::move(line));
  return {std::move(cells), std::move(psi)};
}

Reduction rec(Ctx& ctx, const RingFormula& f) {
  switch (f.kind()) {
    case RingFormula::Kind::Eq:
      return atomic_rule(ctx, f);
    case RingFormula::Kind::Not: {
      Reduction c = rec(ctx, f.sub());
      ctx.trace.push_back("not -> " + std::to_string(c.cells.size()) + " cells");
      return {std::move(c.cells), BoolFormula::not_(std::move(c.psi))};
    }
    case RingFormula::Kind::And: {
      Reduction l = rec(ctx, f.lhs());
      Reduction r = rec(ctx, f.rhs());
      return and_rule(ctx, std::move(l), std::move(r));
    }
    case RingFormula::Kind::Exists: {
      Reduction c = rec(ctx, f.body());
      return exists_rule(ctx, f.var(), std::move(c));
    }
    default:
      throw EvalError("reduction expects a formula in not/and/exists normal form");
  }
}

}  // namespace

std::string render(const ReductionResult& r) {
  std::string out;
  for (std::size_t i = 0; i < r.cells.cells.size(); ++i)
    out += "cell " + cell_name(i) + ": " + render(r.cells.cells[i]) + "\n";
  out += "psi: " + render(r.psi) + "\n";
  for (const std::string& t : r.trace) out += "trace: " + t + "\n";
  return out;
}

ReductionResult reduce(const RingFormula& theta, const RingFormula& phi,
                       const ReduceOptions& options) {
  std::set<std::string> pfv = free_vars(phi);
  if (pfv.size() != 1)
    throw ShapeError("restricting formula must have exactly one free variable, got " +
                     std::to_string(pfv.size()));
  Ctx ctx{phi, *pfv.begin(), options.max_cells, {}, {}};
  if (options.prune_model) {
    ctx.stalks.push_back(&options.prune_model->tail());
    for (const auto& [idx, r] : options.prune_model->exceptional()) {
      (void)idx;
      ctx.stalks.push_back(&r);
    }
  }
  Reduction res = rec(ctx, to_nae_normal_form(theta));
  return ReductionResult{Partition{std::move(res.cells)}, std::move(res.psi),
                         std::move(ctx.trace)};
}

bool evaluate_in_model(const RPModel& m, const RingFormula& theta,
                       const std::vector<RPElement>& args, std::size_t max_cells) {
  std::set<std::string> fv = free_vars(theta);
  if (fv.size() != args.size())
    throw ShapeError("formula has " + std::to_string(fv.size()) +
                     " free variables but " + std::to_string(args.size()) +
                     " arguments were given");
  ReduceOptions opt;
  opt.max_cells = max_cells;
  opt.prune_model = m;
  ReductionResult r = reduce(theta, m.phi(), opt);
  std::map<std::string, RPElement> env;
  {
    auto it = fv.begin();
    for (const RPElement& e : args) env.emplace(*it++, e);
  }
  std::map<std::string, FinCofSet> vals;
  const std::vector<RingFormula>& cells = r.cells.cells;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    std::vector<RPElement> argv;
    for (const std::string& v : free_vars(cells[i])) argv.push_back(env.at(v));
    vals.emplace(cell_name(i), boolean_value(m, cells[i], argv));
  }
  return evaluate_with_params(r.psi, vals);
}

bool decide_in_model(const RPModel& m, const RingFormula& theta,
                     std::size_t max_cells) {
  std::set<std::string> fv = free_vars(theta);
  if (!fv.empty()) {
    std::string names;
    for (const std::string& v : fv) names += (names.empty() ? "" : ", ") + v;
    throw ShapeError("not a sentence; free variables: " + names);
  }
  return evaluate_in_model(m, theta, {}, max_cells);
}

}  // namespace resprod
