#include "resprod/stalk.hpp"

#include <algorithm>
#include <cctype>

#include "resprod/errors.hpp"

namespace resprod {

namespace {

constexpr std::uint32_t kMaxCarrier = 256;

}  // namespace

std::optional<Elem> FiniteRing::index_of(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<Elem>(it - names_.begin());
}

void FiniteRing::validate() const {
  std::size_t n = names_.size();
  if (n < 2) throw BadCarrierError("carrier needs at least the elements 0 and 1");
  if (n > kMaxCarrier) throw BadCarrierError("carrier too large");
  for (const auto& name : names_)
    if (name.empty()) throw BadCarrierError("empty element name");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (names_[i] == names_[j]) throw BadCarrierError("duplicate element name '" + names_[i] + "'");
  auto check_table = [n](const std::vector<std::vector<Elem>>& t, const char* which) {
    if (t.size() != n) throw BadCarrierError(std::string(which) + " table has wrong row count");
    for (const auto& row : t) {
      if (row.size() != n) throw BadCarrierError(std::string(which) + " table has a ragged row");
      for (Elem v : row)
        if (v >= n) throw BadCarrierError(std::string(which) + " table entry out of range");
    }
  };
  check_table(add_, "addition");
  check_table(mul_, "multiplication");

  auto fail = [this](const std::string& law, Elem x, Elem y, Elem z, bool ternary) {
    std::string at = "(" + names_[x] + ", " + names_[y];
    if (ternary) at += ", " + names_[z];
    at += ")";
    throw RingAxiomError(law + " fails at " + at);
  };
  for (Elem x = 0; x < n; ++x) {
    if (add(0, x) != x) fail("additive identity", 0, x, 0, false);
    if (mul(1, x) != x) fail("multiplicative identity", 1, x, 0, false);
    bool has_neg = false;
    for (Elem y = 0; y < n && !has_neg; ++y) has_neg = add(x, y) == 0;
    if (!has_neg) throw RingAxiomError("no additive inverse for " + names_[x]);
    for (Elem y = 0; y < n; ++y) {
      if (add(x, y) != add(y, x)) fail("commutativity of +", x, y, 0, false);
      if (mul(x, y) != mul(y, x)) fail("commutativity of *", x, y, 0, false);
      for (Elem z = 0; z < n; ++z) {
        if (add(add(x, y), z) != add(x, add(y, z))) fail("associativity of +", x, y, z, true);
        if (mul(mul(x, y), z) != mul(x, mul(y, z))) fail("associativity of *", x, y, z, true);
        if (mul(x, add(y, z)) != add(mul(x, y), mul(x, z))) fail("distributivity", x, y, z, true);
      }
    }
  }
}

FiniteRing FiniteRing::from_tables(std::vector<std::string> names,
                                   std::vector<std::vector<Elem>> add,
                                   std::vector<std::vector<Elem>> mul) {
  FiniteRing r;
  r.names_ = std::move(names);
  r.add_ = std::move(add);
  r.mul_ = std::move(mul);
  r.validate();
  r.neg_.resize(r.names_.size());
  for (Elem x = 0; x < r.names_.size(); ++x)
    for (Elem y = 0; y < r.names_.size(); ++y)
      if (r.add(x, y) == 0) r.neg_[x] = y;
  return r;
}

FiniteRing FiniteRing::zmod(std::uint32_t n) {
  if (n < 2) throw BadCarrierError("zmod modulus must be >= 2");
  if (n > kMaxCarrier) throw BadCarrierError("zmod modulus too large");
  std::vector<std::string> names(n);
  std::vector<std::vector<Elem>> add(n, std::vector<Elem>(n)), mul(n, std::vector<Elem>(n));
  for (Elem i = 0; i < n; ++i) {
    names[i] = std::to_string(i);
    for (Elem j = 0; j < n; ++j) {
      add[i][j] = (i + j) % n;
      mul[i][j] = static_cast<Elem>((static_cast<std::uint64_t>(i) * j) % n);
    }
  }
  return from_tables(std::move(names), std::move(add), std::move(mul));
}

FiniteRing FiniteRing::gf4() {
  // 0, 1, a, b with a+b = 1, x+x = 0, a*a = b, a*b = 1, b*b = a.
  std::vector<std::string> names{"0", "1", "a", "b"};
  std::vector<std::vector<Elem>> add{{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
  std::vector<std::vector<Elem>> mul{{0, 0, 0, 0}, {0, 1, 2, 3}, {0, 2, 3, 1}, {0, 3, 1, 2}};
  return from_tables(std::move(names), std::move(add), std::move(mul));
}

std::vector<Elem> FiniteRing::idempotents() const {
  std::vector<Elem> out;
  for (Elem x = 0; x < names_.size(); ++x)
    if (mul(x, x) == x) out.push_back(x);
  return out;
}

bool is_connected(const FiniteRing& r) {
  return r.idempotents() == std::vector<Elem>{0, 1};
}

// --- textual specs -----------------------------------------------------------

namespace {

std::vector<std::string> split_names(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::vector<Elem>> parse_rows(const std::string& block,
                                          const std::vector<std::string>& names,
                                          const char* which) {
  std::vector<std::vector<Elem>> rows;
  for (const std::string& row_text : split_on(block, ',')) {
    std::vector<Elem> row;
    for (const std::string& cell : split_names(row_text)) {
      auto it = std::find(names.begin(), names.end(), cell);
      if (it == names.end())
        throw BadCarrierError(std::string(which) + " table uses unknown element '" + cell + "'");
      row.push_back(static_cast<Elem>(it - names.begin()));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

FiniteRing make_ring(const std::string& spec) {
  std::string s = trim(spec);
  if (s == "gf4") return FiniteRing::gf4();
  if (s.rfind("zmod(", 0) == 0 && s.back() == ')') {
    std::string inner = trim(s.substr(5, s.size() - 6));
    if (inner.empty() || inner.find_first_not_of("0123456789") != std::string::npos)
      throw ParseError("malformed modulus in '" + s + "'", 1, 6, {"natural number"});
    if (inner.size() > 9) throw BadCarrierError("zmod modulus too large");
    return FiniteRing::zmod(static_cast<std::uint32_t>(std::stoul(inner)));
  }
  if (s.rfind("table(", 0) == 0 && s.back() == ')') {
    std::string inner = s.substr(6, s.size() - 7);
    std::vector<std::string> blocks = split_on(inner, ';');
    if (blocks.size() != 3)
      throw ParseError("table spec needs names; add rows; mul rows", 1, 1,
                       {"three ';'-separated blocks"});
    std::vector<std::string> names = split_names(blocks[0]);
    auto add = parse_rows(blocks[1], names, "addition");
    auto mul = parse_rows(blocks[2], names, "multiplication");
    return FiniteRing::from_tables(std::move(names), std::move(add), std::move(mul));
  }
  throw ParseError("unknown ring spec '" + s + "'", 1, 1, {"zmod(n)", "gf4", "table(...)"});
}

std::string render_spec(const FiniteRing& r) {
  std::string out = "table(";
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (i) out += " ";
    out += r.names()[i];
  }
  auto rows = [&](auto op) {
    std::string block;
    for (Elem x = 0; x < r.size(); ++x) {
      block += x ? ", " : "";
      for (Elem y = 0; y < r.size(); ++y) {
        if (y) block += " ";
        block += r.name_of(op(x, y));
      }
    }
    return block;
  };
  out += "; " + rows([&](Elem x, Elem y) { return r.add(x, y); });
  out += "; " + rows([&](Elem x, Elem y) { return r.mul(x, y); });
  return out + ")";
}

// --- evaluation --------------------------------------------------------------

namespace {

Elem eval_term(const FiniteRing& r, const RingTerm& t, const std::map<std::string, Elem>& env) {
  switch (t.kind()) {
    case RingTerm::Kind::Var: {
      auto it = env.find(t.name());
      if (it == env.end()) throw EvalError("unbound variable '" + t.name() + "'");
      if (it->second >= r.size()) throw EvalError("element index out of range");
      return it->second;
    }
    case RingTerm::Kind::Zero: return r.zero();
    case RingTerm::Kind::One: return r.one();
    case RingTerm::Kind::Neg: return r.neg(eval_term(r, t.sub(), env));
    case RingTerm::Kind::Add: return r.add(eval_term(r, t.lhs(), env), eval_term(r, t.rhs(), env));
    case RingTerm::Kind::Mul: return r.mul(eval_term(r, t.lhs(), env), eval_term(r, t.rhs(), env));
  }
  throw std::logic_error("unreachable");
}

bool eval_rec(const FiniteRing& r, const RingFormula& f, std::map<std::string, Elem>& env) {
  switch (f.kind()) {
    case RingFormula::Kind::Eq:
      return eval_term(r, f.term_lhs(), env) == eval_term(r, f.term_rhs(), env);
    case RingFormula::Kind::Not: return !eval_rec(r, f.sub(), env);
    case RingFormula::Kind::And: return eval_rec(r, f.lhs(), env) && eval_rec(r, f.rhs(), env);
    case RingFormula::Kind::Or: return eval_rec(r, f.lhs(), env) || eval_rec(r, f.rhs(), env);
    case RingFormula::Kind::Implies:
      return !eval_rec(r, f.lhs(), env) || eval_rec(r, f.rhs(), env);
    case RingFormula::Kind::Exists:
    case RingFormula::Kind::Forall: {
      bool universal = f.kind() == RingFormula::Kind::Forall;
      std::optional<Elem> saved;
      if (auto it = env.find(f.var()); it != env.end()) saved = it->second;
      bool result = universal;
      for (Elem x = 0; x < r.size(); ++x) {
        env.insert_or_assign(f.var(), x);
        bool here = eval_rec(r, f.body(), env);
        if (here != universal) {
          result = here;
          break;
        }
      }
      if (saved) env.insert_or_assign(f.var(), *saved);
      else env.erase(f.var());
      return result;
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace

bool eval_stalk_formula(const FiniteRing& r, const RingFormula& f,
                        const std::map<std::string, Elem>& env) {
  std::map<std::string, Elem> scratch = env;
  return eval_rec(r, f, scratch);
}

std::set<Elem> validate_restricting_formula(const FiniteRing& r, const RingFormula& phi) {
  auto fv = free_vars(phi);
  if (fv.size() != 1)
    throw ShapeError("restricting formula must have exactly one free variable");
  const std::string& v = *fv.begin();

  std::set<Elem> s;
  for (Elem x = 0; x < r.size(); ++x)
    if (eval_stalk_formula(r, phi, {{v, x}})) s.insert(x);

  auto name = [&](Elem x) { return r.name_of(x); };
  if (!s.count(r.zero())) throw NotUnitalSubringError("0 does not satisfy the formula");
  if (!s.count(r.one())) throw NotUnitalSubringError("1 does not satisfy the formula");
  for (Elem x : s) {
    for (Elem y : s) {
      if (!s.count(r.add(x, y)))
        throw NotUnitalSubringError("not closed under +: " + name(x) + " + " + name(y) + " = " +
                                    name(r.add(x, y)) + " is outside");
      if (!s.count(r.mul(x, y)))
        throw NotUnitalSubringError("not closed under *: " + name(x) + " * " + name(y) + " = " +
                                    name(r.mul(x, y)) + " is outside");
    }
  }
  for (Elem x : s)
    if (!s.count(r.neg(x)))
      throw NotUnitalSubringError("not closed under negation: -" + name(x) + " = " +
                                  name(r.neg(x)) + " is outside");
  return s;
}

FiniteRing restrict_to(const FiniteRing& r, const std::set<Elem>& elements) {
  if (!elements.count(r.zero()) || !elements.count(r.one()))
    throw BadCarrierError("subset must contain 0 and 1");
  std::vector<Elem> order{r.zero(), r.one()};
  for (Elem x : elements)
    if (x != r.zero() && x != r.one()) order.push_back(x);
  std::vector<Elem> rank(r.size(), 0);
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<Elem>(i);

  std::size_t n = order.size();
  std::vector<std::string> names(n);
  std::vector<std::vector<Elem>> add(n, std::vector<Elem>(n)), mul(n, std::vector<Elem>(n));
  for (std::size_t i = 0; i < n; ++i) {
    names[i] = r.name_of(order[i]);
    for (std::size_t j = 0; j < n; ++j) {
      Elem s = r.add(order[i], order[j]);
      Elem p = r.mul(order[i], order[j]);
      if (!elements.count(s) || !elements.count(p))
        throw BadCarrierError("subset is not closed under the ring operations");
      add[i][j] = rank[s];
      mul[i][j] = rank[p];
    }
  }
  return FiniteRing::from_tables(std::move(names), std::move(add), std::move(mul));
}

}  // namespace resprod
