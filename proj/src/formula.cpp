#include "resprod/formula.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <stdexcept>

#include "resprod/errors.hpp"

namespace resprod {

// ---------------------------------------------------------------------------
// AST nodes

struct RingTerm::Node {
  Kind kind;
  std::string name;
  std::shared_ptr<const Node> a, b;
};

RingTerm RingTerm::var(std::string name) {
  return RingTerm(std::make_shared<Node>(Node{Kind::Var, std::move(name), nullptr, nullptr}));
}
RingTerm RingTerm::zero() {
  return RingTerm(std::make_shared<Node>(Node{Kind::Zero, "", nullptr, nullptr}));
}
RingTerm RingTerm::one() {
  return RingTerm(std::make_shared<Node>(Node{Kind::One, "", nullptr, nullptr}));
}
RingTerm RingTerm::neg(RingTerm t) {
  return RingTerm(std::make_shared<Node>(Node{Kind::Neg, "", t.node_, nullptr}));
}
RingTerm RingTerm::add(RingTerm l, RingTerm r) {
  return RingTerm(std::make_shared<Node>(Node{Kind::Add, "", l.node_, r.node_}));
}
RingTerm RingTerm::mul(RingTerm l, RingTerm r) {
  return RingTerm(std::make_shared<Node>(Node{Kind::Mul, "", l.node_, r.node_}));
}
RingTerm::Kind RingTerm::kind() const { return node_->kind; }
const std::string& RingTerm::name() const { return node_->name; }
RingTerm RingTerm::lhs() const { return RingTerm(node_->a); }
RingTerm RingTerm::rhs() const { return RingTerm(node_->b); }
RingTerm RingTerm::sub() const { return RingTerm(node_->a); }

static bool term_equal(const RingTerm::Node* x, const RingTerm::Node* y) {
  if (x == y) return true;
  if (x->kind != y->kind) return false;
  switch (x->kind) {
    case RingTerm::Kind::Var: return x->name == y->name;
    case RingTerm::Kind::Zero:
    case RingTerm::Kind::One: return true;
    case RingTerm::Kind::Neg: return term_equal(x->a.get(), y->a.get());
    case RingTerm::Kind::Add:
    case RingTerm::Kind::Mul:
      return term_equal(x->a.get(), y->a.get()) && term_equal(x->b.get(), y->b.get());
  }
  return false;
}
bool RingTerm::operator==(const RingTerm& o) const { return term_equal(node_.get(), o.node_.get()); }

struct RingFormula::Node {
  Kind kind;
  std::shared_ptr<const RingTerm::Node> tl, tr;  // Eq
  std::shared_ptr<const Node> a, b;
  std::string var;
};

RingFormula RingFormula::eq(RingTerm l, RingTerm r) {
  return RingFormula(std::make_shared<Node>(Node{Kind::Eq, l.node_, r.node_, nullptr, nullptr, ""}));
}
RingFormula RingFormula::not_(RingFormula f) {
  return RingFormula(std::make_shared<Node>(Node{Kind::Not, nullptr, nullptr, f.node_, nullptr, ""}));
}
RingFormula RingFormula::and_(RingFormula l, RingFormula r) {
  return RingFormula(std::make_shared<Node>(Node{Kind::And, nullptr, nullptr, l.node_, r.node_, ""}));
}
RingFormula RingFormula::or_(RingFormula l, RingFormula r) {
  return RingFormula(std::make_shared<Node>(Node{Kind::Or, nullptr, nullptr, l.node_, r.node_, ""}));
}
RingFormula RingFormula::implies(RingFormula l, RingFormula r) {
  return RingFormula(std::make_shared<Node>(Node{Kind::Implies, nullptr, nullptr, l.node_, r.node_, ""}));
}
RingFormula RingFormula::exists(std::string var, RingFormula body) {
  return RingFormula(std::make_shared<Node>(Node{Kind::Exists, nullptr, nullptr, body.node_, nullptr, std::move(var)}));
}
RingFormula RingFormula::forall(std::string var, RingFormula body) {
  return RingFormula(std::make_shared<Node>(Node{Kind::Forall, nullptr, nullptr, body.node_, nullptr, std::move(var)}));
}
RingFormula::Kind RingFormula::kind() const { return node_->kind; }
RingTerm RingFormula::term_lhs() const { return RingTerm(node_->tl); }
RingTerm RingFormula::term_rhs() const { return RingTerm(node_->tr); }
RingFormula RingFormula::lhs() const { return RingFormula(node_->a); }
RingFormula RingFormula::rhs() const { return RingFormula(node_->b); }
RingFormula RingFormula::sub() const { return RingFormula(node_->a); }
const std::string& RingFormula::var() const { return node_->var; }
RingFormula RingFormula::body() const { return RingFormula(node_->a); }

static bool formula_equal(const RingFormula::Node* x, const RingFormula::Node* y) {
  if (x == y) return true;
  if (x->kind != y->kind) return false;
  switch (x->kind) {
    case RingFormula::Kind::Eq:
      return term_equal(x->tl.get(), y->tl.get()) && term_equal(x->tr.get(), y->tr.get());
    case RingFormula::Kind::Not:
      return formula_equal(x->a.get(), y->a.get());
    case RingFormula::Kind::And:
    case RingFormula::Kind::Or:
    case RingFormula::Kind::Implies:
      return formula_equal(x->a.get(), y->a.get()) && formula_equal(x->b.get(), y->b.get());
    case RingFormula::Kind::Exists:
    case RingFormula::Kind::Forall:
      return x->var == y->var && formula_equal(x->a.get(), y->a.get());
  }
  return false;
}
bool RingFormula::operator==(const RingFormula& o) const {
  return formula_equal(node_.get(), o.node_.get());
}

struct BoolTerm::Node {
  Kind kind;
  std::string name;
  std::shared_ptr<const Node> a, b;
};

BoolTerm BoolTerm::var(std::string name) {
  return BoolTerm(std::make_shared<Node>(Node{Kind::Var, std::move(name), nullptr, nullptr}));
}
BoolTerm BoolTerm::zero() {
  return BoolTerm(std::make_shared<Node>(Node{Kind::Zero, "", nullptr, nullptr}));
}
BoolTerm BoolTerm::one() {
  return BoolTerm(std::make_shared<Node>(Node{Kind::One, "", nullptr, nullptr}));
}
BoolTerm BoolTerm::meet(BoolTerm l, BoolTerm r) {
  return BoolTerm(std::make_shared<Node>(Node{Kind::Meet, "", l.node_, r.node_}));
}
BoolTerm BoolTerm::join(BoolTerm l, BoolTerm r) {
  return BoolTerm(std::make_shared<Node>(Node{Kind::Join, "", l.node_, r.node_}));
}
BoolTerm BoolTerm::complement(BoolTerm t) {
  return BoolTerm(std::make_shared<Node>(Node{Kind::Compl, "", t.node_, nullptr}));
}
BoolTerm BoolTerm::diff(BoolTerm l, BoolTerm r) {
  return BoolTerm(std::make_shared<Node>(Node{Kind::Diff, "", l.node_, r.node_}));
}
BoolTerm::Kind BoolTerm::kind() const { return node_->kind; }
const std::string& BoolTerm::name() const { return node_->name; }
BoolTerm BoolTerm::lhs() const { return BoolTerm(node_->a); }
BoolTerm BoolTerm::rhs() const { return BoolTerm(node_->b); }
BoolTerm BoolTerm::sub() const { return BoolTerm(node_->a); }

static bool bterm_equal(const BoolTerm::Node* x, const BoolTerm::Node* y) {
  if (x == y) return true;
  if (x->kind != y->kind) return false;
  switch (x->kind) {
    case BoolTerm::Kind::Var: return x->name == y->name;
    case BoolTerm::Kind::Zero:
    case BoolTerm::Kind::One: return true;
    case BoolTerm::Kind::Compl: return bterm_equal(x->a.get(), y->a.get());
    case BoolTerm::Kind::Meet:
    case BoolTerm::Kind::Join:
    case BoolTerm::Kind::Diff:
      return bterm_equal(x->a.get(), y->a.get()) && bterm_equal(x->b.get(), y->b.get());
  }
  return false;
}
bool BoolTerm::operator==(const BoolTerm& o) const { return bterm_equal(node_.get(), o.node_.get()); }

struct BoolFormula::Node {
  Kind kind;
  std::shared_ptr<const BoolTerm::Node> tl, tr;
  std::uint32_t n = 0;
  std::shared_ptr<const Node> a, b;
  std::string var;
};

BoolFormula BoolFormula::equal(BoolTerm l, BoolTerm r) {
  return BoolFormula(std::make_shared<Node>(Node{Kind::Equal, l.node_, r.node_, 0, nullptr, nullptr, ""}));
}
BoolFormula BoolFormula::leq(BoolTerm l, BoolTerm r) {
  return BoolFormula(std::make_shared<Node>(Node{Kind::Leq, l.node_, r.node_, 0, nullptr, nullptr, ""}));
}
BoolFormula BoolFormula::count_at_least(std::uint32_t n, BoolTerm t) {
  if (n < 1) throw std::invalid_argument("count_at_least requires n >= 1");
  return BoolFormula(std::make_shared<Node>(Node{Kind::Count, t.node_, nullptr, n, nullptr, nullptr, ""}));
}
BoolFormula BoolFormula::fin(BoolTerm t) {
  return BoolFormula(std::make_shared<Node>(Node{Kind::Fin, t.node_, nullptr, 0, nullptr, nullptr, ""}));
}
BoolFormula BoolFormula::not_(BoolFormula f) {
  return BoolFormula(std::make_shared<Node>(Node{Kind::Not, nullptr, nullptr, 0, f.node_, nullptr, ""}));
}
BoolFormula BoolFormula::and_(BoolFormula l, BoolFormula r) {
  return BoolFormula(std::make_shared<Node>(Node{Kind::And, nullptr, nullptr, 0, l.node_, r.node_, ""}));
}
BoolFormula BoolFormula::or_(BoolFormula l, BoolFormula r) {
  return BoolFormula(std::make_shared<Node>(Node{Kind::Or, nullptr, nullptr, 0, l.node_, r.node_, ""}));
}
BoolFormula BoolFormula::implies(BoolFormula l, BoolFormula r) {
  return BoolFormula(std::make_shared<Node>(Node{Kind::Implies, nullptr, nullptr, 0, l.node_, r.node_, ""}));
}
BoolFormula BoolFormula::exists(std::string var, BoolFormula body) {
  return BoolFormula(std::make_shared<Node>(Node{Kind::Exists, nullptr, nullptr, 0, body.node_, nullptr, std::move(var)}));
}
BoolFormula BoolFormula::forall(std::string var, BoolFormula body) {
  return BoolFormula(std::make_shared<Node>(Node{Kind::Forall, nullptr, nullptr, 0, body.node_, nullptr, std::move(var)}));
}
BoolFormula::Kind BoolFormula::kind() const { return node_->kind; }
BoolTerm BoolFormula::term_lhs() const { return BoolTerm(node_->tl); }
BoolTerm BoolFormula::term_rhs() const { return BoolTerm(node_->tr); }
BoolTerm BoolFormula::term() const { return BoolTerm(node_->tl); }
std::uint32_t BoolFormula::count() const { return node_->n; }
BoolFormula BoolFormula::lhs() const { return BoolFormula(node_->a); }
BoolFormula BoolFormula::rhs() const { return BoolFormula(node_->b); }
BoolFormula BoolFormula::sub() const { return BoolFormula(node_->a); }
const std::string& BoolFormula::var() const { return node_->var; }
BoolFormula BoolFormula::body() const { return BoolFormula(node_->a); }

static bool bformula_equal(const BoolFormula::Node* x, const BoolFormula::Node* y) {
  if (x == y) return true;
  if (x->kind != y->kind) return false;
  switch (x->kind) {
    case BoolFormula::Kind::Equal:
    case BoolFormula::Kind::Leq:
      return bterm_equal(x->tl.get(), y->tl.get()) && bterm_equal(x->tr.get(), y->tr.get());
    case BoolFormula::Kind::Count:
      return x->n == y->n && bterm_equal(x->tl.get(), y->tl.get());
    case BoolFormula::Kind::Fin:
      return bterm_equal(x->tl.get(), y->tl.get());
    case BoolFormula::Kind::Not:
      return bformula_equal(x->a.get(), y->a.get());
    case BoolFormula::Kind::And:
    case BoolFormula::Kind::Or:
    case BoolFormula::Kind::Implies:
      return bformula_equal(x->a.get(), y->a.get()) && bformula_equal(x->b.get(), y->b.get());
    case BoolFormula::Kind::Exists:
    case BoolFormula::Kind::Forall:
      return x->var == y->var && bformula_equal(x->a.get(), y->a.get());
  }
  return false;
}
bool BoolFormula::operator==(const BoolFormula& o) const {
  return bformula_equal(node_.get(), o.node_.get());
}

// ---------------------------------------------------------------------------
// Lexer shared by both languages.

namespace {

enum class Tok {
  Ident, Count, Zero, One,
  Plus, Star, Minus, Tilde, Amp, Pipe, Arrow, Eq, Leq, Dot, LParen, RParen,
  Caret, Bang, Backslash, Join, KwE, KwA, KwFin, End
};

struct Token {
  Tok type;
  std::string text;
  std::uint32_t count = 0;
  int line = 1;
  int col = 1;
};

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Count: return "C<n>(";
    case Tok::Zero: return "0";
    case Tok::One: return "1";
    case Tok::Plus: return "+";
    case Tok::Star: return "*";
    case Tok::Minus: return "-";
    case Tok::Tilde: return "~";
    case Tok::Amp: return "&";
    case Tok::Pipe: return "|";
    case Tok::Arrow: return "->";
    case Tok::Eq: return "=";
    case Tok::Leq: return "<=";
    case Tok::Dot: return ".";
    case Tok::LParen: return "(";
    case Tok::RParen: return ")";
    case Tok::Caret: return "^";
    case Tok::Bang: return "!";
    case Tok::Backslash: return "\\";
    case Tok::Join: return "v";
    case Tok::KwE: return "E";
    case Tok::KwA: return "A";
    case Tok::KwFin: return "Fin(";
    case Tok::End: return "end of input";
  }
  return "?";
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_cont(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

std::vector<Token> lex(const std::string& text, bool bool_mode) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto push = [&](Tok t, std::string s, int l, int c) {
    out.push_back(Token{t, std::move(s), 0, l, c});
  };
  while (i < text.size()) {
    char c = text[i];
    int tl = line, tc = col;
    auto adv = [&](size_t n) {
      for (size_t k = 0; k < n; ++k) {
        if (text[i] == '\n') { ++line; col = 1; } else { ++col; }
        ++i;
      }
    };
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') { adv(1); continue; }
    if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') { push(Tok::Arrow, "->", tl, tc); adv(2); continue; }
    if (c == '<' && i + 1 < text.size() && text[i + 1] == '=') { push(Tok::Leq, "<=", tl, tc); adv(2); continue; }
    switch (c) {
      case '+': push(Tok::Plus, "+", tl, tc); adv(1); continue;
      case '*': push(Tok::Star, "*", tl, tc); adv(1); continue;
      case '-': push(Tok::Minus, "-", tl, tc); adv(1); continue;
      case '~': push(Tok::Tilde, "~", tl, tc); adv(1); continue;
      case '&': push(Tok::Amp, "&", tl, tc); adv(1); continue;
      case '|': push(Tok::Pipe, "|", tl, tc); adv(1); continue;
      case '=': push(Tok::Eq, "=", tl, tc); adv(1); continue;
      case '.': push(Tok::Dot, ".", tl, tc); adv(1); continue;
      case '(': push(Tok::LParen, "(", tl, tc); adv(1); continue;
      case ')': push(Tok::RParen, ")", tl, tc); adv(1); continue;
      case '^': push(Tok::Caret, "^", tl, tc); adv(1); continue;
      case '!': push(Tok::Bang, "!", tl, tc); adv(1); continue;
      case '\\': push(Tok::Backslash, "\\", tl, tc); adv(1); continue;
      case '0': push(Tok::Zero, "0", tl, tc); adv(1); continue;
      case '1': push(Tok::One, "1", tl, tc); adv(1); continue;
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      throw ParseError("unexpected digit '" + std::string(1, c) + "'", tl, tc,
                       {"0", "1"});
    }
    if (ident_start(c)) {
      size_t j = i;
      while (j < text.size() && ident_cont(text[j])) ++j;
      std::string word = text.substr(i, j - i);
      adv(j - i);
      if (word == "E") { push(Tok::KwE, word, tl, tc); continue; }
      if (word == "A") { push(Tok::KwA, word, tl, tc); continue; }
      if (bool_mode) {
        if (word == "v") { push(Tok::Join, word, tl, tc); continue; }
        if (word == "Fin") { push(Tok::KwFin, word, tl, tc); continue; }
        if (word.size() >= 2 && word[0] == 'C' &&
            std::all_of(word.begin() + 1, word.end(),
                        [](char d) { return std::isdigit(static_cast<unsigned char>(d)); })) {
          if (word.size() > 10)
            throw ParseError("count index too large", tl, tc);
          Token t{Tok::Count, word, static_cast<std::uint32_t>(std::stoul(word.substr(1))), tl, tc};
          out.push_back(t);
          continue;
        }
      }
      push(Tok::Ident, word, tl, tc);
      continue;
    }
    throw ParseError("unexpected character '" + std::string(1, c) + "'", tl, tc);
  }
  out.push_back(Token{Tok::End, "", 0, line, col});
  return out;
}

// Parse error carrying the index of the offending token, so that backtracking
// can keep whichever alternative progressed further.
struct PositionedError {
  size_t index;
  ParseError err;
};

struct ParserBase {
  std::vector<Token> ts;
  size_t pos = 0;

  const Token& cur() const { return ts[pos]; }
  bool at(Tok t) const { return ts[pos].type == t; }
  Token take() { return ts[pos++]; }

  [[noreturn]] void fail(const std::vector<Tok>& expected) const {
    std::vector<std::string> names;
    names.reserve(expected.size());
    for (Tok t : expected) names.push_back(tok_name(t));
    throw PositionedError{pos, ParseError("unexpected " + std::string(tok_name(cur().type)) +
                                              (cur().type == Tok::Ident ? " '" + cur().text + "'" : ""),
                                          cur().line, cur().col, names)};
  }
  Token expect(Tok t) {
    if (!at(t)) fail({t});
    return take();
  }
};

// --- ring language -------------------------------------------------------

struct RingParser : ParserBase {
  RingFormula parse_formula() {  // implies level, right associative
    RingFormula l = parse_or();
    if (at(Tok::Arrow)) {
      take();
      return RingFormula::implies(l, parse_formula());
    }
    return l;
  }
  RingFormula parse_or() {
    RingFormula l = parse_and();
    while (at(Tok::Pipe)) {
      take();
      l = RingFormula::or_(l, parse_and());
    }
    return l;
  }
  RingFormula parse_and() {
    RingFormula l = parse_unary();
    while (at(Tok::Amp)) {
      take();
      l = RingFormula::and_(l, parse_unary());
    }
    return l;
  }
  RingFormula parse_unary() {
    if (at(Tok::Tilde)) {
      take();
      return RingFormula::not_(parse_unary());
    }
    if (at(Tok::KwE) || at(Tok::KwA)) {
      bool ex = at(Tok::KwE);
      take();
      Token v = expect(Tok::Ident);
      expect(Tok::Dot);
      RingFormula body = parse_formula();
      return ex ? RingFormula::exists(v.text, body) : RingFormula::forall(v.text, body);
    }
    if (at(Tok::LParen)) {
      // Ambiguous: parenthesized formula or parenthesized term opening an
      // equation.  Try the formula reading first and keep whichever
      // alternative made it further on failure.
      size_t save = pos;
      try {
        take();
        RingFormula f = parse_formula();
        expect(Tok::RParen);
        return f;
      } catch (PositionedError& e1) {
        size_t p1 = e1.index;
        pos = save;
        try {
          return parse_equation();
        } catch (PositionedError& e2) {
          throw e2.index >= p1 ? e2 : e1;
        }
      }
    }
    return parse_equation();
  }
  RingFormula parse_equation() {
    RingTerm l = parse_term();
    expect(Tok::Eq);
    RingTerm r = parse_term();
    return RingFormula::eq(l, r);
  }
  RingTerm parse_term() { return parse_sum(); }
  RingTerm parse_sum() {
    RingTerm l = parse_prod();
    while (at(Tok::Plus)) {
      take();
      l = RingTerm::add(l, parse_prod());
    }
    return l;
  }
  RingTerm parse_prod() {
    RingTerm l = parse_term_unary();
    while (at(Tok::Star)) {
      take();
      l = RingTerm::mul(l, parse_term_unary());
    }
    return l;
  }
  RingTerm parse_term_unary() {
    if (at(Tok::Minus)) {
      take();
      return RingTerm::neg(parse_term_unary());
    }
    return parse_term_primary();
  }
  RingTerm parse_term_primary() {
    if (at(Tok::Zero)) { take(); return RingTerm::zero(); }
    if (at(Tok::One)) { take(); return RingTerm::one(); }
    if (at(Tok::Ident)) { return RingTerm::var(take().text); }
    if (at(Tok::LParen)) {
      take();
      RingTerm t = parse_sum();
      expect(Tok::RParen);
      return t;
    }
    fail({Tok::Zero, Tok::One, Tok::Ident, Tok::LParen, Tok::Minus});
  }
};

// --- Boolean language -----------------------------------------------------

struct BoolParser : ParserBase {
  BoolFormula parse_formula() {
    BoolFormula l = parse_or();
    if (at(Tok::Arrow)) {
      take();
      return BoolFormula::implies(l, parse_formula());
    }
    return l;
  }
  BoolFormula parse_or() {
    BoolFormula l = parse_and();
    while (at(Tok::Pipe)) {
      take();
      l = BoolFormula::or_(l, parse_and());
    }
    return l;
  }
  BoolFormula parse_and() {
    BoolFormula l = parse_unary();
    while (at(Tok::Amp)) {
      take();
      l = BoolFormula::and_(l, parse_unary());
    }
    return l;
  }
  BoolFormula parse_unary() {
    if (at(Tok::Tilde)) {
      take();
      return BoolFormula::not_(parse_unary());
    }
    if (at(Tok::KwE) || at(Tok::KwA)) {
      bool ex = at(Tok::KwE);
      take();
      Token v = expect(Tok::Ident);
      expect(Tok::Dot);
      BoolFormula body = parse_formula();
      return ex ? BoolFormula::exists(v.text, body) : BoolFormula::forall(v.text, body);
    }
    if (at(Tok::Count)) {
      Token t = take();
      if (t.count < 1)
        throw PositionedError{pos, ParseError("count predicate requires n >= 1", t.line, t.col)};
      expect(Tok::LParen);
      BoolTerm arg = parse_term();
      expect(Tok::RParen);
      return BoolFormula::count_at_least(t.count, arg);
    }
    if (at(Tok::KwFin)) {
      take();
      expect(Tok::LParen);
      BoolTerm arg = parse_term();
      expect(Tok::RParen);
      return BoolFormula::fin(arg);
    }
    if (at(Tok::LParen)) {
      size_t save = pos;
      try {
        take();
        BoolFormula f = parse_formula();
        expect(Tok::RParen);
        return f;
      } catch (PositionedError& e1) {
        size_t p1 = e1.index;
        pos = save;
        try {
          return parse_atom();
        } catch (PositionedError& e2) {
          throw e2.index >= p1 ? e2 : e1;
        }
      }
    }
    return parse_atom();
  }
  BoolFormula parse_atom() {
    BoolTerm l = parse_term();
    if (at(Tok::Leq)) {
      take();
      return BoolFormula::leq(l, parse_term());
    }
    expect(Tok::Eq);
    return BoolFormula::equal(l, parse_term());
  }
  // Term precedence: ! > ^ > \ > v, binary operators left associative.
  BoolTerm parse_term() { return parse_join(); }
  BoolTerm parse_join() {
    BoolTerm l = parse_diff();
    while (at(Tok::Join)) {
      take();
      l = BoolTerm::join(l, parse_diff());
    }
    return l;
  }
  BoolTerm parse_diff() {
    BoolTerm l = parse_meet();
    while (at(Tok::Backslash)) {
      take();
      l = BoolTerm::diff(l, parse_meet());
    }
    return l;
  }
  BoolTerm parse_meet() {
    BoolTerm l = parse_term_unary();
    while (at(Tok::Caret)) {
      take();
      l = BoolTerm::meet(l, parse_term_unary());
    }
    return l;
  }
  BoolTerm parse_term_unary() {
    if (at(Tok::Bang)) {
      take();
      return BoolTerm::complement(parse_term_unary());
    }
    return parse_term_primary();
  }
  BoolTerm parse_term_primary() {
    if (at(Tok::Zero)) { take(); return BoolTerm::zero(); }
    if (at(Tok::One)) { take(); return BoolTerm::one(); }
    if (at(Tok::Ident)) { return BoolTerm::var(take().text); }
    if (at(Tok::LParen)) {
      take();
      BoolTerm t = parse_join();
      expect(Tok::RParen);
      return t;
    }
    fail({Tok::Zero, Tok::One, Tok::Ident, Tok::LParen, Tok::Bang});
  }
};

// --- binder normalization --------------------------------------------------

void collect_idents(const RingTerm& t, std::set<std::string>& out) {
  switch (t.kind()) {
    case RingTerm::Kind::Var: out.insert(t.name()); break;
    case RingTerm::Kind::Zero:
    case RingTerm::Kind::One: break;
    case RingTerm::Kind::Neg: collect_idents(t.sub(), out); break;
    case RingTerm::Kind::Add:
    case RingTerm::Kind::Mul:
      collect_idents(t.lhs(), out);
      collect_idents(t.rhs(), out);
      break;
  }
}

void collect_idents(const RingFormula& f, std::set<std::string>& out) {
  switch (f.kind()) {
    case RingFormula::Kind::Eq:
      collect_idents(f.term_lhs(), out);
      collect_idents(f.term_rhs(), out);
      break;
    case RingFormula::Kind::Not: collect_idents(f.sub(), out); break;
    case RingFormula::Kind::And:
    case RingFormula::Kind::Or:
    case RingFormula::Kind::Implies:
      collect_idents(f.lhs(), out);
      collect_idents(f.rhs(), out);
      break;
    case RingFormula::Kind::Exists:
    case RingFormula::Kind::Forall:
      out.insert(f.var());
      collect_idents(f.body(), out);
      break;
  }
}

void collect_idents(const BoolTerm& t, std::set<std::string>& out) {
  switch (t.kind()) {
    case BoolTerm::Kind::Var: out.insert(t.name()); break;
    case BoolTerm::Kind::Zero:
    case BoolTerm::Kind::One: break;
    case BoolTerm::Kind::Compl: collect_idents(t.sub(), out); break;
    case BoolTerm::Kind::Meet:
    case BoolTerm::Kind::Join:
    case BoolTerm::Kind::Diff:
      collect_idents(t.lhs(), out);
      collect_idents(t.rhs(), out);
      break;
  }
}

void collect_idents(const BoolFormula& f, std::set<std::string>& out) {
  switch (f.kind()) {
    case BoolFormula::Kind::Equal:
    case BoolFormula::Kind::Leq:
      collect_idents(f.term_lhs(), out);
      collect_idents(f.term_rhs(), out);
      break;
    case BoolFormula::Kind::Count:
    case BoolFormula::Kind::Fin:
      collect_idents(f.term(), out);
      break;
    case BoolFormula::Kind::Not: collect_idents(f.sub(), out); break;
    case BoolFormula::Kind::And:
    case BoolFormula::Kind::Or:
    case BoolFormula::Kind::Implies:
      collect_idents(f.lhs(), out);
      collect_idents(f.rhs(), out);
      break;
    case BoolFormula::Kind::Exists:
    case BoolFormula::Kind::Forall:
      out.insert(f.var());
      collect_idents(f.body(), out);
      break;
  }
}

RingTerm rename_term(const RingTerm& t, const std::map<std::string, std::string>& env) {
  switch (t.kind()) {
    case RingTerm::Kind::Var: {
      auto it = env.find(t.name());
      return it == env.end() ? t : RingTerm::var(it->second);
    }
    case RingTerm::Kind::Zero:
    case RingTerm::Kind::One: return t;
    case RingTerm::Kind::Neg: return RingTerm::neg(rename_term(t.sub(), env));
    case RingTerm::Kind::Add: return RingTerm::add(rename_term(t.lhs(), env), rename_term(t.rhs(), env));
    case RingTerm::Kind::Mul: return RingTerm::mul(rename_term(t.lhs(), env), rename_term(t.rhs(), env));
  }
  throw std::logic_error("unreachable");
}

RingFormula normalize_binders(const RingFormula& f, std::map<std::string, std::string> env,
                              std::set<std::string> bound, std::set<std::string>& used) {
  switch (f.kind()) {
    case RingFormula::Kind::Eq:
      return RingFormula::eq(rename_term(f.term_lhs(), env), rename_term(f.term_rhs(), env));
    case RingFormula::Kind::Not:
      return RingFormula::not_(normalize_binders(f.sub(), env, bound, used));
    case RingFormula::Kind::And:
      return RingFormula::and_(normalize_binders(f.lhs(), env, bound, used),
                               normalize_binders(f.rhs(), env, bound, used));
    case RingFormula::Kind::Or:
      return RingFormula::or_(normalize_binders(f.lhs(), env, bound, used),
                              normalize_binders(f.rhs(), env, bound, used));
    case RingFormula::Kind::Implies:
      return RingFormula::implies(normalize_binders(f.lhs(), env, bound, used),
                                  normalize_binders(f.rhs(), env, bound, used));
    case RingFormula::Kind::Exists:
    case RingFormula::Kind::Forall: {
      std::string v = f.var();
      if (bound.count(v)) {
        std::string nv = fresh_name(v, used);
        used.insert(nv);
        env[v] = nv;
        v = nv;
      } else {
        env.erase(f.var());
      }
      bound.insert(f.var());
      RingFormula body = normalize_binders(f.body(), env, bound, used);
      return f.kind() == RingFormula::Kind::Exists ? RingFormula::exists(v, body)
                                                   : RingFormula::forall(v, body);
    }
  }
  throw std::logic_error("unreachable");
}

BoolTerm rename_bterm(const BoolTerm& t, const std::map<std::string, std::string>& env) {
  switch (t.kind()) {
    case BoolTerm::Kind::Var: {
      auto it = env.find(t.name());
      return it == env.end() ? t : BoolTerm::var(it->second);
    }
    case BoolTerm::Kind::Zero:
    case BoolTerm::Kind::One: return t;
    case BoolTerm::Kind::Compl: return BoolTerm::complement(rename_bterm(t.sub(), env));
    case BoolTerm::Kind::Meet: return BoolTerm::meet(rename_bterm(t.lhs(), env), rename_bterm(t.rhs(), env));
    case BoolTerm::Kind::Join: return BoolTerm::join(rename_bterm(t.lhs(), env), rename_bterm(t.rhs(), env));
    case BoolTerm::Kind::Diff: return BoolTerm::diff(rename_bterm(t.lhs(), env), rename_bterm(t.rhs(), env));
  }
  throw std::logic_error("unreachable");
}

BoolFormula normalize_binders(const BoolFormula& f, std::map<std::string, std::string> env,
                              std::set<std::string> bound, std::set<std::string>& used) {
  switch (f.kind()) {
    case BoolFormula::Kind::Equal:
      return BoolFormula::equal(rename_bterm(f.term_lhs(), env), rename_bterm(f.term_rhs(), env));
    case BoolFormula::Kind::Leq:
      return BoolFormula::leq(rename_bterm(f.term_lhs(), env), rename_bterm(f.term_rhs(), env));
    case BoolFormula::Kind::Count:
      return BoolFormula::count_at_least(f.count(), rename_bterm(f.term(), env));
    case BoolFormula::Kind::Fin:
      return BoolFormula::fin(rename_bterm(f.term(), env));
    case BoolFormula::Kind::Not:
      return BoolFormula::not_(normalize_binders(f.sub(), env, bound, used));
    case BoolFormula::Kind::And:
      return BoolFormula::and_(normalize_binders(f.lhs(), env, bound, used),
                               normalize_binders(f.rhs(), env, bound, used));
    case BoolFormula::Kind::Or:
      return BoolFormula::or_(normalize_binders(f.lhs(), env, bound, used),
                              normalize_binders(f.rhs(), env, bound, used));
    case BoolFormula::Kind::Implies:
      return BoolFormula::implies(normalize_binders(f.lhs(), env, bound, used),
                                  normalize_binders(f.rhs(), env, bound, used));
    case BoolFormula::Kind::Exists:
    case BoolFormula::Kind::Forall: {
      std::string v = f.var();
      if (bound.count(v)) {
        std::string nv = fresh_name(v, used);
        used.insert(nv);
        env[v] = nv;
        v = nv;
      } else {
        env.erase(f.var());
      }
      bound.insert(f.var());
      BoolFormula body = normalize_binders(f.body(), env, bound, used);
      return f.kind() == BoolFormula::Kind::Exists ? BoolFormula::exists(v, body)
                                                   : BoolFormula::forall(v, body);
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace

RingFormula parse_ring_formula(const std::string& text) {
  try {
    RingParser p;
    p.ts = lex(text, /*bool_mode=*/false);
    RingFormula f = p.parse_formula();
    if (!p.at(Tok::End)) p.fail({Tok::End});
    std::set<std::string> used;
    collect_idents(f, used);
    return normalize_binders(f, {}, {}, used);
  } catch (PositionedError& e) {
    throw e.err;
  }
}

RingTerm parse_ring_term(const std::string& text) {
  try {
    RingParser p;
    p.ts = lex(text, false);
    RingTerm t = p.parse_term();
    if (!p.at(Tok::End)) p.fail({Tok::End});
    return t;
  } catch (PositionedError& e) {
    throw e.err;
  }
}

BoolFormula parse_bool_formula(const std::string& text) {
  try {
    BoolParser p;
    p.ts = lex(text, /*bool_mode=*/true);
    BoolFormula f = p.parse_formula();
    if (!p.at(Tok::End)) p.fail({Tok::End});
    std::set<std::string> used;
    collect_idents(f, used);
    return normalize_binders(f, {}, {}, used);
  } catch (PositionedError& e) {
    throw e.err;
  }
}

BoolTerm parse_bool_term(const std::string& text) {
  try {
    BoolParser p;
    p.ts = lex(text, true);
    BoolTerm t = p.parse_term();
    if (!p.at(Tok::End)) p.fail({Tok::End});
    return t;
  } catch (PositionedError& e) {
    throw e.err;
  }
}

// ---------------------------------------------------------------------------
// Rendering

std::string render(const RingTerm& t) {
  switch (t.kind()) {
    case RingTerm::Kind::Var: return t.name();
    case RingTerm::Kind::Zero: return "0";
    case RingTerm::Kind::One: return "1";
    case RingTerm::Kind::Neg: {
      RingTerm s = t.sub();
      bool paren = s.kind() == RingTerm::Kind::Add || s.kind() == RingTerm::Kind::Mul;
      return paren ? "-(" + render(s) + ")" : "-" + render(s);
    }
    case RingTerm::Kind::Add: return "(" + render(t.lhs()) + " + " + render(t.rhs()) + ")";
    case RingTerm::Kind::Mul: return "(" + render(t.lhs()) + " * " + render(t.rhs()) + ")";
  }
  throw std::logic_error("unreachable");
}

namespace {
// Quantified operands of a binary connective need parentheses, since a
// quantifier body otherwise extends maximally to the right.
template <typename F>
std::string operand(const F& f) {
  auto k = f.kind();
  bool paren = k == F::Kind::Exists || k == F::Kind::Forall;
  return paren ? "(" + render(f) + ")" : render(f);
}
}  // namespace

std::string render(const RingFormula& f) {
  switch (f.kind()) {
    case RingFormula::Kind::Eq: return render(f.term_lhs()) + " = " + render(f.term_rhs());
    case RingFormula::Kind::Not: return "~(" + render(f.sub()) + ")";
    case RingFormula::Kind::And: return "(" + operand(f.lhs()) + " & " + operand(f.rhs()) + ")";
    case RingFormula::Kind::Or: return "(" + operand(f.lhs()) + " | " + operand(f.rhs()) + ")";
    case RingFormula::Kind::Implies: return "(" + operand(f.lhs()) + " -> " + operand(f.rhs()) + ")";
    case RingFormula::Kind::Exists: return "E " + f.var() + ". " + render(f.body());
    case RingFormula::Kind::Forall: return "A " + f.var() + ". " + render(f.body());
  }
  throw std::logic_error("unreachable");
}

std::string render(const BoolTerm& t) {
  switch (t.kind()) {
    case BoolTerm::Kind::Var: return t.name();
    case BoolTerm::Kind::Zero: return "0";
    case BoolTerm::Kind::One: return "1";
    case BoolTerm::Kind::Compl: {
      BoolTerm s = t.sub();
      bool paren = s.kind() == BoolTerm::Kind::Meet || s.kind() == BoolTerm::Kind::Join ||
                   s.kind() == BoolTerm::Kind::Diff;
      return paren ? "!(" + render(s) + ")" : "!" + render(s);
    }
    case BoolTerm::Kind::Meet: return "(" + render(t.lhs()) + " ^ " + render(t.rhs()) + ")";
    case BoolTerm::Kind::Join: return "(" + render(t.lhs()) + " v " + render(t.rhs()) + ")";
    case BoolTerm::Kind::Diff: return "(" + render(t.lhs()) + " \\ " + render(t.rhs()) + ")";
  }
  throw std::logic_error("unreachable");
}

std::string render(const BoolFormula& f) {
  switch (f.kind()) {
    case BoolFormula::Kind::Equal: return render(f.term_lhs()) + " = " + render(f.term_rhs());
    case BoolFormula::Kind::Leq: return render(f.term_lhs()) + " <= " + render(f.term_rhs());
    case BoolFormula::Kind::Count:
      return "C" + std::to_string(f.count()) + "(" + render(f.term()) + ")";
    case BoolFormula::Kind::Fin: return "Fin(" + render(f.term()) + ")";
    case BoolFormula::Kind::Not: return "~(" + render(f.sub()) + ")";
    case BoolFormula::Kind::And: return "(" + operand(f.lhs()) + " & " + operand(f.rhs()) + ")";
    case BoolFormula::Kind::Or: return "(" + operand(f.lhs()) + " | " + operand(f.rhs()) + ")";
    case BoolFormula::Kind::Implies: return "(" + operand(f.lhs()) + " -> " + operand(f.rhs()) + ")";
    case BoolFormula::Kind::Exists: return "E " + f.var() + ". " + render(f.body());
    case BoolFormula::Kind::Forall: return "A " + f.var() + ". " + render(f.body());
  }
  throw std::logic_error("unreachable");
}

// ---------------------------------------------------------------------------
// Variables and substitution

std::set<std::string> term_vars(const RingTerm& t) {
  std::set<std::string> out;
  collect_idents(t, out);
  return out;
}
std::set<std::string> term_vars(const BoolTerm& t) {
  std::set<std::string> out;
  collect_idents(t, out);
  return out;
}

namespace {
void free_vars_rec(const RingFormula& f, std::set<std::string>& bound, std::set<std::string>& out) {
  switch (f.kind()) {
    case RingFormula::Kind::Eq: {
      for (const auto& v : term_vars(f.term_lhs()))
        if (!bound.count(v)) out.insert(v);
      for (const auto& v : term_vars(f.term_rhs()))
        if (!bound.count(v)) out.insert(v);
      break;
    }
    case RingFormula::Kind::Not: free_vars_rec(f.sub(), bound, out); break;
    case RingFormula::Kind::And:
    case RingFormula::Kind::Or:
    case RingFormula::Kind::Implies:
      free_vars_rec(f.lhs(), bound, out);
      free_vars_rec(f.rhs(), bound, out);
      break;
    case RingFormula::Kind::Exists:
    case RingFormula::Kind::Forall: {
      bool added = bound.insert(f.var()).second;
      free_vars_rec(f.body(), bound, out);
      if (added) bound.erase(f.var());
      break;
    }
  }
}
void free_vars_rec(const BoolFormula& f, std::set<std::string>& bound, std::set<std::string>& out) {
  switch (f.kind()) {
    case BoolFormula::Kind::Equal:
    case BoolFormula::Kind::Leq: {
      for (const auto& v : term_vars(f.term_lhs()))
        if (!bound.count(v)) out.insert(v);
      for (const auto& v : term_vars(f.term_rhs()))
        if (!bound.count(v)) out.insert(v);
      break;
    }
    case BoolFormula::Kind::Count:
    case BoolFormula::Kind::Fin: {
      for (const auto& v : term_vars(f.term()))
        if (!bound.count(v)) out.insert(v);
      break;
    }
    case BoolFormula::Kind::Not: free_vars_rec(f.sub(), bound, out); break;
    case BoolFormula::Kind::And:
    case BoolFormula::Kind::Or:
    case BoolFormula::Kind::Implies:
      free_vars_rec(f.lhs(), bound, out);
      free_vars_rec(f.rhs(), bound, out);
      break;
    case BoolFormula::Kind::Exists:
    case BoolFormula::Kind::Forall: {
      bool added = bound.insert(f.var()).second;
      free_vars_rec(f.body(), bound, out);
      if (added) bound.erase(f.var());
      break;
    }
  }
}
}  // namespace

std::set<std::string> free_vars(const RingFormula& f) {
  std::set<std::string> bound, out;
  free_vars_rec(f, bound, out);
  return out;
}
std::set<std::string> free_vars(const BoolFormula& f) {
  std::set<std::string> bound, out;
  free_vars_rec(f, bound, out);
  return out;
}

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  std::string name = base;
  while (avoid.count(name)) name += "'";
  return name;
}

namespace {
RingTerm subst_term(const RingTerm& t, const std::string& var, const RingTerm& repl) {
  switch (t.kind()) {
    case RingTerm::Kind::Var: return t.name() == var ? repl : t;
    case RingTerm::Kind::Zero:
    case RingTerm::Kind::One: return t;
    case RingTerm::Kind::Neg: return RingTerm::neg(subst_term(t.sub(), var, repl));
    case RingTerm::Kind::Add:
      return RingTerm::add(subst_term(t.lhs(), var, repl), subst_term(t.rhs(), var, repl));
    case RingTerm::Kind::Mul:
      return RingTerm::mul(subst_term(t.lhs(), var, repl), subst_term(t.rhs(), var, repl));
  }
  throw std::logic_error("unreachable");
}
}  // namespace

RingFormula substitute(const RingFormula& f, const std::string& var, const RingTerm& term) {
  switch (f.kind()) {
    case RingFormula::Kind::Eq:
      return RingFormula::eq(subst_term(f.term_lhs(), var, term),
                             subst_term(f.term_rhs(), var, term));
    case RingFormula::Kind::Not: return RingFormula::not_(substitute(f.sub(), var, term));
    case RingFormula::Kind::And:
      return RingFormula::and_(substitute(f.lhs(), var, term), substitute(f.rhs(), var, term));
    case RingFormula::Kind::Or:
      return RingFormula::or_(substitute(f.lhs(), var, term), substitute(f.rhs(), var, term));
    case RingFormula::Kind::Implies:
      return RingFormula::implies(substitute(f.lhs(), var, term), substitute(f.rhs(), var, term));
    case RingFormula::Kind::Exists:
    case RingFormula::Kind::Forall: {
      if (f.var() == var) return f;
      std::set<std::string> fv = free_vars(f.body());
      if (!fv.count(var)) return f;
      std::string binder = f.var();
      RingFormula body = f.body();
      std::set<std::string> tv = term_vars(term);
      if (tv.count(binder)) {
        std::set<std::string> avoid = tv;
        avoid.insert(fv.begin(), fv.end());
        avoid.insert(var);
        std::string nb = fresh_name(binder, avoid);
        body = substitute(body, binder, RingTerm::var(nb));
        binder = nb;
      }
      body = substitute(body, var, term);
      return f.kind() == RingFormula::Kind::Exists ? RingFormula::exists(binder, body)
                                                   : RingFormula::forall(binder, body);
    }
  }
  throw std::logic_error("unreachable");
}

namespace {
BoolTerm subst_bterm(const BoolTerm& t, const std::map<std::string, BoolTerm>& env) {
  switch (t.kind()) {
    case BoolTerm::Kind::Var: {
      auto it = env.find(t.name());
      return it == env.end() ? t : it->second;
    }
    case BoolTerm::Kind::Zero:
    case BoolTerm::Kind::One: return t;
    case BoolTerm::Kind::Compl: return BoolTerm::complement(subst_bterm(t.sub(), env));
    case BoolTerm::Kind::Meet:
      return BoolTerm::meet(subst_bterm(t.lhs(), env), subst_bterm(t.rhs(), env));
    case BoolTerm::Kind::Join:
      return BoolTerm::join(subst_bterm(t.lhs(), env), subst_bterm(t.rhs(), env));
    case BoolTerm::Kind::Diff:
      return BoolTerm::diff(subst_bterm(t.lhs(), env), subst_bterm(t.rhs(), env));
  }
  throw std::logic_error("unreachable");
}

BoolFormula subst_all_rec(const BoolFormula& f, std::map<std::string, BoolTerm> env) {
  switch (f.kind()) {
    case BoolFormula::Kind::Equal:
      return BoolFormula::equal(subst_bterm(f.term_lhs(), env), subst_bterm(f.term_rhs(), env));
    case BoolFormula::Kind::Leq:
      return BoolFormula::leq(subst_bterm(f.term_lhs(), env), subst_bterm(f.term_rhs(), env));
    case BoolFormula::Kind::Count:
      return BoolFormula::count_at_least(f.count(), subst_bterm(f.term(), env));
    case BoolFormula::Kind::Fin: return BoolFormula::fin(subst_bterm(f.term(), env));
    case BoolFormula::Kind::Not: return BoolFormula::not_(subst_all_rec(f.sub(), env));
    case BoolFormula::Kind::And:
      return BoolFormula::and_(subst_all_rec(f.lhs(), env), subst_all_rec(f.rhs(), env));
    case BoolFormula::Kind::Or:
      return BoolFormula::or_(subst_all_rec(f.lhs(), env), subst_all_rec(f.rhs(), env));
    case BoolFormula::Kind::Implies:
      return BoolFormula::implies(subst_all_rec(f.lhs(), env), subst_all_rec(f.rhs(), env));
    case BoolFormula::Kind::Exists:
    case BoolFormula::Kind::Forall: {
      env.erase(f.var());
      std::set<std::string> fv = free_vars(f.body());
      bool relevant = false;
      std::set<std::string> termVars;
      for (const auto& [k, t] : env) {
        if (fv.count(k)) {
          relevant = true;
          auto tv = term_vars(t);
          termVars.insert(tv.begin(), tv.end());
        }
      }
      if (!relevant) return f;
      std::string binder = f.var();
      BoolFormula body = f.body();
      if (termVars.count(binder)) {
        std::set<std::string> avoid = termVars;
        avoid.insert(fv.begin(), fv.end());
        for (const auto& [k, t] : env) avoid.insert(k);
        std::string nb = fresh_name(binder, avoid);
        std::map<std::string, BoolTerm> ren;
        ren.emplace(binder, BoolTerm::var(nb));
        body = subst_all_rec(body, ren);
        binder = nb;
      }
      body = subst_all_rec(body, env);
      return f.kind() == BoolFormula::Kind::Exists ? BoolFormula::exists(binder, body)
                                                   : BoolFormula::forall(binder, body);
    }
  }
  throw std::logic_error("unreachable");
}
}  // namespace

BoolFormula substitute(const BoolFormula& f, const std::string& var, const BoolTerm& term) {
  std::map<std::string, BoolTerm> env;
  env.emplace(var, term);
  return subst_all_rec(f, std::move(env));
}

BoolFormula substitute_all(const BoolFormula& f, const std::map<std::string, BoolTerm>& map) {
  return subst_all_rec(f, map);
}

// ---------------------------------------------------------------------------
// Sign partitions

Partition sign_partition(std::span<const RingFormula> formulas) {
  const size_t l = formulas.size();
  if (l == 0) {
    return Partition{{RingFormula::eq(RingTerm::zero(), RingTerm::zero())}};
  }
  if (l > 20) throw ResourceLimitError("sign_partition over " + std::to_string(l) + " formulas");
  Partition out;
  out.cells.reserve(size_t{1} << l);
  for (size_t i = 0; i < (size_t{1} << l); ++i) {
    // Bit j of i (counting from the most significant of l bits) is the sign of
    // formulas[j]; 0 means positive, so all-positive comes first.
    auto lit = [&](size_t j) {
      bool positive = ((i >> (l - 1 - j)) & 1) == 0;
      return positive ? formulas[j] : RingFormula::not_(formulas[j]);
    };
    RingFormula cell = lit(0);
    for (size_t j = 1; j < l; ++j) cell = RingFormula::and_(cell, lit(j));
    out.cells.push_back(cell);
  }
  return out;
}

RingFormula to_nae_normal_form(const RingFormula& f) {
  switch (f.kind()) {
    case RingFormula::Kind::Eq: return f;
    case RingFormula::Kind::Not: return RingFormula::not_(to_nae_normal_form(f.sub()));
    case RingFormula::Kind::And:
      return RingFormula::and_(to_nae_normal_form(f.lhs()), to_nae_normal_form(f.rhs()));
    case RingFormula::Kind::Or:
      // l | r  ==  ~(~l & ~r)
      return RingFormula::not_(RingFormula::and_(
          RingFormula::not_(to_nae_normal_form(f.lhs())),
          RingFormula::not_(to_nae_normal_form(f.rhs()))));
    case RingFormula::Kind::Implies:
      // l -> r  ==  ~(l & ~r)
      return RingFormula::not_(RingFormula::and_(
          to_nae_normal_form(f.lhs()), RingFormula::not_(to_nae_normal_form(f.rhs()))));
    case RingFormula::Kind::Exists:
      return RingFormula::exists(f.var(), to_nae_normal_form(f.body()));
    case RingFormula::Kind::Forall:
      // A x. b  ==  ~ E x. ~b
      return RingFormula::not_(
          RingFormula::exists(f.var(), RingFormula::not_(to_nae_normal_form(f.body()))));
  }
  throw std::logic_error("unreachable");
}

std::uint32_t max_count_index(const BoolFormula& f) {
  switch (f.kind()) {
    case BoolFormula::Kind::Equal:
    case BoolFormula::Kind::Leq:
    case BoolFormula::Kind::Fin: return 0;
    case BoolFormula::Kind::Count: return f.count();
    case BoolFormula::Kind::Not: return max_count_index(f.sub());
    case BoolFormula::Kind::And:
    case BoolFormula::Kind::Or:
    case BoolFormula::Kind::Implies:
      return std::max(max_count_index(f.lhs()), max_count_index(f.rhs()));
    case BoolFormula::Kind::Exists:
    case BoolFormula::Kind::Forall: return max_count_index(f.body());
  }
  throw std::logic_error("unreachable");
}

std::uint32_t quantifier_depth(const BoolFormula& f) {
  switch (f.kind()) {
    case BoolFormula::Kind::Equal:
    case BoolFormula::Kind::Leq:
    case BoolFormula::Kind::Count:
    case BoolFormula::Kind::Fin: return 0;
    case BoolFormula::Kind::Not: return quantifier_depth(f.sub());
    case BoolFormula::Kind::And:
    case BoolFormula::Kind::Or:
    case BoolFormula::Kind::Implies:
      return std::max(quantifier_depth(f.lhs()), quantifier_depth(f.rhs()));
    case BoolFormula::Kind::Exists:
    case BoolFormula::Kind::Forall: return 1 + quantifier_depth(f.body());
  }
  throw std::logic_error("unreachable");
}

std::uint32_t quantifier_depth(const RingFormula& f) {
  switch (f.kind()) {
    case RingFormula::Kind::Eq: return 0;
    case RingFormula::Kind::Not: return quantifier_depth(f.sub());
    case RingFormula::Kind::And:
    case RingFormula::Kind::Or:
    case RingFormula::Kind::Implies:
      return std::max(quantifier_depth(f.lhs()), quantifier_depth(f.rhs()));
    case RingFormula::Kind::Exists:
    case RingFormula::Kind::Forall: return 1 + quantifier_depth(f.body());
  }
  throw std::logic_error("unreachable");
}

}  // namespace resprod
