#include "ztl/logic.hpp"

#include <cctype>
#include <charconv>

namespace ztl {

namespace {

struct Token {
  enum Kind { Ident, Number, Sym, End } kind = End;
  std::string text;
  std::size_t pos = 0;
};

struct Lexer {
  const std::string& src;
  std::size_t i = 0;

  explicit Lexer(const std::string& s) : src(s) {}

  Token next() {
    while (i < src.size() && std::isspace(static_cast<unsigned char>(src[i]))) ++i;
    if (i >= src.size()) return {Token::End, "", i};
    std::size_t start = i;
    char c = src[i];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
        ++j;
      Token t{Token::Ident, src.substr(i, j - i), start};
      i = j;
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t j = i + 1;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      Token t{Token::Number, src.substr(i, j - i), start};
      i = j;
      return t;
    }
    static const std::string syms = "!&|()<=>";
    if (syms.find(c) != std::string::npos) {
      Token t{Token::Sym, std::string(1, c), start};
      ++i;
      return t;
    }
    throw ParseError("unexpected character '" + std::string(1, c) + "'", start);
  }
};

bool is_keyword(const Token& t, char k) {
  return t.kind == Token::Ident && t.text.size() == 1 && t.text[0] == k;
}

struct Parser {
  std::vector<Token> toks;
  std::size_t p = 0;
  int max_var_seen = 0;

  const Token& peek(std::size_t k = 0) const {
    static Token end{Token::End, "", 0};
    return p + k < toks.size() ? toks[p + k] : end;
  }
  Token take() { return toks[p++]; }
  bool at_end() const { return peek().kind == Token::End; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, peek().pos);
  }

  int parse_var(const Token& t) {
    if (t.kind != Token::Ident || t.text.size() < 2 || t.text[0] != 'x')
      throw ParseError("expected variable x1..xN, got '" + t.text + "'", t.pos);
    int v = 0;
    auto [ptr, ec] = std::from_chars(t.text.data() + 1, t.text.data() + t.text.size(), v);
    if (ec != std::errc() || ptr != t.text.data() + t.text.size() || v < 1)
      throw ParseError("expected variable x1..xN, got '" + t.text + "'", t.pos);
    max_var_seen = std::max(max_var_seen, v);
    return v;
  }

  Int parse_int(const Token& t) {
    Int v = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec == std::errc::result_out_of_range)
      throw ParseError("integer constant out of 64-bit range", t.pos);
    if (ec != std::errc() || ptr != t.text.data() + t.text.size())
      throw ParseError("bad integer '" + t.text + "'", t.pos);
    return v;
  }

  // True when the tokens from `p` start a term of an atom: X* x<i> (< | = | >).
  bool at_atom() const {
    std::size_t k = 0;
    while (is_keyword(peek(k), 'X')) ++k;
    const Token& id = peek(k);
    if (id.kind != Token::Ident || id.text.size() < 2 || id.text[0] != 'x') return false;
    for (std::size_t c = 1; c < id.text.size(); ++c)
      if (!std::isdigit(static_cast<unsigned char>(id.text[c]))) return false;
    const Token& op = peek(k + 1);
    return op.kind == Token::Sym &&
           (op.text == "<" || op.text == "=" || op.text == ">");
  }

  GTerm parse_term() {
    GTerm t;
    while (is_keyword(peek(), 'X')) {
      take();
      ++t.prefixes;
    }
    t.var = parse_var(take());
    return t;
  }

  FormulaPtr parse_atom() {
    GTerm t1 = parse_term();
    Token op = take();
    if (op.kind != Token::Sym || (op.text != "<" && op.text != "=" && op.text != ">"))
      throw ParseError("expected comparison operator", op.pos);
    GAtom a;
    a.t1 = t1;
    a.cmp = op.text == "<" ? Cmp::Lt : (op.text == "=" ? Cmp::Eq : Cmp::Gt);
    if (peek().kind == Token::Number) {
      if (a.cmp != Cmp::Eq)
        throw ParseError("only '=' is allowed between a term and an integer", op.pos);
      a.kind = GAtom::TermConst;
      a.d = parse_int(take());
    } else {
      a.kind = GAtom::TermTerm;
      a.t2 = parse_term();
      if (a.cmp == Cmp::Gt) {  // rewrite t1 > t2 as t2 < t1
        std::swap(a.t1, a.t2);
        a.cmp = Cmp::Lt;
      }
    }
    return make_leaf(GConstraint::make_atom(a));
  }

  FormulaPtr parse_unary() {
    const Token& t = peek();
    if (t.kind == Token::Sym && t.text == "(") {
      take();
      FormulaPtr f = parse_or();
      if (!(peek().kind == Token::Sym && peek().text == ")")) fail("expected ')'");
      take();
      return f;
    }
    if (t.kind == Token::Sym && t.text == "!") {
      take();
      return make_unary(Formula::Not, parse_unary());
    }
    if (at_atom()) return parse_atom();
    if (t.kind == Token::Ident && t.text.size() == 1) {
      switch (t.text[0]) {
        case 'E': take(); return make_unary(Formula::Exists, parse_unary());
        case 'A': take(); return make_unary(Formula::Forall, parse_unary());
        case 'X': take(); return make_unary(Formula::Next, parse_unary());
        case 'F': take(); return make_unary(Formula::Finally, parse_unary());
        case 'G': take(); return make_unary(Formula::Globally, parse_unary());
        default: break;
      }
    }
    fail("expected formula");
  }

  FormulaPtr parse_ur() {
    FormulaPtr lhs = parse_unary();
    if (is_keyword(peek(), 'U')) {
      take();
      return make_binary(Formula::Until, lhs, parse_ur());
    }
    if (is_keyword(peek(), 'R')) {
      take();
      return make_binary(Formula::Release, lhs, parse_ur());
    }
    return lhs;
  }

  FormulaPtr parse_and() {
    FormulaPtr lhs = parse_ur();
    while (peek().kind == Token::Sym && peek().text == "&") {
      take();
      lhs = make_binary(Formula::And, lhs, parse_ur());
    }
    return lhs;
  }

  FormulaPtr parse_or() {
    FormulaPtr lhs = parse_and();
    while (peek().kind == Token::Sym && peek().text == "|") {
      take();
      lhs = make_binary(Formula::Or, lhs, parse_and());
    }
    return lhs;
  }
};

bool pure_constraint(const FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Leaf: return true;
    case Formula::Not: return pure_constraint(f->a);
    case Formula::And:
    case Formula::Or: return pure_constraint(f->a) && pure_constraint(f->b);
    default: return false;
  }
}

GConstraint as_gconstraint(const FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Leaf: return f->cons;
    case Formula::Not: return GConstraint::negate(as_gconstraint(f->a));
    case Formula::And:
    case Formula::Or: {
      GConstraint c;
      c.kind = f->kind == Formula::And ? GConstraint::And : GConstraint::Or;
      c.kids.push_back(as_gconstraint(f->a));
      c.kids.push_back(as_gconstraint(f->b));
      return c;
    }
    default:
      throw std::logic_error("as_gconstraint: not a pure constraint");
  }
}

// Merge Boolean combinations of pure constraints into maximal leaves.
FormulaPtr merge_constraints(const FormulaPtr& f) {
  if (pure_constraint(f)) {
    if (f->kind == Formula::Leaf) return f;
    return make_leaf(as_gconstraint(f));
  }
  switch (f->kind) {
    case Formula::Not:
    case Formula::Exists:
    case Formula::Forall:
    case Formula::Next:
    case Formula::Finally:
    case Formula::Globally:
      return make_unary(f->kind, merge_constraints(f->a));
    default:
      return make_binary(f->kind, merge_constraints(f->a), merge_constraints(f->b));
  }
}

void validate_ltl(const FormulaPtr& f) {
  if (f->kind == Formula::Exists || f->kind == Formula::Forall)
    throw ParseError("path quantifier not allowed in LTL formulas", 0);
  if (f->a) validate_ltl(f->a);
  if (f->b) validate_ltl(f->b);
}

bool is_state_shape(const FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Exists:
    case Formula::Forall: return true;
    case Formula::Not: return is_state_shape(f->a);
    case Formula::And:
    case Formula::Or: return is_state_shape(f->a) && is_state_shape(f->b);
    default: return false;
  }
}

void validate_ctl(const FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Not: validate_ctl(f->a); return;
    case Formula::And:
    case Formula::Or: validate_ctl(f->a); validate_ctl(f->b); return;
    case Formula::Exists:
    case Formula::Forall: {
      const FormulaPtr& body = f->a;
      switch (body->kind) {
        case Formula::Leaf: return;  // Q Theta
        case Formula::Next: validate_ctl(body->a); return;
        case Formula::Until:
        case Formula::Release: validate_ctl(body->a); validate_ctl(body->b); return;
        default:
          throw ParseError("CTL allows only Q Theta, QX, Q U, Q R shapes", 0);
      }
    }
    default:
      throw ParseError("bare path formula is not a CTL state formula", 0);
  }
}

}  // namespace

FormulaPtr desugar(const FormulaPtr& f, LogicTag tag) {
  auto bot_path = [] {
    GAtom a;
    a.kind = GAtom::TermTerm;
    a.t1 = GTerm{1, 0};
    a.t2 = GTerm{1, 0};
    a.cmp = Cmp::Lt;
    return make_leaf(GConstraint::make_atom(a));
  };
  auto top_path = [&] { return make_leaf(GConstraint::negate(bot_path()->cons)); };
  auto bot_state = [&] { return make_unary(Formula::Exists, bot_path()); };
  auto top_state = [&] { return make_unary(Formula::Forall, top_path()); };

  auto rec = [&](auto&& self, const FormulaPtr& g) -> FormulaPtr {
    switch (g->kind) {
      case Formula::Leaf: return g;
      case Formula::Finally: {
        FormulaPtr body = self(self, g->a);
        bool state_operand = tag == LogicTag::Ctl;
        return make_binary(Formula::Until, state_operand ? top_state() : top_path(), body);
      }
      case Formula::Globally: {
        FormulaPtr body = self(self, g->a);
        bool state_operand = tag == LogicTag::Ctl;
        return make_binary(Formula::Release, state_operand ? bot_state() : bot_path(), body);
      }
      default: {
        if (g->b) return make_binary(g->kind, self(self, g->a), self(self, g->b));
        if (g->a) return make_unary(g->kind, self(self, g->a));
        return g;
      }
    }
  };
  return merge_constraints(rec(rec, f));
}

FormulaPtr to_nnf(const FormulaPtr& f) {
  auto pos = [](auto&& self, const FormulaPtr& g) -> FormulaPtr {
    auto neg = [&self](const FormulaPtr& h) -> FormulaPtr {
      switch (h->kind) {
        case Formula::Leaf: return make_leaf(GConstraint::negate(h->cons));
        case Formula::Not: return self(self, h->a);
        case Formula::And:
          return make_binary(Formula::Or,
                             self(self, make_unary(Formula::Not, h->a)),
                             self(self, make_unary(Formula::Not, h->b)));
        case Formula::Or:
          return make_binary(Formula::And,
                             self(self, make_unary(Formula::Not, h->a)),
                             self(self, make_unary(Formula::Not, h->b)));
        case Formula::Exists:
          return make_unary(Formula::Forall, self(self, make_unary(Formula::Not, h->a)));
        case Formula::Forall:
          return make_unary(Formula::Exists, self(self, make_unary(Formula::Not, h->a)));
        case Formula::Next:
          return make_unary(Formula::Next, self(self, make_unary(Formula::Not, h->a)));
        case Formula::Until:
          return make_binary(Formula::Release,
                             self(self, make_unary(Formula::Not, h->a)),
                             self(self, make_unary(Formula::Not, h->b)));
        case Formula::Release:
          return make_binary(Formula::Until,
                             self(self, make_unary(Formula::Not, h->a)),
                             self(self, make_unary(Formula::Not, h->b)));
        case Formula::Finally:
        case Formula::Globally:
          throw std::logic_error("to_nnf: desugar F/G first");
      }
      return h;
    };
    switch (g->kind) {
      case Formula::Leaf: return g;
      case Formula::Not: return neg(g->a);
      default:
        if (g->b) return make_binary(g->kind, self(self, g->a), self(self, g->b));
        if (g->a) return make_unary(g->kind, self(self, g->a));
        return g;
    }
  };
  return pos(pos, f);
}

bool is_simple_form(const FormulaPtr& f) {
  if (f->kind == Formula::Not) return false;
  if (f->kind == Formula::Finally || f->kind == Formula::Globally) return false;
  if (f->kind == Formula::Leaf) return forward_degree(f->cons) <= 1;
  bool ok = true;
  if (f->a) ok = ok && is_simple_form(f->a);
  if (f->b) ok = ok && is_simple_form(f->b);
  return ok;
}

NamedFormula parse_formula(const std::string& text, LogicTag tag) {
  Lexer lex(text);
  Parser ps;
  for (Token t = lex.next();; t = lex.next()) {
    ps.toks.push_back(t);
    if (t.kind == Token::End) break;
  }
  FormulaPtr raw = ps.parse_or();
  if (!ps.at_end()) ps.fail("trailing input");
  FormulaPtr f = desugar(raw, tag);
  switch (tag) {
    case LogicTag::Ltl: validate_ltl(f); break;
    case LogicTag::Ctl: validate_ctl(f); break;
    case LogicTag::CtlStar:
      if (!is_state_shape(f))
        throw ParseError("CTL* input must be a state formula", 0);
      break;
  }
  NamedFormula out;
  out.f = f;
  out.tag = tag;
  out.beta = std::max(1, ps.max_var_seen);
  out.var_names.resize(static_cast<std::size_t>(out.beta) + 1);
  for (int i = 1; i <= out.beta; ++i)
    out.var_names[static_cast<std::size_t>(i)] = "x" + std::to_string(i);
  return out;
}

}  // namespace ztl
