#include "zasyn/pctl.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace zasyn {

std::string cmp_to_string(CmpOp op) {
  switch (op) {
    case CmpOp::Le: return "<=";
    case CmpOp::Lt: return "<";
    case CmpOp::Ge: return ">=";
    case CmpOp::Gt: return ">";
  }
  return "?";
}

bool cmp_holds(CmpOp op, double value, double bound) {
  switch (op) {
    case CmpOp::Le: return value <= bound;
    case CmpOp::Lt: return value < bound;
    case CmpOp::Ge: return value >= bound;
    case CmpOp::Gt: return value > bound;
  }
  return false;
}

FormulaPtr f_true() {
  auto f = std::make_shared<StateFormula>();
  f->kind = StateFormula::Kind::True;
  return f;
}

FormulaPtr f_atom(std::string name) {
  auto f = std::make_shared<StateFormula>();
  f->kind = StateFormula::Kind::Atom;
  f->atom = std::move(name);
  return f;
}

FormulaPtr f_not(FormulaPtr inner) {
  auto f = std::make_shared<StateFormula>();
  f->kind = StateFormula::Kind::Not;
  f->lhs = std::move(inner);
  return f;
}

FormulaPtr f_and(FormulaPtr a, FormulaPtr b) {
  auto f = std::make_shared<StateFormula>();
  f->kind = StateFormula::Kind::And;
  f->lhs = std::move(a);
  f->rhs = std::move(b);
  return f;
}

FormulaPtr f_prob(CmpOp cmp, double bound, std::shared_ptr<const PathFormula> path) {
  auto f = std::make_shared<StateFormula>();
  f->kind = StateFormula::Kind::Prob;
  f->cmp = cmp;
  f->bound = bound;
  f->path = std::move(path);
  return f;
}

std::shared_ptr<const PathFormula> pf_bounded_until(FormulaPtr a, FormulaPtr b, long k) {
  auto p = std::make_shared<PathFormula>();
  p->kind = PathFormula::Kind::BoundedUntil;
  p->left = std::move(a);
  p->right = std::move(b);
  p->horizon = k;
  return p;
}

ParseError::ParseError(const std::string& msg, int l, int c)
    : std::runtime_error(msg + " (line " + std::to_string(l) + ", column " + std::to_string(c) +
                         ")"),
      line(l),
      col(c) {}

namespace {

struct Lexer {
  std::string_view text;
  std::size_t pos = 0;
  int line = 1;
  int col = 1;

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line, col); }

  void advance(std::size_t n) {
    for (std::size_t i = 0; i < n && pos < text.size(); ++i, ++pos) {
      if (text[pos] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  }

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) advance(1);
  }

  bool eat(std::string_view tok) {
    skip_ws();
    if (text.substr(pos, tok.size()) == tok) {
      advance(tok.size());
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  double number() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.' ||
            text[pos] == 'e' || text[pos] == 'E' || text[pos] == '+' || text[pos] == '-')) {
      advance(1);
    }
    if (start == pos) fail("expected a number");
    try {
      return std::stod(std::string(text.substr(start, pos - start)));
    } catch (const std::exception&) {
      fail("malformed number");
    }
  }

  long integer() {
    double v = number();
    long k = static_cast<long>(v);
    if (static_cast<double>(k) != v) fail("expected an integer");
    return k;
  }

  std::string quoted_atom() {
    skip_ws();
    if (peek() != '"') fail("expected a quoted atomic proposition");
    advance(1);
    std::string name;
    while (pos < text.size() && text[pos] != '"') {
      name.push_back(text[pos]);
      advance(1);
    }
    if (pos == text.size()) fail("unterminated atomic proposition");
    advance(1);
    if (name.empty()) fail("empty atomic proposition");
    return name;
  }
};

struct Parser {
  Lexer lex;

  FormulaPtr state_formula() {
    FormulaPtr left = unary();
    while (lex.eat("&")) {
      left = f_and(left, unary());
    }
    return left;
  }

  FormulaPtr unary() {
    if (lex.eat("!")) return f_not(unary());
    if (lex.eat("(")) {
      FormulaPtr inner = state_formula();
      if (!lex.eat(")")) lex.fail("expected ')'");
      return inner;
    }
    if (lex.peek() == 'P') return prob();
    if (lex.eat("true")) return f_true();
    if (lex.peek() == '"') return f_atom(lex.quoted_atom());
    lex.fail("expected a state formula");
  }

  FormulaPtr prob() {
    lex.eat("P");
    CmpOp cmp;
    if (lex.eat("<=")) cmp = CmpOp::Le;
    else if (lex.eat(">=")) cmp = CmpOp::Ge;
    else if (lex.eat("<")) cmp = CmpOp::Lt;
    else if (lex.eat(">")) cmp = CmpOp::Gt;
    else lex.fail("expected a probability comparison after P");
    double bound = lex.number();
    if (bound < 0.0 || bound > 1.0) lex.fail("probability bound outside [0, 1]");
    if (!lex.eat("[")) lex.fail("expected '[' after the probability bound");
    auto path = path_formula();
    if (!lex.eat("]")) lex.fail("expected ']' closing the path formula");
    return f_prob(cmp, bound, path);
  }

  std::shared_ptr<const PathFormula> path_formula() {
    auto p = std::make_shared<PathFormula>();
    if (lex.eat("X")) {
      p->kind = PathFormula::Kind::Next;
      p->right = state_formula();
      return p;
    }
    p->left = state_formula();
    if (!lex.eat("U")) lex.fail("expected 'U' in the path formula");
    if (lex.eat("<=")) {
      p->kind = PathFormula::Kind::BoundedUntil;
      p->horizon = lex.integer();
      if (p->horizon < 0) lex.fail("negative horizon");
    } else {
      p->kind = PathFormula::Kind::Until;
    }
    p->right = state_formula();
    return p;
  }
};

// Parenthesize conjunction operands that bind looser than the context.
std::string print_operand(const StateFormula& f) {
  if (f.kind == StateFormula::Kind::And) return "(" + print_formula(f) + ")";
  return print_formula(f);
}

}  // namespace

FormulaPtr parse_formula(std::string_view text) {
  Parser parser{Lexer{text}};
  FormulaPtr f = parser.state_formula();
  parser.lex.skip_ws();
  if (parser.lex.pos != text.size()) parser.lex.fail("trailing input after the formula");
  return f;
}

std::string print_formula(const StateFormula& f) {
  switch (f.kind) {
    case StateFormula::Kind::True:
      return "true";
    case StateFormula::Kind::Atom:
      return "\"" + f.atom + "\"";
    case StateFormula::Kind::Not:
      return "!" + print_operand(*f.lhs);
    case StateFormula::Kind::And:
      return print_operand(*f.lhs) + " & " + print_operand(*f.rhs);
    case StateFormula::Kind::Prob: {
      std::ostringstream out;
      out << "P" << cmp_to_string(f.cmp) << f.bound << " [ " << print_path_formula(*f.path)
          << " ]";
      return out.str();
    }
  }
  return "?";
}

std::string print_path_formula(const PathFormula& f) {
  switch (f.kind) {
    case PathFormula::Kind::Next:
      return "X " + print_operand(*f.right);
    case PathFormula::Kind::Until:
      return print_operand(*f.left) + " U " + print_operand(*f.right);
    case PathFormula::Kind::BoundedUntil:
      return print_operand(*f.left) + " U<=" + std::to_string(f.horizon) + " " +
             print_operand(*f.right);
  }
  return "?";
}

namespace {

bool purely_propositional(const StateFormula& f) {
  switch (f.kind) {
    case StateFormula::Kind::True:
    case StateFormula::Kind::Atom:
      return true;
    case StateFormula::Kind::Not:
      return purely_propositional(*f.lhs);
    case StateFormula::Kind::And:
      return purely_propositional(*f.lhs) && purely_propositional(*f.rhs);
    case StateFormula::Kind::Prob:
      return false;
  }
  return false;
}

}  // namespace

BoundedUntilSpec check_synthesizable(const StateFormula& f) {
  if (f.kind != StateFormula::Kind::Prob) {
    throw UnsupportedFragment("synthesis needs a top-level probability bound, got: " +
                              print_formula(f));
  }
  if (f.cmp != CmpOp::Le && f.cmp != CmpOp::Lt) {
    throw UnsupportedFragment("lower probability bounds are outside the synthesizable fragment: P" +
                              cmp_to_string(f.cmp));
  }
  const PathFormula& path = *f.path;
  if (path.kind == PathFormula::Kind::Next) {
    throw UnsupportedFragment("the next operator is outside the synthesizable fragment");
  }
  if (path.kind == PathFormula::Kind::Until) {
    throw UnsupportedFragment("unbounded until is outside the synthesizable fragment");
  }
  if (!purely_propositional(*path.left) || !purely_propositional(*path.right)) {
    throw UnsupportedFragment("nested probability operators are outside the synthesizable fragment");
  }
  BoundedUntilSpec spec;
  spec.phi1 = path.left;
  spec.phi2 = path.right;
  spec.horizon = static_cast<int>(path.horizon);
  spec.cmp = f.cmp;
  spec.p = f.bound;
  return spec;
}

bool eval_state_formula(const StateFormula& f, const std::set<std::string>& labels) {
  switch (f.kind) {
    case StateFormula::Kind::True:
      return true;
    case StateFormula::Kind::Atom:
      return labels.count(f.atom) > 0;
    case StateFormula::Kind::Not:
      return !eval_state_formula(*f.lhs, labels);
    case StateFormula::Kind::And:
      return eval_state_formula(*f.lhs, labels) && eval_state_formula(*f.rhs, labels);
    case StateFormula::Kind::Prob:
      throw UnsupportedFragment("probability operator in a propositional context: " +
                                print_formula(f));
  }
  return false;
}

}  // namespace zasyn
