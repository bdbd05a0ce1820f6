#pragma once

#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

namespace zasyn {

enum class CmpOp { Le, Lt, Ge, Gt };

std::string cmp_to_string(CmpOp op);
bool cmp_holds(CmpOp op, double value, double bound);

struct PathFormula;

/// Immutable state-formula tree: true | atom | !f | f & f | P cmp p [ psi ].
struct StateFormula {
  enum class Kind { True, Atom, Not, And, Prob };

  Kind kind = Kind::True;
  std::string atom;                              // Kind::Atom
  std::shared_ptr<const StateFormula> lhs, rhs;  // Not uses lhs only
  CmpOp cmp = CmpOp::Le;                         // Kind::Prob
  double bound = 0.0;                            // Kind::Prob
  std::shared_ptr<const PathFormula> path;       // Kind::Prob
};

using FormulaPtr = std::shared_ptr<const StateFormula>;

struct PathFormula {
  enum class Kind { Next, Until, BoundedUntil };

  Kind kind = Kind::Until;
  FormulaPtr left, right;  // Next uses right only
  long horizon = 0;        // BoundedUntil
};

FormulaPtr f_true();
FormulaPtr f_atom(std::string name);
FormulaPtr f_not(FormulaPtr f);
FormulaPtr f_and(FormulaPtr a, FormulaPtr b);
FormulaPtr f_prob(CmpOp cmp, double bound, std::shared_ptr<const PathFormula> path);
std::shared_ptr<const PathFormula> pf_bounded_until(FormulaPtr a, FormulaPtr b, long k);

/// The synthesizable fragment: P cmp p [ phi1 U<=k phi2 ] with cmp an upper
/// bound and propositional operands.
struct BoundedUntilSpec {
  FormulaPtr phi1;
  FormulaPtr phi2;
  int horizon = 0;
  CmpOp cmp = CmpOp::Le;
  double p = 0.0;

  /// Threshold comparison, exact as written (no tolerance on the bound).
  bool accepts(double value) const { return cmp_holds(cmp, value, p); }
};

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, int line, int col);
  int line;
  int col;
};

struct UnsupportedFragment : std::runtime_error {
  using std::runtime_error::runtime_error;
};

FormulaPtr parse_formula(std::string_view text);
std::string print_formula(const StateFormula& f);
std::string print_path_formula(const PathFormula& f);

/// Extracts the synthesizable spec or throws UnsupportedFragment naming the
/// offending construct (nesting, X, unbounded until, lower bounds).
BoundedUntilSpec check_synthesizable(const StateFormula& f);

/// Propositional truth evaluation against a label set. Probabilistic
/// operators are rejected with UnsupportedFragment.
bool eval_state_formula(const StateFormula& f, const std::set<std::string>& labels);

}  // namespace zasyn
