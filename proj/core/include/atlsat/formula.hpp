#ifndef ATLSAT_FORMULA_HPP_
#define ATLSAT_FORMULA_HPP_

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace atl {

/// A coalition of agents. Agents are named by positive integers; the set is
/// kept canonical (it is a bitmask), so equality is structural.
class AgentSet {
public:
  AgentSet() = default;

  /// The full coalition {1, ..., k}.
  static AgentSet range(int k);
  static AgentSet of(std::initializer_list<int> agents);

  void add(int agent);
  bool contains(int agent) const { return agent >= 1 && agent < 64 && (bits_ >> agent & 1u); }
  bool subset_of(AgentSet other) const { return (bits_ & ~other.bits_) == 0; }
  bool empty() const { return bits_ == 0; }
  int count() const;
  int max_agent() const;
  std::vector<int> members() const;

  AgentSet united(AgentSet other) const { AgentSet r; r.bits_ = bits_ | other.bits_; return r; }
  AgentSet minus(AgentSet other) const { AgentSet r; r.bits_ = bits_ & ~other.bits_; return r; }
  AgentSet intersect(AgentSet other) const { AgentSet r; r.bits_ = bits_ & other.bits_; return r; }

  /// Comma-separated member list, e.g. "1,2"; empty string for the empty set.
  std::string to_string() const;

  friend bool operator==(AgentSet a, AgentSet b) { return a.bits_ == b.bits_; }
  friend bool operator!=(AgentSet a, AgentSet b) { return a.bits_ != b.bits_; }
  friend bool operator<(AgentSet a, AgentSet b) { return a.bits_ < b.bits_; }

private:
  std::uint64_t bits_ = 0;
};

enum class Kind : std::uint8_t {
  Top,      // true
  Atom,     // named proposition
  Not,      // ~f
  And,      // f1 & ... & fn, n >= 2, flattened
  Or,       // f1 | ... | fn, n >= 2, flattened
  Implies,  // f -> g
  Next,     // <<A>>X f
  Box,      // <<A>>G f
  Until,    // <<A>>(f U g)
};

struct FormulaNode;

/// Formulas are interned: within one FormulaArena, structural equality is
/// pointer equality. Immutable and freely shareable.
using Formula = const FormulaNode*;

struct FormulaNode {
  Kind kind;
  AgentSet agents;                // Next/Box/Until only
  std::string name;               // Atom only
  std::vector<Formula> kids;      // operands
  std::string text;               // canonical rendering; unique per formula
  std::uint32_t id;               // intern order within the arena
  int length;                     // symbol count, coalition braces fused with the operator
};

/// Total order used everywhere a canonical formula order is needed.
inline bool formula_less(Formula a, Formula b) {
  if (a == b) return false;
  if (a->text != b->text) return a->text < b->text;
  return a->id < b->id;
}

/// Owns and interns formula nodes. Construction is the only mutating path;
/// all built formulas stay valid for the arena's lifetime.
class FormulaArena {
public:
  Formula top();
  Formula atom(const std::string& name);
  Formula neg(Formula f);
  Formula conj(std::vector<Formula> parts);  // flattens nested And
  Formula disj(std::vector<Formula> parts);  // flattens nested Or
  Formula implies(Formula f, Formula g);
  Formula next(AgentSet a, Formula f);
  Formula box(AgentSet a, Formula f);
  Formula until(AgentSet a, Formula f, Formula g);

  std::size_t size() const { return nodes_.size(); }

private:
  Formula intern(FormulaNode node);
  std::unordered_map<std::string, std::unique_ptr<FormulaNode>> by_key_;
  std::vector<Formula> nodes_;
};

struct ParseError : std::runtime_error {
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what), position(position) {}
  std::size_t position;
};

struct ParseOptions {
  /// Largest agent index allowed in coalitions; 0 = unrestricted.
  int max_agent = 0;
  /// Accept EX/AX/EG/AG/EF/AF/E(..U..)/A(..U..), mapping E to <<1>> and A to <<>>.
  bool ctl_sugar = false;
};

/// Parses the concrete syntax documented in the README. `<<a1,...,an>>F f` is
/// desugared to `<<...>>(true U f)` and `false` to `~true`; nothing else is
/// rewritten.
Formula parse(FormulaArena& arena, const std::string& text, const ParseOptions& opts = {});

/// Canonical rendering; parse(render(f)) == f.
inline const std::string& render(Formula f) { return f->text; }

/// Formula length with each agent name one symbol and coalition braces fused
/// with the following temporal operator, so |<<1,2>>X p| = 4.
inline int formula_length(Formula f) { return f->length; }

enum class ClassKind { Primitive, Alpha, Beta };

/// alpha/beta decomposition. `parts` are the conjuncts (Alpha) or disjuncts
/// (Beta); a single entry stands for the alpha1 = alpha2 case.
struct Classification {
  ClassKind kind;
  std::vector<Formula> parts;
};

/// Classifies f relative to the ambient agent set: ~<<A>>X g is an
/// alpha-formula rewriting to <<>>X ~g exactly when A equals the ambient set,
/// and a primitive otherwise.
Classification classify(FormulaArena& arena, Formula f, AgentSet ambient);

/// True for <<A>>(f U g) and ~<<A>>G f.
bool is_eventuality(Formula f);

/// Union of all coalitions mentioned in f; may be empty.
AgentSet agents_of(Formula f);

/// Sets of formulas are sorted, duplicate-free vectors under formula_less.
using FormulaSet = std::vector<Formula>;

bool set_contains(const FormulaSet& s, Formula f);
void set_insert(FormulaSet& s, Formula f);
FormulaSet make_set(std::vector<Formula> fs);
std::string set_to_string(const FormulaSet& s);

/// Closure of theta: subformula-closed and closed under the fixpoint
/// unfoldings of Box, Until and negated Until.
FormulaSet closure(FormulaArena& arena, Formula theta);

/// Extended closure: the closure together with all negations, the <<>>X ~f
/// rewrites of ~<<ambient>>X f members, true, and <<ambient>>X true.
FormulaSet extended_closure(FormulaArena& arena, Formula theta, AgentSet ambient);

}  // namespace atl

#endif  // ATLSAT_FORMULA_HPP_
