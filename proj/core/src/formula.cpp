#include "atlsat/formula.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <sstream>

namespace atl {

// ---------------------------------------------------------------------------
// AgentSet
// ---------------------------------------------------------------------------

AgentSet AgentSet::range(int k) {
  AgentSet s;
  for (int a = 1; a <= k; ++a) s.add(a);
  return s;
}

AgentSet AgentSet::of(std::initializer_list<int> agents) {
  AgentSet s;
  for (int a : agents) s.add(a);
  return s;
}

void AgentSet::add(int agent) {
  if (agent < 1 || agent > 63) throw std::out_of_range("agent index out of supported range 1..63");
  bits_ |= std::uint64_t{1} << agent;
}

int AgentSet::count() const { return __builtin_popcountll(bits_); }

int AgentSet::max_agent() const {
  if (bits_ == 0) return 0;
  return 63 - __builtin_clzll(bits_);
}

std::vector<int> AgentSet::members() const {
  std::vector<int> out;
  for (int a = 1; a <= max_agent(); ++a)
    if (contains(a)) out.push_back(a);
  return out;
}

std::string AgentSet::to_string() const {
  std::string out;
  for (int a : members()) {
    if (!out.empty()) out += ',';
    out += std::to_string(a);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rendering (canonical text, computed once at intern time)
// ---------------------------------------------------------------------------

namespace {

bool is_binary(Formula f) {
  return f->kind == Kind::And || f->kind == Kind::Or || f->kind == Kind::Implies;
}

// Operand of a unary operator: parenthesized when it is a binary connective.
std::string unary_operand(Formula f) {
  if (is_binary(f)) return "(" + f->text + ")";
  return f->text;
}

std::string render_node(const FormulaNode& n) {
  switch (n.kind) {
    case Kind::Top:
      return "true";
    case Kind::Atom:
      return n.name;
    case Kind::Not:
      if (n.kids[0]->kind == Kind::Top) return "false";
      return "~" + unary_operand(n.kids[0]);
    case Kind::And: {
      std::string out;
      for (Formula k : n.kids) {
        if (!out.empty()) out += " & ";
        out += (k->kind == Kind::Or || k->kind == Kind::Implies) ? "(" + k->text + ")" : k->text;
      }
      return out;
    }
    case Kind::Or: {
      std::string out;
      for (Formula k : n.kids) {
        if (!out.empty()) out += " | ";
        out += (k->kind == Kind::Implies) ? "(" + k->text + ")" : k->text;
      }
      return out;
    }
    case Kind::Implies: {
      std::string lhs = n.kids[0]->kind == Kind::Implies ? "(" + n.kids[0]->text + ")" : n.kids[0]->text;
      return lhs + " -> " + n.kids[1]->text;
    }
    case Kind::Next:
      return "<<" + n.agents.to_string() + ">>X " + unary_operand(n.kids[0]);
    case Kind::Box:
      return "<<" + n.agents.to_string() + ">>G " + unary_operand(n.kids[0]);
    case Kind::Until:
      return "<<" + n.agents.to_string() + ">>(" + n.kids[0]->text + " U " + n.kids[1]->text + ")";
  }
  return "?";
}

int length_of(const FormulaNode& n) {
  switch (n.kind) {
    case Kind::Top:
    case Kind::Atom:
      return 1;
    case Kind::Not:
      return 1 + n.kids[0]->length;
    case Kind::And:
    case Kind::Or: {
      int sum = static_cast<int>(n.kids.size()) - 1;
      for (Formula k : n.kids) sum += k->length;
      return sum;
    }
    case Kind::Implies:
      return 1 + n.kids[0]->length + n.kids[1]->length;
    case Kind::Next:
    case Kind::Box:
      return n.agents.count() + 1 + n.kids[0]->length;
    case Kind::Until:
      return n.agents.count() + 1 + n.kids[0]->length + n.kids[1]->length;
  }
  return 1;
}

}  // namespace

// ---------------------------------------------------------------------------
// FormulaArena
// ---------------------------------------------------------------------------

Formula FormulaArena::intern(FormulaNode node) {
  std::string key;
  key += static_cast<char>(static_cast<int>(node.kind) + 1);
  key += node.agents.to_string();
  key += '\x1f';
  key += node.name;
  for (Formula k : node.kids) {
    key += '\x1f';
    key += std::to_string(k->id);
  }
  auto it = by_key_.find(key);
  if (it != by_key_.end()) return it->second.get();

  node.id = static_cast<std::uint32_t>(nodes_.size());
  node.text = render_node(node);
  node.length = length_of(node);
  auto owned = std::make_unique<FormulaNode>(std::move(node));
  Formula f = owned.get();
  by_key_.emplace(std::move(key), std::move(owned));
  nodes_.push_back(f);
  return f;
}

Formula FormulaArena::top() { return intern({Kind::Top, {}, {}, {}, {}, 0, 0}); }

Formula FormulaArena::atom(const std::string& name) {
  return intern({Kind::Atom, {}, name, {}, {}, 0, 0});
}

Formula FormulaArena::neg(Formula f) { return intern({Kind::Not, {}, {}, {f}, {}, 0, 0}); }

Formula FormulaArena::conj(std::vector<Formula> parts) {
  std::vector<Formula> flat;
  for (Formula p : parts) {
    if (p->kind == Kind::And)
      flat.insert(flat.end(), p->kids.begin(), p->kids.end());
    else
      flat.push_back(p);
  }
  if (flat.empty()) throw std::logic_error("conj of zero formulas");
  if (flat.size() == 1) return flat[0];
  return intern({Kind::And, {}, {}, std::move(flat), {}, 0, 0});
}

Formula FormulaArena::disj(std::vector<Formula> parts) {
  std::vector<Formula> flat;
  for (Formula p : parts) {
    if (p->kind == Kind::Or)
      flat.insert(flat.end(), p->kids.begin(), p->kids.end());
    else
      flat.push_back(p);
  }
  if (flat.empty()) throw std::logic_error("disj of zero formulas");
  if (flat.size() == 1) return flat[0];
  return intern({Kind::Or, {}, {}, std::move(flat), {}, 0, 0});
}

Formula FormulaArena::implies(Formula f, Formula g) {
  return intern({Kind::Implies, {}, {}, {f, g}, {}, 0, 0});
}

Formula FormulaArena::next(AgentSet a, Formula f) {
  return intern({Kind::Next, a, {}, {f}, {}, 0, 0});
}

Formula FormulaArena::box(AgentSet a, Formula f) {
  return intern({Kind::Box, a, {}, {f}, {}, 0, 0});
}

Formula FormulaArena::until(AgentSet a, Formula f, Formula g) {
  return intern({Kind::Until, a, {}, {f, g}, {}, 0, 0});
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

enum class Tok { Ident, Number, LAngle, RAngle, LParen, RParen, Comma, Neg, And, Or, Arrow, UntilKw, End };

struct Token {
  Tok type;
  std::string text;
  std::size_t pos;
};

std::vector<Token> lex(const std::string& s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      std::string word = s.substr(i, j - i);
      out.push_back({word == "U" ? Tok::UntilKw : Tok::Ident, word, start});
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      out.push_back({Tok::Number, s.substr(i, j - i), start});
      i = j;
    } else if (s.compare(i, 2, "<<") == 0) {
      out.push_back({Tok::LAngle, "<<", start});
      i += 2;
    } else if (s.compare(i, 2, ">>") == 0) {
      out.push_back({Tok::RAngle, ">>", start});
      i += 2;
    } else if (s.compare(i, 2, "->") == 0) {
      out.push_back({Tok::Arrow, "->", start});
      i += 2;
    } else {
      switch (c) {
        case '(': out.push_back({Tok::LParen, "(", start}); break;
        case ')': out.push_back({Tok::RParen, ")", start}); break;
        case ',': out.push_back({Tok::Comma, ",", start}); break;
        case '~': out.push_back({Tok::Neg, "~", start}); break;
        case '&': out.push_back({Tok::And, "&", start}); break;
        case '|': out.push_back({Tok::Or, "|", start}); break;
        default:
          throw ParseError("unexpected character '" + std::string(1, c) + "'", start);
      }
      ++i;
    }
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

class Parser {
public:
  Parser(FormulaArena& arena, std::vector<Token> tokens, const ParseOptions& opts)
      : arena_(arena), toks_(std::move(tokens)), opts_(opts) {}

  Formula run() {
    Formula f = formula();
    expect(Tok::End, "end of input");
    return f;
  }

private:
  const Token& peek() const { return toks_[pos_]; }
  Token take() { return toks_[pos_++]; }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what + " at position " + std::to_string(peek().pos), peek().pos);
  }

  void expect(Tok t, const std::string& what) {
    if (peek().type != t) fail("expected " + what);
    ++pos_;
  }

  Formula formula() {  // implication level, right-associative
    Formula lhs = or_level();
    if (peek().type == Tok::Arrow) {
      take();
      return arena_.implies(lhs, formula());
    }
    return lhs;
  }

  Formula or_level() {
    std::vector<Formula> parts{and_level()};
    while (peek().type == Tok::Or) {
      take();
      parts.push_back(and_level());
    }
    return parts.size() == 1 ? parts[0] : arena_.disj(std::move(parts));
  }

  Formula and_level() {
    std::vector<Formula> parts{unary()};
    while (peek().type == Tok::And) {
      take();
      parts.push_back(unary());
    }
    return parts.size() == 1 ? parts[0] : arena_.conj(std::move(parts));
  }

  AgentSet coalition() {
    expect(Tok::LAngle, "'<<'");
    AgentSet a;
    if (peek().type == Tok::Number) {
      a = coalition_member(a);
      while (peek().type == Tok::Comma) {
        take();
        a = coalition_member(a);
      }
    }
    expect(Tok::RAngle, "'>>'");
    return a;
  }

  AgentSet coalition_member(AgentSet a) {
    const Token& t = peek();
    long v = std::stol(t.text);
    if (v < 1) throw ParseError("agent index must be positive", t.pos);
    if (v > 63 || (opts_.max_agent > 0 && v > opts_.max_agent))
      throw ParseError("agent index " + t.text + " out of range", t.pos);
    take();
    a.add(static_cast<int>(v));
    return a;
  }

  Formula modality(AgentSet a) {
    const Token& t = peek();
    if (t.type == Tok::Ident && t.text == "X") {
      take();
      return arena_.next(a, unary());
    }
    if (t.type == Tok::Ident && t.text == "G") {
      take();
      return arena_.box(a, unary());
    }
    if (t.type == Tok::Ident && t.text == "F") {
      take();
      return arena_.until(a, arena_.top(), unary());
    }
    if (t.type == Tok::LParen) {
      take();
      Formula f = formula();
      expect(Tok::UntilKw, "'U'");
      Formula g = formula();
      expect(Tok::RParen, "')'");
      return arena_.until(a, f, g);
    }
    fail("expected temporal operator X, G, F or (.. U ..)");
  }

  Formula ctl_quantified(bool existential) {
    AgentSet a = existential ? AgentSet::of({1}) : AgentSet{};
    expect(Tok::LParen, "'('");
    Formula f = formula();
    expect(Tok::UntilKw, "'U'");
    Formula g = formula();
    expect(Tok::RParen, "')'");
    return arena_.until(a, f, g);
  }

  Formula unary() {
    const Token& t = peek();
    switch (t.type) {
      case Tok::Neg:
        take();
        return arena_.neg(unary());
      case Tok::LAngle:
        return modality(coalition());
      case Tok::LParen: {
        take();
        Formula f = formula();
        expect(Tok::RParen, "')'");
        return f;
      }
      case Tok::Ident: {
        if (t.text == "true") {
          take();
          return arena_.top();
        }
        if (t.text == "false") {
          take();
          return arena_.neg(arena_.top());
        }
        if (opts_.ctl_sugar) {
          AgentSet e = AgentSet::of({1});
          AgentSet a;  // empty coalition
          if (t.text == "EX") { take(); return arena_.next(e, unary()); }
          if (t.text == "AX") { take(); return arena_.next(a, unary()); }
          if (t.text == "EG") { take(); return arena_.box(e, unary()); }
          if (t.text == "AG") { take(); return arena_.box(a, unary()); }
          if (t.text == "EF") { take(); return arena_.until(e, arena_.top(), unary()); }
          if (t.text == "AF") { take(); return arena_.until(a, arena_.top(), unary()); }
          if (t.text == "E") { take(); return ctl_quantified(true); }
          if (t.text == "A") { take(); return ctl_quantified(false); }
        }
        take();
        return arena_.atom(t.text);
      }
      default:
        fail("expected a formula");
    }
  }

  FormulaArena& arena_;
  std::vector<Token> toks_;
  ParseOptions opts_;
  std::size_t pos_ = 0;
};

}  // namespace

Formula parse(FormulaArena& arena, const std::string& text, const ParseOptions& opts) {
  return Parser(arena, lex(text), opts).run();
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

Classification classify(FormulaArena& arena, Formula f, AgentSet ambient) {
  switch (f->kind) {
    case Kind::Top:
    case Kind::Atom:
    case Kind::Next:
      return {ClassKind::Primitive, {}};
    case Kind::And:
      return {ClassKind::Alpha, f->kids};
    case Kind::Or:
      return {ClassKind::Beta, f->kids};
    case Kind::Implies:
      return {ClassKind::Beta, {arena.neg(f->kids[0]), f->kids[1]}};
    case Kind::Box:
      return {ClassKind::Alpha, {f->kids[0], arena.next(f->agents, f)}};
    case Kind::Until:
      return {ClassKind::Beta,
              {f->kids[1], arena.conj({f->kids[0], arena.next(f->agents, f)})}};
    case Kind::Not:
      break;
  }
  Formula g = f->kids[0];
  switch (g->kind) {
    case Kind::Top:   // ~true: patently inconsistent on its own, left to E1
    case Kind::Atom:
      return {ClassKind::Primitive, {}};
    case Kind::Not:
      return {ClassKind::Alpha, {g->kids[0]}};
    case Kind::And: {
      std::vector<Formula> parts;
      for (Formula k : g->kids) parts.push_back(arena.neg(k));
      return {ClassKind::Beta, std::move(parts)};
    }
    case Kind::Or: {
      std::vector<Formula> parts;
      for (Formula k : g->kids) parts.push_back(arena.neg(k));
      return {ClassKind::Alpha, std::move(parts)};
    }
    case Kind::Implies:
      return {ClassKind::Alpha, {g->kids[0], arena.neg(g->kids[1])}};
    case Kind::Next:
      if (g->agents == ambient)
        return {ClassKind::Alpha, {arena.next(AgentSet{}, arena.neg(g->kids[0]))}};
      return {ClassKind::Primitive, {}};
    case Kind::Box:
      return {ClassKind::Beta,
              {arena.neg(g->kids[0]), arena.neg(arena.next(g->agents, g))}};
    case Kind::Until: {
      Formula not_g2 = arena.neg(g->kids[1]);
      Formula b1 = arena.conj({not_g2, arena.neg(g->kids[0])});
      Formula b2 = arena.conj({not_g2, arena.neg(arena.next(g->agents, g))});
      return {ClassKind::Beta, {b1, b2}};
    }
  }
  return {ClassKind::Primitive, {}};
}

bool is_eventuality(Formula f) {
  if (f->kind == Kind::Until) return true;
  return f->kind == Kind::Not && f->kids[0]->kind == Kind::Box;
}

AgentSet agents_of(Formula f) {
  AgentSet a = f->agents;
  for (Formula k : f->kids) a = a.united(agents_of(k));
  return a;
}

// ---------------------------------------------------------------------------
// Formula sets
// ---------------------------------------------------------------------------

bool set_contains(const FormulaSet& s, Formula f) {
  auto it = std::lower_bound(s.begin(), s.end(), f, formula_less);
  return it != s.end() && *it == f;
}

void set_insert(FormulaSet& s, Formula f) {
  auto it = std::lower_bound(s.begin(), s.end(), f, formula_less);
  if (it == s.end() || *it != f) s.insert(it, f);
}

FormulaSet make_set(std::vector<Formula> fs) {
  std::sort(fs.begin(), fs.end(), formula_less);
  fs.erase(std::unique(fs.begin(), fs.end()), fs.end());
  return fs;
}

std::string set_to_string(const FormulaSet& s) {
  std::string out;
  for (Formula f : s) {
    if (!out.empty()) out += ", ";
    out += f->text;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Closure
// ---------------------------------------------------------------------------

FormulaSet closure(FormulaArena& arena, Formula theta) {
  FormulaSet cl;
  std::vector<Formula> todo{theta};
  while (!todo.empty()) {
    Formula f = todo.back();
    todo.pop_back();
    if (set_contains(cl, f)) continue;
    set_insert(cl, f);
    for (Formula k : f->kids) todo.push_back(k);
    if (f->kind == Kind::Until) {
      todo.push_back(arena.conj({f->kids[0], arena.next(f->agents, f)}));
    } else if (f->kind == Kind::Box) {
      todo.push_back(arena.conj({f->kids[0], arena.next(f->agents, f)}));
    } else if (f->kind == Kind::Not && f->kids[0]->kind == Kind::Until) {
      Formula u = f->kids[0];
      Formula not_g2 = arena.neg(u->kids[1]);
      todo.push_back(arena.conj({not_g2, arena.neg(u->kids[0])}));
      todo.push_back(arena.conj({not_g2, arena.neg(arena.next(u->agents, u))}));
    }
  }
  return cl;
}

FormulaSet extended_closure(FormulaArena& arena, Formula theta, AgentSet ambient) {
  FormulaSet cl = closure(arena, theta);
  FormulaSet ecl;
  for (Formula f : cl) {
    set_insert(ecl, f);
    set_insert(ecl, arena.neg(f));
    if (f->kind == Kind::Not && f->kids[0]->kind == Kind::Next && f->kids[0]->agents == ambient)
      set_insert(ecl, arena.next(AgentSet{}, arena.neg(f->kids[0]->kids[0])));
  }
  set_insert(ecl, arena.top());
  set_insert(ecl, arena.next(ambient, arena.top()));
  return ecl;
}

}  // namespace atl
