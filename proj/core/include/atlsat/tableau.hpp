#ifndef ATLSAT_TABLEAU_HPP_
#define ATLSAT_TABLEAU_HPP_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "atlsat/formula.hpp"

namespace atl {

enum class Mode { Tight, Loose, TurnBased, General };

std::string mode_name(Mode m);

/// One action choice per agent, indexed by position in the ambient agent
/// order (ascending agent name). Empty when the ambient set is empty.
using MoveVector = std::vector<int>;

std::string move_to_string(const MoveVector& v);  // "0,2"; "-" when empty

struct ResourceLimitError : std::runtime_error {
  explicit ResourceLimitError(const std::string& what) : std::runtime_error(what) {}
};

/// Patent inconsistency: some pair f, ~f, or ~true.
bool patently_inconsistent(const FormulaSet& s);

/// All minimal downward saturated extensions of `prestate`, each augmented
/// with <<ambient>>X true when it has no next-time member. Deduplicated,
/// non-minimal extensions discarded, canonically ordered.
std::vector<FormulaSet> saturate(FormulaArena& arena, const FormulaSet& prestate, AgentSet ambient);

/// Collective negative vote of a move vector: with N(v) = {i : v_i >= m},
/// (sum over N(v) of v_i - m) mod l. Absent when l = 0.
std::optional<int> neg_index(const MoveVector& v, int positives, int negatives);

/// Next-rule bookkeeping computed once per state.
struct NextInfo {
  std::vector<Formula> list;     // L: positive then proper negative next-time formulas
  int positives = 0;             // m
  int negatives = 0;             // l
  std::vector<int> bounds;       // per-agent vote bound; D = the mixed-radix product
  std::vector<MoveVector> dset;  // D in lexicographic order
};

NextInfo make_next_info(const FormulaSet& state, AgentSet ambient, Mode mode, int owner = -1);

/// Position of v in the lexicographic enumeration of D.
std::size_t dset_index(const NextInfo& info, const MoveVector& v);

/// Move vectors witnessing a next-time formula chi of the state: for positive
/// chi at position p all vectors voting p on chi's coalition, for a proper
/// negative at q all vectors with neg(v) = q whose counter-coalition votes
/// negatively. Throws std::invalid_argument when chi is not in L.
std::vector<MoveVector> moves_for(const NextInfo& info, AgentSet ambient, Mode mode, int owner,
                                  Formula chi);

/// The Next rule for one state: successor prestate content per move vector,
/// in lexicographic vector order.
std::vector<std::pair<MoveVector, FormulaSet>> next_prestates(FormulaArena& arena,
                                                              const FormulaSet& state,
                                                              AgentSet ambient, Mode mode,
                                                              int owner = -1);

struct TableauNode {
  FormulaSet formulas;
  bool is_state = false;
  int owner = -1;  // turn-based states only
};

struct Pretableau {
  FormulaArena* arena = nullptr;
  Formula theta = nullptr;
  Mode mode = Mode::Tight;
  AgentSet ambient;   // run agent set; includes the fresh agent in loose mode
  int root = 0;       // the initial prestate {theta}

  std::vector<TableauNode> nodes;
  std::vector<std::vector<int>> unwind;        // prestate -> states(prestate)
  std::vector<NextInfo> next_info;             // states only
  std::vector<std::vector<int>> sigma_target;  // states only: dset index -> prestate

  std::size_t state_count = 0;
  std::size_t prestate_count = 0;

  bool is_state(int id) const { return nodes[id].is_state; }
  /// Move edges of a state merged per target prestate: (prestate, dset indices).
  std::vector<std::pair<int, std::vector<int>>> merged_edges(int state) const;
};

/// Ambient agent set of a run: the formula's agents, plus one fresh agent in
/// loose mode. Turn-based runs require at least one agent.
AgentSet run_agents(Formula theta, Mode mode);

/// Alternates SR and Next from the prestate {theta} to a fixed point, reusing
/// equal nodes. Throws ResourceLimitError when more than node_cap nodes would
/// be created.
Pretableau build_pretableau(FormulaArena& arena, Formula theta, Mode mode,
                            std::size_t node_cap = 1'000'000);

}  // namespace atl

#endif  // ATLSAT_TABLEAU_HPP_
