#ifndef ATLSAT_ELIMINATION_HPP_
#define ATLSAT_ELIMINATION_HPP_

#include <string>
#include <vector>

#include "atlsat/tableau.hpp"

namespace atl {

enum class ElimRule { E1, E2, E3 };

std::string rule_name(ElimRule r);

/// The (initial, then progressively pruned) tableau: states only, with move
/// edges carrying sets of move vectors. Eliminated states are tombstoned so
/// the elimination trace can be reported.
struct Tableau {
  FormulaArena* arena = nullptr;
  Formula theta = nullptr;
  Mode mode = Mode::Tight;
  AgentSet ambient;

  struct State {
    FormulaSet formulas;
    int owner = -1;
    NextInfo next;
    std::vector<std::vector<int>> targets;  // per dset index: target state ids, ascending
  };
  std::vector<State> states;
  std::vector<bool> alive;

  struct Removal {
    int state;
    ElimRule rule;
    int stage;           // 1-based elimination stage
    Formula eventuality;  // E3 only
  };
  std::vector<Removal> removals;

  /// Alive states containing theta; recomputed by run_elimination.
  std::vector<int> designated;

  std::size_t alive_count() const;
  std::vector<int> alive_targets(int state, int dset_index) const;
  /// Move edges merged per target: (target, dset indices), targets ascending.
  std::vector<std::pair<int, std::vector<int>>> merged_edges(int state) const;
  std::vector<MoveVector> relevant_moves(int state, Formula chi) const;
};

/// Rule PR: drops all prestates, turning state -sigma-> prestate => state
/// edges into direct state -sigma-> state edges.
Tableau eliminate_prestates(const Pretableau& p);

/// Rule E1: removes every state containing a patent inconsistency.
void apply_e1(Tableau& t);

/// Rule E2 to fixpoint: removes states with some move vector all of whose
/// successors are gone.
void apply_e2(Tableau& t);

/// Least-fixpoint marking of the states realizing the eventuality. Throws
/// std::invalid_argument when xi is not an eventuality.
std::vector<int> mark_realization(const Tableau& t, Formula xi);

/// One E3 stage: removes the latest-created state that contains xi but is not
/// marked. Returns false when every carrier of xi is marked.
bool apply_e3(Tableau& t, Formula xi);

/// The next-time formula whose moves witness the eventuality's unfolding:
/// <<A>>X xi for an until, ~<<A>>X <<A>>G f for a negated box (its <<>>X
/// rewrite when A is the whole ambient set).
Formula unfolding_next(FormulaArena& arena, Formula xi, AgentSet ambient);

/// Eventualities occurring in alive states, canonically ordered.
std::vector<Formula> eventualities_of(const Tableau& t);

struct Stats {
  std::string formula;
  std::string mode;
  int formula_length = 0;
  int agents = 0;
  std::size_t ecl_size = 0;
  std::size_t prestates_created = 0;
  std::size_t states_created = 0;
  std::size_t e1_removed = 0;
  std::size_t e2_removed = 0;
  std::size_t e3_removed = 0;
  std::size_t final_alive = 0;
  double construction_ms = 0;
  double prestate_elim_ms = 0;
  double state_elim_ms = 0;
};

struct Verdict {
  bool satisfiable = false;
  Mode mode_used = Mode::Tight;  // the submode that decided a general run
  Tableau tableau;
  Stats stats;
};

/// E1 once, then E3/E2 dovetailed cyclically over all eventualities until a
/// full cycle removes nothing. Fills removals, designated and the verdict.
Verdict run_elimination(Tableau t);

/// Full decision pipeline: construction, prestate elimination, state
/// elimination. General mode decides tight first, then loose.
Verdict decide(FormulaArena& arena, Formula theta, Mode mode, std::size_t node_cap = 1'000'000);

}  // namespace atl

#endif  // ATLSAT_ELIMINATION_HPP_
