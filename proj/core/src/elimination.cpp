#include "atlsat/elimination.hpp"

#include <algorithm>
#include <chrono>
#include <map>

namespace atl {

std::string rule_name(ElimRule r) {
  switch (r) {
    case ElimRule::E1: return "E1";
    case ElimRule::E2: return "E2";
    case ElimRule::E3: return "E3";
  }
  return "?";
}

std::size_t Tableau::alive_count() const {
  return static_cast<std::size_t>(std::count(alive.begin(), alive.end(), true));
}

std::vector<int> Tableau::alive_targets(int state, int dset_index) const {
  std::vector<int> out;
  for (int t : states[state].targets[dset_index])
    if (alive[t]) out.push_back(t);
  return out;
}

std::vector<std::pair<int, std::vector<int>>> Tableau::merged_edges(int state) const {
  std::map<int, std::vector<int>> by_target;
  const auto& targets = states[state].targets;
  for (std::size_t i = 0; i < targets.size(); ++i)
    for (int t : targets[i]) by_target[t].push_back(static_cast<int>(i));
  return {by_target.begin(), by_target.end()};
}

std::vector<MoveVector> Tableau::relevant_moves(int state, Formula chi) const {
  return moves_for(states[state].next, ambient, mode, states[state].owner, chi);
}

// ---------------------------------------------------------------------------
// PR
// ---------------------------------------------------------------------------

Tableau eliminate_prestates(const Pretableau& p) {
  Tableau t;
  t.arena = p.arena;
  t.theta = p.theta;
  t.mode = p.mode;
  t.ambient = p.ambient;

  std::vector<int> state_index(p.nodes.size(), -1);
  for (std::size_t id = 0; id < p.nodes.size(); ++id) {
    if (!p.nodes[id].is_state) continue;
    state_index[id] = static_cast<int>(t.states.size());
    t.states.push_back({p.nodes[id].formulas, p.nodes[id].owner, p.next_info[id], {}});
  }
  for (std::size_t id = 0; id < p.nodes.size(); ++id) {
    if (!p.nodes[id].is_state) continue;
    Tableau::State& st = t.states[state_index[id]];
    st.targets.resize(st.next.dset.size());
    for (std::size_t vi = 0; vi < p.sigma_target[id].size(); ++vi) {
      for (int succ : p.unwind[p.sigma_target[id][vi]])
        st.targets[vi].push_back(state_index[succ]);
      std::sort(st.targets[vi].begin(), st.targets[vi].end());
      st.targets[vi].erase(std::unique(st.targets[vi].begin(), st.targets[vi].end()),
                           st.targets[vi].end());
    }
  }
  t.alive.assign(t.states.size(), true);
  for (std::size_t s = 0; s < t.states.size(); ++s)
    if (set_contains(t.states[s].formulas, t.theta)) t.designated.push_back(static_cast<int>(s));
  return t;
}

// ---------------------------------------------------------------------------
// State elimination rules
// ---------------------------------------------------------------------------

namespace {

void kill(Tableau& t, int state, ElimRule rule, Formula xi = nullptr) {
  t.alive[state] = false;
  t.removals.push_back({state, rule, static_cast<int>(t.removals.size()) + 1, xi});
}

}  // namespace

void apply_e1(Tableau& t) {
  for (std::size_t s = 0; s < t.states.size(); ++s)
    if (t.alive[s] && patently_inconsistent(t.states[s].formulas))
      kill(t, static_cast<int>(s), ElimRule::E1);
}

void apply_e2(Tableau& t) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t s = 0; s < t.states.size(); ++s) {
      if (!t.alive[s]) continue;
      for (std::size_t vi = 0; vi < t.states[s].targets.size(); ++vi) {
        bool any = false;
        for (int tgt : t.states[s].targets[vi])
          if (t.alive[tgt]) { any = true; break; }
        if (!any) {
          kill(t, static_cast<int>(s), ElimRule::E2);
          changed = true;
          break;
        }
      }
    }
  }
}

Formula unfolding_next(FormulaArena& arena, Formula xi, AgentSet ambient) {
  if (xi->kind == Kind::Until) return arena.next(xi->agents, xi);
  if (xi->kind == Kind::Not && xi->kids[0]->kind == Kind::Box) {
    AgentSet a = xi->kids[0]->agents;
    if (a == ambient) return arena.next(AgentSet{}, xi);
    return arena.neg(arena.next(a, xi->kids[0]));
  }
  throw std::invalid_argument("not an eventuality: " + xi->text);
}

std::vector<int> mark_realization(const Tableau& t, Formula xi) {
  Formula seed;
  if (xi->kind == Kind::Until)
    seed = xi->kids[1];
  else if (xi->kind == Kind::Not && xi->kids[0]->kind == Kind::Box)
    seed = t.arena->neg(xi->kids[0]->kids[0]);
  else
    throw std::invalid_argument("not an eventuality: " + xi->text);
  Formula unfold = unfolding_next(*t.arena, xi, t.ambient);

  std::vector<bool> marked(t.states.size(), false);
  std::vector<std::vector<std::size_t>> relevant(t.states.size());
  for (std::size_t s = 0; s < t.states.size(); ++s) {
    if (!t.alive[s]) continue;
    if (set_contains(t.states[s].formulas, seed)) marked[s] = true;
    const NextInfo& ni = t.states[s].next;
    if (std::find(ni.list.begin(), ni.list.end(), unfold) == ni.list.end()) continue;
    for (const MoveVector& v : t.relevant_moves(static_cast<int>(s), unfold))
      relevant[s].push_back(dset_index(ni, v));
  }

  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t s = 0; s < t.states.size(); ++s) {
      if (!t.alive[s] || marked[s] || relevant[s].empty()) continue;
      bool all = true;
      for (std::size_t vi : relevant[s]) {
        bool some = false;
        for (int tgt : t.states[s].targets[vi])
          if (t.alive[tgt] && marked[tgt]) { some = true; break; }
        if (!some) { all = false; break; }
      }
      if (all) {
        marked[s] = true;
        changed = true;
      }
    }
  }

  std::vector<int> out;
  for (std::size_t s = 0; s < t.states.size(); ++s)
    if (marked[s]) out.push_back(static_cast<int>(s));
  return out;
}

bool apply_e3(Tableau& t, Formula xi) {
  std::vector<int> marked = mark_realization(t, xi);
  int victim = -1;
  for (std::size_t s = 0; s < t.states.size(); ++s) {
    if (!t.alive[s] || !set_contains(t.states[s].formulas, xi)) continue;
    if (!std::binary_search(marked.begin(), marked.end(), static_cast<int>(s)))
      victim = static_cast<int>(s);
  }
  if (victim < 0) return false;
  kill(t, victim, ElimRule::E3, xi);
  return true;
}

std::vector<Formula> eventualities_of(const Tableau& t) {
  FormulaSet evts;
  for (std::size_t s = 0; s < t.states.size(); ++s) {
    if (!t.alive[s]) continue;
    for (Formula f : t.states[s].formulas)
      if (is_eventuality(f)) set_insert(evts, f);
  }
  return evts;
}

Verdict run_elimination(Tableau t) {
  apply_e1(t);
  std::vector<Formula> evts = eventualities_of(t);
  apply_e2(t);

  bool removed_in_cycle = true;
  while (removed_in_cycle) {
    removed_in_cycle = false;
    for (Formula xi : evts) {
      while (apply_e3(t, xi)) {
        removed_in_cycle = true;
        apply_e2(t);
      }
    }
  }

  t.designated.clear();
  for (std::size_t s = 0; s < t.states.size(); ++s)
    if (t.alive[s] && set_contains(t.states[s].formulas, t.theta))
      t.designated.push_back(static_cast<int>(s));

  Verdict v;
  v.satisfiable = !t.designated.empty();
  v.mode_used = t.mode;
  for (const auto& r : t.removals) {
    if (r.rule == ElimRule::E1) ++v.stats.e1_removed;
    if (r.rule == ElimRule::E2) ++v.stats.e2_removed;
    if (r.rule == ElimRule::E3) ++v.stats.e3_removed;
  }
  v.stats.final_alive = t.alive_count();
  v.tableau = std::move(t);
  return v;
}

// ---------------------------------------------------------------------------
// decide
// ---------------------------------------------------------------------------

namespace {

Verdict decide_single(FormulaArena& arena, Formula theta, Mode mode, std::size_t node_cap) {
  using clock = std::chrono::steady_clock;
  auto ms_since = [](clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
  };

  auto t0 = clock::now();
  Pretableau p = build_pretableau(arena, theta, mode, node_cap);
  double construction_ms = ms_since(t0);

  t0 = clock::now();
  Tableau initial = eliminate_prestates(p);
  double prestate_ms = ms_since(t0);

  t0 = clock::now();
  Verdict v = run_elimination(std::move(initial));
  v.stats.state_elim_ms = ms_since(t0);

  v.stats.formula = render(theta);
  v.stats.mode = mode_name(mode);
  v.stats.formula_length = formula_length(theta);
  v.stats.agents = p.ambient.count();
  v.stats.ecl_size = extended_closure(arena, theta, p.ambient).size();
  v.stats.prestates_created = p.prestate_count;
  v.stats.states_created = p.state_count;
  v.stats.construction_ms = construction_ms;
  v.stats.prestate_elim_ms = prestate_ms;
  v.mode_used = mode;
  return v;
}

}  // namespace

Verdict decide(FormulaArena& arena, Formula theta, Mode mode, std::size_t node_cap) {
  if (mode != Mode::General) return decide_single(arena, theta, mode, node_cap);
  Verdict tight = decide_single(arena, theta, Mode::Tight, node_cap);
  if (tight.satisfiable) return tight;
  Verdict loose = decide_single(arena, theta, Mode::Loose, node_cap);
  loose.stats.mode = "general";
  return loose;
}

}  // namespace atl
