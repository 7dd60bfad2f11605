#include "atlsat/tableau.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <map>

namespace atl {

std::string mode_name(Mode m) {
  switch (m) {
    case Mode::Tight: return "tight";
    case Mode::Loose: return "loose";
    case Mode::TurnBased: return "turn-based";
    case Mode::General: return "general";
  }
  return "?";
}

std::string move_to_string(const MoveVector& v) {
  if (v.empty()) return "-";
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

bool patently_inconsistent(const FormulaSet& s) {
  for (Formula f : s) {
    if (f->kind != Kind::Not) continue;
    if (f->kids[0]->kind == Kind::Top) return true;
    if (set_contains(s, f->kids[0])) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// SR: minimal downward saturated extensions
// ---------------------------------------------------------------------------

namespace {

bool set_less(const FormulaSet& a, const FormulaSet& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), formula_less);
}

bool strict_subset(const FormulaSet& a, const FormulaSet& b) {
  return a.size() < b.size() && std::includes(b.begin(), b.end(), a.begin(), a.end(), formula_less);
}

bool has_next_time_member(const FormulaSet& s) {
  for (Formula f : s) {
    if (f->kind == Kind::Next) return true;
    if (f->kind == Kind::Not && f->kids[0]->kind == Kind::Next) return true;
  }
  return false;
}

}  // namespace

std::vector<FormulaSet> saturate(FormulaArena& arena, const FormulaSet& prestate, AgentSet ambient) {
  struct Item {
    FormulaSet set;
    std::vector<Formula> todo;
    std::size_t idx = 0;
  };
  std::vector<FormulaSet> raw;
  std::vector<Item> stack;
  stack.push_back({prestate, {prestate.begin(), prestate.end()}, 0});

  while (!stack.empty()) {
    Item item = std::move(stack.back());
    stack.pop_back();
    bool branched = false;
    while (item.idx < item.todo.size()) {
      Formula f = item.todo[item.idx];
      Classification cls = classify(arena, f, ambient);
      if (cls.kind == ClassKind::Alpha) {
        for (Formula part : cls.parts) {
          if (!set_contains(item.set, part)) {
            set_insert(item.set, part);
            item.todo.push_back(part);
          }
        }
      } else if (cls.kind == ClassKind::Beta) {
        bool satisfied = false;
        for (Formula part : cls.parts)
          if (set_contains(item.set, part)) { satisfied = true; break; }
        if (!satisfied) {
          // one branch per disjunct, explored in table order
          for (auto it = cls.parts.rbegin(); it != cls.parts.rend(); ++it) {
            Item child = item;
            child.idx = item.idx + 1;
            set_insert(child.set, *it);
            child.todo.push_back(*it);
            stack.push_back(std::move(child));
          }
          branched = true;
          break;
        }
      }
      ++item.idx;
    }
    if (!branched) raw.push_back(std::move(item.set));
  }

  // discard non-minimal extensions, then pad and deduplicate
  std::sort(raw.begin(), raw.end(), set_less);
  raw.erase(std::unique(raw.begin(), raw.end()), raw.end());
  std::vector<FormulaSet> minimal;
  for (const FormulaSet& cand : raw) {
    bool dominated = false;
    for (const FormulaSet& other : raw)
      if (strict_subset(other, cand)) { dominated = true; break; }
    if (!dominated) minimal.push_back(cand);
  }
  for (FormulaSet& s : minimal)
    if (!has_next_time_member(s)) set_insert(s, arena.next(ambient, arena.top()));
  std::sort(minimal.begin(), minimal.end(), set_less);
  minimal.erase(std::unique(minimal.begin(), minimal.end()), minimal.end());
  return minimal;
}

// ---------------------------------------------------------------------------
// Next rule
// ---------------------------------------------------------------------------

std::optional<int> neg_index(const MoveVector& v, int positives, int negatives) {
  if (negatives == 0) return std::nullopt;
  long sum = 0;
  for (int c : v)
    if (c >= positives) sum += c - positives;
  return static_cast<int>(sum % negatives);
}

namespace {

// agent name -> position in the ambient order, or -1
std::vector<int> position_table(AgentSet ambient) {
  std::vector<int> pos(ambient.max_agent() + 1, -1);
  int i = 0;
  for (int a : ambient.members()) pos[a] = i++;
  return pos;
}

std::vector<MoveVector> enumerate_mixed_radix(const std::vector<int>& bounds) {
  std::vector<MoveVector> out;
  MoveVector v(bounds.size(), 0);
  for (;;) {
    out.push_back(v);
    int i = static_cast<int>(bounds.size()) - 1;
    while (i >= 0) {
      if (++v[i] < bounds[i]) break;
      v[i] = 0;
      --i;
    }
    if (i < 0) break;
  }
  return out;
}

// positions of ambient members of A
std::vector<int> coalition_positions(AgentSet a, AgentSet ambient) {
  std::vector<int> out;
  int i = 0;
  for (int ag : ambient.members()) {
    if (a.contains(ag)) out.push_back(i);
    ++i;
  }
  return out;
}

}  // namespace

NextInfo make_next_info(const FormulaSet& state, AgentSet ambient, Mode mode, int owner) {
  NextInfo info;
  for (Formula f : state)
    if (f->kind == Kind::Next) info.list.push_back(f);
  info.positives = static_cast<int>(info.list.size());
  for (Formula f : state)
    if (f->kind == Kind::Not && f->kids[0]->kind == Kind::Next && f->kids[0]->agents != ambient)
      info.list.push_back(f);
  info.negatives = static_cast<int>(info.list.size()) - info.positives;

  int r = info.positives + info.negatives;
  int k = ambient.count();
  info.bounds.assign(k, r);
  if (mode == Mode::TurnBased) {
    auto pos = position_table(ambient);
    for (int& b : info.bounds) b = 1;
    if (owner >= 1 && pos[owner] >= 0) info.bounds[pos[owner]] = r;
  }
  if (r > 0) info.dset = enumerate_mixed_radix(info.bounds);
  return info;
}

std::size_t dset_index(const NextInfo& info, const MoveVector& v) {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < v.size(); ++i) idx = idx * info.bounds[i] + v[i];
  return idx;
}

std::vector<MoveVector> moves_for(const NextInfo& info, AgentSet ambient, Mode mode, int owner,
                                  Formula chi) {
  auto it = std::find(info.list.begin(), info.list.end(), chi);
  if (it == info.list.end())
    throw std::invalid_argument("formula is not a next-time member of the state: " + chi->text);
  int p = static_cast<int>(it - info.list.begin());
  bool positive = p < info.positives;
  auto pos = position_table(ambient);

  std::vector<MoveVector> out;
  if (mode == Mode::TurnBased) {
    int po = pos[owner];
    AgentSet a = positive ? chi->agents : chi->kids[0]->agents;
    bool unconditional = positive ? !a.contains(owner) : a.contains(owner);
    for (const MoveVector& v : info.dset)
      if (unconditional || v[po] == p) out.push_back(v);
    return out;
  }

  if (positive) {
    auto cpos = coalition_positions(chi->agents, ambient);
    for (const MoveVector& v : info.dset) {
      bool all = true;
      for (int cp : cpos)
        if (v[cp] != p) { all = false; break; }
      if (all) out.push_back(v);
    }
  } else {
    int q = p - info.positives;
    auto opp = coalition_positions(ambient.minus(chi->kids[0]->agents), ambient);
    for (const MoveVector& v : info.dset) {
      if (neg_index(v, info.positives, info.negatives) != std::optional<int>(q)) continue;
      bool voted_neg = true;
      for (int cp : opp)
        if (v[cp] < info.positives) { voted_neg = false; break; }
      if (voted_neg) out.push_back(v);
    }
  }
  return out;
}

namespace {

FormulaSet prestate_content(FormulaArena& arena, const NextInfo& info, AgentSet ambient, Mode mode,
                            int owner, const MoveVector& v) {
  std::vector<Formula> fs;
  auto pos = position_table(ambient);

  if (mode == Mode::TurnBased) {
    int vote = v[pos[owner]];
    for (int p = 0; p < info.positives; ++p) {
      Formula nf = info.list[p];
      if (!nf->agents.contains(owner) || vote == p) fs.push_back(nf->kids[0]);
    }
    for (int q = 0; q < info.negatives; ++q) {
      Formula nf = info.list[info.positives + q];
      if (nf->kids[0]->agents.contains(owner) || vote == info.positives + q)
        fs.push_back(arena.neg(nf->kids[0]->kids[0]));
    }
  } else {
    for (int p = 0; p < info.positives; ++p) {
      Formula nf = info.list[p];
      bool all = true;
      for (int cp : coalition_positions(nf->agents, ambient))
        if (v[cp] != p) { all = false; break; }
      if (all) fs.push_back(nf->kids[0]);
    }
    if (auto q = neg_index(v, info.positives, info.negatives)) {
      Formula nf = info.list[info.positives + *q];
      bool voted_neg = true;
      for (int cp : coalition_positions(ambient.minus(nf->kids[0]->agents), ambient))
        if (v[cp] < info.positives) { voted_neg = false; break; }
      if (voted_neg) fs.push_back(arena.neg(nf->kids[0]->kids[0]));
    }
  }
  if (fs.empty()) fs.push_back(arena.top());
  return make_set(std::move(fs));
}

}  // namespace

std::vector<std::pair<MoveVector, FormulaSet>> next_prestates(FormulaArena& arena,
                                                              const FormulaSet& state,
                                                              AgentSet ambient, Mode mode,
                                                              int owner) {
  NextInfo info = make_next_info(state, ambient, mode, owner);
  std::vector<std::pair<MoveVector, FormulaSet>> out;
  out.reserve(info.dset.size());
  for (const MoveVector& v : info.dset)
    out.emplace_back(v, prestate_content(arena, info, ambient, mode, owner, v));
  return out;
}

// ---------------------------------------------------------------------------
// Pretableau construction
// ---------------------------------------------------------------------------

std::vector<std::pair<int, std::vector<int>>> Pretableau::merged_edges(int state) const {
  std::map<int, std::vector<int>> by_target;
  const auto& targets = sigma_target[state];
  for (std::size_t i = 0; i < targets.size(); ++i)
    by_target[targets[i]].push_back(static_cast<int>(i));
  return {by_target.begin(), by_target.end()};
}

AgentSet run_agents(Formula theta, Mode mode) {
  AgentSet a = agents_of(theta);
  if (mode == Mode::Loose) a.add(a.empty() ? 1 : a.max_agent() + 1);
  if (mode == Mode::TurnBased && a.empty())
    throw std::invalid_argument("turn-based mode requires at least one agent in the formula");
  if (mode == Mode::General)
    throw std::invalid_argument("general mode is decided as tight-then-loose, not built directly");
  return a;
}

namespace {

struct NodeKey {
  std::vector<std::uint32_t> ids;
  int owner;
  bool operator<(const NodeKey& o) const {
    if (owner != o.owner) return owner < o.owner;
    return ids < o.ids;
  }
};

NodeKey key_of(const FormulaSet& s, int owner) {
  NodeKey k;
  k.owner = owner;
  k.ids.reserve(s.size());
  for (Formula f : s) k.ids.push_back(f->id);
  std::sort(k.ids.begin(), k.ids.end());
  return k;
}

}  // namespace

Pretableau build_pretableau(FormulaArena& arena, Formula theta, Mode mode, std::size_t node_cap) {
  Pretableau p;
  p.arena = &arena;
  p.theta = theta;
  p.mode = mode;
  p.ambient = run_agents(theta, mode);

  std::map<NodeKey, int> state_ids, prestate_ids;
  std::deque<int> pending_prestates, pending_states;

  auto add_node = [&](FormulaSet s, bool is_state, int owner) {
    auto& ids = is_state ? state_ids : prestate_ids;
    NodeKey key = key_of(s, owner);
    auto it = ids.find(key);
    if (it != ids.end()) return std::make_pair(it->second, false);
    if (p.nodes.size() >= node_cap)
      throw ResourceLimitError("tableau node cap of " + std::to_string(node_cap) + " exceeded");
    int id = static_cast<int>(p.nodes.size());
    p.nodes.push_back({std::move(s), is_state, owner});
    p.unwind.emplace_back();
    p.next_info.emplace_back();
    p.sigma_target.emplace_back();
    ids.emplace(std::move(key), id);
    if (is_state) {
      ++p.state_count;
      pending_states.push_back(id);
    } else {
      ++p.prestate_count;
      pending_prestates.push_back(id);
    }
    return std::make_pair(id, true);
  };

  p.root = add_node(make_set({theta}), false, -1).first;

  std::vector<int> owners{-1};
  if (mode == Mode::TurnBased) owners = p.ambient.members();

  while (!pending_prestates.empty() || !pending_states.empty()) {
    // SR on every pending prestate
    while (!pending_prestates.empty()) {
      int pre = pending_prestates.front();
      pending_prestates.pop_front();
      auto extensions = saturate(arena, p.nodes[pre].formulas, p.ambient);
      for (int owner : owners) {
        for (const FormulaSet& ext : extensions) {
          int st = add_node(ext, true, owner).first;
          p.unwind[pre].push_back(st);
        }
      }
    }
    // Next on every pending state
    while (!pending_states.empty()) {
      int st = pending_states.front();
      pending_states.pop_front();
      const TableauNode& node = p.nodes[st];
      if (patently_inconsistent(node.formulas)) continue;
      NextInfo info = make_next_info(node.formulas, p.ambient, mode, node.owner);
      p.sigma_target[st].reserve(info.dset.size());
      for (const MoveVector& v : info.dset) {
        FormulaSet content = prestate_content(arena, info, p.ambient, mode, node.owner, v);
        p.sigma_target[st].push_back(add_node(std::move(content), false, -1).first);
      }
      p.next_info[st] = std::move(info);
    }
  }
  return p;
}

}  // namespace atl
