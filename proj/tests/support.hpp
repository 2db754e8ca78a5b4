#pragma once

// Test helpers: hand-built items and a reference rule checker written
// independently of the oracle (positions as std::set, not bitmasks).

#include <algorithm>
#include <optional>
#include <set>
#include <vector>

#include "raven/domain.hpp"
#include "raven/generator.hpp"

namespace raven::testing {

inline MatrixItem single_item(int type, int size, int color) {
  MatrixItem item;
  ComponentRecord comp;
  comp.layout.grid = kSingle;
  comp.layout.positions = 1;
  comp.layout.entities[0] = EntityRecord{type, size, color, kUprightOrientation};
  item.components.push_back(comp);
  return item;
}

inline ComponentRecord grid_component(int id, GridShape grid, std::vector<int> slots, int type, int size,
                                      int color) {
  ComponentRecord comp;
  comp.id = id;
  comp.layout.grid = grid;
  for (int s : slots) {
    comp.layout.positions |= SlotMask{1} << s;
    comp.layout.entities[s] = EntityRecord{type, size, color, kUprightOrientation};
  }
  return comp;
}

/// A Center puzzle from explicit rows of (type, size, color) and candidates.
inline PuzzleInstance center_puzzle(const std::array<std::array<int, 3>, 8>& given,
                                    const std::vector<std::array<int, 3>>& cands, int answer,
                                    std::vector<RuleSpec> rules) {
  PuzzleInstance p;
  p.id = "hand";
  p.subtask = SubTask::Center;
  for (int i = 0; i < 8; ++i) p.matrix.items[i] = single_item(given[i][0], given[i][1], given[i][2]);
  for (const auto& c : cands) p.candidates.candidates.push_back(single_item(c[0], c[1], c[2]));
  p.candidates.answer_index = answer;
  p.rules = std::move(rules);
  return p;
}

// ---------------------------------------------------------------------------
// Reference checker
// ---------------------------------------------------------------------------

/// Value of one governed slot: an integer for entity attributes and Number,
/// a slot set for Position. nullopt when the layout is not uniform.
struct RefValue {
  int scalar = 0;
  std::set<int> slots;
  friend bool operator==(const RefValue&, const RefValue&) = default;
};

inline std::optional<RefValue> ref_value(const MatrixItem& item, int comp, AttributeKind a) {
  const auto& lay = item.components.at(comp).layout;
  RefValue v;
  if (a == AttributeKind::Position) {
    for (const auto& [s, e] : lay.entities) v.slots.insert(s);
    return v;
  }
  if (a == AttributeKind::Number) {
    v.scalar = static_cast<int>(lay.entities.size()) - 1;
    return v;
  }
  std::set<int> seen;
  for (const auto& [s, e] : lay.entities) seen.insert(e.get(a));
  if (seen.size() != 1) return std::nullopt;
  v.scalar = *seen.begin();
  return v;
}

inline bool ref_allows(AttributeKind a, RelationType r) {
  if (a == AttributeKind::Orientation) return false;
  if (a == AttributeKind::Type) return r != RelationType::Arithmetic;
  return true;
}

inline int ref_field(AttributeKind a, int v) {
  return (a == AttributeKind::Size || a == AttributeKind::Number) ? v + 1 : v;
}

struct RefHyp {
  RelationType type;
  int param = 0;                 // step, shift or sign
  std::vector<RefValue> triple;  // DistributeThree; empty = any distinct
};

inline bool ref_holds(const RefHyp& h, AttributeKind a, int cap, const std::array<RefValue, 3>& v) {
  const bool pos = a == AttributeKind::Position;
  switch (h.type) {
    case RelationType::Constant: return v[0] == v[1] && v[1] == v[2];
    case RelationType::Progression:
      if (pos) {
        const auto shift = [&](const std::set<int>& s) {
          std::set<int> out;
          for (int x : s) out.insert((x + h.param) % cap);
          return out;
        };
        return v[1].slots == shift(v[0].slots) && v[2].slots == shift(v[1].slots);
      }
      return v[1].scalar - v[0].scalar == h.param && v[2].scalar - v[1].scalar == h.param;
    case RelationType::Arithmetic:
      if (pos) {
        std::set<int> r;
        if (h.param > 0) {
          r = v[0].slots;
          r.insert(v[1].slots.begin(), v[1].slots.end());
        } else {
          std::set_difference(v[0].slots.begin(), v[0].slots.end(), v[1].slots.begin(), v[1].slots.end(),
                              std::inserter(r, r.end()));
        }
        return !r.empty() && r == v[2].slots;
      }
      return ref_field(a, v[2].scalar) == ref_field(a, v[0].scalar) + h.param * ref_field(a, v[1].scalar);
    case RelationType::DistributeThree: {
      if (v[0] == v[1] || v[1] == v[2] || v[0] == v[2]) return false;
      if (h.triple.empty()) return true;
      for (const auto& x : v)
        if (std::find(h.triple.begin(), h.triple.end(), x) == h.triple.end()) return false;
      return true;
    }
  }
  return false;
}

inline std::vector<RefHyp> ref_hypotheses(AttributeKind a, int cap, const std::vector<std::array<RefValue, 3>>& ctx) {
  std::vector<RefHyp> all;
  if (ref_allows(a, RelationType::Constant)) all.push_back({RelationType::Constant, 0, {}});
  if (a == AttributeKind::Position) {
    for (int k = 1; k < cap; ++k) all.push_back({RelationType::Progression, k, {}});
  } else {
    for (int k : {-2, -1, 1, 2}) all.push_back({RelationType::Progression, k, {}});
  }
  if (ref_allows(a, RelationType::Arithmetic)) {
    all.push_back({RelationType::Arithmetic, 1, {}});
    all.push_back({RelationType::Arithmetic, -1, {}});
  }
  if (ctx.empty()) all.push_back({RelationType::DistributeThree, 0, {}});
  else all.push_back({RelationType::DistributeThree, 0, {ctx[0][0], ctx[0][1], ctx[0][2]}});
  std::vector<RefHyp> kept;
  for (const auto& h : all)
    if (std::all_of(ctx.begin(), ctx.end(), [&](const auto& row) { return ref_holds(h, a, cap, row); }))
      kept.push_back(h);
  return kept;
}

/// Candidates consistent with every slot under the visible rows.
inline std::vector<int> ref_consistent(const PuzzleInstance& p) {
  const auto tmpl = components_of(p.subtask);
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(p.candidates.candidates.size()); ++i) {
    const auto& cand = p.candidates.candidates[i];
    bool ok = true;
    for (int c = 0; c < static_cast<int>(tmpl.size()) && ok; ++c) {
      const int cap = tmpl[c].grid.capacity();
      for (auto a : tmpl[c].governed) {
        std::vector<std::array<RefValue, 3>> ctx;
        bool defined = true;
        for (int r = 3 - p.rows_included; r < 2; ++r) {
          std::array<RefValue, 3> row;
          for (int k = 0; k < 3; ++k) {
            auto v = ref_value(p.matrix.at(r, k), c, a);
            if (!v) defined = false;
            else row[k] = *v;
          }
          ctx.push_back(row);
        }
        const auto x = ref_value(p.matrix.at(2, 0), c, a), y = ref_value(p.matrix.at(2, 1), c, a),
                   z = ref_value(cand, c, a);
        if (!defined || !x || !y || !z) {
          ok = false;
          break;
        }
        const auto hyps = ref_hypotheses(a, cap, ctx);
        if (std::none_of(hyps.begin(), hyps.end(),
                         [&](const RefHyp& h) { return ref_holds(h, a, cap, {*x, *y, *z}); })) {
          ok = false;
          break;
        }
      }
    }
    if (ok) out.push_back(i);
  }
  return out;
}

/// Whether the generating rule for (c, a) holds on all three rows with the
/// answer in place, checked with the reference semantics.
inline bool ref_rule_holds(const PuzzleInstance& p, const RuleSpec& rule) {
  const auto tmpl = components_of(p.subtask);
  const int cap = tmpl.at(rule.component).grid.capacity();
  RefHyp h{rule.relation.type, 0, {}};
  if (rule.relation.type == RelationType::Progression) h.param = rule.relation.step;
  if (rule.relation.type == RelationType::Arithmetic) h.param = rule.relation.sign;
  if (rule.relation.type == RelationType::Progression && rule.attribute == AttributeKind::Position)
    h.param = ((rule.relation.step % cap) + cap) % cap;
  if (rule.relation.type == RelationType::DistributeThree) {
    for (int x : rule.relation.values) {
      RefValue v;
      if (rule.attribute == AttributeKind::Position) {
        for (int s = 0; s < cap; ++s)
          if ((x >> s) & 1) v.slots.insert(s);
      } else {
        v.scalar = x;
      }
      h.triple.push_back(v);
    }
  }
  for (int r = 0; r < 3; ++r) {
    std::array<RefValue, 3> row;
    for (int k = 0; k < 3; ++k) {
      const auto& item = (r == 2 && k == 2) ? p.answer() : p.matrix.at(r, k);
      auto v = ref_value(item, rule.component, rule.attribute);
      if (!v) return false;
      row[k] = *v;
    }
    if (!ref_holds(h, rule.attribute, cap, row)) return false;
  }
  return true;
}

}  // namespace raven::testing
