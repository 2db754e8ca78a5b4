#pragma once

// Exact rule-induction solver. Induces every relation parameterization that
// holds on the visible complete rows, then accepts a candidate when each
// governed slot has at least one surviving hypothesis that also holds on the
// completed third row.

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "raven/domain.hpp"

namespace raven::oracle {

using Row = std::array<int, 3>;

/// Value of one governed slot in one item. Entity attributes must be uniform
/// across the layout; Number is the count index; Position is the slot mask.
inline std::optional<int> slot_value(const MatrixItem& item, Slot slot) {
  if (slot.component < 0 || slot.component >= static_cast<int>(item.components.size()))
    return std::nullopt;
  const auto& lay = item.components[slot.component].layout;
  switch (slot.attribute) {
    case AttributeKind::Number:
      return lay.count() > 0 ? std::optional<int>(lay.number_index()) : std::nullopt;
    case AttributeKind::Position:
      return lay.positions ? std::optional<int>(static_cast<int>(lay.positions)) : std::nullopt;
    default: return lay.uniform_value(slot.attribute);
  }
}

/// Cyclic shift of occupied slots in row-major order.
inline SlotMask rotate_slots(SlotMask m, int shift, int capacity) {
  if (capacity <= 0) return m;
  shift = ((shift % capacity) + capacity) % capacity;
  SlotMask out = 0;
  for (int s = 0; s < capacity; ++s)
    if ((m >> s) & 1u) out |= SlotMask{1} << ((s + shift) % capacity);
  return out;
}

namespace detail {
inline bool same_set(const Row& a, const Row& b) {
  auto x = a, y = b;
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  return x == y;
}
inline bool distinct(const Row& r) { return r[0] != r[1] && r[1] != r[2] && r[0] != r[2]; }
}  // namespace detail

/// Whether one row triple satisfies `relation` for attribute `kind`.
/// Throws DomainError when the relation cannot govern the attribute.
inline bool relation_holds(const Relation& relation, AttributeKind kind, GridShape grid,
                           const Row& v) {
  if (!is_compatible(kind, relation.type))
    throw DomainError(std::string(to_string(relation.type)) + " cannot govern " +
                      std::string(to_string(kind)));
  const bool position = kind == AttributeKind::Position;
  switch (relation.type) {
    case RelationType::Constant: return v[0] == v[1] && v[1] == v[2];
    case RelationType::Progression:
      if (position) {
        const int cap = grid.capacity();
        const auto m = [&](int i) { return static_cast<SlotMask>(v[i]); };
        return m(1) == rotate_slots(m(0), relation.step, cap) &&
               m(2) == rotate_slots(m(1), relation.step, cap);
      }
      return v[1] == v[0] + relation.step && v[2] == v[1] + relation.step;
    case RelationType::Arithmetic:
      if (position) {
        const auto a = static_cast<SlotMask>(v[0]), b = static_cast<SlotMask>(v[1]),
                   c = static_cast<SlotMask>(v[2]);
        return c != 0 && c == (relation.sign > 0 ? (a | b) : (a & ~b));
      }
      return numeric_field(kind, v[2]) ==
             numeric_field(kind, v[0]) + relation.sign * numeric_field(kind, v[1]);
    case RelationType::DistributeThree:
      return detail::distinct(relation.values) && detail::same_set(v, relation.values);
  }
  return false;
}

struct Hypothesis {
  Slot slot;
  Relation relation;
  /// DistributeThree with no complete row to fix its triple; accepts any
  /// row of three distinct values.
  bool open_triple = false;
};

/// All parameterizations of compatible relations that hold on every row in
/// `complete_rows`.
inline std::vector<Hypothesis> induce_slot(Slot slot, GridShape grid,
                                           std::span<const Row> complete_rows) {
  std::vector<Hypothesis> out;
  const auto holds_all = [&](const Relation& r) {
    for (const auto& row : complete_rows)
      if (!relation_holds(r, slot.attribute, grid, row)) return false;
    return true;
  };
  for (auto type : compatible_relations(slot.attribute)) {
    switch (type) {
      case RelationType::Constant:
        if (holds_all(Relation::constant())) out.push_back({slot, Relation::constant()});
        break;
      case RelationType::Progression:
        if (slot.attribute == AttributeKind::Position) {
          for (int k = 1; k < grid.capacity(); ++k)
            if (holds_all(Relation::progression(k))) out.push_back({slot, Relation::progression(k)});
        } else {
          for (int k : {-2, -1, 1, 2})
            if (holds_all(Relation::progression(k))) out.push_back({slot, Relation::progression(k)});
        }
        break;
      case RelationType::Arithmetic:
        for (int s : {1, -1})
          if (holds_all(Relation::arithmetic(s))) out.push_back({slot, Relation::arithmetic(s)});
        break;
      case RelationType::DistributeThree:
        if (complete_rows.empty()) {
          out.push_back({slot, Relation::distribute_three({}), true});
        } else if (detail::distinct(complete_rows.front())) {
          const auto r = Relation::distribute_three(complete_rows.front());
          if (holds_all(r)) out.push_back({slot, r});
        }
        break;
    }
  }
  return out;
}

/// Hypothesis check on a completed third row.
inline bool hypothesis_accepts(const Hypothesis& h, GridShape grid, const Row& row3) {
  if (h.open_triple) return detail::distinct(row3);
  return relation_holds(h.relation, h.slot.attribute, grid, row3);
}

/// Two relations describe the same pattern (triples compare as sets,
/// position shifts compare modulo capacity).
inline bool equivalent(const Relation& a, const Relation& b, AttributeKind kind, GridShape grid) {
  if (a.type != b.type) return false;
  switch (a.type) {
    case RelationType::Constant: return true;
    case RelationType::Progression:
      if (kind == AttributeKind::Position) {
        const int cap = grid.capacity();
        return ((a.step % cap) + cap) % cap == ((b.step % cap) + cap) % cap;
      }
      return a.step == b.step;
    case RelationType::Arithmetic: return a.sign == b.sign;
    case RelationType::DistributeThree: return detail::same_set(a.values, b.values);
  }
  return false;
}

/// Hypotheses for every governed slot of `puzzle`, in governed_slots order,
/// induced from the rows visible at puzzle.rows_included.
inline std::vector<std::vector<Hypothesis>> induce(const PuzzleInstance& puzzle) {
  const auto slots = governed_slots(puzzle.subtask);
  const auto tmpl = components_of(puzzle.subtask);
  const auto rows = context_rows(puzzle.rows_included);
  std::vector<std::vector<Hypothesis>> out;
  out.reserve(slots.size());
  for (const auto& slot : slots) {
    std::vector<Row> complete;
    bool missing = false;
    for (int r : rows) {
      Row row{};
      for (int c = 0; c < 3; ++c) {
        auto v = slot_value(puzzle.matrix.at(r, c), slot);
        if (!v) missing = true;
        else row[c] = *v;
      }
      complete.push_back(row);
    }
    out.push_back(missing ? std::vector<Hypothesis>{}
                          : induce_slot(slot, tmpl[slot.component].grid, complete));
  }
  return out;
}

/// Whether `candidate` completes row 3 under `h`.
inline bool consistent(const Matrix& matrix, const Hypothesis& h, GridShape grid,
                       const MatrixItem& candidate) {
  const auto a = slot_value(matrix.at(2, 0), h.slot);
  const auto b = slot_value(matrix.at(2, 1), h.slot);
  const auto c = slot_value(candidate, h.slot);
  if (!a || !b || !c) return false;
  return hypothesis_accepts(h, grid, {*a, *b, *c});
}

struct Solution {
  std::vector<int> consistent;
  std::optional<int> chosen;
};

inline Solution solve(const PuzzleInstance& puzzle) {
  const auto hyps = induce(puzzle);
  const auto tmpl = components_of(puzzle.subtask);
  const auto slots = governed_slots(puzzle.subtask);
  Solution sol;
  const auto& cands = puzzle.candidates.candidates;
  for (int i = 0; i < static_cast<int>(cands.size()); ++i) {
    bool ok = true;
    for (std::size_t s = 0; ok && s < slots.size(); ++s) {
      const auto grid = tmpl[slots[s].component].grid;
      bool any = false;
      for (const auto& h : hyps[s])
        if (consistent(puzzle.matrix, h, grid, cands[i])) {
          any = true;
          break;
        }
      ok = any;
    }
    if (ok) sol.consistent.push_back(i);
  }
  if (sol.consistent.size() == 1) sol.chosen = sol.consistent.front();
  return sol;
}

}  // namespace raven::oracle
