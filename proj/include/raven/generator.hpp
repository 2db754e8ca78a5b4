#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <ostream>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "raven/domain.hpp"
#include "raven/oracle.hpp"

namespace raven {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; derives independent per-puzzle streams.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t child_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(mix64(seed) ^ (index + 1) * 0xd1b54a32d192ed03ULL);
}

inline int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& xs) {
  return xs.at(uniform_int(rng, 0, static_cast<int>(xs.size()) - 1));
}

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GeneratorConfig {
  SubTask subtask = SubTask::Center;
  GenerationMode mode = GenerationMode::Raven;
  std::uint64_t seed = 0;
  int count = 1;
  bool noise_orientation = false;
};

namespace gen_detail {

/// Uniformly random mask with exactly `count` of `capacity` slots set.
inline SlotMask random_mask(Rng& rng, int capacity, int count) {
  std::vector<int> slots(capacity);
  for (int i = 0; i < capacity; ++i) slots[i] = i;
  std::shuffle(slots.begin(), slots.end(), rng);
  SlotMask m = 0;
  for (int i = 0; i < count; ++i) m |= SlotMask{1} << slots[i];
  return m;
}

/// `count` random slots drawn from `pool`.
inline SlotMask random_subset(Rng& rng, SlotMask pool, int count) {
  auto slots = slots_of(pool);
  std::shuffle(slots.begin(), slots.end(), rng);
  SlotMask m = 0;
  for (int i = 0; i < count; ++i) m |= SlotMask{1} << slots.at(i);
  return m;
}

inline std::array<int, 3> distinct_values(Rng& rng, int n) {
  std::vector<int> v(n);
  for (int i = 0; i < n; ++i) v[i] = i;
  std::shuffle(v.begin(), v.end(), rng);
  return {v[0], v[1], v[2]};
}

/// Layout rule pairs: Number and Position describe the same occupancy, so
/// their relations are drawn jointly.
enum class LayoutPair {
  ConstConst,        // fixed set per row
  ConstShift,        // set shifted cyclically
  ConstDistribute,   // three sets of equal size
  DistributeBoth,    // three sets of distinct sizes
  AddUnion,          // disjoint union
  SubDifference,     // subset removal
  StepUnion,         // counts progress upward via overlapping union
  StepDifference,    // counts progress downward via set difference
};

inline bool step_union_feasible(int d, int cap) { return d + 2 * d <= cap; }  // c = d minimal
inline bool step_difference_feasible(int e, int cap) {
  // c in [3e, (cap + 3e) / 2]
  return 3 * e <= (cap + 3 * e) / 2 && 3 * e <= cap;
}

inline std::pair<RuleSpec, RuleSpec> sample_layout_rules(int comp, GridShape grid, Rng& rng) {
  const int cap = grid.capacity();
  std::vector<LayoutPair> pairs = {LayoutPair::ConstConst,     LayoutPair::ConstShift,
                                   LayoutPair::ConstDistribute, LayoutPair::DistributeBoth,
                                   LayoutPair::AddUnion,        LayoutPair::SubDifference};
  std::vector<int> up_steps, down_steps;
  for (int d : {1, 2}) {
    if (step_union_feasible(d, cap)) up_steps.push_back(d);
    if (step_difference_feasible(d, cap)) down_steps.push_back(d);
  }
  if (!up_steps.empty()) pairs.push_back(LayoutPair::StepUnion);
  if (!down_steps.empty()) pairs.push_back(LayoutPair::StepDifference);

  RuleSpec number{comp, AttributeKind::Number, Relation::constant()};
  RuleSpec position{comp, AttributeKind::Position, Relation::constant()};
  switch (pick(rng, pairs)) {
    case LayoutPair::ConstConst: break;
    case LayoutPair::ConstShift:
      position.relation = Relation::progression(pick(rng, std::vector<int>{-2, -1, 1, 2}));
      break;
    case LayoutPair::ConstDistribute: {
      const int c = uniform_int(rng, 1, cap - 1);
      std::array<int, 3> masks{};
      for (int i = 0; i < 3; ++i) {
        SlotMask m;
        do {
          m = random_mask(rng, cap, c);
        } while (std::find(masks.begin(), masks.begin() + i, static_cast<int>(m)) != masks.begin() + i);
        masks[i] = static_cast<int>(m);
      }
      position.relation = Relation::distribute_three(masks);
      break;
    }
    case LayoutPair::DistributeBoth: {
      const auto counts = distinct_values(rng, cap);  // count indices
      std::array<int, 3> masks{};
      for (int i = 0; i < 3; ++i) masks[i] = static_cast<int>(random_mask(rng, cap, counts[i] + 1));
      number.relation = Relation::distribute_three(counts);
      position.relation = Relation::distribute_three(masks);
      break;
    }
    case LayoutPair::AddUnion:
      number.relation = Relation::arithmetic(1);
      position.relation = Relation::arithmetic(1);
      break;
    case LayoutPair::SubDifference:
      number.relation = Relation::arithmetic(-1);
      position.relation = Relation::arithmetic(-1);
      break;
    case LayoutPair::StepUnion:
      number.relation = Relation::progression(pick(rng, up_steps));
      position.relation = Relation::arithmetic(1);
      break;
    case LayoutPair::StepDifference:
      number.relation = Relation::progression(-pick(rng, down_steps));
      position.relation = Relation::arithmetic(-1);
      break;
  }
  return {number, position};
}

inline Relation sample_entity_relation(AttributeKind kind, Rng& rng) {
  const auto type = pick(rng, compatible_relations(kind));
  switch (type) {
    case RelationType::Constant: return Relation::constant();
    case RelationType::Progression:
      return Relation::progression(pick(rng, std::vector<int>{-2, -1, 1, 2}));
    case RelationType::Arithmetic: return Relation::arithmetic(uniform_int(rng, 0, 1) ? 1 : -1);
    case RelationType::DistributeThree:
      return Relation::distribute_three(distinct_values(rng, domain_size(kind)));
  }
  return Relation::constant();
}

/// Operand pairs (index1, index2) whose arithmetic result stays in-domain.
/// Both operands are non-zero on the numeric field.
inline std::vector<std::array<int, 3>> arithmetic_rows(AttributeKind kind, int sign, int n) {
  std::vector<std::array<int, 3>> out;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const int fa = numeric_field(kind, a), fb = numeric_field(kind, b);
      if (fa < 1 || fb < 1) continue;
      const int c = index_from_field(kind, fa + sign * fb);
      if (c >= 0 && c < n) out.push_back({a, b, c});
    }
  return out;
}

using SlotRows = std::array<std::array<int, 3>, 3>;

inline SlotRows realize_entity_rows(const RuleSpec& rule, std::optional<int> fixed, Rng& rng) {
  const int n = domain_size(rule.attribute);
  SlotRows rows{};
  const auto& rel = rule.relation;
  for (int r = 0; r < 3; ++r) {
    switch (rel.type) {
      case RelationType::Constant: {
        int v = fixed.value_or(-1);
        if (v < 0) v = uniform_int(rng, 0, n - 1);
        rows[r] = {v, v, v};
        break;
      }
      case RelationType::Progression: {
        const int lo = std::max(0, -2 * rel.step), hi = std::min(n - 1, n - 1 - 2 * rel.step);
        if (lo > hi) throw GenerationError("progression step infeasible for domain");
        const int v = uniform_int(rng, lo, hi);
        rows[r] = {v, v + rel.step, v + 2 * rel.step};
        break;
      }
      case RelationType::Arithmetic: {
        const auto options = arithmetic_rows(rule.attribute, rel.sign, n);
        if (options.empty()) throw GenerationError("arithmetic infeasible for domain");
        rows[r] = pick(rng, options);
        break;
      }
      case RelationType::DistributeThree:
        for (int c = 0; c < 3; ++c) rows[r][c] = rel.values[(c + r) % 3];
        break;
    }
  }
  return rows;
}

/// Row-wise slot masks for a grid component, jointly satisfying the Number
/// and Position rules.
inline SlotRows realize_layout_rows(const RuleSpec& number, const RuleSpec& position,
                                    GridShape grid, Rng& rng) {
  const int cap = grid.capacity();
  const SlotMask all = full_mask(grid);
  SlotRows rows{};
  const auto nt = number.relation.type, pt = position.relation.type;
  for (int r = 0; r < 3; ++r) {
    SlotMask s1 = 0, s2 = 0, s3 = 0;
    if (nt == RelationType::Constant && pt == RelationType::Constant) {
      s1 = s2 = s3 = random_mask(rng, cap, uniform_int(rng, 1, cap));
    } else if (nt == RelationType::Constant && pt == RelationType::Progression) {
      s1 = random_mask(rng, cap, uniform_int(rng, 1, cap - 1));
      s2 = oracle::rotate_slots(s1, position.relation.step, cap);
      s3 = oracle::rotate_slots(s2, position.relation.step, cap);
    } else if (pt == RelationType::DistributeThree) {
      const auto& v = position.relation.values;
      s1 = static_cast<SlotMask>(v[r % 3]);
      s2 = static_cast<SlotMask>(v[(r + 1) % 3]);
      s3 = static_cast<SlotMask>(v[(r + 2) % 3]);
    } else if (nt == RelationType::Arithmetic && pt == RelationType::Arithmetic &&
               position.relation.sign > 0) {
      const int c1 = uniform_int(rng, 1, cap - 1);
      const int c2 = uniform_int(rng, 1, cap - c1);
      s1 = random_mask(rng, cap, c1);
      s2 = random_subset(rng, all & ~s1, c2);
      s3 = s1 | s2;
    } else if (nt == RelationType::Arithmetic && pt == RelationType::Arithmetic) {
      const int c1 = uniform_int(rng, 2, cap);
      const int c2 = uniform_int(rng, 1, c1 - 1);
      s1 = random_mask(rng, cap, c1);
      s2 = random_subset(rng, s1, c2);
      s3 = s1 & ~s2;
    } else if (nt == RelationType::Progression && pt == RelationType::Arithmetic &&
               number.relation.step > 0) {
      const int d = number.relation.step;
      const int c = uniform_int(rng, d, cap - 2 * d);
      s1 = random_mask(rng, cap, c);
      s2 = random_subset(rng, s1, c - d) | random_subset(rng, all & ~s1, 2 * d);
      s3 = s1 | s2;
    } else if (nt == RelationType::Progression && pt == RelationType::Arithmetic) {
      const int e = -number.relation.step;
      const int c = uniform_int(rng, 3 * e, (cap + 3 * e) / 2);
      s1 = random_mask(rng, cap, c);
      s2 = random_subset(rng, s1, 2 * e) | random_subset(rng, all & ~s1, c - 3 * e);
      s3 = s1 & ~s2;
    } else {
      throw GenerationError("unsupported number/position rule pair");
    }
    rows[r] = {static_cast<int>(s1), static_cast<int>(s2), static_cast<int>(s3)};
  }
  return rows;
}

inline const RuleSpec& find_rule(const std::vector<RuleSpec>& rules, int comp, AttributeKind a) {
  for (const auto& r : rules)
    if (r.component == comp && r.attribute == a) return r;
  throw GenerationError("missing rule for c" + std::to_string(comp) + "." +
                        std::string(to_string(a)));
}

}  // namespace gen_detail

/// One rule per governed (component, attribute) slot.
inline std::vector<RuleSpec> sample_rules(SubTask subtask, Rng& rng) {
  std::vector<RuleSpec> rules;
  const auto tmpl = components_of(subtask);
  for (int c = 0; c < static_cast<int>(tmpl.size()); ++c) {
    const auto& t = tmpl[c];
    std::optional<std::pair<RuleSpec, RuleSpec>> layout;
    if (t.grid.capacity() > 1) layout = gen_detail::sample_layout_rules(c, t.grid, rng);
    for (auto a : t.governed) {
      if (a == AttributeKind::Number) {
        rules.push_back(layout->first);
      } else if (a == AttributeKind::Position) {
        rules.push_back(layout->second);
      } else if (a == AttributeKind::Color && t.fixed_color) {
        rules.push_back({c, a, Relation::constant()});
      } else {
        rules.push_back({c, a, gen_detail::sample_entity_relation(a, rng)});
      }
    }
  }
  return rules;
}

struct Realization {
  Matrix matrix;
  MatrixItem answer;
};

/// Builds all nine items so that every rule holds on each row. Row starting
/// values are drawn independently per row.
inline Realization realize_matrix(const std::vector<RuleSpec>& rules, SubTask subtask, Rng& rng,
                                  bool noise_orientation = false) {
  const auto tmpl = components_of(subtask);
  std::array<MatrixItem, 9> cells;
  for (auto& cell : cells) cell.components.resize(tmpl.size());

  for (int c = 0; c < static_cast<int>(tmpl.size()); ++c) {
    const auto& t = tmpl[c];
    gen_detail::SlotRows masks{};
    if (t.grid.capacity() > 1) {
      masks = gen_detail::realize_layout_rows(
          gen_detail::find_rule(rules, c, AttributeKind::Number),
          gen_detail::find_rule(rules, c, AttributeKind::Position), t.grid, rng);
    } else {
      for (auto& row : masks) row = {1, 1, 1};
    }
    std::array<gen_detail::SlotRows, 3> attr{};
    const std::array<AttributeKind, 3> entity_kinds = {AttributeKind::Type, AttributeKind::Size,
                                                       AttributeKind::Color};
    for (int k = 0; k < 3; ++k) {
      const auto kind = entity_kinds[k];
      const int fixed = kind == AttributeKind::Color ? t.fixed_color.value_or(-1) : -1;
      attr[k] = gen_detail::realize_entity_rows(gen_detail::find_rule(rules, c, kind),
                                                fixed < 0 ? std::nullopt : std::optional<int>(fixed), rng);
    }
    const int orientation_row_default = kUprightOrientation;
    for (int r = 0; r < 3; ++r)
      for (int col = 0; col < 3; ++col) {
        auto& comp = cells[r * 3 + col].components[c];
        comp.id = c;
        comp.layout.grid = t.grid;
        comp.layout.positions = static_cast<SlotMask>(masks[r][col]);
        for (int s : slots_of(comp.layout.positions)) {
          EntityRecord e;
          e.type = attr[0][r][col];
          e.size = attr[1][r][col];
          e.color = attr[2][r][col];
          e.orientation = noise_orientation ? uniform_int(rng, 0, domain_size(AttributeKind::Orientation) - 1)
                                            : orientation_row_default;
          comp.layout.entities.emplace(s, e);
        }
      }
  }
  Realization out;
  for (int i = 0; i < 8; ++i) out.matrix.items[i] = cells[i];
  out.answer = cells[8];
  return out;
}

// ---------------------------------------------------------------------------
// Candidate generation
// ---------------------------------------------------------------------------

/// Slots whose value may be changed to build a distractor.
inline std::vector<Slot> perturbable_slots(SubTask subtask) {
  std::vector<Slot> out;
  const auto tmpl = components_of(subtask);
  for (const auto& s : governed_slots(subtask)) {
    if (s.attribute == AttributeKind::Color && tmpl[s.component].fixed_color) continue;
    out.push_back(s);
  }
  return out;
}

/// A single-slot edit of an item: a new entity value, or a new slot mask.
struct Perturbation {
  Slot slot;
  int value;
};

/// Draws a value for `slot` different from the one in `item`; nullopt when
/// the slot has no alternative (e.g. Position of a full grid).
inline std::optional<Perturbation> draw_perturbation(const MatrixItem& item, Slot slot, Rng& rng) {
  const auto& lay = item.components.at(slot.component).layout;
  const int cap = lay.grid.capacity();
  switch (slot.attribute) {
    case AttributeKind::Number: {
      if (cap < 2) return std::nullopt;
      int c;
      do {
        c = uniform_int(rng, 1, cap);
      } while (c == lay.count());
      return Perturbation{slot, static_cast<int>(gen_detail::random_mask(rng, cap, c))};
    }
    case AttributeKind::Position: {
      if (lay.count() >= cap) return std::nullopt;
      SlotMask m;
      do {
        m = gen_detail::random_mask(rng, cap, lay.count());
      } while (m == lay.positions);
      return Perturbation{slot, static_cast<int>(m)};
    }
    default: {
      const int n = domain_size(slot.attribute);
      const auto cur = lay.uniform_value(slot.attribute).value_or(-1);
      int v;
      do {
        v = uniform_int(rng, 0, n - 1);
      } while (v == cur);
      return Perturbation{slot, v};
    }
  }
}

inline void apply_perturbation(MatrixItem& item, const Perturbation& p) {
  auto& lay = item.components.at(p.slot.component).layout;
  if (p.slot.attribute == AttributeKind::Number || p.slot.attribute == AttributeKind::Position) {
    const EntityRecord proto = lay.entities.begin()->second;
    lay.reposition(static_cast<SlotMask>(p.value), proto);
  } else {
    lay.set_all(p.slot.attribute, p.value);
  }
}

/// Seven distractors, each the answer with one governed slot re-sampled.
inline CandidateSet gen_candidates_raven(const MatrixItem& answer, SubTask subtask, Rng& rng) {
  const auto slots = perturbable_slots(subtask);
  std::vector<MatrixItem> items{answer};
  constexpr int kRetries = 64;
  while (items.size() < 8) {
    bool placed = false;
    for (int width = 1; width <= 2 && !placed; ++width) {
      for (int attempt = 0; attempt < kRetries && !placed; ++attempt) {
        MatrixItem d = answer;
        std::vector<Slot> used;
        for (int w = 0; w < width; ++w) {
          Slot s = pick(rng, slots);
          if (std::find(used.begin(), used.end(), s) != used.end()) continue;
          if (auto p = draw_perturbation(d, s, rng)) {
            apply_perturbation(d, *p);
            used.push_back(s);
          }
        }
        if (std::find(items.begin(), items.end(), d) == items.end()) {
          items.push_back(std::move(d));
          placed = true;
        }
      }
    }
    if (!placed) throw GenerationError("could not find a distinct distractor");
  }
  CandidateSet set;
  set.answer_index = uniform_int(rng, 0, 7);
  MatrixItem ans = items.front();
  items.erase(items.begin());
  items.insert(items.begin() + set.answer_index, std::move(ans));
  set.candidates = std::move(items);
  return set;
}

struct ImpartialCandidates {
  CandidateSet set;
  std::vector<Slot> perturbed;
  bool fallback = false;
};

/// Attribute-bisection tree of depth three: the eight candidates are the
/// answer with every subset of three chosen slots replaced by one
/// alternative value each.
inline ImpartialCandidates gen_candidates_impartial(const MatrixItem& answer, SubTask subtask,
                                                    Rng& rng) {
  ImpartialCandidates out;
  auto pool = perturbable_slots(subtask);
  std::erase_if(pool, [&](Slot s) {
    return s.attribute == AttributeKind::Position &&
           answer.components.at(s.component).layout.count() >=
               answer.components.at(s.component).layout.grid.capacity();
  });
  std::shuffle(pool.begin(), pool.end(), rng);
  // Number and Position of one layout move together, so at most one of them.
  std::vector<Slot> chosen;
  for (const auto& s : pool) {
    if (chosen.size() == 3) break;
    const bool layout = s.attribute == AttributeKind::Number || s.attribute == AttributeKind::Position;
    const bool clash = layout && std::any_of(chosen.begin(), chosen.end(), [&](Slot o) {
                         return o.component == s.component &&
                                (o.attribute == AttributeKind::Number ||
                                 o.attribute == AttributeKind::Position);
                       });
    if (!clash) chosen.push_back(s);
  }
  if (chosen.size() < 3) {
    out.set = gen_candidates_raven(answer, subtask, rng);
    out.fallback = true;
    return out;
  }
  // Layout edits first so that entity edits reach newly created slots.
  std::stable_sort(chosen.begin(), chosen.end(), [](Slot a, Slot b) {
    return !is_entity_level(a.attribute) && is_entity_level(b.attribute);
  });
  std::vector<Perturbation> alts;
  for (const auto& s : chosen) alts.push_back(*draw_perturbation(answer, s, rng));

  std::vector<MatrixItem> items;
  for (int subset = 0; subset < 8; ++subset) {
    MatrixItem m = answer;
    for (int b = 0; b < 3; ++b)
      if ((subset >> b) & 1) apply_perturbation(m, alts[b]);
    items.push_back(std::move(m));
  }
  std::vector<int> order(8);
  for (int i = 0; i < 8; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  for (int i = 0; i < 8; ++i) {
    out.set.candidates.push_back(items[order[i]]);
    if (order[i] == 0) out.set.answer_index = i;
  }
  out.perturbed = chosen;
  return out;
}

// ---------------------------------------------------------------------------
// Whole puzzles
// ---------------------------------------------------------------------------

inline std::string puzzle_id(const GeneratorConfig& cfg, int index) {
  return std::string(to_string(cfg.subtask)) + "-" + std::string(to_string(cfg.mode)) + "-" +
         std::to_string(cfg.seed) + "-" + std::to_string(index);
}

/// The `index`-th puzzle of `cfg`. Resamples until the oracle singles out
/// the answer.
inline PuzzleInstance generate_one(const GeneratorConfig& cfg, int index) {
  // Sub-tasks with the same component shapes would otherwise draw identical
  // streams. The mode is left out so both modes share rules and matrices.
  const auto stream = child_seed(cfg.seed, 0x100 + static_cast<std::uint64_t>(cfg.subtask));
  const auto seed = child_seed(stream, static_cast<std::uint64_t>(index));
  Rng rng(seed);
  PuzzleInstance p;
  p.id = puzzle_id(cfg, index);
  p.subtask = cfg.subtask;
  p.mode = cfg.mode;
  p.seed = seed;
  constexpr int kMatrixAttempts = 1000, kCandidateAttempts = 16;
  for (int attempt = 0; attempt < kMatrixAttempts; ++attempt) {
    p.rules = sample_rules(cfg.subtask, rng);
    auto real = realize_matrix(p.rules, cfg.subtask, rng, cfg.noise_orientation);
    p.matrix = real.matrix;
    for (int c = 0; c < kCandidateAttempts; ++c) {
      try {
        if (cfg.mode == GenerationMode::Impartial) {
          auto imp = gen_candidates_impartial(real.answer, cfg.subtask, rng);
          p.candidates = std::move(imp.set);
          p.fallback_warning = imp.fallback;
        } else {
          p.candidates = gen_candidates_raven(real.answer, cfg.subtask, rng);
          p.fallback_warning = false;
        }
      } catch (const GenerationError&) {
        break;
      }
      const auto sol = oracle::solve(p);
      if (sol.chosen && *sol.chosen == p.candidates.answer_index) return p;
    }
  }
  throw GenerationError("no uniquely solvable puzzle found for " + p.id);
}

/// `cfg.count` puzzles; identical for any thread count.
inline std::vector<PuzzleInstance> generate(const GeneratorConfig& cfg, unsigned threads = 1) {
  if (cfg.count < 1) throw std::invalid_argument("count must be >= 1");
  std::vector<PuzzleInstance> out(cfg.count);
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(cfg.count)));
  if (threads == 1) {
    for (int i = 0; i < cfg.count; ++i) out[i] = generate_one(cfg, i);
    return out;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        try {
          for (int i = static_cast<int>(t); i < cfg.count; i += static_cast<int>(threads))
            out[i] = generate_one(cfg, i);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

/// JSONL, one puzzle per line.
inline void write_jsonl(std::ostream& os, const std::vector<PuzzleInstance>& puzzles) {
  for (const auto& p : puzzles) os << nlohmann::json(p).dump() << '\n';
  if (!os) throw std::runtime_error("failed writing puzzles");
}

inline std::vector<PuzzleInstance> read_jsonl(std::istream& is) {
  std::vector<PuzzleInstance> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    out.push_back(nlohmann::json::parse(line).get<PuzzleInstance>());
  }
  return out;
}

}  // namespace raven
