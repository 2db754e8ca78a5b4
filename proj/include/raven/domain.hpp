#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cstdlib>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace raven {

// ---------------------------------------------------------------------------
// Attributes and value domains
// ---------------------------------------------------------------------------

enum class AttributeKind { Type, Size, Color, Orientation, Number, Position };

inline constexpr std::array<AttributeKind, 4> kEntityAttributes = {
    AttributeKind::Type, AttributeKind::Size, AttributeKind::Color,
    AttributeKind::Orientation};

constexpr bool is_entity_level(AttributeKind kind) {
  return kind == AttributeKind::Type || kind == AttributeKind::Size ||
         kind == AttributeKind::Color || kind == AttributeKind::Orientation;
}

struct GridShape {
  int rows = 1;
  int cols = 1;

  constexpr int capacity() const { return rows * cols; }
  friend constexpr bool operator==(GridShape, GridShape) = default;
};

inline constexpr GridShape kSingle{1, 1};
inline constexpr GridShape kGrid2x2{2, 2};
inline constexpr GridShape kGrid3x3{3, 3};

struct AttributeValue {
  AttributeKind kind;
  int index;

  friend constexpr bool operator==(AttributeValue, AttributeValue) = default;
  friend constexpr auto operator<=>(AttributeValue a, AttributeValue b) {
    return a.index <=> b.index;
  }
};

class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Entity attributes have fixed domains; Number is bounded by the grid.
// Position has no ordered domain (it is a subset of slots).
inline int domain_size(AttributeKind kind, GridShape grid = kSingle) {
  switch (kind) {
    case AttributeKind::Type: return 5;
    case AttributeKind::Size: return 6;
    case AttributeKind::Color: return 10;
    case AttributeKind::Orientation: return 8;
    case AttributeKind::Number: return grid.capacity();
    case AttributeKind::Position: break;
  }
  throw DomainError("position has no ordered value domain");
}

inline std::vector<AttributeValue> domain_of(AttributeKind kind,
                                             GridShape grid = kSingle) {
  const int n = domain_size(kind, grid);
  std::vector<AttributeValue> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back({kind, i});
  return out;
}

/// Integer carrier used by Arithmetic. Size uses index+1 so that the
/// smallest size is a non-zero operand; Number uses the entity count.
inline int numeric_field(AttributeKind kind, int index) {
  switch (kind) {
    case AttributeKind::Size:
    case AttributeKind::Number: return index + 1;
    default: return index;
  }
}

inline int index_from_field(AttributeKind kind, int field) {
  switch (kind) {
    case AttributeKind::Size:
    case AttributeKind::Number: return field - 1;
    default: return field;
  }
}

// ---------------------------------------------------------------------------
// Entities, layouts, items
// ---------------------------------------------------------------------------

/// Default orientation index (0 degrees).
inline constexpr int kUprightOrientation = 3;

struct EntityRecord {
  int type = 0;
  int size = 0;
  int color = 0;
  int orientation = kUprightOrientation;

  int get(AttributeKind kind) const {
    switch (kind) {
      case AttributeKind::Type: return type;
      case AttributeKind::Size: return size;
      case AttributeKind::Color: return color;
      case AttributeKind::Orientation: return orientation;
      default: throw DomainError("not an entity attribute");
    }
  }
  void set(AttributeKind kind, int v) {
    switch (kind) {
      case AttributeKind::Type: type = v; break;
      case AttributeKind::Size: size = v; break;
      case AttributeKind::Color: color = v; break;
      case AttributeKind::Orientation: orientation = v; break;
      default: throw DomainError("not an entity attribute");
    }
  }
  AttributeValue value(AttributeKind kind) const { return {kind, get(kind)}; }

  friend bool operator==(const EntityRecord&, const EntityRecord&) = default;
};

/// Occupied slots of a grid, bit i = row-major slot i.
using SlotMask = std::uint32_t;

inline int popcount(SlotMask m) { return std::popcount(m); }

inline std::vector<int> slots_of(SlotMask m) {
  std::vector<int> out;
  for (int i = 0; m >> i; ++i)
    if ((m >> i) & 1u) out.push_back(i);
  return out;
}

inline SlotMask full_mask(GridShape grid) {
  return (SlotMask{1} << grid.capacity()) - 1;
}

struct PositionSet {
  GridShape grid;
  SlotMask occupied = 0;

  int count() const { return popcount(occupied); }
  friend bool operator==(const PositionSet&, const PositionSet&) = default;
};

struct LayoutRecord {
  GridShape grid;
  SlotMask positions = 0;
  std::map<int, EntityRecord> entities;

  int count() const { return popcount(positions); }
  int number_index() const { return count() - 1; }
  PositionSet position_set() const { return {grid, positions}; }

  /// The value shared by every entity, or nullopt when entities disagree or
  /// the layout is empty.
  std::optional<int> uniform_value(AttributeKind kind) const {
    std::optional<int> v;
    for (const auto& [slot, e] : entities) {
      const int x = e.get(kind);
      if (v && *v != x) return std::nullopt;
      v = x;
    }
    return v;
  }

  /// Replaces the occupied slots. New slots copy `prototype`; surviving slots
  /// keep their entity.
  void reposition(SlotMask mask, const EntityRecord& prototype) {
    std::map<int, EntityRecord> next;
    for (int s : slots_of(mask)) {
      auto it = entities.find(s);
      next.emplace(s, it != entities.end() ? it->second : prototype);
    }
    positions = mask;
    entities = std::move(next);
  }

  void set_all(AttributeKind kind, int v) {
    for (auto& [slot, e] : entities) e.set(kind, v);
  }

  friend bool operator==(const LayoutRecord&, const LayoutRecord&) = default;
};

struct ComponentRecord {
  int id = 0;
  LayoutRecord layout;

  friend bool operator==(const ComponentRecord&, const ComponentRecord&) = default;
};

struct MatrixItem {
  std::vector<ComponentRecord> components;

  friend bool operator==(const MatrixItem&, const MatrixItem&) = default;
};

// ---------------------------------------------------------------------------
// Sub-tasks
// ---------------------------------------------------------------------------

enum class SubTask { Center, Grid2x2, Grid3x3, LR, UD, OIC, OIG };

inline constexpr std::array<SubTask, 7> kAllSubTasks = {
    SubTask::Center, SubTask::Grid2x2, SubTask::Grid3x3, SubTask::LR,
    SubTask::UD,     SubTask::OIC,     SubTask::OIG};

struct ComponentTemplate {
  GridShape grid;
  /// Rule-governed attributes in prompt order.
  std::vector<AttributeKind> governed;
  /// Color pinned to a fixed value (outline shapes); still carries a
  /// Constant rule but is never sampled or perturbed.
  std::optional<int> fixed_color;
};

inline ComponentTemplate single_entity_template() {
  return {kSingle, {AttributeKind::Type, AttributeKind::Size, AttributeKind::Color}, std::nullopt};
}

inline ComponentTemplate grid_template(GridShape g) {
  return {g,
          {AttributeKind::Number, AttributeKind::Position, AttributeKind::Type,
           AttributeKind::Size, AttributeKind::Color},
          std::nullopt};
}

inline std::vector<ComponentTemplate> components_of(SubTask task) {
  switch (task) {
    case SubTask::Center: return {single_entity_template()};
    case SubTask::Grid2x2: return {grid_template(kGrid2x2)};
    case SubTask::Grid3x3: return {grid_template(kGrid3x3)};
    case SubTask::LR:
    case SubTask::UD:
    case SubTask::OIC: return {single_entity_template(), single_entity_template()};
    case SubTask::OIG: {
      auto outer = single_entity_template();
      outer.fixed_color = 0;
      return {outer, grid_template(kGrid2x2)};
    }
  }
  return {};
}

/// (component, attribute) pairs carrying a rule, in canonical order.
struct Slot {
  int component;
  AttributeKind attribute;
  friend bool operator==(Slot, Slot) = default;
};

inline std::vector<Slot> governed_slots(SubTask task) {
  std::vector<Slot> out;
  const auto comps = components_of(task);
  for (int c = 0; c < static_cast<int>(comps.size()); ++c)
    for (auto a : comps[c].governed) out.push_back({c, a});
  return out;
}

// ---------------------------------------------------------------------------
// Relations and rules
// ---------------------------------------------------------------------------

enum class RelationType { Constant, Progression, Arithmetic, DistributeThree };

inline constexpr std::array<RelationType, 4> kAllRelations = {
    RelationType::Constant, RelationType::Progression, RelationType::Arithmetic,
    RelationType::DistributeThree};

struct Relation {
  RelationType type = RelationType::Constant;
  /// Progression step (for Position: cyclic slot shift).
  int step = 0;
  /// Arithmetic sign, +1 (addition / union) or -1 (subtraction / difference).
  int sign = 0;
  /// DistributeThree value triple (for Position: slot masks).
  std::array<int, 3> values{};

  static Relation constant() { return {}; }
  static Relation progression(int step) { return {RelationType::Progression, step, 0, {}}; }
  static Relation arithmetic(int sign) { return {RelationType::Arithmetic, 0, sign, {}}; }
  static Relation distribute_three(std::array<int, 3> v) {
    return {RelationType::DistributeThree, 0, 0, v};
  }

  friend bool operator==(const Relation&, const Relation&) = default;
};

/// Which relations may govern which attribute.
inline std::vector<RelationType> compatible_relations(AttributeKind kind) {
  switch (kind) {
    case AttributeKind::Type:
      return {RelationType::Constant, RelationType::Progression, RelationType::DistributeThree};
    case AttributeKind::Size:
    case AttributeKind::Color:
    case AttributeKind::Number:
    case AttributeKind::Position:
      return {kAllRelations.begin(), kAllRelations.end()};
    case AttributeKind::Orientation: return {};
  }
  return {};
}

inline bool is_compatible(AttributeKind kind, RelationType r) {
  const auto rs = compatible_relations(kind);
  return std::find(rs.begin(), rs.end(), r) != rs.end();
}

struct RuleSpec {
  int component = 0;
  AttributeKind attribute = AttributeKind::Type;
  Relation relation;

  friend bool operator==(const RuleSpec&, const RuleSpec&) = default;
};

// ---------------------------------------------------------------------------
// Matrix and puzzle
// ---------------------------------------------------------------------------

/// The eight given items in row-major order; (3,3) is never stored.
struct Matrix {
  std::array<MatrixItem, 8> items;

  const MatrixItem& at(int row, int col) const { return items.at(row * 3 + col); }
  MatrixItem& at(int row, int col) { return items.at(row * 3 + col); }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

struct CandidateSet {
  std::vector<MatrixItem> candidates;
  int answer_index = 0;

  friend bool operator==(const CandidateSet&, const CandidateSet&) = default;
};

enum class GenerationMode { Raven, Impartial };
enum class DistractorMode { None, FromRules, Random };

struct PuzzleInstance {
  std::string id;
  SubTask subtask = SubTask::Center;
  GenerationMode mode = GenerationMode::Raven;
  std::uint64_t seed = 0;
  Matrix matrix;
  CandidateSet candidates;
  std::vector<RuleSpec> rules;
  /// Rows visible to solvers and encoders: 3 = full, 2 = drop row 1,
  /// 1 = only the incomplete third row.
  int rows_included = 3;
  DistractorMode distractor = DistractorMode::None;
  /// Impartial generation fell back to single-attribute distractors.
  bool fallback_warning = false;

  const MatrixItem& answer() const { return candidates.candidates.at(candidates.answer_index); }

  friend bool operator==(const PuzzleInstance&, const PuzzleInstance&) = default;
};

/// Items of row `row` (0-based); row 2 is completed with `candidate`.
inline std::array<const MatrixItem*, 3> row_items(const PuzzleInstance& p, int row,
                                                  const MatrixItem& candidate) {
  if (row < 2) return {&p.matrix.at(row, 0), &p.matrix.at(row, 1), &p.matrix.at(row, 2)};
  return {&p.matrix.at(2, 0), &p.matrix.at(2, 1), &candidate};
}

/// 0-based indices of complete context rows visible at `rows_included`.
inline std::vector<int> context_rows(int rows_included) {
  std::vector<int> out;
  for (int r = 3 - rows_included; r < 2; ++r) out.push_back(r);
  return out;
}

// ---------------------------------------------------------------------------
// Names
// ---------------------------------------------------------------------------

inline std::string_view to_string(AttributeKind k) {
  switch (k) {
    case AttributeKind::Type: return "type";
    case AttributeKind::Size: return "size";
    case AttributeKind::Color: return "color";
    case AttributeKind::Orientation: return "orientation";
    case AttributeKind::Number: return "number";
    case AttributeKind::Position: return "position";
  }
  return "?";
}

inline std::string_view to_string(RelationType r) {
  switch (r) {
    case RelationType::Constant: return "constant";
    case RelationType::Progression: return "progression";
    case RelationType::Arithmetic: return "arithmetic";
    case RelationType::DistributeThree: return "distribute_three";
  }
  return "?";
}

inline std::string_view to_string(SubTask t) {
  switch (t) {
    case SubTask::Center: return "center";
    case SubTask::Grid2x2: return "grid2x2";
    case SubTask::Grid3x3: return "grid3x3";
    case SubTask::LR: return "lr";
    case SubTask::UD: return "ud";
    case SubTask::OIC: return "oic";
    case SubTask::OIG: return "oig";
  }
  return "?";
}

inline std::string_view to_string(GenerationMode m) {
  return m == GenerationMode::Raven ? "raven" : "impartial";
}

inline std::string_view to_string(DistractorMode m) {
  switch (m) {
    case DistractorMode::None: return "none";
    case DistractorMode::FromRules: return "raven";
    case DistractorMode::Random: return "random";
  }
  return "?";
}

namespace detail {
inline std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}
}  // namespace detail

inline AttributeKind parse_attribute(std::string_view s) {
  const auto l = detail::lower(s);
  for (auto k : {AttributeKind::Type, AttributeKind::Size, AttributeKind::Color,
                 AttributeKind::Orientation, AttributeKind::Number, AttributeKind::Position})
    if (l == to_string(k)) return k;
  throw DomainError("unknown attribute: " + std::string(s));
}

inline RelationType parse_relation(std::string_view s) {
  const auto l = detail::lower(s);
  for (auto r : kAllRelations)
    if (l == to_string(r)) return r;
  throw DomainError("unknown relation: " + std::string(s));
}

inline SubTask parse_subtask(std::string_view s) {
  const auto l = detail::lower(s);
  for (auto t : kAllSubTasks)
    if (l == to_string(t)) return t;
  if (l == "2x2grid" || l == "distribute_four") return SubTask::Grid2x2;
  if (l == "3x3grid" || l == "distribute_nine") return SubTask::Grid3x3;
  if (l == "l-r") return SubTask::LR;
  if (l == "u-d") return SubTask::UD;
  if (l == "o-ic") return SubTask::OIC;
  if (l == "o-ig") return SubTask::OIG;
  throw DomainError("unknown sub-task: " + std::string(s));
}

inline GenerationMode parse_mode(std::string_view s) {
  const auto l = detail::lower(s);
  if (l == "raven") return GenerationMode::Raven;
  if (l == "impartial" || l == "i-raven") return GenerationMode::Impartial;
  throw DomainError("unknown generation mode: " + std::string(s));
}

inline DistractorMode parse_distractor(std::string_view s) {
  const auto l = detail::lower(s);
  if (l == "none") return DistractorMode::None;
  if (l == "raven" || l == "rules" || l == "from_rules") return DistractorMode::FromRules;
  if (l == "random") return DistractorMode::Random;
  throw DomainError("unknown distractor mode: " + std::string(s));
}

/// Compact rule text, e.g. "c0.size:progression(+1)".
inline std::string describe(const RuleSpec& r) {
  std::string s = "c" + std::to_string(r.component) + "." + std::string(to_string(r.attribute)) +
                  ":" + std::string(to_string(r.relation.type));
  switch (r.relation.type) {
    case RelationType::Progression:
      s += "(" + std::string(r.relation.step > 0 ? "+" : "") + std::to_string(r.relation.step) + ")";
      break;
    case RelationType::Arithmetic: s += r.relation.sign > 0 ? "(+)" : "(-)"; break;
    case RelationType::DistributeThree:
      s += "(" + std::to_string(r.relation.values[0]) + " " + std::to_string(r.relation.values[1]) +
           " " + std::to_string(r.relation.values[2]) + ")";
      break;
    case RelationType::Constant: break;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace detail {

inline void validate_relation(const RuleSpec& r, GridShape grid, std::vector<std::string>& out) {
  const std::string where = "rule c" + std::to_string(r.component) + "." +
                            std::string(to_string(r.attribute));
  if (!is_compatible(r.attribute, r.relation.type)) {
    out.push_back(where + ": relation " + std::string(to_string(r.relation.type)) +
                  " not allowed");
    return;
  }
  switch (r.relation.type) {
    case RelationType::Progression: {
      const int s = r.relation.step;
      const bool ok = r.attribute == AttributeKind::Position
                          ? (s != 0 && std::abs(s) < grid.capacity())
                          : (s == -2 || s == -1 || s == 1 || s == 2);
      if (!ok) out.push_back(where + ": invalid progression step " + std::to_string(s));
      break;
    }
    case RelationType::Arithmetic:
      if (r.relation.sign != 1 && r.relation.sign != -1)
        out.push_back(where + ": invalid arithmetic sign");
      break;
    case RelationType::DistributeThree: {
      const auto& v = r.relation.values;
      if (v[0] == v[1] || v[1] == v[2] || v[0] == v[2])
        out.push_back(where + ": distribute-three values not distinct");
      for (int x : v) {
        const bool in_range =
            r.attribute == AttributeKind::Position
                ? (x > 0 && (static_cast<SlotMask>(x) & ~full_mask(grid)) == 0)
                : (x >= 0 && x < domain_size(r.attribute, grid));
        if (!in_range) {
          out.push_back(where + ": distribute-three value out of domain");
          break;
        }
      }
      break;
    }
    case RelationType::Constant: break;
  }
}

inline void validate_item(const MatrixItem& item, const std::vector<ComponentTemplate>& tmpl,
                          const std::string& where, std::vector<std::string>& out) {
  if (item.components.size() != tmpl.size()) {
    out.push_back(where + ": component count " + std::to_string(item.components.size()) +
                  " ≠ " + std::to_string(tmpl.size()));
    return;
  }
  for (std::size_t c = 0; c < tmpl.size(); ++c) {
    const auto& comp = item.components[c];
    const std::string cw = where + " c" + std::to_string(c);
    if (comp.id != static_cast<int>(c)) out.push_back(cw + ": component id " + std::to_string(comp.id));
    const auto& lay = comp.layout;
    if (lay.grid != tmpl[c].grid) {
      out.push_back(cw + ": grid shape mismatch");
      continue;
    }
    if (lay.positions == 0) out.push_back(cw + ": empty layout");
    if (lay.positions & ~full_mask(lay.grid)) out.push_back(cw + ": position outside grid");
    SlotMask keys = 0;
    for (const auto& [slot, e] : lay.entities)
      if (slot >= 0 && slot < 32) keys |= SlotMask{1} << slot;
    if (keys != lay.positions || static_cast<int>(lay.entities.size()) != lay.count())
      out.push_back(cw + ": entities/positions mismatch");
    for (const auto& [slot, e] : lay.entities) {
      for (auto k : kEntityAttributes) {
        const int v = e.get(k);
        if (v < 0 || v >= domain_size(k)) {
          out.push_back(cw + ": " + std::string(to_string(k)) + " index " + std::to_string(v) +
                        " out of domain");
        }
      }
    }
    for (auto k : tmpl[c].governed) {
      if (is_entity_level(k) && !lay.entities.empty() && !lay.uniform_value(k))
        out.push_back(cw + ": " + std::string(to_string(k)) + " not uniform across layout");
    }
    if (tmpl[c].fixed_color && lay.uniform_value(AttributeKind::Color) != tmpl[c].fixed_color)
      out.push_back(cw + ": fixed color violated");
  }
}

}  // namespace detail

/// Every invariant violation found in `p`; empty means valid.
inline std::vector<std::string> validate(const PuzzleInstance& p) {
  std::vector<std::string> out;
  const auto tmpl = components_of(p.subtask);

  if (p.rows_included < 1 || p.rows_included > 3)
    out.push_back("rows_included " + std::to_string(p.rows_included) + " not in 1..3");

  for (int i = 0; i < 8; ++i)
    detail::validate_item(p.matrix.items[i], tmpl,
                          "item (" + std::to_string(i / 3 + 1) + "," + std::to_string(i % 3 + 1) + ")",
                          out);

  const auto& cs = p.candidates.candidates;
  if (cs.size() != 8) out.push_back("candidate count " + std::to_string(cs.size()) + " ≠ 8");
  if (p.candidates.answer_index < 0 || p.candidates.answer_index >= static_cast<int>(cs.size()))
    out.push_back("answer index " + std::to_string(p.candidates.answer_index) + " out of range");
  for (std::size_t i = 0; i < cs.size(); ++i) {
    detail::validate_item(cs[i], tmpl, "candidate " + std::to_string(i), out);
    for (std::size_t j = i + 1; j < cs.size(); ++j)
      if (cs[i] == cs[j])
        out.push_back("candidates " + std::to_string(i) + " and " + std::to_string(j) + " identical");
  }

  const auto slots = governed_slots(p.subtask);
  std::vector<int> seen(slots.size(), 0);
  for (const auto& r : p.rules) {
    auto it = std::find(slots.begin(), slots.end(), Slot{r.component, r.attribute});
    if (it == slots.end()) {
      out.push_back("rule on ungoverned slot c" + std::to_string(r.component) + "." +
                    std::string(to_string(r.attribute)));
      continue;
    }
    ++seen[it - slots.begin()];
    detail::validate_relation(r, tmpl[r.component].grid, out);
  }
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const std::string name =
        "c" + std::to_string(slots[i].component) + "." + std::string(to_string(slots[i].attribute));
    if (seen[i] == 0) out.push_back("missing rule for " + name);
    if (seen[i] > 1) out.push_back("duplicate rule for " + name);
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

inline void to_json(nlohmann::json& j, const EntityRecord& e) {
  j = {{"type", e.type}, {"size", e.size}, {"color", e.color}, {"orientation", e.orientation}};
}

inline void from_json(const nlohmann::json& j, EntityRecord& e) {
  e.type = j.at("type").get<int>();
  e.size = j.at("size").get<int>();
  e.color = j.at("color").get<int>();
  e.orientation = j.value("orientation", kUprightOrientation);
}

inline void to_json(nlohmann::json& j, const ComponentRecord& c) {
  auto ents = nlohmann::json::array();
  for (const auto& [slot, e] : c.layout.entities) {
    nlohmann::json je = e;
    je["slot"] = slot;
    ents.push_back(std::move(je));
  }
  j = {{"id", c.id},
       {"grid", {c.layout.grid.rows, c.layout.grid.cols}},
       {"positions", slots_of(c.layout.positions)},
       {"entities", std::move(ents)}};
}

inline void from_json(const nlohmann::json& j, ComponentRecord& c) {
  c.id = j.at("id").get<int>();
  const auto& g = j.at("grid");
  c.layout.grid = {g.at(0).get<int>(), g.at(1).get<int>()};
  c.layout.positions = 0;
  for (int s : j.at("positions")) {
    if (s < 0 || s >= 32) throw DomainError("slot index out of range");
    c.layout.positions |= SlotMask{1} << s;
  }
  c.layout.entities.clear();
  for (const auto& je : j.at("entities")) c.layout.entities[je.at("slot").get<int>()] = je.get<EntityRecord>();
}

inline void to_json(nlohmann::json& j, const MatrixItem& item) {
  j = {{"components", item.components}};
}

inline void from_json(const nlohmann::json& j, MatrixItem& item) {
  item.components = j.at("components").get<std::vector<ComponentRecord>>();
}

inline void to_json(nlohmann::json& j, const RuleSpec& r) {
  j = {{"component", r.component},
       {"attribute", to_string(r.attribute)},
       {"relation", to_string(r.relation.type)}};
  switch (r.relation.type) {
    case RelationType::Progression: j["step"] = r.relation.step; break;
    case RelationType::Arithmetic: j["sign"] = r.relation.sign > 0 ? "+" : "-"; break;
    case RelationType::DistributeThree: j["values"] = r.relation.values; break;
    case RelationType::Constant: break;
  }
}

inline void from_json(const nlohmann::json& j, RuleSpec& r) {
  r.component = j.at("component").get<int>();
  r.attribute = parse_attribute(j.at("attribute").get<std::string>());
  r.relation = {};
  r.relation.type = parse_relation(j.at("relation").get<std::string>());
  switch (r.relation.type) {
    case RelationType::Progression: r.relation.step = j.at("step").get<int>(); break;
    case RelationType::Arithmetic: {
      const auto s = j.at("sign").get<std::string>();
      if (s != "+" && s != "-") throw DomainError("arithmetic sign must be + or -");
      r.relation.sign = s == "+" ? 1 : -1;
      break;
    }
    case RelationType::DistributeThree:
      r.relation.values = j.at("values").get<std::array<int, 3>>();
      break;
    case RelationType::Constant: break;
  }
}

inline void to_json(nlohmann::json& j, const PuzzleInstance& p) {
  auto context = nlohmann::json::array();
  for (int r = 0; r < 3; ++r) {
    auto row = nlohmann::json::array();
    for (int c = 0; c < (r < 2 ? 3 : 2); ++c) row.push_back(p.matrix.at(r, c));
    context.push_back(std::move(row));
  }
  j = nlohmann::json{{"id", p.id},
                     {"subtask", to_string(p.subtask)},
                     {"mode", to_string(p.mode)},
                     {"seed", p.seed},
                     {"rows_included", p.rows_included},
                     {"distractor", to_string(p.distractor)},
                     {"fallback_warning", p.fallback_warning},
                     {"rules", p.rules},
                     {"context", std::move(context)},
                     {"candidates", p.candidates.candidates},
                     {"answer_index", p.candidates.answer_index}};
}

inline void from_json(const nlohmann::json& j, PuzzleInstance& p) {
  p.id = j.at("id").get<std::string>();
  p.subtask = parse_subtask(j.at("subtask").get<std::string>());
  p.mode = parse_mode(j.at("mode").get<std::string>());
  p.seed = j.at("seed").get<std::uint64_t>();
  p.rows_included = j.value("rows_included", 3);
  p.distractor = parse_distractor(j.value("distractor", std::string("none")));
  p.fallback_warning = j.value("fallback_warning", false);
  p.rules = j.at("rules").get<std::vector<RuleSpec>>();
  const auto& ctx = j.at("context");
  if (ctx.size() != 3 || ctx.at(0).size() != 3 || ctx.at(1).size() != 3 || ctx.at(2).size() != 2)
    throw DomainError("context must hold rows of 3, 3 and 2 items");
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < (r < 2 ? 3 : 2); ++c) p.matrix.at(r, c) = ctx.at(r).at(c).get<MatrixItem>();
  p.candidates.candidates = j.at("candidates").get<std::vector<MatrixItem>>();
  p.candidates.answer_index = j.at("answer_index").get<int>();
}

}  // namespace raven
