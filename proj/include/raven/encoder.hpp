#pragma once

// Text encodings of puzzles. Prompt grammar (naming):
//
//   row      := item ("; " item)*            one line per visible row
//   item     := segment (" / " segment)*     one segment per component
//   segment  := tuple                        1x1 layout
//             | "[" slot (", " slot)* "]"    grid, row-major, "-" = empty
//             | occupancy " (" summaries ")" grid under layout abstraction
//   tuple    := "(" type ", " size ", " color [", " orientation] ")"
//
// Decomposed sub-prompts carry one attribute per line item, items joined by
// ", ". The third row always ends with the candidate.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "raven/domain.hpp"
#include "raven/generator.hpp"
#include "raven/lexicon.hpp"

namespace raven {

class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class UnsupportedScheme : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Attribute names
// ---------------------------------------------------------------------------

/// Ordinal name of an entity attribute value: sides for type ("3".."7",
/// circle = 7), diameter for size, darkness for color, degrees for
/// orientation.
inline std::string name_entity_attr(AttributeValue v) {
  if (!is_entity_level(v.kind))
    throw ContractError("name_entity_attr: " + std::string(to_string(v.kind)) +
                        " is not an entity attribute");
  if (v.index < 0 || v.index >= domain_size(v.kind)) throw DomainError("value index out of domain");
  switch (v.kind) {
    case AttributeKind::Type: return std::to_string(v.index + 3);
    case AttributeKind::Size: return "0." + std::to_string(v.index + 4);
    case AttributeKind::Color: return std::to_string(v.index);
    case AttributeKind::Orientation: return std::to_string(-135 + 45 * v.index);
    default: break;
  }
  return {};
}

/// Inverse of name_entity_attr.
inline std::optional<AttributeValue> parse_entity_name(AttributeKind kind, std::string_view token) {
  if (!is_entity_level(kind)) return std::nullopt;
  for (int i = 0; i < domain_size(kind); ++i)
    if (name_entity_attr({kind, i}) == token) return AttributeValue{kind, i};
  return std::nullopt;
}

using Namer = std::function<std::string(AttributeValue)>;

inline Namer ordinal_namer() { return [](AttributeValue v) { return name_entity_attr(v); }; }

inline Namer lexicon_namer(const Lexicon& lex) {
  return [&lex](AttributeValue v) { return lex.name(v); };
}

// ---------------------------------------------------------------------------
// Layout abstractions
// ---------------------------------------------------------------------------

/// Row-major occupancy array, e.g. "[1, 0, 0, 1]".
inline std::string occupancy_map(const LayoutRecord& layout) {
  std::string s = "[";
  for (int i = 0; i < layout.grid.capacity(); ++i) {
    if (i) s += ", ";
    s += ((layout.positions >> i) & 1u) ? '1' : '0';
  }
  return s + "]";
}

/// Sorted, de-duplicated value list, e.g. "[3, 5]".
inline std::string summarize_unique(std::span<const AttributeValue> values,
                                    const Namer& namer = ordinal_namer()) {
  if (values.empty()) throw ContractError("summarize_unique: empty value list");
  std::vector<AttributeValue> v(values.begin(), values.end());
  for (const auto& x : v)
    if (x.kind != v.front().kind) throw ContractError("summarize_unique: mixed attribute kinds");
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += namer(v[i]);
  }
  return s + "]";
}

// ---------------------------------------------------------------------------
// Configuration and prompt containers
// ---------------------------------------------------------------------------

enum class Scheme { QuasiImage, RandomNaming, Naming, Decomposed };

inline std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::QuasiImage: return "quasi-image";
    case Scheme::RandomNaming: return "random";
    case Scheme::Naming: return "naming";
    case Scheme::Decomposed: return "decomp";
  }
  return "?";
}

inline Scheme parse_scheme(std::string_view s) {
  for (auto x : {Scheme::QuasiImage, Scheme::RandomNaming, Scheme::Naming, Scheme::Decomposed})
    if (s == to_string(x)) return x;
  if (s == "random-naming") return Scheme::RandomNaming;
  if (s == "decomposed" || s == "decomposition") return Scheme::Decomposed;
  throw std::invalid_argument("unknown abstraction: " + std::string(s));
}

struct AbstractionConfig {
  Scheme scheme = Scheme::Naming;
  bool by_attribute = false;
  bool by_component = false;
  bool layout_abstraction = false;
  int rows_included = 3;
  std::uint64_t lexicon_seed = 0;
  DistractorMode distractor = DistractorMode::None;
  std::uint64_t distractor_seed = 0;

  static AbstractionConfig naming() { return {}; }
  static AbstractionConfig full_decomposition() {
    AbstractionConfig c;
    c.scheme = Scheme::Decomposed;
    c.by_attribute = c.by_component = c.layout_abstraction = true;
    return c;
  }
};

inline void to_json(nlohmann::json& j, const AbstractionConfig& c) {
  j = {{"scheme", to_string(c.scheme)},
       {"by_attribute", c.by_attribute},
       {"by_component", c.by_component},
       {"layout_abstraction", c.layout_abstraction},
       {"rows", c.rows_included},
       {"lexicon_seed", c.lexicon_seed},
       {"distractor", to_string(c.distractor)},
       {"distractor_seed", c.distractor_seed}};
}

inline void from_json(const nlohmann::json& j, AbstractionConfig& c) {
  c = {};
  c.scheme = parse_scheme(j.value("scheme", std::string("naming")));
  c.by_attribute = j.value("by_attribute", false);
  c.by_component = j.value("by_component", false);
  c.layout_abstraction = j.value("layout_abstraction", false);
  c.rows_included = j.value("rows", 3);
  c.lexicon_seed = j.value("lexicon_seed", std::uint64_t{0});
  c.distractor = parse_distractor(j.value("distractor", std::string("none")));
  c.distractor_seed = j.value("distractor_seed", std::uint64_t{0});
  if (c.rows_included < 1 || c.rows_included > 3) throw std::invalid_argument("rows must be 1, 2 or 3");
}

struct Prompt {
  std::string text;
  int candidate_index = 0;
  std::string label;

  friend bool operator==(const Prompt&, const Prompt&) = default;
};

struct PromptSet {
  std::string puzzle_id;
  /// Eight lists of sub-prompts, aligned by label.
  std::vector<std::vector<Prompt>> per_candidate;
};

// ---------------------------------------------------------------------------
// Puzzle transforms
// ---------------------------------------------------------------------------

/// Keeps the last `k` rows visible; k = 3 is the identity.
inline PuzzleInstance ablate_rows(const PuzzleInstance& puzzle, int k) {
  if (k < 1 || k > 3) throw std::invalid_argument("rows must be 1, 2 or 3");
  PuzzleInstance p = puzzle;
  p.rows_included = std::min(puzzle.rows_included, k);
  return p;
}

/// Renders orientation as a fourth entity attribute. FromRules fixes one
/// orientation per row; Random draws one per item. Rules and answer are
/// untouched.
inline PuzzleInstance inject_distractor(const PuzzleInstance& puzzle, DistractorMode source, Rng& rng) {
  PuzzleInstance p = puzzle;
  p.distractor = source;
  if (source == DistractorMode::None) return p;
  const int n = domain_size(AttributeKind::Orientation);
  const auto set_item = [](MatrixItem& item, int o) {
    for (auto& comp : item.components) comp.layout.set_all(AttributeKind::Orientation, o);
  };
  if (source == DistractorMode::FromRules) {
    for (int r = 0; r < 3; ++r) {
      const int o = uniform_int(rng, 0, n - 1);
      for (int c = 0; c < (r < 2 ? 3 : 2); ++c) set_item(p.matrix.at(r, c), o);
      if (r == 2)
        for (auto& cand : p.candidates.candidates) set_item(cand, o);
    }
  } else {
    for (auto& item : p.matrix.items) set_item(item, uniform_int(rng, 0, n - 1));
    for (auto& cand : p.candidates.candidates) set_item(cand, uniform_int(rng, 0, n - 1));
  }
  return p;
}

inline PuzzleInstance inject_distractor(const PuzzleInstance& puzzle, DistractorMode source,
                                        std::uint64_t seed) {
  Rng rng(child_seed(puzzle.seed, seed));
  return inject_distractor(puzzle, source, rng);
}

// ---------------------------------------------------------------------------
// Naming grammar
// ---------------------------------------------------------------------------

namespace enc_detail {

inline std::vector<AttributeKind> rendered_kinds(const PuzzleInstance& p) {
  std::vector<AttributeKind> k = {AttributeKind::Type, AttributeKind::Size, AttributeKind::Color};
  if (p.distractor != DistractorMode::None) k.push_back(AttributeKind::Orientation);
  return k;
}

inline std::string entity_tuple(const EntityRecord& e, std::span<const AttributeKind> kinds,
                                const Namer& namer) {
  std::string s = "(";
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    if (i) s += ", ";
    s += namer(e.value(kinds[i]));
  }
  return s + ")";
}

inline std::vector<AttributeValue> layout_values(const LayoutRecord& lay, AttributeKind k) {
  std::vector<AttributeValue> v;
  for (const auto& [slot, e] : lay.entities) v.push_back(e.value(k));
  return v;
}

inline std::string component_segment(const ComponentRecord& comp, std::span<const AttributeKind> kinds,
                                     const Namer& namer, bool layout_abstraction) {
  const auto& lay = comp.layout;
  if (lay.grid.capacity() == 1) {
    if (lay.entities.empty()) throw ContractError("empty single-entity layout");
    return entity_tuple(lay.entities.begin()->second, kinds, namer);
  }
  if (layout_abstraction) {
    std::string s = occupancy_map(lay) + " (";
    for (std::size_t i = 0; i < kinds.size(); ++i) {
      if (i) s += ", ";
      s += summarize_unique(layout_values(lay, kinds[i]), namer);
    }
    return s + ")";
  }
  std::string s = "[";
  for (int slot = 0; slot < lay.grid.capacity(); ++slot) {
    if (slot) s += ", ";
    auto it = lay.entities.find(slot);
    s += it == lay.entities.end() ? std::string("-") : entity_tuple(it->second, kinds, namer);
  }
  return s + "]";
}

/// Lines for the visible rows; `render` turns one item into text.
template <typename Render>
std::string rows_text(const PuzzleInstance& p, int candidate, std::string_view item_sep,
                      Render&& render) {
  const auto& cand = p.candidates.candidates.at(candidate);
  std::string out;
  for (int r = 3 - p.rows_included; r < 3; ++r) {
    const auto items = row_items(p, r, cand);
    if (!out.empty()) out += '\n';
    for (int c = 0; c < 3; ++c) {
      if (c) out += item_sep;
      out += render(*items[c]);
    }
  }
  return out;
}

inline void check_candidate(const PuzzleInstance& p, int candidate) {
  if (candidate < 0 || candidate >= static_cast<int>(p.candidates.candidates.size()))
    throw std::out_of_range("candidate index " + std::to_string(candidate));
}

inline std::string naming_text(const PuzzleInstance& p, int candidate, const Namer& namer,
                               std::span<const int> comps, bool layout_abstraction) {
  const auto kinds = rendered_kinds(p);
  return rows_text(p, candidate, "; ", [&](const MatrixItem& item) {
    std::string s;
    for (std::size_t i = 0; i < comps.size(); ++i) {
      if (i) s += " / ";
      s += component_segment(item.components.at(comps[i]), kinds, namer, layout_abstraction);
    }
    return s;
  });
}

inline std::vector<int> all_components(const PuzzleInstance& p) {
  std::vector<int> c(components_of(p.subtask).size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = static_cast<int>(i);
  return c;
}

}  // namespace enc_detail

inline Prompt encode_naming(const PuzzleInstance& puzzle, int candidate) {
  enc_detail::check_candidate(puzzle, candidate);
  const auto comps = enc_detail::all_components(puzzle);
  return {enc_detail::naming_text(puzzle, candidate, ordinal_namer(), comps, false), candidate, "all"};
}

inline Prompt encode_naming(const PuzzleInstance& puzzle, int candidate, int rows_included) {
  return encode_naming(ablate_rows(puzzle, rows_included), candidate);
}

inline Prompt encode_random_naming(const PuzzleInstance& puzzle, int candidate, const Lexicon& lexicon) {
  enc_detail::check_candidate(puzzle, candidate);
  const auto comps = enc_detail::all_components(puzzle);
  return {enc_detail::naming_text(puzzle, candidate, lexicon_namer(lexicon), comps, false), candidate,
          "all"};
}

// ---------------------------------------------------------------------------
// Quasi-image
// ---------------------------------------------------------------------------

/// Ten-step darkness ramp, lightest first.
inline constexpr std::string_view kDensityRamp = ".:-=+*#%&@";

/// Character matrix for one entity: height 5 + 2*size rows, width 2*height-1.
/// Each row fills a centred run whose half-width depends on the shape.
inline std::vector<std::string> render_entity(const EntityRecord& e) {
  const int n = 5 + 2 * e.size;
  const int w = 2 * n - 1;
  const int mid = (n - 1) / 2;
  const char fill = kDensityRamp.at(e.color);
  std::vector<std::string> rows;
  for (int r = 0; r < n; ++r) {
    int half = 0;
    switch (e.type) {
      case 0: half = r; break;                                   // triangle
      case 1: half = n - 1; break;                               // square
      case 2: half = std::min(n - 1, 2 * r); break;              // pentagon
      case 3: half = n - 1 - std::abs(r - mid); break;           // hexagon
      default: {                                                 // circle
        const double y = (r - mid) / (mid + 0.5);
        half = static_cast<int>(std::lround((n - 1) * std::sqrt(std::max(0.0, 1.0 - y * y))));
      }
    }
    std::string line(w, ' ');
    for (int c = n - 1 - half; c <= n - 1 + half; ++c) line[c] = fill;
    rows.push_back(std::move(line));
  }
  return rows;
}

inline Prompt encode_quasi_image(const PuzzleInstance& puzzle, int candidate) {
  if (puzzle.subtask != SubTask::Center)
    throw UnsupportedScheme("quasi-image encoding supports the center sub-task only");
  enc_detail::check_candidate(puzzle, candidate);
  constexpr int kCellWidth = 2 * 15 - 1;
  const auto& cand = puzzle.candidates.candidates.at(candidate);
  std::string out;
  for (int r = 3 - puzzle.rows_included; r < 3; ++r) {
    const auto items = row_items(puzzle, r, cand);
    std::array<std::vector<std::string>, 3> blocks;
    std::size_t height = 0;
    for (int c = 0; c < 3; ++c) {
      blocks[c] = render_entity(items[c]->components.at(0).layout.entities.begin()->second);
      height = std::max(height, blocks[c].size());
    }
    if (!out.empty()) out += "\n\n";
    for (std::size_t line = 0; line < height; ++line) {
      std::string row;
      for (int c = 0; c < 3; ++c) {
        const auto& b = blocks[c];
        const std::size_t top = (height - b.size()) / 2;
        std::string cell(kCellWidth, ' ');
        if (line >= top && line - top < b.size()) {
          const auto& src = b[line - top];
          cell.replace((kCellWidth - src.size()) / 2, src.size(), src);
        }
        if (c) row += "   ";
        row += cell;
      }
      row.erase(row.find_last_not_of(' ') + 1);
      if (line) out += '\n';
      out += row;
    }
  }
  return {out, candidate, "all"};
}

// ---------------------------------------------------------------------------
// Decomposition
// ---------------------------------------------------------------------------

struct SubMatrix {
  std::string label;
  std::vector<int> components;
  /// nullopt: every rendered attribute of the listed components.
  std::optional<AttributeKind> attribute;
  bool layout_abstraction = false;

  friend bool operator==(const SubMatrix&, const SubMatrix&) = default;
};

inline std::vector<SubMatrix> decompose(const PuzzleInstance& puzzle, const AbstractionConfig& cfg) {
  if (cfg.scheme != Scheme::Decomposed) throw ContractError("decompose requires the decomposed scheme");
  const auto tmpl = components_of(puzzle.subtask);
  std::vector<std::vector<int>> groups;
  if (cfg.by_component && tmpl.size() > 1) {
    for (int c = 0; c < static_cast<int>(tmpl.size()); ++c) groups.push_back({c});
  } else {
    groups.push_back(enc_detail::all_components(puzzle));
  }
  std::vector<SubMatrix> out;
  for (const auto& g : groups) {
    const std::string glabel = g.size() == 1 ? "c" + std::to_string(g.front()) : "all";
    if (!cfg.by_attribute) {
      out.push_back({glabel, g, std::nullopt, cfg.layout_abstraction});
      continue;
    }
    std::vector<int> grids;
    for (int c : g)
      if (tmpl[c].grid.capacity() > 1) grids.push_back(c);
    if (cfg.layout_abstraction && !grids.empty()) {
      out.push_back({glabel + ".number", grids, AttributeKind::Number, true});
      out.push_back({glabel + ".position", grids, AttributeKind::Position, true});
    }
    for (auto k : enc_detail::rendered_kinds(puzzle))
      out.push_back({glabel + "." + std::string(to_string(k)), g, k, cfg.layout_abstraction});
  }
  return out;
}

namespace enc_detail {

inline std::string attribute_cell(const LayoutRecord& lay, AttributeKind k, bool layout_abstraction,
                                  const Namer& namer) {
  switch (k) {
    case AttributeKind::Number: return std::to_string(lay.count());
    case AttributeKind::Position: return occupancy_map(lay);
    default: break;
  }
  if (lay.grid.capacity() == 1) return namer(lay.entities.begin()->second.value(k));
  if (layout_abstraction) return summarize_unique(layout_values(lay, k), namer);
  std::string s = "[";
  for (int slot = 0; slot < lay.grid.capacity(); ++slot) {
    if (slot) s += ", ";
    auto it = lay.entities.find(slot);
    s += it == lay.entities.end() ? std::string("-") : namer(it->second.value(k));
  }
  return s + "]";
}

}  // namespace enc_detail

inline Prompt encode_submatrix(const PuzzleInstance& puzzle, const SubMatrix& sub, int candidate) {
  enc_detail::check_candidate(puzzle, candidate);
  if (!sub.attribute)
    return {enc_detail::naming_text(puzzle, candidate, ordinal_namer(), sub.components,
                                    sub.layout_abstraction),
            candidate, sub.label};
  const auto namer = ordinal_namer();
  const auto text = enc_detail::rows_text(puzzle, candidate, ", ", [&](const MatrixItem& item) {
    std::string s;
    for (std::size_t i = 0; i < sub.components.size(); ++i) {
      if (i) s += " / ";
      s += enc_detail::attribute_cell(item.components.at(sub.components[i]).layout, *sub.attribute,
                                      sub.layout_abstraction, namer);
    }
    return s;
  });
  return {text, candidate, sub.label};
}

// ---------------------------------------------------------------------------
// Whole prompt sets
// ---------------------------------------------------------------------------

/// Applies distractor injection and row ablation from `cfg`.
inline PuzzleInstance prepare(const PuzzleInstance& puzzle, const AbstractionConfig& cfg) {
  PuzzleInstance p = puzzle;
  if (cfg.distractor != DistractorMode::None) p = inject_distractor(p, cfg.distractor, cfg.distractor_seed);
  return ablate_rows(p, cfg.rows_included);
}

inline PromptSet encode(const PuzzleInstance& puzzle, const AbstractionConfig& cfg,
                        const Lexicon* lexicon = nullptr) {
  const PuzzleInstance p = prepare(puzzle, cfg);
  PromptSet set;
  set.puzzle_id = p.id;
  const int n = static_cast<int>(p.candidates.candidates.size());
  std::optional<Lexicon> own;
  if (cfg.scheme == Scheme::RandomNaming && !lexicon) lexicon = &own.emplace(cfg.lexicon_seed);
  std::vector<SubMatrix> subs;
  if (cfg.scheme == Scheme::Decomposed) subs = decompose(p, cfg);
  for (int i = 0; i < n; ++i) {
    std::vector<Prompt> prompts;
    switch (cfg.scheme) {
      case Scheme::Naming: prompts.push_back(encode_naming(p, i)); break;
      case Scheme::QuasiImage: prompts.push_back(encode_quasi_image(p, i)); break;
      case Scheme::RandomNaming: prompts.push_back(encode_random_naming(p, i, *lexicon)); break;
      case Scheme::Decomposed:
        for (const auto& s : subs) prompts.push_back(encode_submatrix(p, s, i));
        break;
    }
    set.per_candidate.push_back(std::move(prompts));
  }
  return set;
}

/// JSONL prompt records: one per (candidate, sub-prompt).
inline void write_prompts(std::ostream& os, const PromptSet& set) {
  for (const auto& cand : set.per_candidate)
    for (const auto& pr : cand)
      os << nlohmann::json{{"puzzle_id", set.puzzle_id},
                           {"candidate_index", pr.candidate_index},
                           {"label", pr.label},
                           {"text", pr.text}}
                .dump()
         << '\n';
}

/// Groups prompt records back into sets, preserving first-seen puzzle order.
inline std::vector<PromptSet> read_prompts(std::istream& is) {
  std::vector<PromptSet> out;
  std::map<std::string, std::size_t> index;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    const auto id = j.at("puzzle_id").get<std::string>();
    auto [it, fresh] = index.emplace(id, out.size());
    if (fresh) out.push_back({id, {}});
    auto& set = out[it->second];
    const int c = j.at("candidate_index").get<int>();
    if (c < 0 || c >= 64) throw std::out_of_range("candidate index out of range");
    if (static_cast<int>(set.per_candidate.size()) <= c) set.per_candidate.resize(c + 1);
    set.per_candidate[c].push_back({j.at("text").get<std::string>(), c, j.at("label").get<std::string>()});
  }
  return out;
}

}  // namespace raven
