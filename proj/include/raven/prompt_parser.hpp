#pragma once

// Reads prompts written by encoder.hpp back into structured values.

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "raven/domain.hpp"
#include "raven/encoder.hpp"
#include "raven/lexicon.hpp"

namespace raven::parse {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using NameLookup = std::function<std::optional<int>(AttributeKind, std::string_view)>;

inline NameLookup ordinal_lookup() {
  return [](AttributeKind k, std::string_view t) -> std::optional<int> {
    if (auto v = parse_entity_name(k, t)) return v->index;
    return std::nullopt;
  };
}

inline NameLookup lexicon_lookup(const Lexicon& lex) {
  return [&lex](AttributeKind k, std::string_view t) -> std::optional<int> {
    if (auto v = lex.lookup(k, t)) return v->index;
    return std::nullopt;
  };
}

/// Splits on `sep` outside any (...) or [...] nesting.
inline std::vector<std::string> split_top(std::string_view s, std::string_view sep) {
  std::vector<std::string> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '(' || c == '[') ++depth;
    else if (c == ')' || c == ']') --depth;
    else if (depth == 0 && s.compare(i, sep.size(), sep) == 0) {
      out.emplace_back(s.substr(start, i - start));
      i += sep.size() - 1;
      start = i + 1;
    }
    if (depth < 0) throw ParseError("unbalanced brackets");
  }
  if (depth != 0) throw ParseError("unbalanced brackets");
  out.emplace_back(s.substr(start));
  return out;
}

inline std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    out.emplace_back(text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start));
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return out;
}

inline std::string_view strip(std::string_view s, char open, char close) {
  if (s.size() < 2 || s.front() != open || s.back() != close)
    throw ParseError("expected " + std::string(1, open) + "..." + std::string(1, close) + ": " +
                     std::string(s));
  return s.substr(1, s.size() - 2);
}

inline GridShape grid_for_capacity(int cap) {
  if (cap == 1) return kSingle;
  if (cap == 4) return kGrid2x2;
  if (cap == 9) return kGrid3x3;
  throw ParseError("unsupported grid capacity " + std::to_string(cap));
}

inline std::vector<AttributeKind> tuple_kinds(std::size_t arity) {
  if (arity == 3) return {AttributeKind::Type, AttributeKind::Size, AttributeKind::Color};
  if (arity == 4)
    return {AttributeKind::Type, AttributeKind::Size, AttributeKind::Color, AttributeKind::Orientation};
  throw ParseError("entity tuple must have 3 or 4 fields");
}

inline int lookup_or_throw(const NameLookup& lookup, AttributeKind k, std::string_view tok) {
  if (auto v = lookup(k, tok)) return *v;
  throw ParseError("unknown " + std::string(to_string(k)) + " name '" + std::string(tok) + "'");
}

inline EntityRecord parse_tuple(std::string_view s, const NameLookup& lookup) {
  const auto fields = split_top(strip(s, '(', ')'), ", ");
  const auto kinds = tuple_kinds(fields.size());
  EntityRecord e;
  for (std::size_t i = 0; i < fields.size(); ++i) e.set(kinds[i], lookup_or_throw(lookup, kinds[i], fields[i]));
  return e;
}

inline SlotMask parse_occupancy(std::string_view s, int* capacity = nullptr) {
  const auto bits = split_top(strip(s, '[', ']'), ", ");
  SlotMask m = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == "1") m |= SlotMask{1} << i;
    else if (bits[i] != "0") throw ParseError("occupancy entries must be 0 or 1");
  }
  if (capacity) *capacity = static_cast<int>(bits.size());
  return m;
}

/// One component segment of the naming grammar.
inline ComponentRecord parse_segment(std::string_view seg, int id, const NameLookup& lookup) {
  ComponentRecord comp;
  comp.id = id;
  auto& lay = comp.layout;
  if (seg.empty()) throw ParseError("empty segment");
  if (seg.front() == '(') {
    lay.grid = kSingle;
    lay.positions = 1;
    lay.entities.emplace(0, parse_tuple(seg, lookup));
    return comp;
  }
  const auto close = seg.find(']');
  if (seg.front() != '[' || close == std::string_view::npos) throw ParseError("bad segment: " + std::string(seg));
  if (close + 1 < seg.size()) {
    // occupancy map followed by " (summaries)"
    int cap = 0;
    lay.positions = parse_occupancy(seg.substr(0, close + 1), &cap);
    lay.grid = grid_for_capacity(cap);
    const auto rest = seg.substr(close + 1);
    if (rest.size() < 3 || rest[0] != ' ') throw ParseError("bad layout segment");
    const auto summaries = split_top(strip(rest.substr(1), '(', ')'), ", ");
    const auto kinds = tuple_kinds(summaries.size());
    EntityRecord e;
    for (std::size_t i = 0; i < kinds.size(); ++i) {
      const auto vals = split_top(strip(summaries[i], '[', ']'), ", ");
      if (vals.size() != 1) throw ParseError("non-uniform layout summary");
      e.set(kinds[i], lookup_or_throw(lookup, kinds[i], vals[0]));
    }
    for (int s : slots_of(lay.positions)) lay.entities.emplace(s, e);
    return comp;
  }
  const auto entries = split_top(strip(seg, '[', ']'), ", ");
  lay.grid = grid_for_capacity(static_cast<int>(entries.size()));
  for (std::size_t s = 0; s < entries.size(); ++s) {
    if (entries[s] == "-") continue;
    lay.positions |= SlotMask{1} << s;
    lay.entities.emplace(static_cast<int>(s), parse_tuple(entries[s], lookup));
  }
  return comp;
}

inline MatrixItem parse_item(std::string_view text, const NameLookup& lookup) {
  MatrixItem item;
  const auto segs = split_top(text, " / ");
  for (std::size_t i = 0; i < segs.size(); ++i)
    item.components.push_back(parse_segment(segs[i], static_cast<int>(i), lookup));
  return item;
}

/// Rows of items from a naming-grammar prompt (visible rows only).
inline std::vector<std::vector<MatrixItem>> parse_naming(std::string_view text,
                                                         const NameLookup& lookup = ordinal_lookup()) {
  std::vector<std::vector<MatrixItem>> rows;
  for (const auto& line : split_lines(text)) {
    std::vector<MatrixItem> row;
    for (const auto& item : split_top(line, "; ")) row.push_back(parse_item(item, lookup));
    if (row.size() != 3) throw ParseError("row must hold 3 items");
    rows.push_back(std::move(row));
  }
  return rows;
}

/// One cell of a single-attribute sub-prompt: the uniform value (nullopt if
/// the layout disagrees) and the grid capacity implied by the text.
struct AttributeCell {
  std::optional<int> value;
  int capacity = 1;
};

inline AttributeCell parse_attribute_cell(std::string_view s, AttributeKind kind, const NameLookup& lookup) {
  AttributeCell cell;
  if (kind == AttributeKind::Position) {
    cell.value = static_cast<int>(parse_occupancy(s, &cell.capacity));
    return cell;
  }
  if (kind == AttributeKind::Number) {
    try {
      cell.value = std::stoi(std::string(s)) - 1;
    } catch (const std::exception&) {
      throw ParseError("bad count '" + std::string(s) + "'");
    }
    return cell;
  }
  if (!s.empty() && s.front() == '[') {
    const auto entries = split_top(strip(s, '[', ']'), ", ");
    std::optional<int> v;
    bool mixed = false;
    for (const auto& e : entries) {
      if (e == "-") continue;
      const int x = lookup_or_throw(lookup, kind, e);
      if (v && *v != x) mixed = true;
      v = x;
    }
    if (!mixed) cell.value = v;
    return cell;
  }
  cell.value = lookup_or_throw(lookup, kind, s);
  return cell;
}

/// Rows -> items -> components of one attribute's values.
using AttributeRows = std::vector<std::vector<std::vector<AttributeCell>>>;

inline AttributeRows parse_attribute_prompt(std::string_view text, AttributeKind kind,
                                            const NameLookup& lookup = ordinal_lookup()) {
  AttributeRows rows;
  for (const auto& line : split_lines(text)) {
    std::vector<std::vector<AttributeCell>> row;
    for (const auto& item : split_top(line, ", ")) {
      std::vector<AttributeCell> comps;
      for (const auto& c : split_top(item, " / ")) comps.push_back(parse_attribute_cell(c, kind, lookup));
      row.push_back(std::move(comps));
    }
    if (row.size() != 3) throw ParseError("row must hold 3 items");
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Attribute named by a sub-prompt label ("c0.size" -> Size); nullopt for
/// whole-item labels such as "all" or "c1".
inline std::optional<AttributeKind> label_attribute(std::string_view label) {
  const auto dot = label.rfind('.');
  if (dot == std::string_view::npos) return std::nullopt;
  return parse_attribute(label.substr(dot + 1));
}

}  // namespace raven::parse
