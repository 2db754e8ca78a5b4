#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "raven/domain.hpp"

namespace raven {

namespace detail {
inline constexpr std::string_view kBundledWords =
#include "raven/detail/lexicon_words.inc"
    ;
}  // namespace detail

/// The bundled word list, split once.
inline const std::vector<std::string_view>& bundled_words() {
  static const std::vector<std::string_view> words = [] {
    std::vector<std::string_view> out;
    std::string_view s = detail::kBundledWords;
    while (!s.empty()) {
      const auto nl = s.find('\n');
      const auto w = s.substr(0, nl);
      if (!w.empty()) out.push_back(w);
      if (nl == std::string_view::npos) break;
      s.remove_prefix(nl + 1);
    }
    return out;
  }();
  return words;
}

/// Seeded value-to-word bijection for each entity attribute kind. Words are
/// never shared between kinds.
class Lexicon {
 public:
  explicit Lexicon(std::uint64_t seed, std::span<const std::string_view> words = bundled_words())
      : seed_(seed) {
    std::size_t needed = 0;
    for (auto k : kEntityAttributes) needed += domain_size(k);
    if (words.size() < needed)
      throw std::invalid_argument("word list has " + std::to_string(words.size()) +
                                  " words, need at least " + std::to_string(needed));
    // Partial Fisher-Yates: only the first `needed` draws matter.
    std::vector<std::string_view> pool(words.begin(), words.end());
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < needed; ++i) {
      const auto j = std::uniform_int_distribution<std::size_t>(i, pool.size() - 1)(rng);
      std::swap(pool[i], pool[j]);
    }
    std::size_t next = 0;
    for (std::size_t k = 0; k < kEntityAttributes.size(); ++k) {
      const int n = domain_size(kEntityAttributes[k]);
      for (int v = 0; v < n; ++v) {
        names_[k].emplace_back(pool[next]);
        reverse_[k].emplace(std::string(pool[next]), v);
        ++next;
      }
    }
  }

  std::uint64_t seed() const { return seed_; }

  const std::string& name(AttributeValue v) const {
    const auto& ns = names_.at(slot(v.kind));
    if (v.index < 0 || v.index >= static_cast<int>(ns.size()))
      throw DomainError("value index out of domain");
    return ns[v.index];
  }

  std::optional<AttributeValue> lookup(AttributeKind kind, std::string_view word) const {
    const auto& m = reverse_.at(slot(kind));
    auto it = m.find(std::string(word));
    if (it == m.end()) return std::nullopt;
    return AttributeValue{kind, it->second};
  }

 private:
  static std::size_t slot(AttributeKind kind) {
    for (std::size_t i = 0; i < kEntityAttributes.size(); ++i)
      if (kEntityAttributes[i] == kind) return i;
    throw DomainError("lexicon covers entity attributes only");
  }

  std::uint64_t seed_;
  std::array<std::vector<std::string>, 4> names_;
  std::array<std::map<std::string, int, std::less<>>, 4> reverse_;
};

}  // namespace raven
