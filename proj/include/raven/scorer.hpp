#pragma once

// Candidate selection by token-length-normalized log-probability.
//
// For each candidate y the score is
//     total(y) = sum over sub-prompts p of  logprob(p) / tokens(p)
// and the choice is argmax_y total(y), ties to the lowest index.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "raven/encoder.hpp"
#include "raven/oracle.hpp"
#include "raven/prompt_parser.hpp"

namespace raven {

struct TokenScore {
  double logprob_sum = 0.0;
  int token_count = 0;
};

class ScoringError : public std::runtime_error {
 public:
  enum class Kind { Transport, ContextOverflow, Malformed };
  ScoringError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// A language model that scores a given text (echo scoring, nothing
/// generated). Implementations must be safe to call from several threads.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string id() const = 0;
  virtual TokenScore score(std::string_view text, std::string_view label) = 0;
  /// Whether the score depends on the sub-prompt label as well as the text.
  virtual bool label_sensitive() const { return false; }
};

inline TokenScore score_text(Backend& backend, std::string_view text, std::string_view label = "all") {
  if (text.empty()) throw std::invalid_argument("score_text: empty prompt");
  auto s = backend.score(text, label);
  if (s.token_count < 1) throw ScoringError(ScoringError::Kind::Malformed, "backend reported no tokens");
  return s;
}

// ---------------------------------------------------------------------------
// Mock backends
// ---------------------------------------------------------------------------

/// Tokenizer shared by the mocks: runs of letters/digits are one token, any
/// other non-space character is its own token.
inline int mock_token_count(std::string_view text) {
  int n = 0;
  bool in_word = false;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      if (!in_word) ++n;
      in_word = true;
    } else {
      in_word = false;
      if (!std::isspace(c)) ++n;
    }
  }
  return n;
}

/// Every token costs the same log-probability.
class MockUniform : public Backend {
 public:
  explicit MockUniform(double per_token = 1.0) : per_token_(per_token) {}
  std::string id() const override { return "mock-uniform"; }
  TokenScore score(std::string_view text, std::string_view) override {
    const int n = mock_token_count(text);
    return {-per_token_ * n, n};
  }

 private:
  double per_token_;
};

/// Per-token cost grows with prompt length, so shorter prompts win after
/// normalization.
class MockLengthBiased : public Backend {
 public:
  explicit MockLengthBiased(double per_token = 1.0, double growth = 0.01)
      : per_token_(per_token), growth_(growth) {}
  std::string id() const override { return "mock-length-biased"; }
  TokenScore score(std::string_view text, std::string_view) override {
    const int n = mock_token_count(text);
    return {-per_token_ * n - growth_ * n * n, n};
  }

 private:
  double per_token_, growth_;
};

namespace score_detail {

inline bool rows_accept(Slot slot, GridShape grid, const std::vector<oracle::Row>& rows) {
  if (rows.empty()) return false;
  const std::span<const oracle::Row> context(rows.data(), rows.size() - 1);
  for (const auto& h : oracle::induce_slot(slot, grid, context))
    if (oracle::hypothesis_accepts(h, grid, rows.back())) return true;
  return false;
}

}  // namespace score_detail

/// Reads a prompt back and checks that its last row follows some relation
/// induced from the rows above it, exactly as the symbolic solver would.
inline bool prompt_consistent(std::string_view text, std::string_view label,
                              const parse::NameLookup& lookup = parse::ordinal_lookup()) {
  try {
    if (const auto attr = parse::label_attribute(label)) {
      if (*attr == AttributeKind::Orientation) return true;  // never rule-governed
      const auto rows = parse::parse_attribute_prompt(text, *attr, lookup);
      const std::size_t ncomp = rows.front().front().size();
      for (std::size_t c = 0; c < ncomp; ++c) {
        std::vector<oracle::Row> triples;
        int cap = 1;
        for (const auto& row : rows) {
          oracle::Row t{};
          for (int i = 0; i < 3; ++i) {
            if (row[i].size() != ncomp) return false;
            const auto& cell = row[i][c];
            if (!cell.value) return false;
            t[i] = *cell.value;
            cap = std::max(cap, cell.capacity);
          }
          triples.push_back(t);
        }
        const GridShape grid = *attr == AttributeKind::Position ? parse::grid_for_capacity(cap) : kGrid3x3;
        if (!score_detail::rows_accept({static_cast<int>(c), *attr}, grid, triples)) return false;
      }
      return true;
    }
    const auto rows = parse::parse_naming(text, lookup);
    const auto& first = rows.front().front();
    for (std::size_t c = 0; c < first.components.size(); ++c) {
      const auto grid = first.components[c].layout.grid;
      const auto tmpl = grid.capacity() > 1 ? grid_template(grid) : single_entity_template();
      for (auto a : tmpl.governed) {
        const Slot slot{static_cast<int>(c), a};
        std::vector<oracle::Row> triples;
        for (const auto& row : rows) {
          oracle::Row t{};
          for (int i = 0; i < 3; ++i) {
            const auto v = oracle::slot_value(row[i], slot);
            if (!v) return false;
            t[i] = *v;
          }
          triples.push_back(t);
        }
        if (!score_detail::rows_accept(slot, grid, triples)) return false;
      }
    }
    return true;
  } catch (const parse::ParseError&) {
    return false;
  } catch (const DomainError&) {
    return false;
  }
}

/// Uniform per-token cost plus a per-token bonus when the prompt's final row
/// is rule-consistent. Prompts it cannot read get no bonus.
class MockOracle : public Backend {
 public:
  explicit MockOracle(double per_token = 1.0, double bonus = 0.5) : per_token_(per_token), bonus_(bonus) {}
  std::string id() const override { return "mock-oracle"; }
  bool label_sensitive() const override { return true; }
  TokenScore score(std::string_view text, std::string_view label) override {
    const int n = mock_token_count(text);
    const double per = -per_token_ + (prompt_consistent(text, label) ? bonus_ : 0.0);
    return {per * n, n};
  }

 private:
  double per_token_, bonus_;
};

// ---------------------------------------------------------------------------
// Rate limiting
// ---------------------------------------------------------------------------

/// Sliding one-minute window: at most `per_minute` acquisitions in any
/// 60-second span.
class RateLimiter {
 public:
  using Clock = std::chrono::steady_clock;
  struct TimeSource {
    std::function<Clock::time_point()> now;
    std::function<void(Clock::duration)> sleep;
  };

  static TimeSource real_time() {
    return {[] { return Clock::now(); }, [](Clock::duration d) { std::this_thread::sleep_for(d); }};
  }

  explicit RateLimiter(int per_minute, TimeSource time = real_time())
      : limit_(per_minute), time_(std::move(time)) {}

  /// Blocks until a request may be sent; returns the admission time.
  Clock::time_point acquire() {
    std::lock_guard lock(mu_);
    if (limit_ <= 0) return time_.now();
    constexpr auto kWindow = std::chrono::minutes(1);
    while (true) {
      const auto now = time_.now();
      while (!sent_.empty() && sent_.front() + kWindow <= now) sent_.pop_front();
      if (static_cast<int>(sent_.size()) < limit_) {
        sent_.push_back(now);
        return now;
      }
      time_.sleep(sent_.front() + kWindow - now);
    }
  }

 private:
  int limit_;
  TimeSource time_;
  std::mutex mu_;
  std::deque<Clock::time_point> sent_;
};

// ---------------------------------------------------------------------------
// HTTP completion backend
// ---------------------------------------------------------------------------

struct BackendSpec {
  enum class Kind { Http, MockUniform, MockOracle, MockLengthBiased };
  Kind kind = Kind::MockUniform;
  std::string endpoint;
  std::string model;
  /// Environment variable holding the API key; sent as a bearer token.
  std::string api_key_env = "RAVEN_API_KEY";
  int requests_per_minute = 0;
  int max_retries = 4;
  double backoff_seconds = 0.5;
  double timeout_seconds = 60.0;
};

inline std::string_view to_string(BackendSpec::Kind k) {
  switch (k) {
    case BackendSpec::Kind::Http: return "http";
    case BackendSpec::Kind::MockUniform: return "mock-uniform";
    case BackendSpec::Kind::MockOracle: return "mock-oracle";
    case BackendSpec::Kind::MockLengthBiased: return "mock-length-biased";
  }
  return "?";
}

inline BackendSpec::Kind parse_backend_kind(std::string_view s) {
  for (auto k : {BackendSpec::Kind::Http, BackendSpec::Kind::MockUniform, BackendSpec::Kind::MockOracle,
                 BackendSpec::Kind::MockLengthBiased})
    if (s == to_string(k)) return k;
  throw std::invalid_argument("unknown backend: " + std::string(s));
}

inline void to_json(nlohmann::json& j, const BackendSpec& b) {
  j = {{"kind", to_string(b.kind)},
       {"endpoint", b.endpoint},
       {"model", b.model},
       {"api_key_env", b.api_key_env},
       {"requests_per_minute", b.requests_per_minute},
       {"max_retries", b.max_retries},
       {"backoff_seconds", b.backoff_seconds},
       {"timeout_seconds", b.timeout_seconds}};
}

inline void from_json(const nlohmann::json& j, BackendSpec& b) {
  b = {};
  b.kind = parse_backend_kind(j.value("kind", std::string("mock-uniform")));
  b.endpoint = j.value("endpoint", std::string());
  b.model = j.value("model", std::string());
  b.api_key_env = j.value("api_key_env", b.api_key_env);
  b.requests_per_minute = j.value("requests_per_minute", 0);
  b.max_retries = j.value("max_retries", b.max_retries);
  b.backoff_seconds = j.value("backoff_seconds", b.backoff_seconds);
  b.timeout_seconds = j.value("timeout_seconds", b.timeout_seconds);
  if (b.kind == BackendSpec::Kind::Http && b.endpoint.empty())
    throw std::invalid_argument("http backend requires an endpoint");
}

// ---------------------------------------------------------------------------
// Persistent cache
// ---------------------------------------------------------------------------

inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Memoizes another backend in memory and, optionally, on disk (one JSON
/// file per entry, keyed by a hash of backend id and text).
class CachedBackend : public Backend {
 public:
  explicit CachedBackend(Backend& inner, std::optional<std::filesystem::path> dir = std::nullopt)
      : inner_(inner), dir_(std::move(dir)) {
    if (dir_) std::filesystem::create_directories(*dir_);
  }

  std::string id() const override { return inner_.id(); }
  bool label_sensitive() const override { return inner_.label_sensitive(); }

  TokenScore score(std::string_view text, std::string_view label) override {
    const std::string key = cache_key(text, label);
    {
      std::lock_guard lock(mu_);
      if (auto it = memory_.find(key); it != memory_.end()) {
        ++hits_;
        return it->second;
      }
    }
    if (auto s = load(key, text, label)) {
      std::lock_guard lock(mu_);
      memory_.emplace(key, *s);
      ++hits_;
      return *s;
    }
    const auto s = inner_.score(text, label);
    std::lock_guard lock(mu_);
    ++misses_;
    memory_.emplace(key, s);
    store(key, text, label, s);
    return s;
  }

  long hits() const { return hits_; }
  long misses() const { return misses_; }

 private:
  std::string cache_key(std::string_view text, std::string_view label) const {
    std::uint64_t h = fnv1a64(inner_.id());
    h = fnv1a64(std::string_view("\0", 1), h);
    h = fnv1a64(text, h);
    if (inner_.label_sensitive()) h = fnv1a64(label, fnv1a64(std::string_view("\0", 1), h));
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }

  std::optional<TokenScore> load(const std::string& key, std::string_view text, std::string_view label) const {
    if (!dir_) return std::nullopt;
    std::ifstream in(*dir_ / (key + ".json"));
    if (!in) return std::nullopt;
    try {
      const auto j = nlohmann::json::parse(in);
      if (j.at("backend") != inner_.id() || j.at("text") != text) return std::nullopt;
      if (inner_.label_sensitive() && j.at("label") != label) return std::nullopt;
      return TokenScore{j.at("logprob_sum").get<double>(), j.at("token_count").get<int>()};
    } catch (const nlohmann::json::exception&) {
      return std::nullopt;
    }
  }

  void store(const std::string& key, std::string_view text, std::string_view label, TokenScore s) const {
    if (!dir_) return;
    const auto final_path = *dir_ / (key + ".json");
    const auto tmp = *dir_ / (key + ".json.tmp");
    {
      std::ofstream out(tmp);
      out << nlohmann::json{{"backend", inner_.id()},
                            {"label", label},
                            {"text", text},
                            {"logprob_sum", s.logprob_sum},
                            {"token_count", s.token_count}}
                 .dump();
    }
    std::filesystem::rename(tmp, final_path);
  }

  Backend& inner_;
  std::optional<std::filesystem::path> dir_;
  mutable std::mutex mu_;
  std::unordered_map<std::string, TokenScore> memory_;
  long hits_ = 0, misses_ = 0;
};

// ---------------------------------------------------------------------------
// Selection
// ---------------------------------------------------------------------------

enum class Normalization {
  /// Divide by the token count of the whole prompt, context rows included.
  FullPrompt,
  /// Score only the continuation after the text shared by all candidates.
  CandidateOnly,
};

struct SubScore {
  std::string label;
  double logprob_sum = 0.0;
  int token_count = 1;

  friend bool operator==(const SubScore&, const SubScore&) = default;
};

struct ScoreRecord {
  int candidate_index = 0;
  std::vector<SubScore> sub_scores;
  double total = 0.0;

  friend bool operator==(const ScoreRecord&, const ScoreRecord&) = default;
};

struct Selection {
  std::string puzzle_id;
  int chosen_index = -1;
  bool tie = false;
  std::vector<ScoreRecord> records;
  std::optional<std::string> failure;

  bool scored() const { return !failure && chosen_index >= 0; }
  friend bool operator==(const Selection&, const Selection&) = default;
};

inline void to_json(nlohmann::json& j, const Selection& s) {
  auto recs = nlohmann::json::array();
  for (const auto& r : s.records) {
    auto subs = nlohmann::json::array();
    for (const auto& ss : r.sub_scores)
      subs.push_back({{"label", ss.label}, {"logprob_sum", ss.logprob_sum}, {"token_count", ss.token_count}});
    recs.push_back({{"candidate_index", r.candidate_index}, {"total", r.total}, {"sub_scores", subs}});
  }
  j = {{"puzzle_id", s.puzzle_id}, {"chosen_index", s.chosen_index}, {"tie", s.tie}, {"records", recs}};
  j["failure"] = s.failure ? nlohmann::json(*s.failure) : nlohmann::json(nullptr);
}

inline void from_json(const nlohmann::json& j, Selection& s) {
  s = {};
  s.puzzle_id = j.at("puzzle_id").get<std::string>();
  s.chosen_index = j.at("chosen_index").get<int>();
  s.tie = j.at("tie").get<bool>();
  if (j.contains("failure") && !j.at("failure").is_null()) s.failure = j.at("failure").get<std::string>();
  for (const auto& r : j.at("records")) {
    ScoreRecord rec;
    rec.candidate_index = r.at("candidate_index").get<int>();
    rec.total = r.at("total").get<double>();
    for (const auto& ss : r.at("sub_scores"))
      rec.sub_scores.push_back(
          {ss.at("label").get<std::string>(), ss.at("logprob_sum").get<double>(), ss.at("token_count").get<int>()});
    s.records.push_back(std::move(rec));
  }
}

namespace score_detail {

/// Longest prefix shared by all texts, cut back to a separator so that no
/// token is split.
inline std::string shared_prefix(const std::vector<std::string_view>& texts) {
  if (texts.empty()) return {};
  std::size_t n = texts.front().size();
  for (const auto& t : texts) {
    std::size_t i = 0;
    while (i < n && i < t.size() && t[i] == texts.front()[i]) ++i;
    n = i;
  }
  while (n > 0) {
    const char c = texts.front()[n - 1];
    if (c == ' ' || c == '\n') break;
    --n;
  }
  std::string p(texts.front().substr(0, n));
  while (!p.empty() && (p.back() == ' ' || p.back() == '\n')) p.pop_back();
  return p;
}

}  // namespace score_detail

/// Argmax over candidates of the summed normalized sub-prompt scores.
inline Selection select(const PromptSet& prompts, Backend& backend,
                        Normalization norm = Normalization::FullPrompt) {
  Selection sel;
  sel.puzzle_id = prompts.puzzle_id;
  const auto& pc = prompts.per_candidate;
  if (pc.size() != 8) {
    sel.failure = "expected 8 candidates, got " + std::to_string(pc.size());
    return sel;
  }
  for (const auto& c : pc)
    if (c.size() != pc.front().size()) {
      sel.failure = "candidates disagree on sub-prompt count";
      return sel;
    }
  try {
    std::vector<std::optional<TokenScore>> prefix(pc.front().size());
    if (norm == Normalization::CandidateOnly) {
      for (std::size_t j = 0; j < prefix.size(); ++j) {
        std::vector<std::string_view> texts;
        for (const auto& c : pc) texts.push_back(c[j].text);
        const auto p = score_detail::shared_prefix(texts);
        if (!p.empty()) prefix[j] = score_text(backend, p, pc.front()[j].label);
      }
    }
    for (int i = 0; i < 8; ++i) {
      ScoreRecord rec;
      rec.candidate_index = i;
      for (std::size_t j = 0; j < pc[i].size(); ++j) {
        const auto& pr = pc[i][j];
        const auto s = score_text(backend, pr.text, pr.label);
        rec.sub_scores.push_back({pr.label, s.logprob_sum, s.token_count});
        if (prefix[j]) {
          const int n = std::max(1, s.token_count - prefix[j]->token_count);
          rec.total += (s.logprob_sum - prefix[j]->logprob_sum) / n;
        } else {
          rec.total += s.logprob_sum / s.token_count;
        }
      }
      sel.records.push_back(std::move(rec));
    }
  } catch (const ScoringError& e) {
    sel.records.clear();
    sel.failure = e.what();
    return sel;
  }
  double best = sel.records.front().total;
  int best_i = 0;
  for (int i = 1; i < 8; ++i)
    if (sel.records[i].total > best) {
      best = sel.records[i].total;
      best_i = i;
    }
  const double tol = 1e-12 * std::max(1.0, std::abs(best));
  int at_best = 0;
  for (const auto& r : sel.records)
    if (std::abs(r.total - best) <= tol) ++at_best;
  sel.chosen_index = best_i;
  sel.tie = at_best > 1;
  return sel;
}

// ---------------------------------------------------------------------------
// Batches
// ---------------------------------------------------------------------------

struct BatchOptions {
  int concurrency = 1;
  /// JSONL journal of finished puzzles; puzzles already in it are skipped.
  std::optional<std::filesystem::path> journal;
  Normalization normalization = Normalization::FullPrompt;
};

inline std::map<std::string, Selection> read_journal(const std::filesystem::path& path) {
  std::map<std::string, Selection> done;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      auto s = nlohmann::json::parse(line).get<Selection>();
      done[s.puzzle_id] = std::move(s);
    } catch (const nlohmann::json::exception&) {
      break;  // torn final line from an interrupted write
    }
  }
  return done;
}

/// Scores every prompt set with at most `concurrency` puzzles in flight.
/// Results come back in input order regardless of scheduling.
inline std::vector<Selection> batch_score(const std::vector<PromptSet>& sets, Backend& backend,
                                          const BatchOptions& opts = {}) {
  std::vector<Selection> out(sets.size());
  std::vector<char> pending(sets.size(), 1);
  if (opts.journal) {
    const auto done = read_journal(*opts.journal);
    for (std::size_t i = 0; i < sets.size(); ++i)
      if (auto it = done.find(sets[i].puzzle_id); it != done.end()) {
        out[i] = it->second;
        pending[i] = 0;
      }
  }
  std::ofstream journal;
  if (opts.journal) journal.open(*opts.journal, std::ios::app);
  std::mutex journal_mu;
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i; (i = next++) < sets.size();) {
      if (!pending[i]) continue;
      out[i] = select(sets[i], backend, opts.normalization);
      if (opts.journal) {
        std::lock_guard lock(journal_mu);
        journal << nlohmann::json(out[i]).dump() << '\n' << std::flush;
      }
    }
  };
  const int n = std::max(1, opts.concurrency);
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  return out;
}

}  // namespace raven
