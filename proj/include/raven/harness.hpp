#pragma once

// Experiment orchestration: puzzles -> prompts -> scores -> result tables.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/distributions/binomial.hpp>
#include <nlohmann/json.hpp>

#include "raven/domain.hpp"
#include "raven/encoder.hpp"
#include "raven/generator.hpp"
#include "raven/lexicon.hpp"
#include "raven/scorer.hpp"

namespace raven {

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct ExperimentConfig {
  std::string name = "experiment";
  std::vector<SubTask> subtasks{kAllSubTasks.begin(), kAllSubTasks.end()};
  GenerationMode mode = GenerationMode::Raven;
  AbstractionConfig abstraction;
  BackendSpec backend;
  int n_per_subtask = 500;
  std::uint64_t seed = 0;
  bool noise_orientation = false;
  int concurrency = 1;
  Normalization normalization = Normalization::FullPrompt;
  /// Optional inputs and outputs; empty means "not used".
  std::string puzzles;
  std::string cache_dir;
  std::string journal;
  std::string output = "results.jsonl";
  std::string summary;
};

inline void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  auto subs = nlohmann::json::array();
  for (auto s : c.subtasks) subs.push_back(to_string(s));
  j = {{"name", c.name},
       {"subtasks", subs},
       {"mode", to_string(c.mode)},
       {"abstraction", c.abstraction},
       {"backend", c.backend},
       {"n_per_subtask", c.n_per_subtask},
       {"seed", c.seed},
       {"noise_orientation", c.noise_orientation},
       {"concurrency", c.concurrency},
       {"normalization", c.normalization == Normalization::FullPrompt ? "full-prompt" : "candidate-only"},
       {"puzzles", c.puzzles},
       {"cache_dir", c.cache_dir},
       {"journal", c.journal},
       {"output", c.output},
       {"summary", c.summary}};
}

inline void from_json(const nlohmann::json& j, ExperimentConfig& c) {
  static const std::vector<std::string> known = {
      "name",     "subtasks",    "mode",          "abstraction", "backend", "n_per_subtask",
      "seed",     "noise_orientation", "concurrency", "normalization", "puzzles", "cache_dir",
      "journal",  "output",      "summary"};
  for (const auto& [k, v] : j.items())
    if (std::find(known.begin(), known.end(), k) == known.end())
      throw std::invalid_argument("unknown config key: " + k);
  c = {};
  c.name = j.value("name", c.name);
  if (j.contains("subtasks")) {
    c.subtasks.clear();
    for (const auto& s : j.at("subtasks")) c.subtasks.push_back(parse_subtask(s.get<std::string>()));
  }
  c.mode = parse_mode(j.value("mode", std::string("raven")));
  if (j.contains("abstraction")) c.abstraction = j.at("abstraction").get<AbstractionConfig>();
  if (j.contains("backend")) c.backend = j.at("backend").get<BackendSpec>();
  c.n_per_subtask = j.value("n_per_subtask", c.n_per_subtask);
  c.seed = j.value("seed", c.seed);
  c.noise_orientation = j.value("noise_orientation", false);
  c.concurrency = j.value("concurrency", 1);
  const auto norm = j.value("normalization", std::string("full-prompt"));
  if (norm == "full-prompt") c.normalization = Normalization::FullPrompt;
  else if (norm == "candidate-only") c.normalization = Normalization::CandidateOnly;
  else throw std::invalid_argument("unknown normalization: " + norm);
  c.puzzles = j.value("puzzles", std::string());
  c.cache_dir = j.value("cache_dir", std::string());
  c.journal = j.value("journal", std::string());
  c.output = j.value("output", c.output);
  c.summary = j.value("summary", std::string());
  if (c.n_per_subtask < 1) throw std::invalid_argument("n_per_subtask must be at least 1");
  if (c.subtasks.empty()) throw std::invalid_argument("subtasks must not be empty");
  if (c.concurrency < 1) throw std::invalid_argument("concurrency must be at least 1");
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  return nlohmann::json::parse(in).get<ExperimentConfig>();
}

// ---------------------------------------------------------------------------
// Result rows
// ---------------------------------------------------------------------------

struct RuleRef {
  int component = 0;
  AttributeKind attribute = AttributeKind::Type;
  RelationType relation = RelationType::Constant;

  friend bool operator==(const RuleRef&, const RuleRef&) = default;
};

struct ResultRow {
  std::string puzzle_id;
  SubTask subtask = SubTask::Center;
  int chosen_index = -1;
  int answer_index = 0;
  bool correct = false;
  std::vector<RuleRef> rules;
  int rows_included = 3;
  bool tie = false;
  std::optional<std::string> failure;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

inline std::string format_rules(const std::vector<RuleRef>& rules) {
  std::string out;
  for (const auto& r : rules) {
    if (!out.empty()) out += ';';
    out += "c" + std::to_string(r.component) + "." + std::string(to_string(r.attribute)) + "=" +
           std::string(to_string(r.relation));
  }
  return out;
}

inline std::vector<RuleRef> parse_rules(std::string_view s) {
  std::vector<RuleRef> out;
  while (!s.empty()) {
    const auto semi = s.find(';');
    const auto item = s.substr(0, semi);
    const auto dot = item.find('.'), eq = item.find('=');
    if (item.size() < 2 || item[0] != 'c' || dot == std::string_view::npos || eq == std::string_view::npos)
      throw std::invalid_argument("bad rule reference: " + std::string(item));
    RuleRef r;
    r.component = std::stoi(std::string(item.substr(1, dot - 1)));
    r.attribute = parse_attribute(item.substr(dot + 1, eq - dot - 1));
    r.relation = parse_relation(item.substr(eq + 1));
    out.push_back(r);
    if (semi == std::string_view::npos) break;
    s.remove_prefix(semi + 1);
  }
  return out;
}

inline void to_json(nlohmann::json& j, const ResultRow& r) {
  auto rules = nlohmann::json::array();
  for (const auto& x : r.rules)
    rules.push_back({{"component", x.component},
                     {"attribute", to_string(x.attribute)},
                     {"relation", to_string(x.relation)}});
  j = {{"puzzle_id", r.puzzle_id},     {"subtask", to_string(r.subtask)},
       {"chosen_index", r.chosen_index}, {"answer_index", r.answer_index},
       {"correct", r.correct},         {"rules", rules},
       {"rows_included", r.rows_included}, {"tie", r.tie}};
  j["failure"] = r.failure ? nlohmann::json(*r.failure) : nlohmann::json(nullptr);
}

inline void from_json(const nlohmann::json& j, ResultRow& r) {
  r = {};
  r.puzzle_id = j.at("puzzle_id").get<std::string>();
  r.subtask = parse_subtask(j.at("subtask").get<std::string>());
  r.chosen_index = j.at("chosen_index").get<int>();
  r.answer_index = j.at("answer_index").get<int>();
  r.correct = j.at("correct").get<bool>();
  for (const auto& x : j.at("rules"))
    r.rules.push_back({x.at("component").get<int>(), parse_attribute(x.at("attribute").get<std::string>()),
                       parse_relation(x.at("relation").get<std::string>())});
  r.rows_included = j.at("rows_included").get<int>();
  r.tie = j.at("tie").get<bool>();
  if (j.contains("failure") && !j.at("failure").is_null()) r.failure = j.at("failure").get<std::string>();
  if (r.correct != (!r.failure && r.chosen_index == r.answer_index))
    throw std::invalid_argument(r.puzzle_id + ": correct flag disagrees with chosen/answer");
}

inline ResultRow make_row(const PuzzleInstance& p, const Selection& s) {
  ResultRow r;
  r.puzzle_id = p.id;
  r.subtask = p.subtask;
  r.answer_index = p.candidates.answer_index;
  r.rows_included = p.rows_included;
  for (const auto& rule : p.rules) r.rules.push_back({rule.component, rule.attribute, rule.relation.type});
  if (s.puzzle_id != p.id) {
    r.failure = "score record for " + s.puzzle_id + " does not match puzzle";
    return r;
  }
  r.failure = s.failure;
  r.tie = s.tie;
  r.chosen_index = s.failure ? -1 : s.chosen_index;
  r.correct = !s.failure && s.chosen_index == r.answer_index;
  return r;
}

inline void write_results(std::ostream& os, const std::vector<ResultRow>& rows) {
  for (const auto& r : rows) os << nlohmann::json(r).dump() << '\n';
}

inline std::vector<ResultRow> read_results(std::istream& is) {
  std::vector<ResultRow> rows;
  std::string line;
  while (std::getline(is, line))
    if (!line.empty()) rows.push_back(nlohmann::json::parse(line).get<ResultRow>());
  return rows;
}

// ---------------------------------------------------------------------------
// Accuracy cells
// ---------------------------------------------------------------------------

/// Exact (Clopper-Pearson) two-sided interval for a binomial proportion.
inline std::pair<double, double> clopper_pearson(int successes, int trials, double confidence = 0.99) {
  if (trials <= 0) return {0.0, 1.0};
  using boost::math::binomial_distribution;
  const double alpha = (1.0 - confidence) / 2.0;
  return {binomial_distribution<>::find_lower_bound_on_p(trials, successes, alpha),
          binomial_distribution<>::find_upper_bound_on_p(trials, successes, alpha)};
}

/// Central range of success counts that Binomial(trials, p) produces with
/// probability at least `confidence`.
inline std::pair<int, int> binomial_acceptance(int trials, double p, double confidence = 0.99) {
  const boost::math::binomial_distribution<> dist(trials, p);
  const double alpha = (1.0 - confidence) / 2.0;
  int lo = 0;
  while (lo < trials && boost::math::cdf(dist, lo) < alpha) ++lo;
  int hi = trials;
  while (hi > 0 && boost::math::cdf(boost::math::complement(dist, hi - 1)) < alpha) --hi;
  return {lo, hi};
}

struct Cell {
  int raw_n = 0;        // puzzles attempted
  int effective_n = 0;  // puzzles scored
  int correct = 0;
  int ties = 0;

  std::optional<double> accuracy() const {
    if (effective_n == 0) return std::nullopt;
    return static_cast<double>(correct) / effective_n;
  }
  std::pair<double, double> ci99() const { return clopper_pearson(correct, effective_n, 0.99); }
  int failures() const { return raw_n - effective_n; }

  void add(const ResultRow& r) {
    ++raw_n;
    if (r.failure) return;
    ++effective_n;
    correct += r.correct;
    ties += r.tie;
  }
};

inline nlohmann::json cell_json(const Cell& c) {
  nlohmann::json j = {{"raw_n", c.raw_n}, {"effective_n", c.effective_n}, {"correct", c.correct},
                      {"ties", c.ties},   {"failures", c.failures()}};
  if (const auto a = c.accuracy()) {
    const auto [lo, hi] = c.ci99();
    j["accuracy"] = *a;
    j["ci99"] = {lo, hi};
  } else {
    j["accuracy"] = nullptr;
    j["ci99"] = nullptr;
  }
  return j;
}

inline std::string format_pct(std::optional<double> v) {
  if (!v) return "n/a";
  std::ostringstream os;
  os << std::fixed << std::setprecision(1) << 100.0 * *v << "%";
  return os.str();
}

inline std::string format_cell(const Cell& c) {
  std::ostringstream os;
  os << format_pct(c.accuracy());
  if (c.accuracy()) {
    const auto [lo, hi] = c.ci99();
    os << " [" << format_pct(lo) << ", " << format_pct(hi) << "]";
  }
  os << " n=" << c.effective_n << "/" << c.raw_n;
  return os.str();
}

struct Summary {
  std::vector<std::pair<SubTask, Cell>> per_subtask;

  /// Unweighted mean over sub-tasks that scored at least one puzzle.
  std::optional<double> macro_accuracy() const {
    double sum = 0;
    int n = 0;
    for (const auto& [_, c] : per_subtask)
      if (auto a = c.accuracy()) {
        sum += *a;
        ++n;
      }
    if (n == 0) return std::nullopt;
    return sum / n;
  }
  int raw_n() const {
    int n = 0;
    for (const auto& [_, c] : per_subtask) n += c.raw_n;
    return n;
  }
  int failures() const {
    int n = 0;
    for (const auto& [_, c] : per_subtask) n += c.failures();
    return n;
  }
};

inline Summary summarize(const std::vector<ResultRow>& rows) {
  Summary s;
  for (auto st : kAllSubTasks) {
    Cell c;
    for (const auto& r : rows)
      if (r.subtask == st) c.add(r);
    if (c.raw_n > 0) s.per_subtask.emplace_back(st, c);
  }
  return s;
}

inline nlohmann::json summary_json(const Summary& s) {
  auto subs = nlohmann::json::array();
  for (const auto& [st, c] : s.per_subtask) {
    auto j = cell_json(c);
    j["subtask"] = to_string(st);
    subs.push_back(j);
  }
  const auto m = s.macro_accuracy();
  return {{"subtasks", subs},
          {"macro_accuracy", m ? nlohmann::json(*m) : nlohmann::json(nullptr)},
          {"raw_n", s.raw_n()},
          {"failures", s.failures()}};
}

inline void print_summary(std::ostream& os, const Summary& s) {
  for (const auto& [st, c] : s.per_subtask)
    os << std::left << std::setw(9) << to_string(st) << " " << format_cell(c) << "\n";
  os << std::left << std::setw(9) << "macro" << " " << format_pct(s.macro_accuracy()) << "\n";
}

/// Process exit status: 0 all scored, 2 some unscored, 1 nothing scored.
inline int exit_status(const std::vector<ResultRow>& rows) {
  const auto failed = std::count_if(rows.begin(), rows.end(), [](const ResultRow& r) { return r.failure.has_value(); });
  if (failed == 0) return 0;
  return failed == static_cast<long>(rows.size()) ? 1 : 2;
}

// ---------------------------------------------------------------------------
// Running
// ---------------------------------------------------------------------------

/// The seeded puzzle subset for one sub-task; every condition of an
/// experiment reuses it so comparisons are paired.
inline std::vector<PuzzleInstance> experiment_puzzles(const ExperimentConfig& cfg) {
  std::vector<PuzzleInstance> out;
  if (!cfg.puzzles.empty()) {
    std::ifstream in(cfg.puzzles);
    if (!in) throw std::runtime_error("cannot open puzzles " + cfg.puzzles);
    std::map<SubTask, int> taken;
    for (auto& p : read_jsonl(in)) {
      if (std::find(cfg.subtasks.begin(), cfg.subtasks.end(), p.subtask) == cfg.subtasks.end()) continue;
      if (taken[p.subtask]++ >= cfg.n_per_subtask) continue;
      out.push_back(std::move(p));
    }
    return out;
  }
  for (auto st : cfg.subtasks) {
    GeneratorConfig g;
    g.subtask = st;
    g.mode = cfg.mode;
    g.seed = cfg.seed;
    g.count = cfg.n_per_subtask;
    g.noise_orientation = cfg.noise_orientation;
    auto ps = generate(g, std::max(1u, std::thread::hardware_concurrency()));
    out.insert(out.end(), std::make_move_iterator(ps.begin()), std::make_move_iterator(ps.end()));
  }
  return out;
}

struct EvalOptions {
  int concurrency = 1;
  Normalization normalization = Normalization::FullPrompt;
  std::optional<std::filesystem::path> journal;
};

/// Encodes and scores `puzzles` under one abstraction. Encoding failures
/// (e.g. an image abstraction on a multi-component puzzle) become failed rows.
inline std::vector<ResultRow> evaluate(const std::vector<PuzzleInstance>& puzzles, const AbstractionConfig& abs,
                                       Backend& backend, const EvalOptions& opts = {}) {
  std::optional<Lexicon> lexicon;
  if (abs.scheme == Scheme::RandomNaming) lexicon.emplace(abs.lexicon_seed);
  std::vector<PromptSet> sets(puzzles.size());
  std::vector<std::optional<std::string>> encode_errors(puzzles.size());
  std::vector<PuzzleInstance> prepared(puzzles.size());
  for (std::size_t i = 0; i < puzzles.size(); ++i) {
    prepared[i] = prepare(puzzles[i], abs);
    try {
      sets[i] = encode(puzzles[i], abs, lexicon ? &*lexicon : nullptr);
    } catch (const std::exception& e) {
      encode_errors[i] = std::string("encode: ") + e.what();
      sets[i].puzzle_id = puzzles[i].id;
    }
  }
  BatchOptions bo;
  bo.concurrency = opts.concurrency;
  bo.normalization = opts.normalization;
  bo.journal = opts.journal;
  std::vector<PromptSet> to_score;
  std::vector<std::size_t> where;
  for (std::size_t i = 0; i < sets.size(); ++i)
    if (!encode_errors[i]) {
      to_score.push_back(std::move(sets[i]));
      where.push_back(i);
    }
  const auto sel = batch_score(to_score, backend, bo);
  std::vector<ResultRow> rows(puzzles.size());
  for (std::size_t i = 0; i < puzzles.size(); ++i)
    if (encode_errors[i]) {
      Selection s;
      s.puzzle_id = puzzles[i].id;
      s.failure = encode_errors[i];
      rows[i] = make_row(prepared[i], s);
    }
  for (std::size_t k = 0; k < where.size(); ++k) rows[where[k]] = make_row(prepared[where[k]], sel[k]);
  return rows;
}

struct RunOutput {
  std::vector<ResultRow> rows;
  Summary summary;
};

/// The whole protocol for one configuration, writing results and summary
/// files when the config names them.
inline RunOutput run(const ExperimentConfig& cfg, Backend& backend) {
  const auto puzzles = experiment_puzzles(cfg);
  EvalOptions eo;
  eo.concurrency = cfg.concurrency;
  eo.normalization = cfg.normalization;
  if (!cfg.journal.empty()) eo.journal = cfg.journal;
  RunOutput out;
  out.rows = evaluate(puzzles, cfg.abstraction, backend, eo);
  out.summary = summarize(out.rows);
  if (!cfg.output.empty()) {
    std::ofstream os(cfg.output);
    if (!os) throw std::runtime_error("cannot write " + cfg.output);
    write_results(os, out.rows);
  }
  if (!cfg.summary.empty()) {
    std::ofstream os(cfg.summary);
    if (!os) throw std::runtime_error("cannot write " + cfg.summary);
    auto j = summary_json(out.summary);
    j["config"] = cfg;
    os << j.dump(2) << '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Analyses
// ---------------------------------------------------------------------------

enum class BreakdownBy { Attribute, Relation };

inline BreakdownBy parse_breakdown(std::string_view s) {
  if (s == "attribute") return BreakdownBy::Attribute;
  if (s == "relation") return BreakdownBy::Relation;
  throw std::invalid_argument("breakdown must be attribute or relation");
}

struct BreakdownRow {
  std::string key;
  Cell cell;
};

/// Accuracy over the puzzles that require each attribute or relation. An
/// attribute counts only when some rule on it is not Constant.
inline std::vector<BreakdownRow> breakdown(const std::vector<ResultRow>& rows, BreakdownBy by) {
  std::vector<BreakdownRow> out;
  if (by == BreakdownBy::Attribute) {
    for (auto a : {AttributeKind::Number, AttributeKind::Position, AttributeKind::Type, AttributeKind::Size,
                   AttributeKind::Color}) {
      BreakdownRow br{std::string(to_string(a)), {}};
      for (const auto& r : rows)
        if (std::any_of(r.rules.begin(), r.rules.end(), [&](const RuleRef& x) {
              return x.attribute == a && x.relation != RelationType::Constant;
            }))
          br.cell.add(r);
      out.push_back(br);
    }
  } else {
    for (auto rel : kAllRelations) {
      BreakdownRow br{std::string(to_string(rel)), {}};
      for (const auto& r : rows)
        if (std::any_of(r.rules.begin(), r.rules.end(), [&](const RuleRef& x) { return x.relation == rel; }))
          br.cell.add(r);
      out.push_back(br);
    }
  }
  return out;
}

/// Live-model reference accuracies for naming prompts with 1, 2, 3 rows.
inline std::optional<std::array<double, 3>> row_ablation_reference(SubTask st) {
  switch (st) {
    case SubTask::Center: return std::array{0.368, 0.692, 0.772};
    case SubTask::Grid2x2: return std::array{0.540, 0.710, 0.780};
    case SubTask::Grid3x3: return std::array{0.730, 0.852, 0.864};
    case SubTask::LR: return std::array{0.140, 0.382, 0.542};
    case SubTask::UD: return std::array{0.124, 0.420, 0.536};
    case SubTask::OIC: return std::array{0.196, 0.536, 0.648};
    case SubTask::OIG: return std::array{0.320, 0.622, 0.748};
  }
  return std::nullopt;
}

struct AblationTable {
  /// cells[subtask][k-1]
  std::vector<std::pair<SubTask, std::array<Cell, 3>>> cells;
  std::array<std::optional<double>, 3> macro{};
};

inline AblationTable row_ablation(const ExperimentConfig& cfg, Backend& backend) {
  const auto puzzles = experiment_puzzles(cfg);
  AblationTable t;
  for (auto st : cfg.subtasks) t.cells.push_back({st, {}});
  EvalOptions eo{cfg.concurrency, cfg.normalization, std::nullopt};
  for (int k = 1; k <= 3; ++k) {
    auto abs = cfg.abstraction;
    abs.rows_included = k;
    const auto rows = evaluate(puzzles, abs, backend, eo);
    Summary s;
    for (auto& [st, cells] : t.cells) {
      for (const auto& r : rows)
        if (r.subtask == st) cells[k - 1].add(r);
      s.per_subtask.emplace_back(st, cells[k - 1]);
    }
    t.macro[k - 1] = s.macro_accuracy();
  }
  return t;
}

inline nlohmann::json ablation_json(const AblationTable& t) {
  auto rows = nlohmann::json::array();
  for (const auto& [st, cells] : t.cells) {
    nlohmann::json row = {{"subtask", to_string(st)}};
    for (int k = 0; k < 3; ++k) row["rows_" + std::to_string(k + 1)] = cell_json(cells[k]);
    if (const auto ref = row_ablation_reference(st)) row["reference"] = *ref;
    rows.push_back(row);
  }
  auto macro = nlohmann::json::array();
  for (const auto& m : t.macro) macro.push_back(m ? nlohmann::json(*m) : nlohmann::json(nullptr));
  return {{"rows", rows}, {"macro", macro}};
}

inline void print_ablation(std::ostream& os, const AblationTable& t) {
  os << std::left << std::setw(9) << "subtask" << std::setw(34) << " 1 row" << std::setw(34) << " 2 rows"
     << std::setw(34) << " 3 rows"
     << " reference\n";
  for (const auto& [st, cells] : t.cells) {
    os << std::setw(9) << to_string(st);
    for (const auto& c : cells) os << " " << std::setw(33) << format_cell(c);
    if (const auto ref = row_ablation_reference(st))
      os << " " << format_pct((*ref)[0]) << "/" << format_pct((*ref)[1]) << "/" << format_pct((*ref)[2]);
    os << "\n";
  }
  os << std::setw(9) << "macro";
  for (const auto& m : t.macro) os << " " << std::setw(33) << format_pct(m);
  os << "\n";
}

struct DistractorTable {
  /// cells[distractor][0 = naming, 1 = decomposition]
  std::array<std::array<Cell, 2>, 3> cells{};
};

/// Live-model reference accuracies on Center, indexed like DistractorTable.
inline constexpr std::array<std::array<double, 2>, 3> kDistractorReference = {
    {{0.772, 0.800}, {0.760, 0.800}, {0.726, 0.778}}};

inline DistractorTable distractor_experiment(const ExperimentConfig& cfg, Backend& backend) {
  auto c = cfg;
  c.subtasks = {SubTask::Center};
  const auto puzzles = experiment_puzzles(c);
  DistractorTable t;
  EvalOptions eo{cfg.concurrency, cfg.normalization, std::nullopt};
  const std::array modes = {DistractorMode::None, DistractorMode::FromRules, DistractorMode::Random};
  for (int d = 0; d < 3; ++d) {
    for (int a = 0; a < 2; ++a) {
      AbstractionConfig abs = a == 0 ? AbstractionConfig::naming() : AbstractionConfig::full_decomposition();
      abs.rows_included = cfg.abstraction.rows_included;
      abs.distractor = modes[d];
      abs.distractor_seed = cfg.abstraction.distractor_seed;
      for (const auto& r : evaluate(puzzles, abs, backend, eo)) t.cells[d][a].add(r);
    }
  }
  return t;
}

inline nlohmann::json distractor_json(const DistractorTable& t) {
  auto rows = nlohmann::json::array();
  for (int d = 0; d < 3; ++d) {
    const auto mode = to_string(std::array{DistractorMode::None, DistractorMode::FromRules, DistractorMode::Random}[d]);
    rows.push_back({{"distractor", mode},
                    {"naming", cell_json(t.cells[d][0])},
                    {"decomposition", cell_json(t.cells[d][1])},
                    {"reference", kDistractorReference[d]}});
  }
  return {{"rows", rows}};
}

inline void print_distractor(std::ostream& os, const DistractorTable& t) {
  os << std::left << std::setw(10) << "values" << std::setw(34) << " naming" << std::setw(34) << " decomposition"
     << " reference\n";
  const std::array names = {"none", "raven", "random"};
  for (int d = 0; d < 3; ++d) {
    os << std::setw(10) << names[d] << " " << std::setw(33) << format_cell(t.cells[d][0]) << " " << std::setw(33)
       << format_cell(t.cells[d][1]) << " " << format_pct(kDistractorReference[d][0]) << "/"
       << format_pct(kDistractorReference[d][1]) << "\n";
  }
}

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

/// Stable export column order.
inline const std::vector<std::string>& export_columns() {
  static const std::vector<std::string> cols = {"puzzle_id", "subtask", "chosen_index", "answer_index", "correct",
                                                "rules",     "rows_included", "tie",   "failure"};
  return cols;
}

namespace export_detail {

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

/// RFC 4180 records; quoted fields may contain separators and newlines.
inline std::vector<std::vector<std::string>> parse_csv(std::istream& is) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> rec;
  std::string field;
  bool quoted = false, any = false;
  char c;
  while (is.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (is.peek() == '"') {
          field += '"';
          is.get();
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      rec.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      rec.push_back(std::move(field));
      field.clear();
      records.push_back(std::move(rec));
      rec.clear();
      any = false;
    } else if (c != '\r') {
      field += c;
    }
  }
  if (quoted) throw std::invalid_argument("unterminated quoted CSV field");
  if (any) {
    rec.push_back(std::move(field));
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace export_detail

enum class ExportFormat { Csv, Json };

inline ExportFormat parse_export_format(std::string_view s) {
  if (s == "csv") return ExportFormat::Csv;
  if (s == "json") return ExportFormat::Json;
  throw std::invalid_argument("export format must be csv or json");
}

inline void export_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  const auto& cols = export_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << "\n";
  for (const auto& r : rows) {
    using export_detail::csv_field;
    os << csv_field(r.puzzle_id) << ',' << to_string(r.subtask) << ',' << r.chosen_index << ',' << r.answer_index
       << ',' << (r.correct ? "true" : "false") << ',' << csv_field(format_rules(r.rules)) << ','
       << r.rows_included << ',' << (r.tie ? "true" : "false") << ',' << (r.failure ? csv_field(*r.failure) : "")
       << "\n";
  }
}

/// Inverse of export_csv. An empty failure field means "no failure".
inline std::vector<ResultRow> import_csv(std::istream& is) {
  auto records = export_detail::parse_csv(is);
  if (records.empty() || records.front() != export_columns())
    throw std::invalid_argument("CSV header does not match the export columns");
  std::vector<ResultRow> rows;
  const auto as_bool = [](const std::string& s) {
    if (s == "true") return true;
    if (s == "false") return false;
    throw std::invalid_argument("bad boolean: " + s);
  };
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& f = records[i];
    if (f.size() != export_columns().size()) throw std::invalid_argument("CSV row has wrong field count");
    ResultRow r;
    r.puzzle_id = f[0];
    r.subtask = parse_subtask(f[1]);
    r.chosen_index = std::stoi(f[2]);
    r.answer_index = std::stoi(f[3]);
    r.correct = as_bool(f[4]);
    r.rules = parse_rules(f[5]);
    r.rows_included = std::stoi(f[6]);
    r.tie = as_bool(f[7]);
    if (!f[8].empty()) r.failure = f[8];
    rows.push_back(std::move(r));
  }
  return rows;
}

/// {"columns": [...], "rows": [[...], ...]}; see docs/results.schema.json.
inline void export_json(std::ostream& os, const std::vector<ResultRow>& rows) {
  nlohmann::ordered_json j;
  j["columns"] = export_columns();
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows)
    j["rows"].push_back({r.puzzle_id, to_string(r.subtask), r.chosen_index, r.answer_index, r.correct,
                         format_rules(r.rules), r.rows_included, r.tie,
                         r.failure ? nlohmann::ordered_json(*r.failure) : nlohmann::ordered_json(nullptr)});
  os << j.dump(2) << "\n";
}

inline void export_results(std::ostream& os, const std::vector<ResultRow>& rows, ExportFormat f) {
  if (f == ExportFormat::Csv) export_csv(os, rows);
  else export_json(os, rows);
}

}  // namespace raven
