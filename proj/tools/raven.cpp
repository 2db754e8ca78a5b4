// Command-line front end. Exit status: 0 success, 1 hard failure, 2 partial.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "raven/raven.hpp"

namespace {

using namespace raven;

constexpr int kOk = 0;
constexpr int kHardFailure = 1;

struct Output {
  std::ofstream file;
  std::ostream* os = &std::cout;

  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file.open(path);
    if (!file) throw std::runtime_error("cannot write " + path);
    os = &file;
  }
  std::ostream& operator*() { return *os; }
};

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

std::vector<PuzzleInstance> load_puzzles(const std::string& path) {
  auto in = open_in(path);
  return read_jsonl(in);
}

std::vector<ResultRow> load_results(const std::string& path) {
  auto in = open_in(path);
  return read_results(in);
}

// generate -------------------------------------------------------------------

struct GenerateArgs {
  std::string subtask = "center", mode = "raven", out;
  std::uint64_t seed = 0;
  int n = 1;
  bool noise = false;
  unsigned threads = 0;
};

int cmd_generate(const GenerateArgs& a) {
  GeneratorConfig cfg;
  cfg.subtask = parse_subtask(a.subtask);
  cfg.mode = parse_mode(a.mode);
  cfg.seed = a.seed;
  cfg.count = a.n;
  cfg.noise_orientation = a.noise;
  const auto puzzles = generate(cfg, a.threads ? a.threads : std::max(1u, std::thread::hardware_concurrency()));
  Output out(a.out);
  write_jsonl(*out, puzzles);
  const auto fallbacks = std::count_if(puzzles.begin(), puzzles.end(),
                                       [](const PuzzleInstance& p) { return p.fallback_warning; });
  if (fallbacks) std::cerr << "warning: " << fallbacks << " puzzles fell back to raven-style candidates\n";
  return kOk;
}

// solve ----------------------------------------------------------------------

int cmd_solve(const std::string& in, int rows, const std::string& out_path) {
  Output out(out_path);
  int solved = 0, total = 0;
  for (const auto& p0 : load_puzzles(in)) {
    const auto p = ablate_rows(p0, rows);
    const auto s = oracle::solve(p);
    const bool ok = s.chosen && *s.chosen == p.candidates.answer_index;
    solved += ok;
    ++total;
    *out << nlohmann::json{{"puzzle_id", p.id},
                           {"rows_included", p.rows_included},
                           {"consistent", s.consistent},
                           {"chosen", s.chosen ? nlohmann::json(*s.chosen) : nlohmann::json(nullptr)},
                           {"answer_index", p.candidates.answer_index},
                           {"correct", ok}}
                .dump()
         << '\n';
  }
  std::cerr << "solved " << solved << "/" << total << "\n";
  return kOk;
}

// encode ---------------------------------------------------------------------

struct EncodeArgs {
  std::string abstraction = "naming", distractor = "none", in, out;
  bool by_attribute = false, by_component = false, layout = false;
  int rows = 3;
  std::uint64_t lexicon_seed = 0, distractor_seed = 0;
};

int cmd_encode(const EncodeArgs& a) {
  AbstractionConfig cfg;
  cfg.scheme = parse_scheme(a.abstraction);
  cfg.by_attribute = a.by_attribute;
  cfg.by_component = a.by_component;
  cfg.layout_abstraction = a.layout;
  cfg.rows_included = a.rows;
  cfg.lexicon_seed = a.lexicon_seed;
  cfg.distractor = parse_distractor(a.distractor);
  cfg.distractor_seed = a.distractor_seed;
  if ((cfg.by_attribute || cfg.by_component || cfg.layout_abstraction) && cfg.scheme == Scheme::Naming)
    cfg.scheme = Scheme::Decomposed;
  std::optional<Lexicon> lexicon;
  if (cfg.scheme == Scheme::RandomNaming) lexicon.emplace(cfg.lexicon_seed);
  Output out(a.out);
  int failed = 0, total = 0;
  for (const auto& p : load_puzzles(a.in)) {
    ++total;
    try {
      write_prompts(*out, encode(p, cfg, lexicon ? &*lexicon : nullptr));
    } catch (const UnsupportedScheme& e) {
      ++failed;
      std::cerr << p.id << ": " << e.what() << "\n";
    }
  }
  if (failed == 0) return kOk;
  return failed == total ? kHardFailure : 2;
}

// score ----------------------------------------------------------------------

struct ScoreArgs {
  std::string backend = "mock-uniform", endpoint, model, cache, journal, puzzles, in, out;
  std::string normalization = "full-prompt";
  int concurrency = 1, rate_limit = 0;
};

int cmd_score(const ScoreArgs& a) {
  BackendSpec spec;
  spec.kind = parse_backend_kind(a.backend);
  spec.endpoint = a.endpoint;
  spec.model = a.model;
  spec.requests_per_minute = a.rate_limit;
  auto handle = open_backend(spec, a.cache);
  auto in = open_in(a.in);
  const auto sets = read_prompts(in);
  BatchOptions opts;
  opts.concurrency = a.concurrency;
  if (!a.journal.empty()) opts.journal = a.journal;
  opts.normalization =
      a.normalization == "candidate-only" ? Normalization::CandidateOnly : Normalization::FullPrompt;
  const auto selections = batch_score(sets, handle.get(), opts);
  Output out(a.out);
  if (a.puzzles.empty()) {
    int failed = 0;
    for (const auto& s : selections) {
      *out << nlohmann::json(s).dump() << '\n';
      failed += !!s.failure;
    }
    if (failed == 0) return kOk;
    return failed == static_cast<int>(selections.size()) ? kHardFailure : 2;
  }
  // Join with the puzzle file to produce result rows with answers and rules.
  std::map<std::string, PuzzleInstance> by_id;
  for (auto& p : load_puzzles(a.puzzles)) by_id.emplace(p.id, std::move(p));
  std::vector<ResultRow> rows;
  for (const auto& s : selections) {
    auto it = by_id.find(s.puzzle_id);
    if (it == by_id.end()) throw std::runtime_error("no puzzle for prompt set " + s.puzzle_id);
    rows.push_back(make_row(it->second, s));
  }
  write_results(*out, rows);
  print_summary(std::cerr, summarize(rows));
  return exit_status(rows);
}

// run / analyses -------------------------------------------------------------

int cmd_run(const std::string& config) {
  const auto cfg = load_config(config);
  auto handle = open_backend(cfg.backend, cfg.cache_dir);
  const auto out = run(cfg, handle.get());
  print_summary(std::cout, out.summary);
  return exit_status(out.rows);
}

int cmd_analyze(const std::string& in, const std::string& by, const std::string& out_path, bool json) {
  const auto rows = load_results(in);
  const auto table = breakdown(rows, parse_breakdown(by));
  Output out(out_path);
  if (json) {
    auto arr = nlohmann::json::array();
    for (const auto& r : table) {
      auto j = cell_json(r.cell);
      j[by] = r.key;
      arr.push_back(j);
    }
    *out << arr.dump(2) << '\n';
  } else {
    for (const auto& r : table) *out << std::left << std::setw(18) << r.key << " " << format_cell(r.cell) << "\n";
  }
  return kOk;
}

int cmd_ablate(const std::string& config, const std::string& out_path) {
  const auto cfg = load_config(config);
  auto handle = open_backend(cfg.backend, cfg.cache_dir);
  const auto t = row_ablation(cfg, handle.get());
  print_ablation(std::cout, t);
  if (!out_path.empty()) {
    Output out(out_path);
    *out << ablation_json(t).dump(2) << '\n';
  }
  int failed = 0;
  for (const auto& [_, cells] : t.cells)
    for (const auto& c : cells) failed += c.failures();
  return failed ? 2 : kOk;
}

int cmd_distractor(const std::string& config, const std::string& out_path) {
  const auto cfg = load_config(config);
  auto handle = open_backend(cfg.backend, cfg.cache_dir);
  const auto t = distractor_experiment(cfg, handle.get());
  print_distractor(std::cout, t);
  if (!out_path.empty()) {
    Output out(out_path);
    *out << distractor_json(t).dump(2) << '\n';
  }
  int failed = 0;
  for (const auto& row : t.cells)
    for (const auto& c : row) failed += c.failures();
  return failed ? 2 : kOk;
}

int cmd_export(const std::string& in, const std::string& format, const std::string& out_path) {
  const auto rows = load_results(in);
  Output out(out_path);
  export_results(*out, rows, parse_export_format(format));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate, encode, score and analyze Raven-style matrix puzzles"};
  app.require_subcommand(1);
  std::function<int()> action;

  GenerateArgs ga;
  auto* gen = app.add_subcommand("generate", "Generate puzzles as JSONL");
  gen->add_option("--subtask", ga.subtask, "center, grid2x2, grid3x3, lr, ud, oic, oig")->required();
  gen->add_option("--mode", ga.mode, "raven or impartial");
  gen->add_option("--seed", ga.seed, "Base seed");
  gen->add_option("-n", ga.n, "Number of puzzles")->check(CLI::PositiveNumber);
  gen->add_flag("--noise-orientation", ga.noise, "Randomize orientation of every entity");
  gen->add_option("--threads", ga.threads, "Worker threads (default: all cores)");
  gen->add_option("-o,--output", ga.out, "Output file (default stdout)");
  gen->callback([&] { action = [&] { return cmd_generate(ga); }; });

  std::string solve_in, solve_out;
  int solve_rows = 3;
  auto* sol = app.add_subcommand("solve", "Solve puzzles with the symbolic oracle");
  sol->add_option("puzzles", solve_in)->required();
  sol->add_option("--rows", solve_rows, "Visible rows (1-3)")->check(CLI::Range(1, 3));
  sol->add_option("-o,--output", solve_out);
  sol->callback([&] { action = [&] { return cmd_solve(solve_in, solve_rows, solve_out); }; });

  EncodeArgs ea;
  auto* enc = app.add_subcommand("encode", "Encode puzzles as prompts");
  enc->add_option("--abstraction", ea.abstraction, "quasi-image, random, naming or decomp")->required();
  enc->add_flag("--by-attribute", ea.by_attribute);
  enc->add_flag("--by-component", ea.by_component);
  enc->add_flag("--layout-abstraction", ea.layout);
  enc->add_option("--rows", ea.rows)->check(CLI::Range(1, 3));
  enc->add_option("--distractor", ea.distractor, "none, raven or random");
  enc->add_option("--distractor-seed", ea.distractor_seed);
  enc->add_option("--lexicon-seed", ea.lexicon_seed);
  enc->add_option("puzzles", ea.in)->required();
  enc->add_option("-o,--output", ea.out);
  enc->callback([&] { action = [&] { return cmd_encode(ea); }; });

  ScoreArgs sa;
  auto* sc = app.add_subcommand("score", "Score prompts and select candidates");
  sc->add_option("--backend", sa.backend, "http, mock-uniform, mock-oracle or mock-length-biased");
  sc->add_option("--endpoint", sa.endpoint, "Completions URL for the http backend");
  sc->add_option("--model", sa.model);
  sc->add_option("--concurrency", sa.concurrency)->check(CLI::PositiveNumber);
  sc->add_option("--rate-limit", sa.rate_limit, "Requests per minute (0 = unlimited)");
  sc->add_option("--cache", sa.cache, "Score cache directory");
  sc->add_option("--journal", sa.journal, "Resume journal file");
  sc->add_option("--normalization", sa.normalization, "full-prompt or candidate-only");
  sc->add_option("--puzzles", sa.puzzles, "Puzzle JSONL; when given, emit result rows");
  sc->add_option("prompts", sa.in)->required();
  sc->add_option("-o,--output", sa.out);
  sc->callback([&] { action = [&] { return cmd_score(sa); }; });

  std::string config;
  auto* rn = app.add_subcommand("run", "Run an experiment from a JSON config");
  rn->add_option("--config", config)->required();
  rn->callback([&] { action = [&] { return cmd_run(config); }; });

  std::string an_in, an_by = "attribute", an_out;
  bool an_json = false;
  auto* an = app.add_subcommand("analyze", "Accuracy by attribute or relation");
  an->add_option("results", an_in)->required();
  an->add_option("--by", an_by)->check(CLI::IsMember({"attribute", "relation"}));
  an->add_flag("--json", an_json);
  an->add_option("-o,--output", an_out);
  an->callback([&] { action = [&] { return cmd_analyze(an_in, an_by, an_out, an_json); }; });

  std::string table_out;
  auto* ab = app.add_subcommand("ablate-rows", "Accuracy with 1, 2 and 3 visible rows");
  ab->add_option("--config", config)->required();
  ab->add_option("-o,--output", table_out, "Write the table as JSON");
  ab->callback([&] { action = [&] { return cmd_ablate(config, table_out); }; });

  auto* di = app.add_subcommand("distractor", "Orientation distractor table on Center");
  di->add_option("--config", config)->required();
  di->add_option("-o,--output", table_out, "Write the table as JSON");
  di->callback([&] { action = [&] { return cmd_distractor(config, table_out); }; });

  std::string ex_in, ex_format = "csv", ex_out;
  auto* ex = app.add_subcommand("export", "Export results as CSV or JSON");
  ex->add_option("results", ex_in)->required();
  ex->add_option("--format", ex_format)->check(CLI::IsMember({"csv", "json"}));
  ex->add_option("-o,--output", ex_out);
  ex->callback([&] { action = [&] { return cmd_export(ex_in, ex_format, ex_out); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kHardFailure;
  }
  try {
    return action();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kHardFailure;
  }
}
