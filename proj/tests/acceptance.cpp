// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <chrono>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "raven/harness.hpp"
#include "raven/oracle.hpp"
#include "raven/prompt_parser.hpp"

using namespace raven;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

unsigned threads() { return std::max(1u, std::thread::hardware_concurrency()); }

std::vector<PuzzleInstance> batch(SubTask t, GenerationMode m, std::uint64_t seed, int n) {
  return generate({t, m, seed, n}, threads());
}

/// Shared by criteria 1 and 2 so the corpus is generated once.
struct Corpus {
  std::vector<PuzzleInstance> puzzles;
  std::vector<oracle::Solution> solutions;
  double seconds = 0;
};

const Corpus& big_corpus() {
  static const Corpus c = [] {
    Corpus out;
    const auto t0 = std::chrono::steady_clock::now();
    for (auto t : kAllSubTasks)
      for (auto m : {GenerationMode::Raven, GenerationMode::Impartial}) {
        auto ps = batch(t, m, 2024, 1000);
        out.puzzles.insert(out.puzzles.end(), ps.begin(), ps.end());
      }
    for (const auto& p : out.puzzles) out.solutions.push_back(oracle::solve(p));
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
  }();
  return c;
}

Outcome oracle_completeness() {
  const auto& c = big_corpus();
  int solved = 0;
  for (std::size_t i = 0; i < c.puzzles.size(); ++i)
    solved += c.solutions[i].chosen == std::optional<int>(c.puzzles[i].candidates.answer_index);
  std::ostringstream d;
  d << solved << "/" << c.puzzles.size() << " solved in " << c.seconds << " s";
  return {solved == static_cast<int>(c.puzzles.size()) && c.seconds < 60.0, d.str()};
}

Outcome uniqueness() {
  const auto& c = big_corpus();
  int unique = 0;
  for (const auto& s : c.solutions) unique += s.consistent.size() == 1;
  std::ostringstream d;
  d << unique << "/" << c.puzzles.size() << " with one consistent candidate";
  return {unique == static_cast<int>(c.puzzles.size()), d.str()};
}

Outcome uniform_chance() {
  std::vector<PuzzleInstance> ps;
  int i = 0;
  for (auto t : kAllSubTasks) {
    const int n = i++ < 5 ? 286 : 285;  // 2000 in total
    auto b = batch(t, GenerationMode::Raven, 77, n);
    ps.insert(ps.end(), b.begin(), b.end());
  }
  MockUniform m;
  const auto rows = evaluate(ps, AbstractionConfig::naming(), m);
  int correct = 0;
  for (const auto& r : rows) correct += r.correct;
  const auto [lo, hi] = binomial_acceptance(static_cast<int>(rows.size()), 0.125, 0.99);
  std::ostringstream d;
  d << correct << "/" << rows.size() << " correct, acceptance [" << lo << ", " << hi << "]";
  return {rows.size() == 2000 && correct >= lo && correct <= hi, d.str()};
}

Outcome decomposition_oracle() {
  MockOracle m;
  std::ostringstream d;
  bool ok = true;
  for (auto t : kAllSubTasks) {
    const auto rows = evaluate(batch(t, GenerationMode::Raven, 31, 200), AbstractionConfig::full_decomposition(), m);
    const auto c = summarize(rows).per_subtask.at(0).second;
    ok = ok && c.correct == 200 && c.raw_n == 200;
    d << to_string(t) << " " << c.correct << " ";
  }
  return {ok, d.str()};
}

Outcome parser_round_trip() {
  int puzzles = 0, mismatches = 0;
  int i = 0;
  for (auto t : kAllSubTasks) {
    const int n = i++ < 6 ? 143 : 142;  // 1000 in total
    for (const auto& p : batch(t, GenerationMode::Raven, 5, n)) {
      ++puzzles;
      const auto rows = parse::parse_naming(encode_naming(p, p.candidates.answer_index).text);
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
          const auto& expect = (r == 2 && c == 2) ? p.answer() : p.matrix.at(r, c);
          mismatches += !(rows.at(r).at(c) == expect);
        }
    }
  }
  std::ostringstream d;
  d << puzzles << " puzzles, " << mismatches << " mismatches";
  return {puzzles == 1000 && mismatches == 0, d.str()};
}

Outcome label_counts() {
  const std::map<SubTask, std::size_t> expected = {{SubTask::Center, 3}, {SubTask::Grid2x2, 5}, {SubTask::Grid3x3, 5},
                                                   {SubTask::LR, 6},     {SubTask::UD, 6},      {SubTask::OIC, 6},
                                                   {SubTask::OIG, 8}};
  bool ok = true;
  std::ostringstream d;
  for (const auto& [t, n] : expected) {
    const auto set = encode(batch(t, GenerationMode::Raven, 1, 1).front(), AbstractionConfig::full_decomposition());
    const auto got = set.per_candidate.at(0).size();
    ok = ok && got == n;
    d << to_string(t) << "=" << got << " ";
  }
  return {ok, d.str()};
}

Outcome row_ablation_monotone() {
  bool ok = true;
  std::ostringstream d;
  for (auto t : kAllSubTasks) {
    std::array<int, 3> correct{};
    int n = 0;
    for (const auto& p : batch(t, GenerationMode::Raven, 13, 200)) {
      std::size_t prev = 9;
      for (int k = 1; k <= 3; ++k) {
        const auto s = oracle::solve(ablate_rows(p, k));
        ok = ok && s.consistent.size() <= prev;
        prev = s.consistent.size();
        correct[k - 1] += s.chosen == std::optional<int>(p.candidates.answer_index);
      }
      ++n;
    }
    ok = ok && correct[2] == n && correct[2] > correct[0];
    d << to_string(t) << " " << correct[0] << "/" << correct[1] << "/" << correct[2] << " ";
  }
  return {ok, d.str()};
}

Outcome distractor_invariance() {
  ExperimentConfig cfg;
  cfg.n_per_subtask = 200;
  cfg.seed = 3;
  cfg.abstraction.distractor_seed = 9;
  MockOracle m;
  const auto t = distractor_experiment(cfg, m);
  bool ok = true;
  for (const auto& row : t.cells)
    for (const auto& c : row) ok = ok && c.raw_n == 200 && c.correct == 200;
  // The fourth attribute must actually reach the prompts.
  const auto p = batch(SubTask::Center, GenerationMode::Raven, 3, 1).front();
  for (auto mode : {DistractorMode::FromRules, DistractorMode::Random}) {
    auto abs = AbstractionConfig::naming();
    abs.distractor = mode;
    const auto text = encode(p, abs).per_candidate[0][0].text;
    const auto first = text.substr(0, text.find(')'));
    ok = ok && std::count(first.begin(), first.end(), ',') == 3;
    auto dec = AbstractionConfig::full_decomposition();
    dec.distractor = mode;
    ok = ok && encode(p, dec).per_candidate[0].back().label == "c0.orientation";
  }
  std::ostringstream d;
  d << "naming/decomposition correct: ";
  for (const auto& row : t.cells) d << row[0].correct << "/" << row[1].correct << " ";
  return {ok, d.str()};
}

std::string generate_and_encode() {
  std::ostringstream os;
  for (auto t : kAllSubTasks)
    for (auto m : {GenerationMode::Raven, GenerationMode::Impartial}) {
      const auto ps = batch(t, m, 42, 50);
      write_jsonl(os, ps);
      for (const auto& p : ps) {
        write_prompts(os, encode(p, AbstractionConfig::naming()));
        write_prompts(os, encode(p, AbstractionConfig::full_decomposition()));
      }
    }
  return os.str();
}

Outcome determinism() {
  const auto a = generate_and_encode(), b = generate_and_encode();
  std::ostringstream d;
  d << a.size() << " bytes, " << (a == b ? "identical" : "different");
  return {a == b && !a.empty(), d.str()};
}

Outcome impartial_bisection() {
  int puzzles = 0, bad = 0;
  for (auto t : kAllSubTasks)
    for (const auto& p : batch(t, GenerationMode::Impartial, 8, 500)) {
      ++puzzles;
      int split_slots = 0;
      bool ok = !p.fallback_warning;
      for (const auto& s : governed_slots(t)) {
        std::map<std::optional<int>, int> counts;
        for (const auto& c : p.candidates.candidates) ++counts[oracle::slot_value(c, s)];
        if (counts.size() == 2) {
          ++split_slots;
          for (const auto& [v, n] : counts) ok = ok && n == 4;
        } else {
          ok = ok && counts.size() == 1;
        }
      }
      std::set<std::string> distinct;
      for (const auto& c : p.candidates.candidates) distinct.insert(nlohmann::json(c).dump());
      ok = ok && split_slots >= 3 && distinct.size() == 8;
      bad += !ok;
    }
  std::ostringstream d;
  d << puzzles - bad << "/" << puzzles << " split 4/4 on every perturbed slot";
  return {bad == 0, d.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"oracle completeness", oracle_completeness},
      {"unique answers", uniqueness},
      {"uniform scorer at chance", uniform_chance},
      {"decomposition with oracle scorer", decomposition_oracle},
      {"naming parser round trip", parser_round_trip},
      {"sub-prompt label counts", label_counts},
      {"row ablation monotone", row_ablation_monotone},
      {"distractor invariance", distractor_invariance},
      {"generate and encode deterministic", determinism},
      {"impartial bisection", impartial_bisection},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << i + 1 << ". " << criteria[i].first << " (" << o.detail << ")"
              << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
