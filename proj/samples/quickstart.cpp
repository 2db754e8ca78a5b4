// Generate one puzzle, show its prompts, solve it and score it with a mock.

#include <iostream>

#include "raven/harness.hpp"
#include "raven/oracle.hpp"

int main(int argc, char** argv) {
  using namespace raven;
  const auto subtask = parse_subtask(argc > 1 ? argv[1] : "center");

  GeneratorConfig cfg;
  cfg.subtask = subtask;
  cfg.seed = argc > 2 ? std::stoull(argv[2]) : 1;
  const PuzzleInstance p = generate_one(cfg, 0);

  std::cout << "puzzle " << p.id << "\nrules:\n";
  for (const auto& r : p.rules) std::cout << "  " << describe(r) << "\n";

  std::cout << "\nnaming prompt for the answer:\n" << encode_naming(p, p.candidates.answer_index).text << "\n";

  const auto set = encode(p, AbstractionConfig::full_decomposition());
  std::cout << "\ndecomposed sub-prompts:\n";
  for (const auto& sub : set.per_candidate[p.candidates.answer_index])
    std::cout << "[" << sub.label << "]\n" << sub.text << "\n";

  const auto sol = oracle::solve(p);
  std::cout << "\noracle picks " << (sol.chosen ? std::to_string(*sol.chosen) : "nothing") << ", answer is "
            << p.candidates.answer_index << "\n";

  MockOracle scorer;
  const auto sel = select(set, scorer);
  std::cout << "mock scorer picks " << sel.chosen_index << "\n";
  return 0;
}
