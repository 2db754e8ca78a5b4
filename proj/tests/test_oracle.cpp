#include <gtest/gtest.h>

#include "raven/generator.hpp"
#include "raven/oracle.hpp"
#include "support.hpp"

using namespace raven;
using oracle::Row;

TEST(RelationHolds, Examples) {
  const auto holds = [](Relation r, AttributeKind k, Row v) { return oracle::relation_holds(r, k, kSingle, v); };
  EXPECT_TRUE(holds(Relation::constant(), AttributeKind::Color, {4, 4, 4}));
  EXPECT_TRUE(holds(Relation::progression(2), AttributeKind::Color, {1, 3, 5}));
  EXPECT_FALSE(holds(Relation::progression(2), AttributeKind::Color, {1, 3, 4}));
  // Number indices are count - 1: counts (5, 2, 3) are indices (4, 1, 2).
  EXPECT_TRUE(oracle::relation_holds(Relation::arithmetic(-1), AttributeKind::Number, kGrid3x3, {4, 1, 2}));
  // Size uses index + 1: 0.4 + 0.5 -> field 1 + 2 = 3 -> index 2 (0.6).
  EXPECT_TRUE(holds(Relation::arithmetic(1), AttributeKind::Size, {0, 1, 2}));
  EXPECT_TRUE(holds(Relation::distribute_three({0, 2, 4}), AttributeKind::Type, {4, 0, 2}));
  EXPECT_FALSE(holds(Relation::distribute_three({0, 2, 4}), AttributeKind::Type, {4, 4, 2}));
}

TEST(RelationHolds, KindMismatchThrows) {
  EXPECT_THROW(oracle::relation_holds(Relation::arithmetic(1), AttributeKind::Type, kSingle, {0, 1, 1}),
               DomainError);
  EXPECT_THROW(oracle::relation_holds(Relation::constant(), AttributeKind::Orientation, kSingle, {0, 0, 0}),
               DomainError);
}

TEST(RelationHolds, PositionRelations) {
  // 2x2 slots 0..3; shift by one moves slot s to (s + 1) mod 4.
  EXPECT_TRUE(oracle::relation_holds(Relation::progression(1), AttributeKind::Position, kGrid2x2,
                                     {0b0011, 0b0110, 0b1100}));
  EXPECT_TRUE(oracle::relation_holds(Relation::progression(1), AttributeKind::Position, kGrid2x2,
                                     {0b1100, 0b1001, 0b0011}));
  EXPECT_TRUE(oracle::relation_holds(Relation::arithmetic(1), AttributeKind::Position, kGrid2x2,
                                     {0b0001, 0b0100, 0b0101}));
  EXPECT_TRUE(oracle::relation_holds(Relation::arithmetic(-1), AttributeKind::Position, kGrid2x2,
                                     {0b0111, 0b0100, 0b0011}));
  EXPECT_FALSE(oracle::relation_holds(Relation::arithmetic(-1), AttributeKind::Position, kGrid2x2,
                                      {0b0100, 0b0100, 0b0000}));
}

TEST(Induce, RecoversProgressionOnSize) {
  const std::array<Row, 2> rows = {Row{0, 1, 2}, Row{2, 3, 4}};
  const auto hyps = oracle::induce_slot({0, AttributeKind::Size}, kSingle, rows);
  EXPECT_TRUE(std::any_of(hyps.begin(), hyps.end(),
                          [](const auto& h) { return h.relation == Relation::progression(1); }));
}

TEST(Induce, ConstantEverywhere) {
  const std::array<Row, 2> rows = {Row{3, 3, 3}, Row{1, 1, 1}};
  for (auto k : {AttributeKind::Type, AttributeKind::Size, AttributeKind::Color}) {
    const auto hyps = oracle::induce_slot({0, k}, kSingle, rows);
    EXPECT_TRUE(std::any_of(hyps.begin(), hyps.end(),
                            [](const auto& h) { return h.relation.type == RelationType::Constant; }));
  }
}

TEST(Induce, SoundOnGeneratedPuzzles) {
  // The generating rule is always among the induced hypotheses and every
  // slot has at least one.
  for (auto t : kAllSubTasks)
    for (const auto& p : generate({t, GenerationMode::Raven, 61, 200}, 4)) {
      const auto hyps = oracle::induce(p);
      const auto slots = governed_slots(t);
      const auto tmpl = components_of(t);
      ASSERT_EQ(hyps.size(), slots.size());
      for (std::size_t s = 0; s < slots.size(); ++s) {
        ASSERT_FALSE(hyps[s].empty()) << p.id;
        const auto& rule = *std::find_if(p.rules.begin(), p.rules.end(), [&](const RuleSpec& r) {
          return r.component == slots[s].component && r.attribute == slots[s].attribute;
        });
        const auto grid = tmpl[rule.component].grid;
        EXPECT_TRUE(std::any_of(hyps[s].begin(), hyps[s].end(), [&](const oracle::Hypothesis& h) {
          return oracle::equivalent(h.relation, rule.relation, rule.attribute, grid);
        })) << p.id << " " << describe(rule);
      }
    }
}

namespace {

// Row 3 prefix sizes 0.6, 0.7 (indices 2, 3).
PuzzleInstance size_progression_puzzle() {
  const std::array<std::array<int, 3>, 8> given = {{{2, 0, 3}, {2, 1, 3}, {2, 2, 3},
                                                    {2, 1, 5}, {2, 2, 5}, {2, 3, 5},
                                                    {2, 2, 1}, {2, 3, 1}}};
  std::vector<std::array<int, 3>> cands = {{2, 1, 1}, {2, 4, 1}, {0, 4, 1}, {2, 4, 2},
                                           {2, 5, 1}, {4, 4, 1}, {2, 3, 1}, {2, 0, 1}};
  return raven::testing::center_puzzle(given, cands, 1,
                                       {{0, AttributeKind::Type, Relation::constant()},
                                        {0, AttributeKind::Size, Relation::progression(1)},
                                        {0, AttributeKind::Color, Relation::constant()}});
}

}  // namespace

TEST(Consistent, ProgressionExamples) {
  const auto p = size_progression_puzzle();
  const oracle::Hypothesis h{{0, AttributeKind::Size}, Relation::progression(1)};
  EXPECT_TRUE(oracle::consistent(p.matrix, h, kSingle, raven::testing::single_item(2, 4, 1)));   // 0.8
  EXPECT_FALSE(oracle::consistent(p.matrix, h, kSingle, raven::testing::single_item(2, 1, 1)));  // 0.5
}

TEST(Consistent, DistributeThreeCompletion) {
  auto p = size_progression_puzzle();
  // Row 3 types 5, 7 -> indices 2, 4.
  p.matrix.at(2, 0).components[0].layout.entities[0].type = 2;
  p.matrix.at(2, 1).components[0].layout.entities[0].type = 4;
  const oracle::Hypothesis h{{0, AttributeKind::Type}, Relation::distribute_three({0, 2, 4})};
  EXPECT_TRUE(oracle::consistent(p.matrix, h, kSingle, raven::testing::single_item(0, 4, 1)));
  EXPECT_FALSE(oracle::consistent(p.matrix, h, kSingle, raven::testing::single_item(1, 4, 1)));
}

TEST(Solve, HandBuiltCenter) {
  const auto p = size_progression_puzzle();
  const auto s = oracle::solve(p);
  EXPECT_EQ(s.consistent, raven::testing::ref_consistent(p));
  ASSERT_TRUE(s.chosen.has_value());
  EXPECT_EQ(*s.chosen, 1);
}

TEST(Solve, AmbiguityIsReported) {
  auto p = size_progression_puzzle();
  p.candidates.candidates[0] = p.candidates.candidates[1];  // a duplicate answer
  const auto s = oracle::solve(p);
  EXPECT_EQ(s.consistent, (std::vector<int>{0, 1}));
  EXPECT_FALSE(s.chosen.has_value());
}

TEST(Solve, CompleteOnGeneratedPuzzles) {
  for (auto t : kAllSubTasks)
    for (auto m : {GenerationMode::Raven, GenerationMode::Impartial})
      for (const auto& p : generate({t, m, 123, 200}, 4)) {
        const auto s = oracle::solve(p);
        ASSERT_TRUE(s.chosen) << p.id;
        EXPECT_EQ(*s.chosen, p.candidates.answer_index) << p.id;
      }
}

TEST(Solve, RowAblationMonotone) {
  int ambiguous = 0, total = 0;
  for (auto t : kAllSubTasks)
    for (const auto& p : generate({t, GenerationMode::Raven, 8, 150}, 4)) {
      std::vector<std::vector<int>> sets;
      for (int k = 1; k <= 3; ++k) {
        auto q = p;
        q.rows_included = k;
        sets.push_back(oracle::solve(q).consistent);
        EXPECT_EQ(sets.back(), raven::testing::ref_consistent(q)) << p.id << " k=" << k;
      }
      // Adding a context row never grows the consistent set.
      EXPECT_TRUE(std::includes(sets[0].begin(), sets[0].end(), sets[1].begin(), sets[1].end())) << p.id;
      EXPECT_TRUE(std::includes(sets[1].begin(), sets[1].end(), sets[2].begin(), sets[2].end())) << p.id;
      ambiguous += sets[0].size() > 1;
      ++total;
    }
  EXPECT_GT(ambiguous, total / 4) << "one visible row should often be ambiguous";
}

TEST(Solve, TwoRowsUseOnlyRowTwo) {
  auto p = size_progression_puzzle();
  p.rows_included = 2;
  const auto before = oracle::solve(p).consistent;
  // Row 2 alone also fits distribute-three over {0.5, 0.6, 0.7}, so 0.5 survives.
  EXPECT_EQ(before, (std::vector<int>{0, 1}));
  // Break row 1 entirely; with two visible rows nothing changes.
  for (int c = 0; c < 3; ++c) p.matrix.at(0, c).components[0].layout.entities[0].size = 5 - c * 2;
  EXPECT_EQ(oracle::solve(p).consistent, before);
  p.rows_included = 3;
  EXPECT_FALSE(oracle::solve(p).chosen == std::optional<int>(1));
}

TEST(RotateSlots, Cyclic) {
  EXPECT_EQ(oracle::rotate_slots(0b1000, 1, 4), 0b0001u);
  EXPECT_EQ(oracle::rotate_slots(0b0001, -1, 4), 0b1000u);
  EXPECT_EQ(oracle::rotate_slots(0b100000000, 2, 9), 0b000000010u);
}
