// Copyright 2026 The storyeval Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "storyeval/aggregate.hpp"
#include "storyeval/error.hpp"
#include "storyeval/report.hpp"

namespace storyeval {
namespace {

ScoreTriple H(std::string id, double g, double c, double r)
{
  return {std::move(id), Author::human(), g, c, r};
}

ScoreTriple M(std::string model, std::string id, double g, double c, double r)
{
  return {std::move(id), Author::model(std::move(model)), g, c, r};
}

TEST(Distance, HandArithmetic)
{
  const auto d = distance(H("s", 0.9, 0.7, 0.95), M("m", "s", 0.8, 0.75, 0.9));
  EXPECT_NEAR(d.dG, 0.1, 1e-12);
  EXPECT_NEAR(d.dC, 0.05, 1e-12);
  EXPECT_NEAR(d.dR, 0.05, 1e-12);
  EXPECT_NEAR(d.dHM, 0.2 / 3.0, 1e-12);
  EXPECT_EQ(d.story_id, "s");
  EXPECT_EQ(d.model_id, "m");
}

TEST(Distance, IdentityAndMaximal)
{
  EXPECT_EQ(distance(H("s", 0.3, 0.4, 0.5), M("m", "s", 0.3, 0.4, 0.5)).dHM, 0.0);
  EXPECT_EQ(distance(H("s", 1, 1, 1), M("m", "s", 0, 0, 0)).dHM, 1.0);
}

TEST(Distance, ContractViolations)
{
  EXPECT_THROW(distance(H("a", 0, 0, 0), M("m", "b", 0, 0, 0)), Error);
  EXPECT_THROW(distance(M("m", "a", 0, 0, 0), M("m", "a", 0, 0, 0)), Error);
  EXPECT_THROW(distance(H("a", 0, 0, 0), H("a", 0, 0, 0)), Error);
  EXPECT_THROW(distance(H("a", 1.5, 0, 0), M("m", "a", 0, 0, 0)), Error);
}

TEST(Distance, SymmetryTriangleAndBounds)
{
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  auto t = [&] { return oracle::Triple{u(rng), u(rng), u(rng)}; };
  auto d = [](const oracle::Triple& a, const oracle::Triple& b) {
    return distance(H("s", a.g, a.c, a.r), M("m", "s", b.g, b.c, b.r)).dHM;
  };
  for (int i = 0; i < 1000; ++i) {
    const auto a = t(), b = t(), c = t();
    EXPECT_NEAR(d(a, b), d(b, a), 1e-15);
    EXPECT_LE(d(a, c), d(a, b) + d(b, c) + 1e-12);
    EXPECT_GE(d(a, b), 0.0);
    EXPECT_LE(d(a, b), 1.0);
    EXPECT_NEAR(d(a, b), oracle::dhm(a, b), 1e-12);
  }
}

TEST(CorpusDistance, Means)
{
  std::vector<DistanceBreakdown> one{{"s", "m", 0, 0, 0, 0.25}};
  EXPECT_DOUBLE_EQ(corpus_distance(one), 0.25);
  std::vector<DistanceBreakdown> two{{"a", "m", 0, 0, 0, 0.2}, {"b", "m", 0, 0, 0, 0.4}};
  EXPECT_NEAR(corpus_distance(two), 0.3, 1e-15);
  std::vector<DistanceBreakdown> constant(7, {"s", "m", 0, 0, 0, 0.37});
  EXPECT_NEAR(corpus_distance(constant), 0.37, 1e-15);
  EXPECT_THROW(corpus_distance({}), Error);
}

EvaluationSet eval(std::vector<std::string> ids, std::vector<std::string> models)
{
  EvaluationSet e;
  e.story_ids = ids;
  e.human.author = Author::human();
  for (const auto& id : ids)
    e.human.stories.emplace(id, StorySequence{id, {{id, std::nullopt, 0}}, {"x."}, Author::human()});
  for (const auto& m : models) {
    PredictionSet p;
    p.author = Author::model(m);
    for (const auto& id : ids)
      p.stories.emplace(id, StorySequence{id, {{id, std::nullopt, 0}}, {"x."}, p.author});
    e.models.push_back(p);
  }
  return e;
}

TEST(Leaderboard, SingleRow)
{
  const std::vector<ScoreTriple> t{H("s", 0.5, 0.5, 0.5), M("m", "s", 0.4, 0.5, 0.5)};
  const auto b = build_leaderboard(eval({"s"}, {"m"}), t);
  ASSERT_EQ(b.rows.size(), 1u);
  EXPECT_EQ(b.rows[0].rank, 1u);
  EXPECT_NEAR(b.rows[0].dHM, 0.1 / 3, 1e-12);
}

TEST(Leaderboard, DominanceRanksFirst)
{
  const std::vector<ScoreTriple> t{H("a", 0.5, 0.5, 0.5), H("b", 0.6, 0.6, 0.6),
                                   M("A", "a", 0.5, 0.5, 0.4), M("A", "b", 0.6, 0.6, 0.5),
                                   M("B", "a", 0.1, 0.5, 0.4), M("B", "b", 0.6, 0.1, 0.5)};
  const auto b = build_leaderboard(eval({"a", "b"}, {"B", "A"}), t);
  EXPECT_EQ(b.rows[0].model_id, "A");
  EXPECT_EQ(b.rows[1].model_id, "B");
  EXPECT_EQ(b.rows[1].rank, 2u);
}

TEST(Leaderboard, IncompleteStoriesAreExcludedForAll)
{
  const std::vector<ScoreTriple> t{H("a", 0.5, 0.5, 0.5), H("b", 0.5, 0.5, 0.5), H("c", 0.5, 0.5, 0.5),
                                   M("A", "a", 0.5, 0.5, 0.5), M("A", "b", 0.5, 0.5, 0.5), M("A", "c", 0.5, 0.5, 0.5),
                                   M("B", "a", 0.5, 0.5, 0.5), M("B", "c", 0.0, 0.0, 0.0)};
  const auto b = build_leaderboard(eval({"a", "b", "c"}, {"A", "B"}), t);
  EXPECT_EQ(b.story_ids, (std::vector<std::string>{"a", "c"}));
  EXPECT_EQ(b.excluded_story_ids, (std::vector<std::string>{"b"}));
  for (const auto& r : b.rows)
    EXPECT_EQ(r.stories, 2u);
}

TEST(Leaderboard, RefusesModelMissingMostStories)
{
  const std::vector<ScoreTriple> t{H("a", 0.5, 0.5, 0.5), H("b", 0.5, 0.5, 0.5), H("c", 0.5, 0.5, 0.5),
                                   M("A", "a", 0.5, 0.5, 0.5)};
  EXPECT_THROW(build_leaderboard(eval({"a", "b", "c"}, {"A"}), t), Error);
}

TEST(Leaderboard, AggregationOrderMatters)
{
  // Story a: model above human by 0.2 in G; story b: below by 0.2.
  // Mean of distances: 0.2/3. Distance of means: 0.
  const std::vector<ScoreTriple> t{H("a", 0.5, 0.5, 0.5), H("b", 0.5, 0.5, 0.5),
                                   M("A", "a", 0.7, 0.5, 0.5), M("A", "b", 0.3, 0.5, 0.5)};
  const auto e = eval({"a", "b"}, {"A"});
  const auto per = build_leaderboard(e, t, DistanceAggregation::MeanOfStoryDistances);
  const auto means = build_leaderboard(e, t, DistanceAggregation::DistanceOfMeans);
  EXPECT_NEAR(per.rows[0].dHM, 0.2 / 3, 1e-12);
  EXPECT_NEAR(means.rows[0].dHM, 0.0, 1e-12);
  EXPECT_NE(render_markdown(per), render_markdown(means));
  EXPECT_NE(render_markdown(per).find("per-story"), std::string::npos);
  EXPECT_NE(render_markdown(means).find("of-means"), std::string::npos);
}

TEST(Leaderboard, RankingInvariantUnderAffineRescale)
{
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.1, 0.9);
  for (int c = 0; c < 50; ++c) {
    std::vector<ScoreTriple> t, scaled;
    const std::vector<std::string> models{"A", "B", "C", "D"};
    for (const char* s : {"a", "b", "c"}) {
      t.push_back(H(s, 0.5, 0.5, 0.5));
      scaled.push_back(H(s, 0.5, 0.5, 0.5));
      for (const auto& m : models) {
        const double g = u(rng), cc = u(rng), r = u(rng);
        t.push_back(M(m, s, g, cc, r));
        // Halving every gap around the human value halves every dHM.
        scaled.push_back(M(m, s, 0.5 + (g - 0.5) / 2, 0.5 + (cc - 0.5) / 2, 0.5 + (r - 0.5) / 2));
      }
    }
    const auto e = eval({"a", "b", "c"}, models);
    const auto b1 = build_leaderboard(e, t), b2 = build_leaderboard(e, scaled);
    for (std::size_t i = 0; i < b1.rows.size(); ++i) {
      EXPECT_EQ(b1.rows[i].model_id, b2.rows[i].model_id);
      EXPECT_NEAR(b2.rows[i].dHM, b1.rows[i].dHM / 2, 1e-12);
    }
  }
}

TEST(Leaderboard, ModelEqualToHumanHasZeroDistance)
{
  const std::vector<ScoreTriple> t{H("a", 0.3, 0.6, 0.9), M("twin", "a", 0.3, 0.6, 0.9)};
  const auto b = build_leaderboard(eval({"a"}, {"twin"}), t);
  EXPECT_EQ(b.rows[0].dHM, 0.0);
  EXPECT_NE(render_markdown(b).find("| twin | 0.3000 | 0.6000 | 0.9000 | 0.0000 |"), std::string::npos);
}

TEST(Report, FormatsAndColumns)
{
  EXPECT_EQ(format_score(0.99616), "0.9962");
  EXPECT_EQ(format_score(0.0), "0.0000");
  const std::vector<ScoreTriple> t{H("a", 0.5, 0.5, 0.5), M("x|y", "a", 0.4, 0.5, 0.5)};
  const auto b = build_leaderboard(eval({"a"}, {"x|y"}), t);
  const auto md = render_markdown(b);
  EXPECT_EQ(md.rfind("| Model | Visual Grounding | Coherence | Non-Redundancy | d_HM |\n", 0), 0u);
  EXPECT_NE(md.find("x\\|y"), std::string::npos);
  const auto csv = render_csv(b);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "Model,Visual Grounding,Coherence,Non-Redundancy,d_HM");
  const auto j = nlohmann::json::parse(render_json(b));
  EXPECT_EQ(j.at("rows").size(), 1u);
  EXPECT_EQ(render_distance_series_csv(b), "model,d_HM\nx|y,0.0333\n");
}

} // namespace
} // namespace storyeval
