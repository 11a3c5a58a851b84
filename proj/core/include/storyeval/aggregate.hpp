// Copyright 2026 The storyeval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "storyeval/corpus.hpp"

namespace storyeval {

/// Grounding, coherence and non-redundancy of one story, each in [0, 1].
struct ScoreTriple
{
  std::string story_id;
  Author author;
  double G = 0.0;
  double C = 0.0;
  double R = 0.0;

  friend bool operator==(const ScoreTriple&, const ScoreTriple&) = default;
};

/// Per-dimension absolute gaps between a human and a model story, and
/// their mean.
struct DistanceBreakdown
{
  std::string story_id;
  std::string model_id;
  double dG = 0.0;
  double dC = 0.0;
  double dR = 0.0;
  double dHM = 0.0;
};

/// Throws InvalidArgument unless `h` is human, `m` is a model and both refer
/// to the same story.
DistanceBreakdown distance(const ScoreTriple& h, const ScoreTriple& m);

/// Unweighted mean of per-story dHM. Throws InvalidArgument when empty.
double corpus_distance(std::span<const DistanceBreakdown> breakdowns);

enum class DistanceAggregation
{
  MeanOfStoryDistances, // mean over stories of dHM (default)
  DistanceOfMeans,      // dHM between corpus-mean human and model triples
};

std::string_view to_string(DistanceAggregation agg) noexcept;
std::string_view describe(DistanceAggregation agg) noexcept;

struct LeaderboardRow
{
  std::string model_id;
  double G = 0.0;
  double C = 0.0;
  double R = 0.0;
  double dHM = 0.0;
  std::size_t stories = 0;
  std::size_t rank = 0; // 1 = closest to human
};

struct Leaderboard
{
  std::vector<LeaderboardRow> rows; // in ranking order
  LeaderboardRow human;             // corpus means of the human stories, dHM = 0
  DistanceAggregation aggregation = DistanceAggregation::MeanOfStoryDistances;
  std::vector<std::string> story_ids;          // common support actually used
  std::vector<std::string> excluded_story_ids; // dropped for all models
  std::vector<DistanceBreakdown> breakdowns;   // per (model, story), ranking-major
  std::vector<std::string> notes;              // extra footer lines
};

/// Builds the comparison over the stories every author scored. A story that
/// is missing a triple for any author is excluded for all of them. A model
/// missing more than half of the evaluation set is refused with an
/// Integrity error. Rows are ranked by ascending dHM, ties by model id.
Leaderboard build_leaderboard(const EvaluationSet& eval, std::span<const ScoreTriple> triples,
                              DistanceAggregation agg = DistanceAggregation::MeanOfStoryDistances);

} // namespace storyeval
