// Copyright 2026 The storyeval Authors
// SPDX-License-Identifier: Apache-2.0

#include "storyeval/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "storyeval/error.hpp"

namespace storyeval {

namespace {

bool valid_component(double v)
{
  return std::isfinite(v) && v >= 0.0 && v <= 1.0;
}

void check_triple(const ScoreTriple& t)
{
  if (!valid_component(t.G) || !valid_component(t.C) || !valid_component(t.R))
    throw Error(ErrorCode::InvalidArgument, "score triple for story " + t.story_id + " (" + t.author.label() +
                                              ") has a component outside [0, 1]");
}

} // namespace

std::string_view to_string(DistanceAggregation agg) noexcept
{
  switch (agg) {
  case DistanceAggregation::MeanOfStoryDistances: return "per-story";
  case DistanceAggregation::DistanceOfMeans: return "of-means";
  }
  return "per-story";
}

std::string_view describe(DistanceAggregation agg) noexcept
{
  switch (agg) {
  case DistanceAggregation::MeanOfStoryDistances: return "mean of per-story distances";
  case DistanceAggregation::DistanceOfMeans: return "distance between corpus-mean scores";
  }
  return "";
}

DistanceBreakdown distance(const ScoreTriple& h, const ScoreTriple& m)
{
  if (!h.author.is_human())
    throw Error(ErrorCode::InvalidArgument, "distance: first triple must be the human story");
  if (m.author.is_human())
    throw Error(ErrorCode::InvalidArgument, "distance: second triple must be a model story");
  if (h.story_id != m.story_id)
    throw Error(ErrorCode::InvalidArgument,
                "distance: story mismatch (" + h.story_id + " vs " + m.story_id + ")");
  check_triple(h);
  check_triple(m);

  DistanceBreakdown d;
  d.story_id = h.story_id;
  d.model_id = m.author.model_id();
  d.dC = std::abs(h.C - m.C);
  d.dG = std::abs(h.G - m.G);
  d.dR = std::abs(h.R - m.R);
  d.dHM = (d.dC + d.dG + d.dR) / 3.0;
  return d;
}

double corpus_distance(std::span<const DistanceBreakdown> breakdowns)
{
  if (breakdowns.empty())
    throw Error(ErrorCode::InvalidArgument, "corpus distance of an empty list");
  double sum = 0.0;
  for (const auto& b : breakdowns)
    sum += b.dHM;
  return sum / static_cast<double>(breakdowns.size());
}

Leaderboard build_leaderboard(const EvaluationSet& eval, std::span<const ScoreTriple> triples,
                              DistanceAggregation agg)
{
  if (eval.models.empty())
    throw Error(ErrorCode::InvalidArgument, "leaderboard needs at least one model");

  std::map<std::pair<Author, std::string>, const ScoreTriple*> index;
  for (const auto& t : triples) {
    check_triple(t);
    if (!index.emplace(std::make_pair(t.author, t.story_id), &t).second)
      throw Error(ErrorCode::InvalidArgument,
                  "duplicate score for story " + t.story_id + " (" + t.author.label() + ")");
  }
  auto find = [&](const Author& a, const std::string& id) -> const ScoreTriple* {
    auto it = index.find({a, id});
    return it == index.end() ? nullptr : it->second;
  };

  const std::size_t total = eval.story_ids.size();
  for (const auto& m : eval.models) {
    std::size_t missing = 0;
    for (const auto& id : eval.story_ids)
      if (!find(m.author, id))
        ++missing;
    if (missing * 2 > total)
      throw Error(ErrorCode::Integrity, "model " + m.author.model_id() + " has scores for only " +
                                          std::to_string(total - missing) + " of " + std::to_string(total) +
                                          " stories; refusing to rank it");
  }

  Leaderboard board;
  board.aggregation = agg;
  for (const auto& id : eval.story_ids) {
    bool complete = find(Author::human(), id) != nullptr;
    for (const auto& m : eval.models)
      complete = complete && find(m.author, id) != nullptr;
    (complete ? board.story_ids : board.excluded_story_ids).push_back(id);
  }
  if (board.story_ids.empty())
    throw Error(ErrorCode::Integrity, "no story has scores for the human and every model");

  const double n = static_cast<double>(board.story_ids.size());
  auto means = [&](const Author& a) {
    LeaderboardRow row;
    for (const auto& id : board.story_ids) {
      const ScoreTriple* t = find(a, id);
      row.G += t->G;
      row.C += t->C;
      row.R += t->R;
    }
    row.G /= n;
    row.C /= n;
    row.R /= n;
    row.stories = board.story_ids.size();
    return row;
  };

  board.human = means(Author::human());
  board.human.model_id = "human";

  std::vector<std::pair<LeaderboardRow, std::vector<DistanceBreakdown>>> rows;
  for (const auto& m : eval.models) {
    LeaderboardRow row = means(m.author);
    row.model_id = m.author.model_id();
    std::vector<DistanceBreakdown> per_story;
    per_story.reserve(board.story_ids.size());
    for (const auto& id : board.story_ids)
      per_story.push_back(distance(*find(Author::human(), id), *find(m.author, id)));

    if (agg == DistanceAggregation::MeanOfStoryDistances) {
      row.dHM = corpus_distance(per_story);
    } else {
      ScoreTriple h{"corpus", Author::human(), board.human.G, board.human.C, board.human.R};
      ScoreTriple mm{"corpus", m.author, row.G, row.C, row.R};
      row.dHM = distance(h, mm).dHM;
    }
    rows.emplace_back(std::move(row), std::move(per_story));
  }

  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.first.dHM != b.first.dHM)
      return a.first.dHM < b.first.dHM;
    return a.first.model_id < b.first.model_id;
  });
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].first.rank = i + 1;
    board.rows.push_back(rows[i].first);
    board.breakdowns.insert(board.breakdowns.end(), rows[i].second.begin(), rows[i].second.end());
  }
  return board;
}

} // namespace storyeval
