// Copyright 2026 The storyeval Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "storyeval/error.hpp"
#include "storyeval/scoring.hpp"

namespace storyeval {
namespace {

StorySequence story(std::string id)
{
  return {id, {{id + "-0", std::nullopt, 0}, {id + "-1", std::nullopt, 1}},
          {"The dog ran.", "A boat sailed."}, Author::model("m")};
}

// Every term embedding equals a region embedding of the image it describes.
EmbeddingBundle aligned_bundle(const std::string& id)
{
  EmbeddingBundle b;
  b.story_id = id;
  b.encoder_id = "e";
  b.regions.push_back({id + "-0", Matrix(1, 2, {1, 0}), "e"});
  b.regions.push_back({id + "-1", Matrix(1, 2, {0, 1}), "e"});
  b.terms = TermEmbeddings{{"dog", "boat"}, Matrix(2, 2, {1, 0, 0, 1}), "e", {0, 1}};
  return b;
}

TEST(ScoreTriple, PerfectStoryScoresOnes)
{
  const auto s = story("s");
  const auto t = score_triple(s, aligned_bundle("s"), {"s", {1.0}, "p"}, MetricConfig{});
  EXPECT_EQ(t.G, 1.0);
  EXPECT_EQ(t.C, 1.0);
  EXPECT_EQ(t.R, 1.0);
  EXPECT_EQ(t.story_id, "s");
  EXPECT_EQ(t.author, Author::model("m"));
}

TEST(ScoreTriple, NounsFollowTagger)
{
  const auto n = story_nouns(story("s"), MetricConfig{}, aligned_bundle("s"));
  EXPECT_EQ(n.nouns, (std::vector<std::string>{"dog", "boat"}));
  EXPECT_EQ(n.sentence_index, (std::vector<std::size_t>{0, 1}));
}

TEST(ScoreTriple, SingleSentenceIsInsufficientContext)
{
  StorySequence s{"one", {{"one-0", std::nullopt, 0}}, {"The dog ran."}, Author::human()};
  auto b = aligned_bundle("one");
  try {
    score_triple(s, b, {"one", {}, "p"}, MetricConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientContext) << e.what();
    EXPECT_NE(std::string(e.what()).find("insufficient context"), std::string::npos);
  }
}

TEST(ScoreTriple, MismatchedBundleIsRejected)
{
  EXPECT_THROW(score_triple(story("s"), aligned_bundle("t"), {"s", {1.0}, "p"}, MetricConfig{}), Error);
}

TEST(ScoreBatch, FailureIsRecordedAndBatchContinues)
{
  std::vector<StorySequence> stories{story("a"), story("b"), story("c")};
  std::vector<ScoreJob> jobs;
  for (const auto& s : stories) {
    const std::string id = s.story_id;
    jobs.push_back({&s,
                    [id] {
                      auto b = aligned_bundle(id);
                      if (id == "b")
                        b.terms->matrix = Matrix(2, 2);
                      return b;
                    },
                    [id] { return SentenceLikelihoods{id, {0.5}, "p"}; }});
  }
  for (std::size_t workers : {1u, 3u}) {
    const auto out = score_batch(jobs, MetricConfig{}, workers);
    ASSERT_EQ(out.size(), 3u);
    ASSERT_TRUE(std::holds_alternative<ScoreTriple>(out[0]));
    ASSERT_TRUE(std::holds_alternative<FailureRecord>(out[1]));
    ASSERT_TRUE(std::holds_alternative<ScoreTriple>(out[2]));
    const auto& f = std::get<FailureRecord>(out[1]);
    EXPECT_EQ(f.story_id, "b");
    EXPECT_EQ(f.stage, "scoring");
    EXPECT_EQ(std::get<ScoreTriple>(out[2]).C, 0.5);
  }
}

TEST(ScoreBatch, LoaderErrorsAreAttributedToInputs)
{
  const auto s = story("a");
  std::vector<ScoreJob> jobs{{&s, []() -> EmbeddingBundle { throw Error(ErrorCode::Io, "gone"); },
                              [] { return SentenceLikelihoods{"a", {0.5}, "p"}; }}};
  const auto out = score_batch(jobs, MetricConfig{}, 1);
  const auto& f = std::get<FailureRecord>(out[0]);
  EXPECT_EQ(f.stage, "inputs");
  EXPECT_NE(f.message.find("gone"), std::string::npos);
}

} // namespace
} // namespace storyeval
