// Copyright 2026 The storyeval Authors
// SPDX-License-Identifier: Apache-2.0

#include "storyeval/scoring.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "storyeval/error.hpp"
#include "storyeval/grounding.hpp"
#include "storyeval/redundancy.hpp"
#include "storyeval/textproc.hpp"

namespace storyeval {

StoryNouns story_nouns(const StorySequence& story, const NounTagger& tagger)
{
  StoryNouns out;
  for (std::size_t i = 0; i < story.sentences.size(); ++i) {
    auto ts = tokenize(story.sentences[i]);
    for (auto& n : extract_nouns(ts, tagger, sentence_id(story.story_id, i))) {
      out.nouns.push_back(std::move(n));
      out.sentence_index.push_back(i);
    }
  }
  return out;
}

StoryNouns story_nouns(const StorySequence& story, const MetricConfig& cfg, const EmbeddingBundle& bundle)
{
  if (cfg.tagger == TaggerKind::Lexicon)
    return story_nouns(story, LexiconTagger::bundled());

  if (!bundle.noun_flags)
    throw Error(ErrorCode::Integrity, "story " + story.story_id + ": bundle carries no noun flags for " +
                                        story.author.label());
  const auto& flags = *bundle.noun_flags;
  if (flags.size() != story.sentences.size())
    throw Error(ErrorCode::Integrity, "story " + story.story_id + ": noun flags cover " +
                                        std::to_string(flags.size()) + " sentences, story has " +
                                        std::to_string(story.sentences.size()));
  FlagTagger tagger;
  for (std::size_t i = 0; i < flags.size(); ++i)
    tagger.set(sentence_id(story.story_id, i), flags[i]);
  return story_nouns(story, tagger);
}

namespace {

// Ordered by image position so aligned pooling can index by sentence.
std::vector<RegionEmbeddings> regions_in_story_order(const StorySequence& story, const EmbeddingBundle& bundle)
{
  if (story.images.empty())
    return bundle.regions;
  std::vector<RegionEmbeddings> out;
  out.reserve(story.images.size());
  for (const auto& img : story.images) {
    auto it = std::find_if(bundle.regions.begin(), bundle.regions.end(),
                           [&](const auto& r) { return r.image_id == img.image_id; });
    if (it == bundle.regions.end())
      throw Error(ErrorCode::Integrity, "story " + story.story_id + ": bundle has no regions for image " +
                                          img.image_id);
    out.push_back(*it);
  }
  return out;
}

} // namespace

ScoreTriple score_triple(const StorySequence& story, const EmbeddingBundle& bundle,
                         const SentenceLikelihoods& lk, const MetricConfig& cfg)
{
  cfg.validate();
  if (bundle.story_id != story.story_id)
    throw Error(ErrorCode::Integrity, "bundle for " + bundle.story_id + " used with story " + story.story_id);
  if (story.sentences.size() < 2)
    throw Error(ErrorCode::InsufficientContext,
                "insufficient context: story " + story.story_id + " has fewer than two sentences");
  const auto report = validate_likelihoods(lk, story);
  if (!report.ok())
    throw Error(ErrorCode::Integrity, "story " + story.story_id + ": " + report.violations.front().message);

  ScoreTriple t;
  t.story_id = story.story_id;
  t.author = story.author;

  const StoryNouns nouns = story_nouns(story, cfg, bundle);
  if (nouns.nouns.empty()) {
    t.G = 0.0;
  } else {
    if (!bundle.terms)
      throw Error(ErrorCode::Integrity, "story " + story.story_id + ": bundle has no term embeddings for " +
                                          story.author.label());
    TermEmbeddings terms = *bundle.terms;
    if (terms.sentence_index.empty())
      terms.sentence_index = nouns.sentence_index;
    const auto regions = regions_in_story_order(story, bundle);
    t.G = story_grounding(nouns.nouns, terms, regions, cfg.grounding).G;
  }
  t.C = story_coherence(lk).C;
  t.R = story_nonredundancy(story, cfg.redundancy).R;
  return t;
}

std::vector<ScoreOutcome> score_batch(const std::vector<ScoreJob>& jobs, const MetricConfig& cfg,
                                      std::size_t workers)
{
  cfg.validate();
  std::vector<ScoreOutcome> out(jobs.size());

  auto run_one = [&](std::size_t i) {
    const auto& job = jobs[i];
    const StorySequence& story = *job.story;
    std::string stage = "inputs";
    try {
      EmbeddingBundle bundle = job.load_bundle();
      SentenceLikelihoods lk = job.load_likelihoods();
      stage = "scoring";
      out[i] = score_triple(story, bundle, lk, cfg);
    } catch (const std::exception& e) {
      out[i] = FailureRecord{story.story_id, story.author, stage, e.what()};
    }
  };

  if (workers == 0)
    workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, jobs.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i)
      run_one(i);
    return out;
  }

  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++)
          run_one(i);
      });
  }
  return out;
}

} // namespace storyeval
