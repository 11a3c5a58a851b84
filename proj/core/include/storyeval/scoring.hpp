// Copyright 2026 The storyeval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "storyeval/aggregate.hpp"
#include "storyeval/bundle.hpp"
#include "storyeval/coherence.hpp"
#include "storyeval/config.hpp"
#include "storyeval/corpus.hpp"

namespace storyeval {

/// Nouns of a story in reading order with the sentence each came from.
struct StoryNouns
{
  std::vector<std::string> nouns;
  std::vector<std::size_t> sentence_index;
};

/// Tokenizes every sentence and runs the tagger.
StoryNouns story_nouns(const StorySequence& story, const NounTagger& tagger);

/// Picks the tagger for `cfg`; for TaggerKind::Flags the flags come from
/// the bundle.
StoryNouns story_nouns(const StorySequence& story, const MetricConfig& cfg,
                       const EmbeddingBundle& bundle);

/// Full per-story metric evaluation. Any component error propagates.
ScoreTriple score_triple(const StorySequence& story, const EmbeddingBundle& bundle,
                         const SentenceLikelihoods& lk, const MetricConfig& cfg);

struct FailureRecord
{
  std::string story_id;
  Author author;
  std::string stage;   // "inputs", "grounding", "coherence", "redundancy", ...
  std::string message;
};

using ScoreOutcome = std::variant<ScoreTriple, FailureRecord>;

/// A unit of batch work. `load` supplies the inputs lazily so that I/O
/// errors are attributed to the story instead of aborting the batch.
struct ScoreJob
{
  const StorySequence* story = nullptr;
  std::function<EmbeddingBundle()> load_bundle;
  std::function<SentenceLikelihoods()> load_likelihoods;
};

/// Scores jobs on up to `workers` threads (0 = hardware concurrency). The
/// output is positionally aligned with `jobs`.
std::vector<ScoreOutcome> score_batch(const std::vector<ScoreJob>& jobs, const MetricConfig& cfg,
                                      std::size_t workers = 0);

} // namespace storyeval
