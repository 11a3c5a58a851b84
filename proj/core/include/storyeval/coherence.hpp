// Copyright 2026 The storyeval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "storyeval/corpus.hpp"

namespace storyeval {

/// p[i] is the likelihood that sentence i+2 follows sentences 1..i+1.
struct SentenceLikelihoods
{
  std::string story_id;
  std::vector<double> p;
  std::string provider_id;

  friend bool operator==(const SentenceLikelihoods&, const SentenceLikelihoods&) = default;
};

struct CoherenceScore
{
  double C = 0.0;
};

/// Unweighted mean of p. Throws InsufficientContext when p is empty (a
/// single-sentence story) and Integrity when a value is outside [0, 1].
CoherenceScore story_coherence(const SentenceLikelihoods& lk);

struct LikelihoodViolation
{
  enum class Kind { StoryId, Count, Range };
  Kind kind;
  std::size_t index = 0; // offending p index for Range
  std::string message;
};

struct LikelihoodReport
{
  std::vector<LikelihoodViolation> violations;
  bool ok() const noexcept { return violations.empty(); }
};

LikelihoodReport validate_likelihoods(const SentenceLikelihoods& lk, const StorySequence& story);

/// Likelihood JSONL: {"story_id": str, "provider_id": str, "p": [float]}.
std::map<std::string, SentenceLikelihoods> parse_likelihoods_jsonl(std::string_view text);
std::map<std::string, SentenceLikelihoods> read_likelihoods_jsonl(const std::filesystem::path& path);
std::string render_likelihoods_jsonl(const std::map<std::string, SentenceLikelihoods>& lks);

} // namespace storyeval
