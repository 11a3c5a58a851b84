// Copyright 2026 The storyeval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <iterator>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "storyeval/corpus.hpp"
#include "storyeval/textproc.hpp"

namespace storyeval {

enum class RedundancyCombine
{
  MeanInterIntra, // R = 1 - (inter + intra) / 2
};

struct RedundancyConfig
{
  std::vector<std::size_t> orders{1, 2};
  bool stopword_filtering = true; // unigrams only
  RedundancyCombine combine = RedundancyCombine::MeanInterIntra;

  void validate() const;
};

struct RedundancyScore
{
  double R = 1.0;
  double inter = 0.0;
  double intra = 0.0;
};

/// |a ∩ b| / |a ∪ b| over sorted sets; 0 when both are empty.
template <typename T, typename Cmp>
double jaccard(const std::set<T, Cmp>& a, const std::set<T, Cmp>& b)
{
  if (a.empty() && b.empty())
    return 0.0;
  std::size_t common = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  const auto& less = a.key_comp();
  while (ia != a.end() && ib != b.end()) {
    if (less(*ia, *ib))
      ++ia;
    else if (less(*ib, *ia))
      ++ib;
    else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  const std::size_t unite = a.size() + b.size() - common;
  return static_cast<double>(common) / static_cast<double>(unite);
}

/// Gram sets of one sentence, one entry per configured order.
struct SentenceGrams
{
  std::vector<NgramSet> by_order;

  std::set<Gram> all_grams() const;
  std::size_t distinct() const;
  std::size_t total() const;
};

SentenceGrams sentence_grams(std::span<const std::string> tokens, const RedundancyConfig& cfg,
                             const WordList* stopwords);

/// Mean Jaccard over all unordered sentence pairs, using the union of all
/// orders' grams per sentence. Throws InsufficientContext for < 2 sentences.
double inter_sentence(std::span<const SentenceGrams> sentences);

/// Mean over sentences of 1 - distinct/total (0 for an empty sentence).
double intra_sentence(std::span<const SentenceGrams> sentences);

/// Non-redundancy of pre-tokenized sentences.
RedundancyScore nonredundancy(std::span<const std::vector<std::string>> sentences,
                              const RedundancyConfig& cfg,
                              const WordList* stopwords = &bundled_stopwords());

/// Tokenizes the story's sentences and scores them.
RedundancyScore story_nonredundancy(const StorySequence& story, const RedundancyConfig& cfg,
                                    const WordList* stopwords = &bundled_stopwords());

} // namespace storyeval
