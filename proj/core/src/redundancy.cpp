// Copyright 2026 The storyeval Authors
// SPDX-License-Identifier: Apache-2.0

#include "storyeval/redundancy.hpp"

#include <algorithm>

#include "storyeval/error.hpp"

namespace storyeval {

void RedundancyConfig::validate() const
{
  if (orders.empty())
    throw Error(ErrorCode::InvalidArgument, "redundancy config needs at least one n-gram order");
  for (auto n : orders)
    if (n < 1)
      throw Error(ErrorCode::InvalidArgument, "n-gram orders must be at least 1");
}

std::set<Gram> SentenceGrams::all_grams() const
{
  std::set<Gram> out;
  for (const auto& s : by_order)
    out.insert(s.grams.begin(), s.grams.end());
  return out;
}

std::size_t SentenceGrams::distinct() const
{
  // Grams of different orders never coincide, so sizes add.
  std::size_t n = 0;
  for (const auto& s : by_order)
    n += s.grams.size();
  return n;
}

std::size_t SentenceGrams::total() const
{
  std::size_t n = 0;
  for (const auto& s : by_order)
    n += s.total_count;
  return n;
}

SentenceGrams sentence_grams(std::span<const std::string> tokens, const RedundancyConfig& cfg,
                             const WordList* stopwords)
{
  SentenceGrams out;
  std::vector<std::size_t> orders = cfg.orders;
  std::sort(orders.begin(), orders.end());
  orders.erase(std::unique(orders.begin(), orders.end()), orders.end());
  out.by_order.reserve(orders.size());
  for (auto n : orders)
    out.by_order.push_back(ngram_set(tokens, n, cfg.stopword_filtering ? stopwords : nullptr));
  return out;
}

double inter_sentence(std::span<const SentenceGrams> sentences)
{
  if (sentences.size() < 2)
    throw Error(ErrorCode::InsufficientContext, "inter-sentence overlap needs at least two sentences");
  std::vector<std::set<Gram>> unions;
  unions.reserve(sentences.size());
  for (const auto& s : sentences)
    unions.push_back(s.all_grams());

  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < unions.size(); ++i)
    for (std::size_t j = i + 1; j < unions.size(); ++j) {
      sum += jaccard(unions[i], unions[j]);
      ++pairs;
    }
  return sum / static_cast<double>(pairs);
}

double intra_sentence(std::span<const SentenceGrams> sentences)
{
  if (sentences.empty())
    return 0.0;
  double sum = 0.0;
  for (const auto& s : sentences) {
    const std::size_t total = s.total();
    if (total > 0)
      sum += 1.0 - static_cast<double>(s.distinct()) / static_cast<double>(total);
  }
  return sum / static_cast<double>(sentences.size());
}

RedundancyScore nonredundancy(std::span<const std::vector<std::string>> sentences,
                              const RedundancyConfig& cfg, const WordList* stopwords)
{
  cfg.validate();
  if (sentences.size() < 2)
    throw Error(ErrorCode::InsufficientContext, "non-redundancy needs at least two sentences");
  std::vector<SentenceGrams> grams;
  grams.reserve(sentences.size());
  for (const auto& s : sentences)
    grams.push_back(sentence_grams(s, cfg, stopwords));

  RedundancyScore score;
  score.inter = inter_sentence(grams);
  score.intra = intra_sentence(grams);
  score.R = 1.0 - (score.inter + score.intra) / 2.0;
  return score;
}

RedundancyScore story_nonredundancy(const StorySequence& story, const RedundancyConfig& cfg,
                                    const WordList* stopwords)
{
  std::vector<std::vector<std::string>> tokens;
  tokens.reserve(story.sentences.size());
  for (const auto& s : story.sentences)
    tokens.push_back(tokenize(s).tokens);
  return nonredundancy(tokens, cfg, stopwords);
}

} // namespace storyeval
