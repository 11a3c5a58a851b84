// Copyright 2026 The storyeval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace storyeval {

struct TokenizedSentence
{
  std::string raw;
  std::vector<std::string> tokens;
  std::vector<bool> noun_flags; // parallel to tokens
};

/// Normalizes to Unicode NFC.
std::string nfc(std::string_view utf8);

/// Tokenization rules, applied after NFC normalization:
///  - letters, digits and combining marks form words; everything else is a
///    boundary, except as below;
///  - an apostrophe (ASCII or U+2019) or hyphen between two word characters
///    is kept inside the token ("don't", "grandson's", "vist-gpt");
///  - tokens are lowercased with root-locale case mapping; U+2019 becomes '.
/// Noun flags are all false until a tagger runs.
TokenizedSentence tokenize(std::string_view sentence);

/// A frozen one-term-per-line list. Lines starting with '#' are comments;
/// a "# version: X" comment sets the version.
struct WordList
{
  std::string name;
  std::string version;
  std::unordered_set<std::string> words;

  bool contains(std::string_view w) const { return words.contains(std::string(w)); }
};

WordList parse_word_list(std::string_view text, std::string name);
WordList load_word_list(const std::filesystem::path& path);

const WordList& bundled_noun_lexicon();
const WordList& bundled_stopwords();

class NounTagger
{
public:
  virtual ~NounTagger() = default;

  /// Returns one flag per token. `sentence_id` is only used in errors.
  virtual std::vector<bool> tag(const TokenizedSentence& ts, std::string_view sentence_id) const = 0;
};

/// Flags a token when it, or its singular form under simple English plural
/// and possessive rules, appears in the lexicon.
class LexiconTagger final : public NounTagger
{
public:
  explicit LexiconTagger(const WordList& lexicon) : lexicon_(&lexicon) {}

  static const LexiconTagger& bundled();

  std::vector<bool> tag(const TokenizedSentence& ts, std::string_view sentence_id) const override;

  bool is_noun(std::string_view token) const;

private:
  const WordList* lexicon_;
};

/// Passes through flags computed elsewhere (a full POS tagger run by the
/// extraction side), keyed by sentence id.
class FlagTagger final : public NounTagger
{
public:
  FlagTagger() = default;
  explicit FlagTagger(const std::map<std::string, std::vector<bool>>& flags) : flags_(flags.begin(), flags.end()) {}

  void set(std::string sentence_id, std::vector<bool> flags);

  std::vector<bool> tag(const TokenizedSentence& ts, std::string_view sentence_id) const override;

private:
  std::map<std::string, std::vector<bool>, std::less<>> flags_;
};

/// Sentence id convention shared by taggers and manifests: "<story>#<index>".
std::string sentence_id(std::string_view story_id, std::size_t index);

/// Runs the tagger and returns the flagged tokens in order, duplicates kept.
/// Stores the flags back into `ts`.
std::vector<std::string> extract_nouns(TokenizedSentence& ts, const NounTagger& tagger,
                                       std::string_view sentence_id);

using Gram = std::vector<std::string>;

struct NgramSet
{
  std::size_t order = 1;
  std::set<Gram> grams;
  std::size_t total_count = 0; // with multiplicity
};

/// Builds the order-n gram set. Stopwords are removed only when n == 1;
/// higher orders run over the unfiltered stream.
NgramSet ngram_set(std::span<const std::string> tokens, std::size_t n,
                   const WordList* stopwords = nullptr);

} // namespace storyeval
