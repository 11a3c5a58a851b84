// Copyright 2026 The storyeval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace storyeval {

/// Who wrote a story: the human annotator or a model identified by id.
class Author
{
public:
  static Author human() { return Author{}; }
  static Author model(std::string model_id);

  bool is_human() const noexcept { return model_id_.empty(); }
  const std::string& model_id() const noexcept { return model_id_; }

  /// "human" for the annotator, otherwise the model id.
  std::string label() const { return is_human() ? "human" : model_id_; }

  friend bool operator==(const Author&, const Author&) = default;
  friend auto operator<=>(const Author&, const Author&) = default;

private:
  std::string model_id_;
};

struct ImageRef
{
  std::string image_id;
  std::optional<std::string> uri;
  std::size_t position = 0;

  friend bool operator==(const ImageRef&, const ImageRef&) = default;
};

/// One image sequence together with one narrative for it.
struct StorySequence
{
  static constexpr std::size_t kCanonicalLength = 5;

  std::string story_id;
  std::vector<ImageRef> images;
  std::vector<std::string> sentences;
  Author author;

  /// True when the story deviates from five images and five sentences.
  /// Such stories are admitted; callers surface the flag as a warning.
  bool noncanonical_length() const noexcept
  {
    return images.size() != kCanonicalLength || sentences.size() != kCanonicalLength;
  }

  friend bool operator==(const StorySequence&, const StorySequence&) = default;
};

/// All stories written by one author. For models this is a prediction set.
struct StorySet
{
  Author author;
  std::map<std::string, StorySequence> stories;
  nlohmann::json provenance = nlohmann::json::object();

  std::size_t size() const noexcept { return stories.size(); }
  bool contains(const std::string& story_id) const { return stories.contains(story_id); }

  friend bool operator==(const StorySet&, const StorySet&) = default;
};

using PredictionSet = StorySet;

struct EvaluationSet
{
  std::vector<std::string> story_ids; // sorted, unique
  StorySet human;
  std::vector<PredictionSet> models;  // sorted by model id

  friend bool operator==(const EvaluationSet&, const EvaluationSet&) = default;
};

/// A line of an input file that was skipped, with the reason.
struct RejectedLine
{
  std::size_t line = 0; // 1-based
  std::string story_id;
  std::string reason;
};

struct ImportResult
{
  StorySet set;
  std::vector<RejectedLine> rejected;
};

/// Reads a VIST stories-in-sequence JSON file. Annotations are grouped by
/// story id and ordered by their within-story index.
StorySet import_vist_sis(const std::filesystem::path& path);
StorySet parse_vist_sis(std::string_view text);

/// Reads canonical story JSONL for one model. Lines with an empty sentence
/// list are rejected and reported; a duplicate story id is fatal.
ImportResult import_predictions(const std::filesystem::path& path, const std::string& model_id);
ImportResult parse_predictions(std::string_view text, const std::string& model_id);

/// Reads canonical story JSONL whose author is taken from the model_id
/// field (null means human). All lines must agree on the author.
ImportResult import_story_jsonl(const std::filesystem::path& path);
ImportResult parse_story_jsonl(std::string_view text);

/// Renders a set as canonical JSONL, stories ordered by id, with an optional
/// leading provenance line.
std::string export_story_jsonl(const StorySet& set);

nlohmann::json story_to_json(const StorySequence& story);

/// Restricts every set to the story ids present in all of them. Models are
/// ordered by id so the result does not depend on the order of `models`.
/// Model stories without images inherit the human story's images.
EvaluationSet intersect(const StorySet& human, std::span<const PredictionSet> models);

/// Splits running text into sentences on terminal punctuation followed by
/// whitespace or end of input.
std::vector<std::string> split_sentences(std::string_view text);

} // namespace storyeval
