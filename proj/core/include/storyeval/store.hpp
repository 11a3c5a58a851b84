// Copyright 2026 The storyeval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "storyeval/aggregate.hpp"
#include "storyeval/bundle.hpp"
#include "storyeval/coherence.hpp"
#include "storyeval/config.hpp"
#include "storyeval/corpus.hpp"

namespace storyeval {

/// Writes `content` to a temp file next to `path` and renames it into
/// place. When `only_if_changed` is set and the file already holds exactly
/// `content`, nothing is written. Returns whether the file was written.
bool write_file_atomic(const std::filesystem::path& path, std::string_view content,
                       bool only_if_changed = true);

std::string read_file(const std::filesystem::path& path);

/// Percent-encodes everything outside [A-Za-z0-9_-] (and a leading '.') so
/// ids can be used as single path components.
std::string encode_path_component(std::string_view id);
std::string decode_path_component(std::string_view encoded);

struct CachedScore
{
  ScoreTriple triple;
  std::string config_hash;
};

/// Score cache JSONL: {"story_id", "model_id": str|null, "G", "C", "R",
/// "config_hash"}; a null model_id marks the human story.
std::vector<CachedScore> parse_score_cache(std::string_view text);
std::string render_score_cache(const std::vector<CachedScore>& rows);

/// On-disk layout:
///   stories/human.jsonl, stories/model.<id>.jsonl
///   bundles/<story_id>/manifest.json + *.f32
///   likelihoods/human.jsonl, likelihoods/model.<id>.jsonl
///   scores/human.jsonl, scores/model.<id>.jsonl
///   reports/*
class Store
{
public:
  explicit Store(std::filesystem::path root) : root_(std::move(root)) {}

  /// Creates the directory skeleton if needed.
  static Store create(const std::filesystem::path& root);

  const std::filesystem::path& root() const noexcept { return root_; }
  std::filesystem::path stories_dir() const { return root_ / "stories"; }
  std::filesystem::path bundles_dir() const { return root_ / "bundles"; }
  std::filesystem::path likelihoods_dir() const { return root_ / "likelihoods"; }
  std::filesystem::path scores_dir() const { return root_ / "scores"; }
  std::filesystem::path reports_dir() const { return root_ / "reports"; }

  static std::string author_file_name(const Author& author);
  static std::optional<Author> author_from_file_name(std::string_view file_name);

  std::filesystem::path story_file(const Author& a) const { return stories_dir() / author_file_name(a); }
  std::filesystem::path likelihood_file(const Author& a) const { return likelihoods_dir() / author_file_name(a); }
  std::filesystem::path score_file(const Author& a) const { return scores_dir() / author_file_name(a); }
  std::filesystem::path bundle_dir(std::string_view story_id) const;
  std::filesystem::path manifest_file(std::string_view story_id) const { return bundle_dir(story_id) / "manifest.json"; }

  bool has_story_set(const Author& a) const;
  std::optional<StorySet> human_stories() const;
  std::vector<StorySet> model_stories() const; // sorted by model id
  bool save_story_set(const StorySet& set) const;

  std::optional<BundleManifest> manifest(std::string_view story_id) const;
  std::map<std::string, SentenceLikelihoods> likelihoods(const Author& a) const;

  std::vector<CachedScore> cached_scores(const Author& a) const;
  /// Appends rows to the author's cache (rewritten atomically).
  bool append_scores(const Author& a, const std::vector<CachedScore>& rows) const;

private:
  std::filesystem::path root_;
};

/// Exclusive advisory lock on <root>/.lock for the lifetime of the object.
class StoreLock
{
public:
  explicit StoreLock(const Store& store);
  ~StoreLock();
  StoreLock(const StoreLock&) = delete;
  StoreLock& operator=(const StoreLock&) = delete;

private:
  int fd_ = -1;
};

struct StoreViolation
{
  enum class Kind
  {
    Manifest,          // unreadable or malformed manifest
    MissingFile,       // manifest references a file that does not exist
    Size,              // file length disagrees with dims
    Checksum,          // sha256 mismatch
    Dims,              // non-positive dims or wrong dtype
    NonFinite,         // NaN/Inf in a tensor
    Orphan,            // file not referenced by any manifest
    MissingBundle,     // story scheduled for scoring has no usable bundle
    MissingTerms,      // author with nouns has no terms entry
    MissingLikelihood, // story scheduled for scoring has no likelihoods
  };

  Kind kind;
  std::string story_id;
  std::string path;
  std::string message;
  bool blocking = false; // prevents scoring of some story
};

std::string_view to_string(StoreViolation::Kind kind) noexcept;

struct IntegrityReport
{
  std::vector<StoreViolation> violations;

  bool ok() const noexcept { return violations.empty(); }
  std::size_t count(StoreViolation::Kind kind) const;
  std::size_t blocking() const;
};

/// Verifies every manifest's dims and checksums, lists orphan files, and
/// lists stories that cannot be scored because inputs are missing.
IntegrityReport validate_store(const Store& store, const MetricConfig& cfg = {});

/// Writes a bundle directory for one story: region tensors plus per-author
/// term tensors, then the manifest last. Used by fixtures and by anything
/// producing bundles in-process.
struct BundleWriteRequest
{
  std::string story_id;
  std::string encoder_id;
  std::string created_at;
  std::vector<RegionEmbeddings> regions;
  std::map<std::string, TermEmbeddings> terms_by_author;
  std::map<std::string, std::vector<std::vector<bool>>> noun_flags;
};

BundleManifest write_bundle(const Store& store, const BundleWriteRequest& req);

} // namespace storyeval
