// Copyright 2026 The storyeval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "storyeval/grounding.hpp"

namespace storyeval {

/// One tensor file referenced by a bundle manifest.
struct ManifestFile
{
  enum class Role { Regions, Terms };

  Role role = Role::Regions;
  std::string image_id;  // Regions only
  std::string author;    // Terms only: "human" or a model id
  std::string path;      // relative to the bundle directory
  std::array<std::size_t, 2> dims{0, 0};
  std::string dtype = "f32";
  std::string sha256;
  std::vector<std::string> terms;           // Terms only, one per row
  std::vector<std::size_t> sentence_index;  // Terms only, one per row
};

/// bundles/<story_id>/manifest.json. Region tensors are shared by every
/// author of the story; each author whose story names at least one noun has
/// one terms entry.
struct BundleManifest
{
  std::string story_id;
  std::string encoder_id;
  std::string created_at;
  std::vector<ManifestFile> files;
  // Optional per-author, per-sentence noun flags from an external POS tagger.
  std::map<std::string, std::vector<std::vector<bool>>> noun_flags;

  const ManifestFile* terms_for(const std::string& author) const;
  std::vector<const ManifestFile*> regions() const;
};

nlohmann::json to_json(const BundleManifest& m);
BundleManifest manifest_from_json(const nlohmann::json& j);
BundleManifest read_manifest(const std::filesystem::path& path);

/// Tensors for one author's story.
struct EmbeddingBundle
{
  std::string story_id;
  std::string encoder_id;
  std::vector<RegionEmbeddings> regions;  // manifest order
  std::optional<TermEmbeddings> terms;    // absent when the story has no nouns
  std::optional<std::vector<std::vector<bool>>> noun_flags;
};

/// Loads the tensors a given author needs, verifying sizes and checksums.
EmbeddingBundle load_bundle(const std::filesystem::path& bundle_dir, const BundleManifest& manifest,
                            const std::string& author);

} // namespace storyeval
