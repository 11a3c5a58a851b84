// Copyright 2026 The storyeval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "storyeval/grounding.hpp"
#include "storyeval/redundancy.hpp"

namespace storyeval {

enum class TaggerKind
{
  Lexicon, // bundled word list
  Flags,   // noun flags supplied in the bundle manifest
};

/// Every knob that can change a score. Its canonical JSON is hashed into
/// the cache key.
struct MetricConfig
{
  GroundingConfig grounding;
  RedundancyConfig redundancy;
  TaggerKind tagger = TaggerKind::Lexicon;

  void validate() const;
};

/// Threshold used when the groovist variant is requested without one.
inline constexpr double kDefaultGroovistThreshold = 0.3;

nlohmann::json to_json(const MetricConfig& cfg);
MetricConfig metric_config_from_json(const nlohmann::json& j);
MetricConfig load_metric_config(const std::filesystem::path& path);

/// SHA-256 of the canonical (sorted-key, compact) JSON of the config plus
/// the versions of the bundled word lists it relies on.
std::string config_hash(const MetricConfig& cfg);

GroundingVariant parse_grounding_variant(std::string_view s);
std::string_view to_string(GroundingVariant v) noexcept;
std::string_view to_string(NegativeHandling v) noexcept;
std::string_view to_string(RegionPooling v) noexcept;
std::string_view to_string(TaggerKind v) noexcept;

} // namespace storyeval
