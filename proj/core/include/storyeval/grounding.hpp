// Copyright 2026 The storyeval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "storyeval/tensor.hpp"

namespace storyeval {

enum class NegativeHandling
{
  ClampToZero,     // max(0, cos)
  RescaleHalfPlus, // (cos + 1) / 2
};

enum class RegionPooling
{
  MaxOverSequence,     // best region of any image in the sequence
  MaxOverAlignedImage, // best region of the image at the term's sentence position
};

enum class GroundingVariant
{
  RovistVg, // mean affinity over all terms
  Groovist, // mean affinity over terms at or above a threshold
};

struct GroundingConfig
{
  GroundingVariant variant = GroundingVariant::RovistVg;
  NegativeHandling negative_handling = NegativeHandling::ClampToZero;
  RegionPooling pooling = RegionPooling::MaxOverSequence;
  std::optional<double> filter_threshold; // set iff variant == Groovist

  static GroundingConfig rovist_vg() { return {}; }
  static GroundingConfig groovist(double threshold);

  /// Throws InvalidArgument if the threshold presence does not match the
  /// variant or lies outside [0, 1].
  void validate() const;
};

struct RegionEmbeddings
{
  std::string image_id;
  Matrix matrix; // regions x dims
  std::string encoder_id;
};

struct TermEmbeddings
{
  std::vector<std::string> terms;
  Matrix matrix; // terms x dims
  std::string encoder_id;
  // Sentence index of each term; required for aligned-image pooling.
  std::vector<std::size_t> sentence_index;
};

struct TermAffinity
{
  std::string term;
  double affinity = 0.0;
  bool kept = true;
};

struct GroundingScore
{
  double G = 0.0;
  std::vector<TermAffinity> per_term;
  // Set when no terms were scored (no nouns, or none survived filtering).
  bool degenerate = false;
};

/// dot(u, v) / (|u| |v|). Throws InvalidArgument on a dimension mismatch
/// or a zero-norm argument.
double cosine(std::span<const float> u, std::span<const float> v);

/// Best cosine between `term` and any region row of `regions`, mapped into
/// [0, 1] per cfg.negative_handling. The caller selects which images are
/// eligible; pooling is applied by story_grounding.
double term_affinity(std::span<const float> term, std::span<const RegionEmbeddings> regions,
                     const GroundingConfig& cfg);

/// Scores a story's nouns against its images. `regions` is ordered by image
/// position. Rows are checked up front for finiteness, non-zero norm and
/// matching dimensions, and errors name the offending row.
GroundingScore story_grounding(std::span<const std::string> nouns, const TermEmbeddings& terms,
                               std::span<const RegionEmbeddings> regions,
                               const GroundingConfig& cfg);

} // namespace storyeval
