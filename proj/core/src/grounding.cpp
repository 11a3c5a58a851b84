// Copyright 2026 The storyeval Authors
// SPDX-License-Identifier: Apache-2.0

#include "storyeval/grounding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "storyeval/error.hpp"

namespace storyeval {

namespace {

double dot(std::span<const float> u, std::span<const float> v)
{
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    s += static_cast<double>(u[i]) * static_cast<double>(v[i]);
  return s;
}

double norm(std::span<const float> u)
{
  return std::sqrt(dot(u, u));
}

double map_negative(double cos, NegativeHandling h)
{
  cos = std::clamp(cos, -1.0, 1.0);
  switch (h) {
  case NegativeHandling::ClampToZero: return std::max(0.0, cos);
  case NegativeHandling::RescaleHalfPlus: return (cos + 1.0) / 2.0;
  }
  return cos;
}

// Checks one row and returns its norm. `what` names the row in errors.
double checked_norm(std::span<const float> row, std::size_t dims, const std::string& what)
{
  if (row.size() != dims)
    throw Error(ErrorCode::InvalidArgument, what + " has " + std::to_string(row.size()) +
                                              " dims, expected " + std::to_string(dims));
  for (float v : row)
    if (!std::isfinite(v))
      throw Error(ErrorCode::Integrity, what + " has a non-finite entry");
  const double n = norm(row);
  if (!(n > 0.0))
    throw Error(ErrorCode::InvalidArgument, what + " has zero norm");
  return n;
}

struct NormedImage
{
  const RegionEmbeddings* regions;
  std::vector<double> norms;
};

double best_cosine(std::span<const float> term, double term_norm, const NormedImage& img)
{
  double best = -std::numeric_limits<double>::infinity();
  const Matrix& m = img.regions->matrix;
  for (std::size_t r = 0; r < m.rows(); ++r)
    best = std::max(best, dot(term, m.row(r)) / (term_norm * img.norms[r]));
  return best;
}

NormedImage normed(const RegionEmbeddings& img, std::size_t dims)
{
  if (img.matrix.rows() == 0)
    throw Error(ErrorCode::InvalidArgument, "image '" + img.image_id + "' has no regions");
  NormedImage out{&img, {}};
  out.norms.reserve(img.matrix.rows());
  for (std::size_t r = 0; r < img.matrix.rows(); ++r)
    out.norms.push_back(checked_norm(img.matrix.row(r), dims,
                                     "region row " + std::to_string(r) + " of image '" + img.image_id + "'"));
  return out;
}

} // namespace

GroundingConfig GroundingConfig::groovist(double threshold)
{
  GroundingConfig cfg;
  cfg.variant = GroundingVariant::Groovist;
  cfg.filter_threshold = threshold;
  return cfg;
}

void GroundingConfig::validate() const
{
  const bool wants = variant == GroundingVariant::Groovist;
  if (wants != filter_threshold.has_value())
    throw Error(ErrorCode::InvalidArgument,
                wants ? "groovist grounding requires a filter threshold"
                      : "filter threshold is only valid for the groovist variant");
  if (filter_threshold && !(*filter_threshold >= 0.0 && *filter_threshold <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "filter threshold must lie in [0, 1]");
}

double cosine(std::span<const float> u, std::span<const float> v)
{
  if (u.size() != v.size())
    throw Error(ErrorCode::InvalidArgument, "cosine: dimension mismatch (" + std::to_string(u.size()) +
                                              " vs " + std::to_string(v.size()) + ")");
  const double nu = norm(u);
  const double nv = norm(v);
  if (!(nu > 0.0))
    throw Error(ErrorCode::InvalidArgument, "cosine: first vector has zero norm");
  if (!(nv > 0.0))
    throw Error(ErrorCode::InvalidArgument, "cosine: second vector has zero norm");
  return std::clamp(dot(u, v) / (nu * nv), -1.0, 1.0);
}

double term_affinity(std::span<const float> term, std::span<const RegionEmbeddings> regions,
                     const GroundingConfig& cfg)
{
  if (regions.empty())
    throw Error(ErrorCode::InvalidArgument, "term affinity needs at least one image");
  const double tn = checked_norm(term, term.size(), "term row");
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& img : regions)
    best = std::max(best, best_cosine(term, tn, normed(img, term.size())));
  return map_negative(best, cfg.negative_handling);
}

GroundingScore story_grounding(std::span<const std::string> nouns, const TermEmbeddings& terms,
                               std::span<const RegionEmbeddings> regions, const GroundingConfig& cfg)
{
  cfg.validate();
  GroundingScore score;
  if (nouns.empty()) {
    score.degenerate = true;
    return score;
  }
  if (regions.empty())
    throw Error(ErrorCode::InvalidArgument, "story grounding needs at least one image");
  if (terms.matrix.rows() != nouns.size())
    throw Error(ErrorCode::Integrity, "story has " + std::to_string(nouns.size()) + " nouns but " +
                                        std::to_string(terms.matrix.rows()) + " term rows");
  if (!terms.terms.empty() && !std::equal(nouns.begin(), nouns.end(), terms.terms.begin(), terms.terms.end()))
    throw Error(ErrorCode::Integrity, "term embeddings were computed for a different noun list");

  const std::size_t dims = terms.matrix.cols();
  std::vector<double> term_norms;
  term_norms.reserve(nouns.size());
  for (std::size_t i = 0; i < nouns.size(); ++i)
    term_norms.push_back(checked_norm(terms.matrix.row(i), dims,
                                      "term row " + std::to_string(i) + " ('" + nouns[i] + "')"));

  std::vector<NormedImage> images;
  images.reserve(regions.size());
  for (const auto& img : regions)
    images.push_back(normed(img, dims));

  const bool aligned = cfg.pooling == RegionPooling::MaxOverAlignedImage;
  if (aligned && terms.sentence_index.size() != nouns.size())
    throw Error(ErrorCode::InvalidArgument, "aligned-image pooling needs a sentence index for every term");

  double sum = 0.0;
  std::size_t kept = 0;
  score.per_term.reserve(nouns.size());
  for (std::size_t i = 0; i < nouns.size(); ++i) {
    const auto row = terms.matrix.row(i);
    double best = -std::numeric_limits<double>::infinity();
    if (aligned) {
      const std::size_t pos = terms.sentence_index[i];
      if (pos >= images.size())
        throw Error(ErrorCode::Integrity, "term '" + nouns[i] + "' comes from sentence " + std::to_string(pos) +
                                            " but the story has " + std::to_string(images.size()) + " images");
      best = best_cosine(row, term_norms[i], images[pos]);
    } else {
      for (const auto& img : images)
        best = std::max(best, best_cosine(row, term_norms[i], img));
    }

    TermAffinity ta{nouns[i], map_negative(best, cfg.negative_handling), true};
    if (cfg.variant == GroundingVariant::Groovist)
      ta.kept = ta.affinity >= *cfg.filter_threshold;
    if (ta.kept) {
      sum += ta.affinity;
      ++kept;
    }
    score.per_term.push_back(std::move(ta));
  }

  if (kept == 0) {
    score.degenerate = true;
    score.G = 0.0;
  } else {
    score.G = std::clamp(sum / static_cast<double>(kept), 0.0, 1.0);
  }
  return score;
}

} // namespace storyeval
