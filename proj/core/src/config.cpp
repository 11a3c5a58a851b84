// Copyright 2026 The storyeval Authors
// SPDX-License-Identifier: Apache-2.0

#include "storyeval/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "storyeval/error.hpp"
#include "storyeval/hash.hpp"
#include "storyeval/textproc.hpp"

namespace storyeval {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, std::initializer_list<std::string_view> known, const std::string& where)
{
  for (const auto& [key, _] : obj.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw Error(ErrorCode::InvalidArgument, where + ": unknown key '" + key + "'");
}

template <typename Enum>
Enum parse_enum(const json& j, std::initializer_list<Enum> values, const std::string& where)
{
  if (!j.is_string())
    throw Error(ErrorCode::InvalidArgument, where + " must be a string");
  const auto s = j.get<std::string>();
  for (Enum v : values)
    if (to_string(v) == s)
      return v;
  throw Error(ErrorCode::InvalidArgument, where + ": unknown value '" + s + "'");
}

} // namespace

std::string_view to_string(GroundingVariant v) noexcept
{
  return v == GroundingVariant::Groovist ? "groovist" : "rovist_vg";
}

std::string_view to_string(NegativeHandling v) noexcept
{
  return v == NegativeHandling::RescaleHalfPlus ? "rescale_half_plus" : "clamp_to_zero";
}

std::string_view to_string(RegionPooling v) noexcept
{
  return v == RegionPooling::MaxOverAlignedImage ? "max_over_aligned_image" : "max_over_sequence";
}

std::string_view to_string(TaggerKind v) noexcept
{
  return v == TaggerKind::Flags ? "flags" : "lexicon";
}

GroundingVariant parse_grounding_variant(std::string_view s)
{
  return parse_enum(json(std::string(s)), {GroundingVariant::RovistVg, GroundingVariant::Groovist},
                    "grounding variant");
}

void MetricConfig::validate() const
{
  grounding.validate();
  redundancy.validate();
}

json to_json(const MetricConfig& cfg)
{
  std::set<std::size_t> orders(cfg.redundancy.orders.begin(), cfg.redundancy.orders.end());
  return json{
    {"grounding",
     {{"variant", to_string(cfg.grounding.variant)},
      {"negative_handling", to_string(cfg.grounding.negative_handling)},
      {"aggregation", to_string(cfg.grounding.pooling)},
      {"filter_threshold", cfg.grounding.filter_threshold ? json(*cfg.grounding.filter_threshold) : json(nullptr)}}},
    {"redundancy",
     {{"orders", std::vector<std::size_t>(orders.begin(), orders.end())},
      {"stopword_filtering", cfg.redundancy.stopword_filtering},
      {"combine", "mean_inter_intra"}}},
    {"tagger", to_string(cfg.tagger)},
  };
}

MetricConfig metric_config_from_json(const json& j)
{
  if (!j.is_object())
    throw Error(ErrorCode::InvalidArgument, "metric config must be a JSON object");
  reject_unknown(j, {"grounding", "redundancy", "tagger"}, "config");

  MetricConfig cfg;
  if (j.contains("grounding")) {
    const auto& g = j.at("grounding");
    if (!g.is_object())
      throw Error(ErrorCode::InvalidArgument, "config.grounding must be an object");
    reject_unknown(g, {"variant", "negative_handling", "aggregation", "filter_threshold"}, "config.grounding");
    if (g.contains("variant"))
      cfg.grounding.variant =
        parse_enum(g.at("variant"), {GroundingVariant::RovistVg, GroundingVariant::Groovist}, "grounding.variant");
    if (g.contains("negative_handling"))
      cfg.grounding.negative_handling =
        parse_enum(g.at("negative_handling"), {NegativeHandling::ClampToZero, NegativeHandling::RescaleHalfPlus},
                   "grounding.negative_handling");
    if (g.contains("aggregation"))
      cfg.grounding.pooling =
        parse_enum(g.at("aggregation"), {RegionPooling::MaxOverSequence, RegionPooling::MaxOverAlignedImage},
                   "grounding.aggregation");
    if (g.contains("filter_threshold") && !g.at("filter_threshold").is_null()) {
      if (!g.at("filter_threshold").is_number())
        throw Error(ErrorCode::InvalidArgument, "grounding.filter_threshold must be a number");
      cfg.grounding.filter_threshold = g.at("filter_threshold").get<double>();
    }
  }
  if (cfg.grounding.variant == GroundingVariant::Groovist && !cfg.grounding.filter_threshold)
    cfg.grounding.filter_threshold = kDefaultGroovistThreshold;

  if (j.contains("redundancy")) {
    const auto& r = j.at("redundancy");
    if (!r.is_object())
      throw Error(ErrorCode::InvalidArgument, "config.redundancy must be an object");
    reject_unknown(r, {"orders", "stopword_filtering", "combine"}, "config.redundancy");
    if (r.contains("orders")) {
      cfg.redundancy.orders.clear();
      for (const auto& n : r.at("orders")) {
        if (!n.is_number_integer() || n.get<long long>() < 1)
          throw Error(ErrorCode::InvalidArgument, "redundancy.orders must be positive integers");
        cfg.redundancy.orders.push_back(n.get<std::size_t>());
      }
    }
    if (r.contains("stopword_filtering"))
      cfg.redundancy.stopword_filtering = r.at("stopword_filtering").get<bool>();
    if (r.contains("combine") && r.at("combine") != "mean_inter_intra")
      throw Error(ErrorCode::InvalidArgument, "redundancy.combine: only mean_inter_intra is supported");
  }

  if (j.contains("tagger"))
    cfg.tagger = parse_enum(j.at("tagger"), {TaggerKind::Lexicon, TaggerKind::Flags}, "tagger");

  cfg.validate();
  return cfg;
}

MetricConfig load_metric_config(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::Io, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  json j;
  try {
    j = json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), e.byte > 0 ? e.byte - 1 : 0);
  }
  return metric_config_from_json(j);
}

std::string config_hash(const MetricConfig& cfg)
{
  const json canonical{
    {"config", to_json(cfg)},
    {"assets",
     {{"nouns", bundled_noun_lexicon().version}, {"stopwords", bundled_stopwords().version}}},
  };
  return sha256_hex(canonical.dump());
}

} // namespace storyeval
