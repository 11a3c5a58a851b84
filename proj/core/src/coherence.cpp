// Copyright 2026 The storyeval Authors
// SPDX-License-Identifier: Apache-2.0

#include "storyeval/coherence.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "storyeval/error.hpp"

namespace storyeval {

using nlohmann::json;

namespace {

bool in_unit_interval(double v)
{
  return std::isfinite(v) && v >= 0.0 && v <= 1.0;
}

} // namespace

CoherenceScore story_coherence(const SentenceLikelihoods& lk)
{
  if (lk.p.empty())
    throw Error(ErrorCode::InsufficientContext,
                "insufficient context: story " + lk.story_id + " has fewer than two sentences");
  double sum = 0.0;
  for (std::size_t i = 0; i < lk.p.size(); ++i) {
    if (!in_unit_interval(lk.p[i]))
      throw Error(ErrorCode::Integrity, "story " + lk.story_id + ": likelihood p[" + std::to_string(i) +
                                          "] is outside [0, 1]");
    sum += lk.p[i];
  }
  return {sum / static_cast<double>(lk.p.size())};
}

LikelihoodReport validate_likelihoods(const SentenceLikelihoods& lk, const StorySequence& story)
{
  using Kind = LikelihoodViolation::Kind;
  LikelihoodReport report;
  if (lk.story_id != story.story_id)
    report.violations.push_back({Kind::StoryId, 0,
                                 "likelihoods are for story " + lk.story_id + ", not " + story.story_id});
  const std::size_t want = story.sentences.empty() ? 0 : story.sentences.size() - 1;
  if (lk.p.size() != want)
    report.violations.push_back({Kind::Count, 0,
                                 "expected " + std::to_string(want) + " likelihoods for " +
                                   std::to_string(story.sentences.size()) + " sentences, found " +
                                   std::to_string(lk.p.size())});
  for (std::size_t i = 0; i < lk.p.size(); ++i)
    if (!in_unit_interval(lk.p[i]))
      report.violations.push_back({Kind::Range, i, "p[" + std::to_string(i) + "] is outside [0, 1]"});
  return report;
}

std::map<std::string, SentenceLikelihoods> parse_likelihoods_jsonl(std::string_view text)
{
  std::map<std::string, SentenceLikelihoods> out;
  std::size_t offset = 0;
  std::size_t line_no = 0;
  while (offset < text.size()) {
    const std::size_t nl = text.find('\n', offset);
    const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
    const std::string_view line = text.substr(offset, end - offset);
    const std::size_t line_offset = offset;
    offset = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos)
      continue;

    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      const std::size_t at = line_offset + (e.byte > 0 ? e.byte - 1 : 0);
      throw ParseError("likelihoods line " + std::to_string(line_no) + ": " + e.what(), at);
    }
    const auto where = "likelihoods line " + std::to_string(line_no);
    if (!obj.is_object() || !obj.contains("story_id") || !obj.at("story_id").is_string() ||
        !obj.contains("p") || !obj.at("p").is_array())
      throw Error(ErrorCode::Integrity, where + ": expected {story_id, provider_id, p}");

    SentenceLikelihoods lk;
    lk.story_id = obj.at("story_id").get<std::string>();
    lk.provider_id = obj.value("provider_id", std::string{});
    for (const auto& v : obj.at("p")) {
      if (!v.is_number())
        throw Error(ErrorCode::Integrity, where + ": p must contain numbers");
      lk.p.push_back(v.get<double>());
    }
    if (out.contains(lk.story_id))
      throw Error(ErrorCode::Integrity, where + ": duplicate story_id " + lk.story_id);
    out.emplace(lk.story_id, std::move(lk));
  }
  return out;
}

std::map<std::string, SentenceLikelihoods> read_likelihoods_jsonl(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_likelihoods_jsonl(ss.str());
}

std::string render_likelihoods_jsonl(const std::map<std::string, SentenceLikelihoods>& lks)
{
  std::string out;
  for (const auto& [id, lk] : lks) {
    out += json{{"story_id", lk.story_id}, {"provider_id", lk.provider_id}, {"p", lk.p}}.dump();
    out += '\n';
  }
  return out;
}

} // namespace storyeval
