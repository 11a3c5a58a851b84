// Copyright 2026 The storyeval Authors
// SPDX-License-Identifier: Apache-2.0

#include "storyeval/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "storyeval/error.hpp"

namespace storyeval {

using nlohmann::json;

namespace {

std::string slurp(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(std::string_view text, std::size_t base_offset, const std::string& what)
{
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // nlohmann reports the 1-based position of the offending byte.
    const std::size_t at = base_offset + (e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError(what + ": malformed JSON at byte " + std::to_string(at) + ": " + e.what(), at);
  }
}

// Story ids and image ids appear as either strings or integers in the wild.
std::optional<std::string> id_string(const json& j)
{
  if (j.is_string())
    return j.get<std::string>();
  if (j.is_number_integer() || j.is_number_unsigned())
    return std::to_string(j.get<long long>());
  return std::nullopt;
}

std::optional<long long> index_value(const json& j)
{
  if (j.is_number_integer() || j.is_number_unsigned())
    return j.get<long long>();
  if (j.is_string()) {
    try {
      std::size_t used = 0;
      const auto s = j.get<std::string>();
      const long long v = std::stoll(s, &used);
      if (used == s.size())
        return v;
    } catch (const std::exception&) {
    }
  }
  return std::nullopt;
}

std::vector<ImageRef> images_from_json(const json& j, const std::string& story_id)
{
  std::vector<ImageRef> out;
  if (j.is_null())
    return out;
  if (!j.is_array())
    throw Error(ErrorCode::Integrity, "story " + story_id + ": images must be an array");
  for (const auto& item : j) {
    ImageRef ref;
    ref.position = out.size();
    if (auto id = id_string(item)) {
      ref.image_id = *id;
    } else if (item.is_object() && item.contains("image_id")) {
      auto id2 = id_string(item.at("image_id"));
      if (!id2)
        throw Error(ErrorCode::Integrity, "story " + story_id + ": bad image_id");
      ref.image_id = *id2;
      if (item.contains("uri") && item.at("uri").is_string())
        ref.uri = item.at("uri").get<std::string>();
    } else {
      throw Error(ErrorCode::Integrity, "story " + story_id + ": bad image entry");
    }
    if (ref.image_id.empty())
      throw Error(ErrorCode::Integrity, "story " + story_id + ": empty image id");
    out.push_back(std::move(ref));
  }
  return out;
}

} // namespace

Author Author::model(std::string model_id)
{
  if (model_id.empty())
    throw Error(ErrorCode::InvalidArgument, "model id must be nonempty");
  Author a;
  a.model_id_ = std::move(model_id);
  return a;
}

StorySet import_vist_sis(const std::filesystem::path& path)
{
  return parse_vist_sis(slurp(path));
}

StorySet parse_vist_sis(std::string_view text)
{
  const json root = parse_json(text, 0, "SIS file");
  if (!root.is_object() || !root.contains("annotations") || !root.at("annotations").is_array())
    throw Error(ErrorCode::Integrity, "SIS file has no annotations array");

  std::map<std::string, std::optional<std::string>> image_uris;
  if (root.contains("images") && root.at("images").is_array()) {
    for (const auto& img : root.at("images")) {
      if (!img.is_object() || !img.contains("id"))
        continue;
      auto id = id_string(img.at("id"));
      if (!id)
        continue;
      for (const char* key : {"url_o", "url_m", "url"}) {
        if (img.contains(key) && img.at(key).is_string()) {
          image_uris[*id] = img.at(key).get<std::string>();
          break;
        }
      }
    }
  }

  struct Entry
  {
    std::string text;
    std::string image_id;
  };
  std::map<std::string, std::map<long long, Entry>> grouped;

  auto add = [&](const json& ann) {
    if (!ann.is_object())
      throw Error(ErrorCode::Integrity, "SIS annotation is not an object");
    auto story_id = ann.contains("story_id") ? id_string(ann.at("story_id")) : std::nullopt;
    if (!story_id || story_id->empty())
      throw Error(ErrorCode::Integrity, "SIS annotation without story_id");
    auto index = ann.contains("worker_arranged_photo_order")
                   ? index_value(ann.at("worker_arranged_photo_order"))
                   : std::nullopt;
    if (!index)
      throw Error(ErrorCode::Integrity, "story " + *story_id + ": annotation without index");
    Entry e;
    for (const char* key : {"original_text", "text"}) {
      if (ann.contains(key) && ann.at(key).is_string()) {
        e.text = ann.at(key).get<std::string>();
        break;
      }
    }
    if (ann.contains("photo_flickr_id"))
      e.image_id = id_string(ann.at("photo_flickr_id")).value_or("");
    if (e.image_id.empty())
      throw Error(ErrorCode::Integrity, "story " + *story_id + ": annotation without photo id");
    auto& slots = grouped[*story_id];
    if (!slots.emplace(*index, std::move(e)).second)
      throw Error(ErrorCode::Integrity,
                  "story " + *story_id + ": duplicate index " + std::to_string(*index));
  };

  for (const auto& item : root.at("annotations")) {
    if (item.is_array()) {
      for (const auto& ann : item)
        add(ann);
    } else {
      add(item);
    }
  }

  StorySet set;
  set.author = Author::human();
  for (auto& [story_id, slots] : grouped) {
    StorySequence story;
    story.story_id = story_id;
    story.author = Author::human();
    long long expected = 0;
    for (auto& [index, entry] : slots) {
      if (index != expected)
        throw Error(ErrorCode::Integrity,
                    "story " + story_id + ": missing index " + std::to_string(expected));
      ImageRef ref;
      ref.image_id = entry.image_id;
      ref.position = story.images.size();
      if (auto it = image_uris.find(entry.image_id); it != image_uris.end())
        ref.uri = it->second;
      story.images.push_back(std::move(ref));
      story.sentences.push_back(std::move(entry.text));
      ++expected;
    }
    set.stories.emplace(story_id, std::move(story));
  }
  return set;
}

namespace {

// Shared JSONL reader. When `expected` is set, lines whose model_id
// disagrees are rejected; otherwise the first story line fixes the author.
ImportResult parse_jsonl(std::string_view text, const std::optional<Author>& expected)
{
  ImportResult result;
  std::optional<Author> author = expected;
  bool seen_story = false;

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

    const json obj = parse_json(line, line_offset, "line " + std::to_string(line_no));
    if (!obj.is_object())
      throw ParseError("line " + std::to_string(line_no) + ": expected a JSON object", line_offset);

    if (obj.contains("__meta__")) {
      if (seen_story)
        throw Error(ErrorCode::Integrity, "line " + std::to_string(line_no) + ": __meta__ must be the first line");
      result.set.provenance = obj.at("__meta__");
      continue;
    }
    seen_story = true;

    auto story_id = obj.contains("story_id") ? id_string(obj.at("story_id")) : std::nullopt;
    if (!story_id || story_id->empty()) {
      result.rejected.push_back({line_no, "", "missing story_id"});
      continue;
    }

    Author line_author = Author::human();
    if (obj.contains("model_id") && !obj.at("model_id").is_null()) {
      if (!obj.at("model_id").is_string()) {
        result.rejected.push_back({line_no, *story_id, "model_id must be a string or null"});
        continue;
      }
      line_author = Author::model(obj.at("model_id").get<std::string>());
    }
    if (expected) {
      // Prediction files may omit the model id on each line.
      const bool omitted = !obj.contains("model_id") || obj.at("model_id").is_null();
      if (!omitted && line_author != *expected) {
        result.rejected.push_back({line_no, *story_id,
                                   "model_id " + line_author.label() + " does not match " + expected->label()});
        continue;
      }
      line_author = *expected;
    } else if (!author) {
      author = line_author;
    } else if (*author != line_author) {
      throw Error(ErrorCode::Integrity, "line " + std::to_string(line_no) + ": author " + line_author.label() +
                                          " differs from " + author->label());
    }

    StorySequence story;
    story.story_id = *story_id;
    story.author = line_author;
    if (obj.contains("sentences") && obj.at("sentences").is_array()) {
      for (const auto& s : obj.at("sentences")) {
        if (!s.is_string()) {
          story.sentences.clear();
          break;
        }
        story.sentences.push_back(s.get<std::string>());
      }
    } else if (obj.contains("text") && obj.at("text").is_string()) {
      story.sentences = split_sentences(obj.at("text").get<std::string>());
    }
    if (story.sentences.empty()) {
      result.rejected.push_back({line_no, *story_id, "empty sentence list"});
      continue;
    }
    story.images = images_from_json(obj.value("images", json()), *story_id);

    if (result.set.stories.contains(*story_id))
      throw Error(ErrorCode::Integrity, "duplicate story_id " + *story_id);
    result.set.stories.emplace(*story_id, std::move(story));
  }
  result.set.author = author.value_or(Author::human());
  return result;
}

} // namespace

ImportResult import_predictions(const std::filesystem::path& path, const std::string& model_id)
{
  return parse_predictions(slurp(path), model_id);
}

ImportResult parse_predictions(std::string_view text, const std::string& model_id)
{
  return parse_jsonl(text, Author::model(model_id));
}

ImportResult import_story_jsonl(const std::filesystem::path& path)
{
  return parse_story_jsonl(slurp(path));
}

ImportResult parse_story_jsonl(std::string_view text)
{
  return parse_jsonl(text, std::nullopt);
}

json story_to_json(const StorySequence& story)
{
  json images = json::array();
  for (const auto& img : story.images) {
    if (img.uri)
      images.push_back({{"image_id", img.image_id}, {"uri", *img.uri}});
    else
      images.push_back(img.image_id);
  }
  return {
    {"story_id", story.story_id},
    {"sentences", story.sentences},
    {"model_id", story.author.is_human() ? json(nullptr) : json(story.author.model_id())},
    {"images", std::move(images)},
  };
}

std::string export_story_jsonl(const StorySet& set)
{
  std::string out;
  if (!set.provenance.is_null() && !set.provenance.empty()) {
    out += json{{"__meta__", set.provenance}}.dump();
    out += '\n';
  }
  for (const auto& [id, story] : set.stories) {
    out += story_to_json(story).dump();
    out += '\n';
  }
  return out;
}

EvaluationSet intersect(const StorySet& human, std::span<const PredictionSet> models)
{
  if (!human.author.is_human())
    throw Error(ErrorCode::InvalidArgument, "intersect: first set must be the human set");
  if (models.empty())
    throw Error(ErrorCode::InvalidArgument, "intersect: at least one model set is required");

  std::vector<const PredictionSet*> ordered;
  std::set<std::string> model_ids;
  for (const auto& m : models) {
    if (m.author.is_human())
      throw Error(ErrorCode::InvalidArgument, "intersect: model set authored by human");
    if (!model_ids.insert(m.author.model_id()).second)
      throw Error(ErrorCode::InvalidArgument, "intersect: duplicate model " + m.author.model_id());
    ordered.push_back(&m);
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const auto* a, const auto* b) { return a->author < b->author; });

  EvaluationSet eval;
  for (const auto& [id, story] : human.stories) {
    const bool everywhere = std::all_of(ordered.begin(), ordered.end(),
                                        [&](const auto* m) { return m->contains(id); });
    if (everywhere)
      eval.story_ids.push_back(id);
  }
  if (eval.story_ids.empty())
    throw Error(ErrorCode::Integrity, "intersect: no story is shared by the human set and every model");

  eval.human.author = human.author;
  eval.human.provenance = human.provenance;
  for (const auto& id : eval.story_ids)
    eval.human.stories.emplace(id, human.stories.at(id));

  for (const auto* m : ordered) {
    PredictionSet restricted;
    restricted.author = m->author;
    restricted.provenance = m->provenance;
    for (const auto& id : eval.story_ids) {
      StorySequence story = m->stories.at(id);
      if (story.images.empty())
        story.images = eval.human.stories.at(id).images;
      restricted.stories.emplace(id, std::move(story));
    }
    eval.models.push_back(std::move(restricted));
  }
  return eval;
}

std::vector<std::string> split_sentences(std::string_view text)
{
  std::vector<std::string> out;
  auto emit = [&](std::string_view piece) {
    const auto b = piece.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos)
      return;
    const auto e = piece.find_last_not_of(" \t\r\n");
    out.emplace_back(piece.substr(b, e - b + 1));
  };

  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '.' || c == '!' || c == '?') {
      std::size_t j = i;
      while (j < text.size() && (text[j] == '.' || text[j] == '!' || text[j] == '?' || text[j] == '"' ||
                                 text[j] == '\'' || text[j] == ')'))
        ++j;
      if (j == text.size() || std::isspace(static_cast<unsigned char>(text[j]))) {
        emit(text.substr(start, j - start));
        start = j;
      }
      i = j;
    } else {
      ++i;
    }
  }
  emit(text.substr(start));
  return out;
}

} // namespace storyeval
