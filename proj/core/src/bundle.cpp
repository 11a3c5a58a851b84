// Copyright 2026 The storyeval Authors
// SPDX-License-Identifier: Apache-2.0

#include "storyeval/bundle.hpp"

#include <fstream>
#include <sstream>

#include "storyeval/error.hpp"
#include "storyeval/tensor.hpp"

namespace storyeval {

using nlohmann::json;

namespace {

Error manifest_error(const std::string& story_id, const std::string& what)
{
  return Error(ErrorCode::Integrity, "manifest" + (story_id.empty() ? "" : " for " + story_id) + ": " + what);
}

std::string role_name(ManifestFile::Role r)
{
  return r == ManifestFile::Role::Terms ? "terms" : "regions";
}

} // namespace

const ManifestFile* BundleManifest::terms_for(const std::string& author) const
{
  for (const auto& f : files)
    if (f.role == ManifestFile::Role::Terms && f.author == author)
      return &f;
  return nullptr;
}

std::vector<const ManifestFile*> BundleManifest::regions() const
{
  std::vector<const ManifestFile*> out;
  for (const auto& f : files)
    if (f.role == ManifestFile::Role::Regions)
      out.push_back(&f);
  return out;
}

json to_json(const BundleManifest& m)
{
  json files = json::array();
  for (const auto& f : m.files) {
    json e{{"role", role_name(f.role)},
           {"path", f.path},
           {"dims", {f.dims[0], f.dims[1]}},
           {"dtype", f.dtype},
           {"sha256", f.sha256}};
    if (f.role == ManifestFile::Role::Regions) {
      e["image_id"] = f.image_id;
    } else {
      e["author"] = f.author;
      e["terms"] = f.terms;
      e["sentence_index"] = f.sentence_index;
    }
    files.push_back(std::move(e));
  }
  json j{{"story_id", m.story_id}, {"encoder_id", m.encoder_id}, {"created_at", m.created_at}, {"files", files}};
  if (!m.noun_flags.empty())
    j["noun_flags"] = m.noun_flags;
  return j;
}

BundleManifest manifest_from_json(const json& j)
{
  BundleManifest m;
  if (!j.is_object())
    throw manifest_error("", "not a JSON object");
  if (!j.contains("story_id") || !j.at("story_id").is_string())
    throw manifest_error("", "missing story_id");
  m.story_id = j.at("story_id").get<std::string>();
  m.encoder_id = j.value("encoder_id", std::string{});
  m.created_at = j.value("created_at", std::string{});
  if (!j.contains("files") || !j.at("files").is_array())
    throw manifest_error(m.story_id, "missing files array");

  for (const auto& e : j.at("files")) {
    ManifestFile f;
    try {
      const auto role = e.at("role").get<std::string>();
      if (role == "regions") {
        f.role = ManifestFile::Role::Regions;
        f.image_id = e.at("image_id").get<std::string>();
      } else if (role == "terms") {
        f.role = ManifestFile::Role::Terms;
        f.author = e.at("author").get<std::string>();
        f.terms = e.value("terms", std::vector<std::string>{});
        f.sentence_index = e.value("sentence_index", std::vector<std::size_t>{});
      } else {
        throw manifest_error(m.story_id, "unknown role '" + role + "'");
      }
      f.path = e.at("path").get<std::string>();
      const auto& dims = e.at("dims");
      if (!dims.is_array() || dims.size() != 2)
        throw manifest_error(m.story_id, f.path + ": dims must be [rows, cols]");
      for (std::size_t k = 0; k < 2; ++k) {
        if (!dims[k].is_number_integer() || dims[k].get<long long>() < 0)
          throw manifest_error(m.story_id, f.path + ": dims must be non-negative integers");
        f.dims[k] = dims[k].get<std::size_t>();
      }
      f.dtype = e.value("dtype", std::string{"f32"});
      f.sha256 = e.value("sha256", std::string{});
    } catch (const json::exception& ex) {
      throw manifest_error(m.story_id, std::string("bad file entry: ") + ex.what());
    }
    if (f.path.empty() || f.path.find('/') != std::string::npos || f.path.find('\\') != std::string::npos ||
        f.path == "." || f.path == ".." || f.path == "manifest.json")
      throw manifest_error(m.story_id, "file path '" + f.path + "' must be a plain file name");
    m.files.push_back(std::move(f));
  }

  if (j.contains("noun_flags")) {
    try {
      m.noun_flags = j.at("noun_flags").get<std::map<std::string, std::vector<std::vector<bool>>>>();
    } catch (const json::exception& ex) {
      throw manifest_error(m.story_id, std::string("bad noun_flags: ") + ex.what());
    }
  }
  return m;
}

BundleManifest read_manifest(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::Io, "cannot open manifest " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  json j;
  try {
    j = json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), e.byte > 0 ? e.byte - 1 : 0);
  }
  return manifest_from_json(j);
}

EmbeddingBundle load_bundle(const std::filesystem::path& bundle_dir, const BundleManifest& manifest,
                            const std::string& author)
{
  auto load = [&](const ManifestFile& f) {
    if (f.dtype != "f32")
      throw manifest_error(manifest.story_id, f.path + ": unsupported dtype " + f.dtype);
    if (f.dims[0] == 0 || f.dims[1] == 0)
      throw manifest_error(manifest.story_id, f.path + ": dims must be positive");
    return read_tensor(bundle_dir / f.path, f.dims[0], f.dims[1], f.sha256);
  };

  EmbeddingBundle b;
  b.story_id = manifest.story_id;
  b.encoder_id = manifest.encoder_id;
  for (const auto* f : manifest.regions())
    b.regions.push_back({f->image_id, load(*f), manifest.encoder_id});
  if (b.regions.empty())
    throw manifest_error(manifest.story_id, "no regions entries");

  if (const auto* f = manifest.terms_for(author)) {
    TermEmbeddings t;
    t.matrix = load(*f);
    t.terms = f->terms;
    t.sentence_index = f->sentence_index;
    t.encoder_id = manifest.encoder_id;
    if (t.terms.size() != t.matrix.rows())
      throw manifest_error(manifest.story_id, f->path + ": " + std::to_string(t.terms.size()) +
                                                " terms listed for " + std::to_string(t.matrix.rows()) + " rows");
    if (const std::size_t d = b.regions.front().matrix.cols(); t.matrix.cols() != d)
      throw manifest_error(manifest.story_id, f->path + ": term dims " + std::to_string(t.matrix.cols()) +
                                                " do not match region dims " + std::to_string(d));
    b.terms = std::move(t);
  }
  if (auto it = manifest.noun_flags.find(author); it != manifest.noun_flags.end())
    b.noun_flags = it->second;
  return b;
}

} // namespace storyeval
