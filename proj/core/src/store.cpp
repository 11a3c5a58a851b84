// Copyright 2026 The storyeval Authors
// SPDX-License-Identifier: Apache-2.0

#include "storyeval/store.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include "storyeval/error.hpp"
#include "storyeval/hash.hpp"
#include "storyeval/scoring.hpp"
#include "storyeval/tensor.hpp"

namespace storyeval {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::string_view kHumanFile = "human.jsonl";
constexpr std::string_view kModelPrefix = "model.";
constexpr std::string_view kJsonlSuffix = ".jsonl";

std::vector<fs::path> sorted_entries(const fs::path& dir)
{
  std::vector<fs::path> out;
  std::error_code ec;
  if (!fs::is_directory(dir, ec))
    return out;
  for (const auto& e : fs::directory_iterator(dir))
    out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace

bool write_file_atomic(const fs::path& path, std::string_view content, bool only_if_changed)
{
  std::error_code ec;
  if (only_if_changed && fs::is_regular_file(path, ec) && fs::file_size(path, ec) == content.size()) {
    if (read_file(path) == content)
      return false;
  }
  if (path.has_parent_path())
    fs::create_directories(path.parent_path(), ec);

  static std::atomic<unsigned> counter{0};
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw Error(ErrorCode::Io, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out)
      throw Error(ErrorCode::Io, "short write to " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error(ErrorCode::Io, "cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
  return true;
}

std::string read_file(const fs::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string encode_path_component(std::string_view id)
{
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : id) {
    if (std::isalnum(c) || c == '_' || c == '-') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 0xF];
    }
  }
  return out;
}

std::string decode_path_component(std::string_view encoded)
{
  std::string out;
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    if (encoded[i] == '%' && i + 2 < encoded.size() && std::isxdigit(static_cast<unsigned char>(encoded[i + 1])) &&
        std::isxdigit(static_cast<unsigned char>(encoded[i + 2]))) {
      out += static_cast<char>(std::stoi(std::string(encoded.substr(i + 1, 2)), nullptr, 16));
      i += 2;
    } else {
      out += encoded[i];
    }
  }
  return out;
}

std::vector<CachedScore> parse_score_cache(std::string_view text)
{
  std::vector<CachedScore> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  std::size_t offset = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t line_offset = offset;
    offset += line.size() + 1;
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError("score cache line " + std::to_string(line_no) + ": " + e.what(),
                       line_offset + (e.byte > 0 ? e.byte - 1 : 0));
    }
    try {
      CachedScore s;
      s.triple.story_id = j.at("story_id").get<std::string>();
      const auto& model = j.at("model_id");
      s.triple.author = model.is_null() ? Author::human() : Author::model(model.get<std::string>());
      s.triple.G = j.at("G").get<double>();
      s.triple.C = j.at("C").get<double>();
      s.triple.R = j.at("R").get<double>();
      s.config_hash = j.at("config_hash").get<std::string>();
      out.push_back(std::move(s));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::Integrity, "score cache line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::string render_score_cache(const std::vector<CachedScore>& rows)
{
  std::string out;
  for (const auto& s : rows) {
    const auto& a = s.triple.author;
    out += json{{"story_id", s.triple.story_id},
                {"model_id", a.is_human() ? json(nullptr) : json(a.model_id())},
                {"G", s.triple.G},
                {"C", s.triple.C},
                {"R", s.triple.R},
                {"config_hash", s.config_hash}}
             .dump();
    out += '\n';
  }
  return out;
}

Store Store::create(const fs::path& root)
{
  Store s(root);
  for (const auto& d : {s.stories_dir(), s.bundles_dir(), s.likelihoods_dir(), s.scores_dir(), s.reports_dir()})
    fs::create_directories(d);
  return s;
}

std::string Store::author_file_name(const Author& author)
{
  if (author.is_human())
    return std::string(kHumanFile);
  return std::string(kModelPrefix) + encode_path_component(author.model_id()) + std::string(kJsonlSuffix);
}

std::optional<Author> Store::author_from_file_name(std::string_view name)
{
  if (name == kHumanFile)
    return Author::human();
  if (name.starts_with(kModelPrefix) && name.ends_with(kJsonlSuffix) &&
      name.size() > kModelPrefix.size() + kJsonlSuffix.size()) {
    const auto enc = name.substr(kModelPrefix.size(), name.size() - kModelPrefix.size() - kJsonlSuffix.size());
    return Author::model(decode_path_component(enc));
  }
  return std::nullopt;
}

fs::path Store::bundle_dir(std::string_view story_id) const
{
  return bundles_dir() / encode_path_component(story_id);
}

bool Store::has_story_set(const Author& a) const
{
  std::error_code ec;
  return fs::is_regular_file(story_file(a), ec);
}

std::optional<StorySet> Store::human_stories() const
{
  if (!has_story_set(Author::human()))
    return std::nullopt;
  auto result = import_story_jsonl(story_file(Author::human()));
  if (!result.set.author.is_human())
    throw Error(ErrorCode::Integrity, story_file(Author::human()).string() + " holds model stories");
  return std::move(result.set);
}

std::vector<StorySet> Store::model_stories() const
{
  std::vector<StorySet> out;
  for (const auto& p : sorted_entries(stories_dir())) {
    const auto author = author_from_file_name(p.filename().string());
    if (!author || author->is_human())
      continue;
    auto result = import_predictions(p, author->model_id());
    if (!result.rejected.empty())
      throw Error(ErrorCode::Integrity, p.string() + ": line " + std::to_string(result.rejected.front().line) +
                                          ": " + result.rejected.front().reason);
    out.push_back(std::move(result.set));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.author < b.author; });
  return out;
}

bool Store::save_story_set(const StorySet& set) const
{
  return write_file_atomic(story_file(set.author), export_story_jsonl(set));
}

std::optional<BundleManifest> Store::manifest(std::string_view story_id) const
{
  const auto path = manifest_file(story_id);
  std::error_code ec;
  if (!fs::is_regular_file(path, ec))
    return std::nullopt;
  auto m = read_manifest(path);
  if (m.story_id != story_id)
    throw Error(ErrorCode::Integrity, path.string() + " describes story " + m.story_id);
  return m;
}

std::map<std::string, SentenceLikelihoods> Store::likelihoods(const Author& a) const
{
  const auto path = likelihood_file(a);
  std::error_code ec;
  if (!fs::is_regular_file(path, ec))
    return {};
  return read_likelihoods_jsonl(path);
}

std::vector<CachedScore> Store::cached_scores(const Author& a) const
{
  const auto path = score_file(a);
  std::error_code ec;
  if (!fs::is_regular_file(path, ec))
    return {};
  auto rows = parse_score_cache(read_file(path));
  for (const auto& r : rows)
    if (r.triple.author != a)
      throw Error(ErrorCode::Integrity, path.string() + " holds scores for " + r.triple.author.label());
  return rows;
}

bool Store::append_scores(const Author& a, const std::vector<CachedScore>& rows) const
{
  if (rows.empty())
    return false;
  const auto path = score_file(a);
  std::error_code ec;
  std::string text = fs::is_regular_file(path, ec) ? read_file(path) : std::string{};
  if (!text.empty() && text.back() != '\n')
    text += '\n';
  text += render_score_cache(rows);
  return write_file_atomic(path, text);
}

StoreLock::StoreLock(const Store& store)
{
  fs::create_directories(store.root());
  const auto path = store.root() / ".lock";
  fd_ = ::open(path.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
  if (fd_ < 0)
    throw Error(ErrorCode::Io, "cannot open lock file " + path.string());
  if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(fd_);
    fd_ = -1;
    throw Error(ErrorCode::Io, "store " + store.root().string() + " is locked by another process");
  }
}

StoreLock::~StoreLock()
{
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
}

std::string_view to_string(StoreViolation::Kind kind) noexcept
{
  using K = StoreViolation::Kind;
  switch (kind) {
  case K::Manifest: return "manifest";
  case K::MissingFile: return "missing_file";
  case K::Size: return "size";
  case K::Checksum: return "checksum";
  case K::Dims: return "dims";
  case K::NonFinite: return "non_finite";
  case K::Orphan: return "orphan";
  case K::MissingBundle: return "missing_bundle";
  case K::MissingTerms: return "missing_terms";
  case K::MissingLikelihood: return "missing_likelihood";
  }
  return "unknown";
}

std::size_t IntegrityReport::count(StoreViolation::Kind kind) const
{
  return static_cast<std::size_t>(
    std::count_if(violations.begin(), violations.end(), [&](const auto& v) { return v.kind == kind; }));
}

std::size_t IntegrityReport::blocking() const
{
  return static_cast<std::size_t>(
    std::count_if(violations.begin(), violations.end(), [](const auto& v) { return v.blocking; }));
}

IntegrityReport validate_store(const Store& store, const MetricConfig& cfg)
{
  using K = StoreViolation::Kind;
  IntegrityReport report;
  auto add = [&](K kind, std::string story, std::string path, std::string msg, bool blocking = false) {
    report.violations.push_back({kind, std::move(story), std::move(path), std::move(msg), blocking});
  };

  // Story ids whose bundle is usable, with the parsed manifest.
  std::map<std::string, BundleManifest> good_bundles;

  for (const auto& dir : sorted_entries(store.bundles_dir())) {
    if (!fs::is_directory(dir)) {
      add(K::Orphan, "", dir.string(), "file outside any bundle directory");
      continue;
    }
    const std::string story_id = decode_path_component(dir.filename().string());
    const auto manifest_path = dir / "manifest.json";
    std::set<std::string> referenced{"manifest.json"};
    bool usable = false;
    BundleManifest manifest;

    if (!fs::is_regular_file(manifest_path)) {
      add(K::Manifest, story_id, manifest_path.string(), "bundle directory has no manifest");
    } else {
      try {
        manifest = read_manifest(manifest_path);
        usable = true;
        if (manifest.story_id != story_id) {
          add(K::Manifest, story_id, manifest_path.string(), "manifest describes story " + manifest.story_id);
          usable = false;
        }
        if (manifest.regions().empty()) {
          add(K::Manifest, story_id, manifest_path.string(), "manifest has no regions entries");
          usable = false;
        }
      } catch (const Error& e) {
        add(K::Manifest, story_id, manifest_path.string(), e.what());
      }
    }

    if (usable) {
      std::optional<std::size_t> dim;
      std::set<std::string> authors;
      for (const auto& f : manifest.files) {
        referenced.insert(f.path);
        const auto path = dir / f.path;
        if (f.role == ManifestFile::Role::Terms && !authors.insert(f.author).second) {
          add(K::Manifest, story_id, path.string(), "second terms entry for author " + f.author);
          usable = false;
        }
        if (f.dtype != "f32" || f.dims[0] == 0 || f.dims[1] == 0) {
          add(K::Dims, story_id, path.string(), "dims must be positive and dtype f32");
          usable = false;
          continue;
        }
        if (dim && *dim != f.dims[1]) {
          add(K::Dims, story_id, path.string(), "column count differs from other tensors in the bundle");
          usable = false;
        }
        dim = f.dims[1];
        if (f.role == ManifestFile::Role::Terms && f.terms.size() != f.dims[0]) {
          add(K::Dims, story_id, path.string(), "terms list length differs from row count");
          usable = false;
        }
        std::error_code ec;
        if (!fs::is_regular_file(path, ec)) {
          add(K::MissingFile, story_id, path.string(), "referenced file does not exist");
          usable = false;
          continue;
        }
        const auto size = fs::file_size(path, ec);
        const auto want = f.dims[0] * f.dims[1] * 4;
        if (size != want) {
          add(K::Size, story_id, path.string(),
              "expected " + std::to_string(want) + " bytes, found " + std::to_string(size));
          usable = false;
          continue;
        }
        const std::string content = read_file(path);
        const auto bytes = std::span<const unsigned char>(reinterpret_cast<const unsigned char*>(content.data()),
                                                          content.size());
        if (sha256_hex(bytes) != f.sha256) {
          add(K::Checksum, story_id, path.string(), "sha256 does not match manifest");
          usable = false;
          continue;
        }
        const Matrix m = decode_f32(bytes, f.dims[0], f.dims[1]);
        if (std::any_of(m.data().begin(), m.data().end(), [](float v) { return !std::isfinite(v); })) {
          add(K::NonFinite, story_id, path.string(), "tensor contains NaN or Inf");
          usable = false;
        }
      }
    }

    for (const auto& p : sorted_entries(dir))
      if (!referenced.contains(p.filename().string()))
        add(K::Orphan, story_id, p.string(), "not referenced by the manifest");

    if (usable)
      good_bundles.emplace(story_id, std::move(manifest));
  }

  // Stories that scoring would pick up.
  std::vector<StorySet> sets;
  try {
    if (auto human = store.human_stories())
      sets.push_back(std::move(*human));
    for (auto& m : store.model_stories())
      sets.push_back(std::move(m));
  } catch (const Error& e) {
    add(K::Manifest, "", store.stories_dir().string(), e.what(), true);
  }

  std::set<std::string> reported_bundle;
  for (const auto& set : sets) {
    const std::string author = set.author.label();
    std::map<std::string, SentenceLikelihoods> lks;
    bool lk_readable = true;
    try {
      lks = store.likelihoods(set.author);
    } catch (const Error& e) {
      lk_readable = false;
      add(K::MissingLikelihood, "", store.likelihood_file(set.author).string(), e.what(), true);
    }
    for (const auto& [id, story] : set.stories) {
      const auto it = good_bundles.find(id);
      if (it == good_bundles.end()) {
        if (reported_bundle.insert(id).second)
          add(K::MissingBundle, id, store.bundle_dir(id).string(), "no valid bundle for a scheduled story", true);
      } else {
        std::optional<StoryNouns> nouns;
        if (cfg.tagger == TaggerKind::Lexicon) {
          nouns = story_nouns(story, LexiconTagger::bundled());
        } else if (auto f = it->second.noun_flags.find(author); f != it->second.noun_flags.end()) {
          try {
            EmbeddingBundle flags_only;
            flags_only.noun_flags = f->second;
            nouns = story_nouns(story, cfg, flags_only);
          } catch (const Error& e) {
            add(K::MissingTerms, id, store.manifest_file(id).string(), e.what(), true);
          }
        } else {
          add(K::MissingTerms, id, store.manifest_file(id).string(), "no noun flags for " + author, true);
        }
        if (nouns && !nouns->nouns.empty()) {
          const auto* terms = it->second.terms_for(author);
          if (terms == nullptr)
            add(K::MissingTerms, id, store.manifest_file(id).string(), "no terms entry for " + author, true);
          else if (terms->terms != nouns->nouns)
            add(K::MissingTerms, id, store.manifest_file(id).string(),
                "terms entry for " + author + " was computed for a different noun list", true);
        }
      }
      if (lk_readable && !lks.contains(id))
        add(K::MissingLikelihood, id, store.likelihood_file(set.author).string(),
            "no likelihoods for " + author, true);
    }
  }
  return report;
}

BundleManifest write_bundle(const Store& store, const BundleWriteRequest& req)
{
  const auto dir = store.bundle_dir(req.story_id);
  fs::create_directories(dir);

  BundleManifest m;
  m.story_id = req.story_id;
  m.encoder_id = req.encoder_id;
  m.created_at = req.created_at;
  m.noun_flags = req.noun_flags;

  for (std::size_t i = 0; i < req.regions.size(); ++i) {
    const auto& r = req.regions[i];
    ManifestFile f;
    f.role = ManifestFile::Role::Regions;
    f.image_id = r.image_id;
    f.path = "regions." + std::to_string(i) + ".f32";
    f.dims = {r.matrix.rows(), r.matrix.cols()};
    f.sha256 = write_tensor(dir / f.path, r.matrix);
    m.files.push_back(std::move(f));
  }
  for (const auto& [author, t] : req.terms_by_author) {
    ManifestFile f;
    f.role = ManifestFile::Role::Terms;
    f.author = author;
    f.path = "terms." + encode_path_component(author) + ".f32";
    f.dims = {t.matrix.rows(), t.matrix.cols()};
    f.terms = t.terms;
    f.sentence_index = t.sentence_index;
    f.sha256 = write_tensor(dir / f.path, t.matrix);
    m.files.push_back(std::move(f));
  }
  write_file_atomic(dir / "manifest.json", to_json(m).dump(2) + "\n");
  return m;
}

} // namespace storyeval
