// Copyright 2026 The storyeval Authors
// SPDX-License-Identifier: Apache-2.0

#include "storyeval/textproc.hpp"

#include <fstream>
#include <sstream>

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "storyeval/error.hpp"

namespace storyeval {

namespace detail {
std::string_view bundled_nouns_text();
std::string_view bundled_stopwords_text();
} // namespace detail

namespace {

const icu::Normalizer2& nfc_normalizer()
{
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* n = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status) || n == nullptr)
    throw Error(ErrorCode::Io, std::string("ICU NFC normalizer unavailable: ") + u_errorName(status));
  return *n;
}

icu::UnicodeString normalize(const icu::UnicodeString& s)
{
  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString out = nfc_normalizer().normalize(s, status);
  if (U_FAILURE(status))
    throw Error(ErrorCode::InvalidArgument, std::string("NFC normalization failed: ") + u_errorName(status));
  return out;
}

bool is_word_char(UChar32 c)
{
  if (u_isalnum(c))
    return true;
  const auto type = u_charType(c);
  return type == U_NON_SPACING_MARK || type == U_COMBINING_SPACING_MARK || type == U_ENCLOSING_MARK;
}

bool is_joiner(UChar32 c)
{
  return c == u'\'' || c == 0x2019 || c == u'-';
}

std::string_view trim(std::string_view s)
{
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

bool ends_with(std::string_view s, std::string_view suffix)
{
  return s.size() > suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

} // namespace

std::string nfc(std::string_view utf8)
{
  std::string out;
  normalize(icu::UnicodeString::fromUTF8(icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size()))))
    .toUTF8String(out);
  return out;
}

TokenizedSentence tokenize(std::string_view sentence)
{
  TokenizedSentence ts;
  ts.raw = std::string(sentence);

  icu::UnicodeString text = normalize(
    icu::UnicodeString::fromUTF8(icu::StringPiece(sentence.data(), static_cast<int32_t>(sentence.size()))));
  text.toLower(icu::Locale::getRoot());
  text = normalize(text);

  icu::UnicodeString current;
  auto flush = [&] {
    if (!current.isEmpty()) {
      std::string tok;
      current.toUTF8String(tok);
      ts.tokens.push_back(std::move(tok));
      current.remove();
    }
  };

  const int32_t len = text.length();
  for (int32_t i = 0; i < len;) {
    const UChar32 c = text.char32At(i);
    const int32_t next = text.moveIndex32(i, 1);
    if (is_word_char(c)) {
      current.append(c);
    } else if (is_joiner(c) && !current.isEmpty() && next < len && is_word_char(text.char32At(next))) {
      current.append(c == 0x2019 ? UChar32(u'\'') : c);
    } else {
      flush();
    }
    i = next;
  }
  flush();

  ts.noun_flags.assign(ts.tokens.size(), false);
  return ts;
}

WordList parse_word_list(std::string_view text, std::string name)
{
  WordList list;
  list.name = std::move(name);
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (t.empty())
      continue;
    if (t.front() == '#') {
      const auto body = trim(t.substr(1));
      constexpr std::string_view key = "version:";
      if (body.starts_with(key))
        list.version = std::string(trim(body.substr(key.size())));
      continue;
    }
    list.words.insert(nfc(t));
  }
  return list;
}

WordList load_word_list(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::Io, "cannot open word list " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_word_list(ss.str(), path.stem().string());
}

const WordList& bundled_noun_lexicon()
{
  static const WordList list = parse_word_list(detail::bundled_nouns_text(), "nouns");
  return list;
}

const WordList& bundled_stopwords()
{
  static const WordList list = parse_word_list(detail::bundled_stopwords_text(), "stopwords");
  return list;
}

const LexiconTagger& LexiconTagger::bundled()
{
  static const LexiconTagger tagger(bundled_noun_lexicon());
  return tagger;
}

bool LexiconTagger::is_noun(std::string_view token) const
{
  if (lexicon_->contains(token))
    return true;
  std::string_view base = token;
  if (ends_with(base, "'s"))
    base.remove_suffix(2);
  if (base != token && lexicon_->contains(base))
    return true;

  auto known = [&](std::string_view stem, std::string_view add) {
    return lexicon_->contains(std::string(stem) + std::string(add));
  };
  if (ends_with(base, "ies") && known(base.substr(0, base.size() - 3), "y"))
    return true;
  if (ends_with(base, "ves") &&
      (known(base.substr(0, base.size() - 3), "f") || known(base.substr(0, base.size() - 3), "fe")))
    return true;
  if (ends_with(base, "es") && known(base.substr(0, base.size() - 2), ""))
    return true;
  if (ends_with(base, "s") && !ends_with(base, "ss") && known(base.substr(0, base.size() - 1), ""))
    return true;
  return false;
}

std::vector<bool> LexiconTagger::tag(const TokenizedSentence& ts, std::string_view) const
{
  std::vector<bool> flags;
  flags.reserve(ts.tokens.size());
  for (const auto& t : ts.tokens)
    flags.push_back(is_noun(t));
  return flags;
}

void FlagTagger::set(std::string sentence_id, std::vector<bool> flags)
{
  flags_[std::move(sentence_id)] = std::move(flags);
}

std::vector<bool> FlagTagger::tag(const TokenizedSentence& ts, std::string_view sentence_id) const
{
  const auto it = flags_.find(sentence_id);
  if (it == flags_.end())
    throw Error(ErrorCode::Integrity, "no noun flags supplied for sentence " + std::string(sentence_id));
  if (it->second.size() != ts.tokens.size())
    throw Error(ErrorCode::Integrity, "noun flags for sentence " + std::string(sentence_id) + " have " +
                                        std::to_string(it->second.size()) + " entries, sentence has " +
                                        std::to_string(ts.tokens.size()) + " tokens");
  return it->second;
}

std::string sentence_id(std::string_view story_id, std::size_t index)
{
  return std::string(story_id) + "#" + std::to_string(index);
}

std::vector<std::string> extract_nouns(TokenizedSentence& ts, const NounTagger& tagger,
                                       std::string_view sentence_id)
{
  ts.noun_flags = tagger.tag(ts, sentence_id);
  std::vector<std::string> nouns;
  for (std::size_t i = 0; i < ts.tokens.size(); ++i)
    if (ts.noun_flags[i])
      nouns.push_back(ts.tokens[i]);
  return nouns;
}

NgramSet ngram_set(std::span<const std::string> tokens, std::size_t n, const WordList* stopwords)
{
  if (n == 0)
    throw Error(ErrorCode::InvalidArgument, "n-gram order must be at least 1");

  NgramSet out;
  out.order = n;

  std::vector<std::string> filtered;
  if (n == 1 && stopwords != nullptr) {
    for (const auto& t : tokens)
      if (!stopwords->contains(t))
        filtered.push_back(t);
    tokens = filtered;
  }

  if (tokens.size() < n)
    return out;
  out.total_count = tokens.size() - n + 1;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i)
    out.grams.emplace(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                      tokens.begin() + static_cast<std::ptrdiff_t>(i + n));
  return out;
}

} // namespace storyeval
