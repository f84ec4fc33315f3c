#include "coedit/text.hpp"

#include <algorithm>
#include <numeric>

namespace coedit {

namespace {

// Decodes one scalar value at byte offset `i`; returns its byte length.
// Invalid input yields U+FFFD with length 1.
std::size_t decode_one(std::string_view text, std::size_t i, char32_t& cp) {
  const auto* s = reinterpret_cast<const unsigned char*>(text.data());
  const std::size_t n = text.size();
  const unsigned char lead = s[i];
  std::size_t len = 0;
  char32_t value = 0;
  if (lead < 0x80) {
    cp = lead;
    return 1;
  } else if ((lead & 0xE0) == 0xC0) {
    len = 2;
    value = lead & 0x1F;
  } else if ((lead & 0xF0) == 0xE0) {
    len = 3;
    value = lead & 0x0F;
  } else if ((lead & 0xF8) == 0xF0) {
    len = 4;
    value = lead & 0x07;
  }
  bool ok = len > 0 && i + len <= n;
  for (std::size_t k = 1; ok && k < len; ++k) {
    if ((s[i + k] & 0xC0) != 0x80) {
      ok = false;
    } else {
      value = (value << 6) | (s[i + k] & 0x3F);
    }
  }
  if (ok) {
    // Reject overlong forms, surrogates and out-of-range values.
    static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
    ok = value >= kMin[len] && value <= 0x10FFFF && !(value >= 0xD800 && value <= 0xDFFF);
  }
  if (!ok) {
    cp = 0xFFFD;
    return 1;
  }
  cp = value;
  return len;
}

}  // namespace

std::u32string decode_utf8(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    char32_t cp = 0;
    i += decode_one(text, i, cp);
    out.push_back(cp);
  }
  return out;
}

bool is_unicode_whitespace(char32_t c) noexcept {
  switch (c) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
    case 0x85: case 0xA0: case 0x1680:
    case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return c >= 0x2000 && c <= 0x200A;
  }
}

std::vector<Word> tokenize_words(std::string_view text) {
  std::vector<Word> words;
  std::size_t i = 0;
  std::size_t start = 0;
  bool in_word = false;
  while (i < text.size()) {
    char32_t cp = 0;
    const std::size_t len = decode_one(text, i, cp);
    if (is_unicode_whitespace(cp)) {
      if (in_word) words.push_back({text.substr(start, i - start), start, i});
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      start = i;
    }
    i += len;
  }
  if (in_word) words.push_back({text.substr(start), start, text.size()});
  return words;
}

bool ends_sentence(std::string_view word) noexcept {
  if (word.empty()) return false;
  const char last = word.back();
  return last == '.' || last == '!' || last == '?';
}

std::vector<SentenceSpan> sentence_spans(const std::vector<Word>& words) {
  std::vector<SentenceSpan> spans;
  std::size_t first = 0;
  for (std::size_t w = 0; w < words.size(); ++w) {
    if (ends_sentence(words[w].text)) {
      spans.push_back({first, w + 1});
      first = w + 1;
    }
  }
  if (first < words.size()) spans.push_back({first, words.size()});
  return spans;
}

std::vector<std::string> segment_sentences(std::string_view text) {
  const auto words = tokenize_words(text);
  std::vector<std::string> out;
  for (const auto& span : sentence_spans(words)) {
    const std::size_t begin = words[span.first_word].begin;
    const std::size_t end = words[span.end_word - 1].end;
    out.emplace_back(text.substr(begin, end - begin));
  }
  return out;
}

std::uint64_t levenshtein(std::u32string_view a, std::u32string_view b) {
  // Common affixes never contribute to the distance.
  std::size_t prefix = 0;
  while (prefix < a.size() && prefix < b.size() && a[prefix] == b[prefix]) ++prefix;
  a.remove_prefix(prefix);
  b.remove_prefix(prefix);
  std::size_t suffix = 0;
  while (suffix < a.size() && suffix < b.size() &&
         a[a.size() - 1 - suffix] == b[b.size() - 1 - suffix]) {
    ++suffix;
  }
  a.remove_suffix(suffix);
  b.remove_suffix(suffix);
  if (a.size() < b.size()) std::swap(a, b);
  if (b.empty()) return a.size();

  std::vector<std::uint64_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::uint64_t{0});
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::uint64_t diag = row[0];
    row[0] = i + 1;
    for (std::size_t j = 0; j < b.size(); ++j) {
      const std::uint64_t up = row[j + 1];
      const std::uint64_t sub = diag + (a[i] == b[j] ? 0 : 1);
      row[j + 1] = std::min({up + 1, row[j] + 1, sub});
      diag = up;
    }
  }
  return row[b.size()];
}

std::uint64_t levenshtein(std::string_view a, std::string_view b) {
  if (a == b) return 0;
  const auto ua = decode_utf8(a);
  const auto ub = decode_utf8(b);
  return levenshtein(std::u32string_view(ua), std::u32string_view(ub));
}

}  // namespace coedit
