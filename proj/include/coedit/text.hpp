#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace coedit {

/// Decodes UTF-8 into Unicode scalar values. Invalid sequences decode to
/// U+FFFD one byte at a time.
std::u32string decode_utf8(std::string_view text);

bool is_unicode_whitespace(char32_t c) noexcept;

/// A whitespace-delimited word; `begin`/`end` are byte offsets into the source.
struct Word {
  std::string_view text;
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Splits on Unicode whitespace. Punctuation stays attached to its word.
std::vector<Word> tokenize_words(std::string_view text);

/// True when the word closes a sentence (its last character is '.', '!' or '?').
bool ends_sentence(std::string_view word) noexcept;

/// Half-open word-index ranges, one per sentence.
struct SentenceSpan {
  std::size_t first_word = 0;
  std::size_t end_word = 0;
};

std::vector<SentenceSpan> sentence_spans(const std::vector<Word>& words);

/// Splits after '.', '!' or '?' when followed by whitespace or end of text;
/// segments are trimmed and empty ones dropped.
std::vector<std::string> segment_sentences(std::string_view text);

/// Unit-cost edit distance over Unicode scalar values.
std::uint64_t levenshtein(std::string_view a, std::string_view b);
std::uint64_t levenshtein(std::u32string_view a, std::u32string_view b);

}  // namespace coedit
