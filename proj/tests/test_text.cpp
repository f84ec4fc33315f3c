#include <doctest.h>

#include <string>

#include "coedit/random.hpp"
#include "coedit/text.hpp"
#include "oracles.hpp"

using namespace coedit;

TEST_CASE("sentence segmentation") {
  CHECK(segment_sentences("A b. C d.") == std::vector<std::string>{"A b.", "C d."});
  CHECK(segment_sentences("Is it? Yes! Done.") == std::vector<std::string>{"Is it?", "Yes!", "Done."});
  CHECK(segment_sentences("v1.2 is out. Fine") == std::vector<std::string>{"v1.2 is out.", "Fine"});
  CHECK(segment_sentences("").empty());
  CHECK(segment_sentences("   \n\t ").empty());
  CHECK(segment_sentences("  One.   Two.  ") == std::vector<std::string>{"One.", "Two."});
  CHECK(segment_sentences("no terminator here") == std::vector<std::string>{"no terminator here"});
}

TEST_CASE("word tokens keep byte offsets") {
  const std::string text = "  héllo wörld. next";
  const auto words = tokenize_words(text);
  REQUIRE(words.size() == 3);
  CHECK(words[0].text == "héllo");
  CHECK(words[1].text == "wörld.");
  CHECK(words[2].text == "next");
  for (const auto& w : words) CHECK(text.substr(w.begin, w.end - w.begin) == w.text);
  CHECK(ends_sentence(words[1].text));
  CHECK(!ends_sentence(words[0].text));

  const auto spans = sentence_spans(words);
  REQUIRE(spans.size() == 2);
  CHECK(spans[0].first_word == 0);
  CHECK(spans[0].end_word == 2);
  CHECK(spans[1].first_word == 2);
  CHECK(spans[1].end_word == 3);
}

TEST_CASE("utf-8 decoding") {
  CHECK(decode_utf8("aé€😀") == std::u32string{U'a', U'é', U'€', U'😀'});
  CHECK(decode_utf8("a\xff" "b") == std::u32string{U'a', 0xFFFD, U'b'});
  CHECK(decode_utf8("\xe2\x82") == std::u32string{0xFFFD, 0xFFFD});
  CHECK(is_unicode_whitespace(U'　'));
  CHECK(!is_unicode_whitespace(U'x'));
}

TEST_CASE("edit distance examples") {
  CHECK(levenshtein("kitten", "sitting") == 3);
  CHECK(levenshtein("", "abc") == 3);
  CHECK(levenshtein("abc", "") == 3);
  CHECK(levenshtein("same", "same") == 0);
  CHECK(levenshtein("flaw", "lawn") == 2);
  // counted in code points, not bytes
  CHECK(levenshtein("café", "cafe") == 1);
  CHECK(levenshtein("😀", "") == 1);
}

namespace {

std::u32string random_word(Rng& rng, std::size_t max_len) {
  static const std::u32string alphabet = U"abcdé😀 .";
  std::u32string s;
  const auto n = rng.uniform_int(0, max_len);
  for (std::uint64_t i = 0; i < n; ++i) s += alphabet[rng.uniform_int(0, alphabet.size() - 1)];
  return s;
}

}  // namespace

TEST_CASE("edit distance agrees with the full-table oracle and is a metric") {
  Rng rng(99);
  for (int k = 0; k < 2000; ++k) {
    const auto a = random_word(rng, 30);
    const auto b = random_word(rng, 30);
    const auto c = random_word(rng, 30);
    const auto ab = levenshtein(a, b);
    REQUIRE(ab == oracle::levenshtein_full(a, b));
    CHECK(ab == levenshtein(b, a));
    CHECK(ab <= levenshtein(a, c) + levenshtein(c, b));
    CHECK((ab == 0) == (a == b));
    CHECK(ab >= (a.size() > b.size() ? a.size() - b.size() : b.size() - a.size()));
    CHECK(ab <= std::max(a.size(), b.size()));
  }
}

TEST_CASE("edit distance on long inputs") {
  Rng rng(5);
  std::u32string a;
  for (int i = 0; i < 3000; ++i) a += static_cast<char32_t>(U'a' + rng.uniform_int(0, 3));
  auto b = a;
  b.insert(1000, U"xyz");
  b.erase(2500, 4);
  b[10] = U'q';
  CHECK(levenshtein(a, b) == oracle::levenshtein_full(a, b));
}
