#include "coedit/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <span>
#include <ostream>
#include <unordered_map>

#include <json.hpp>

#include "coedit/error.hpp"
#include "coedit/text.hpp"

namespace coedit {

namespace {

int parse_digits(std::string_view text, std::size_t pos, std::size_t len) {
  int value = 0;
  const char* first = text.data() + pos;
  const auto [ptr, ec] = std::from_chars(first, first + len, value);
  if (ec != std::errc{} || ptr != first + len) {
    throw ArgumentError("malformed timestamp '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

Timestamp parse_timestamp(std::string_view text) {
  // YYYY-MM-DDTHH:MM:SS followed by Z or +00:00
  const bool zulu = text.size() == 20 && text[19] == 'Z';
  const bool offset = text.size() == 25 && text.substr(19) == "+00:00";
  if (!(zulu || offset) || text[4] != '-' || text[7] != '-' || text[10] != 'T' ||
      text[13] != ':' || text[16] != ':') {
    throw ArgumentError("timestamp '" + std::string(text) +
                        "' is not ISO-8601 UTC (YYYY-MM-DDTHH:MM:SSZ)");
  }
  using namespace std::chrono;
  const year_month_day date{year{parse_digits(text, 0, 4)},
                            month{static_cast<unsigned>(parse_digits(text, 5, 2))},
                            day{static_cast<unsigned>(parse_digits(text, 8, 2))}};
  const int hh = parse_digits(text, 11, 2);
  const int mm = parse_digits(text, 14, 2);
  const int ss = parse_digits(text, 17, 2);
  if (!date.ok() || hh > 23 || mm > 59 || ss > 59) {
    throw ArgumentError("timestamp '" + std::string(text) + "' is out of range");
  }
  return sys_days{date} + hours{hh} + minutes{mm} + seconds{ss};
}

std::string format_timestamp(Timestamp ts) {
  using namespace std::chrono;
  const auto day_point = floor<days>(ts);
  const year_month_day date{day_point};
  const auto secs = (ts - day_point).count();
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()),
                static_cast<long long>(secs / 3600), static_cast<long long>(secs / 60 % 60),
                static_cast<long long>(secs % 60));
  return buf;
}

const Article* RevisionCorpus::find(std::string_view article_id) const {
  const auto it = std::find_if(articles.begin(), articles.end(),
                               [&](const Article& a) { return a.article_id == article_id; });
  return it == articles.end() ? nullptr : &*it;
}

std::size_t RevisionCorpus::revision_count() const noexcept {
  std::size_t n = 0;
  for (const auto& a : articles) n += a.revisions.size();
  return n;
}

void validate_article(const Article& article) {
  if (article.revisions.empty()) {
    throw OrderingError("article '" + article.article_id + "' has no revisions");
  }
  for (std::size_t k = 0; k < article.revisions.size(); ++k) {
    const auto& rev = article.revisions[k];
    if (rev.article_id != article.article_id) {
      throw OrderingError("revision " + std::to_string(rev.revision_id) +
                          " does not belong to article '" + article.article_id + "'");
    }
    if (k == 0) continue;
    const auto& prev = article.revisions[k - 1];
    if (rev.revision_id == prev.revision_id) {
      throw OrderingError("duplicate revision id " + std::to_string(rev.revision_id) +
                          " in article '" + article.article_id + "'");
    }
    if (rev.revision_id < prev.revision_id) {
      throw OrderingError("timestamp regression in article '" + article.article_id +
                          "': revision " + std::to_string(prev.revision_id) +
                          " is timestamped after revision " + std::to_string(rev.revision_id));
    }
    if (rev.timestamp < prev.timestamp) {
      throw OrderingError("revisions of article '" + article.article_id + "' are not time-ordered");
    }
  }
}

RevisionCorpus load_corpus(std::istream& source) {
  RevisionCorpus corpus;
  std::unordered_map<std::string, std::size_t> index;
  std::string line;
  std::size_t line_no = 0;

  const auto require = [&](const nlohmann::json& obj, const char* field) -> const nlohmann::json& {
    const auto it = obj.find(field);
    if (it == obj.end() || it->is_null()) {
      throw ParseError(line_no, std::string("missing field '") + field + "'");
    }
    return *it;
  };
  const auto require_string = [&](const nlohmann::json& obj, const char* field) {
    const auto& v = require(obj, field);
    if (!v.is_string()) throw ParseError(line_no, std::string("field '") + field + "' must be a string");
    return v.get<std::string>();
  };

  while (std::getline(source, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw ParseError(line_no, "record must be a JSON object");

    Revision rev;
    rev.article_id = require_string(obj, "article_id");
    const auto& id = require(obj, "revision_id");
    if (!id.is_number_integer()) throw ParseError(line_no, "field 'revision_id' must be an integer");
    rev.revision_id = id.get<std::int64_t>();
    try {
      rev.timestamp = parse_timestamp(require_string(obj, "timestamp"));
    } catch (const ArgumentError& e) {
      throw ParseError(line_no, std::string("field 'timestamp': ") + e.what());
    }
    rev.contributor_id = require_string(obj, "contributor_id");
    rev.text = require_string(obj, "text");

    auto [it, inserted] = index.try_emplace(rev.article_id, corpus.articles.size());
    if (inserted) corpus.articles.push_back({rev.article_id, {}});
    corpus.articles[it->second].revisions.push_back(std::move(rev));
  }

  for (auto& article : corpus.articles) {
    std::stable_sort(article.revisions.begin(), article.revisions.end(),
                     [](const Revision& a, const Revision& b) {
                       return a.timestamp != b.timestamp ? a.timestamp < b.timestamp
                                                         : a.revision_id < b.revision_id;
                     });
    validate_article(article);
  }
  return corpus;
}

void write_corpus(std::ostream& out, const RevisionCorpus& corpus) {
  for (const auto& article : corpus.articles) {
    for (const auto& rev : article.revisions) {
      nlohmann::ordered_json obj;
      obj["article_id"] = rev.article_id;
      obj["revision_id"] = rev.revision_id;
      obj["timestamp"] = format_timestamp(rev.timestamp);
      obj["contributor_id"] = rev.contributor_id;
      obj["text"] = rev.text;
      out << obj.dump() << '\n';
    }
  }
}

std::map<std::string, double> ownership_fractions(const OwnershipSnapshot& snapshot) {
  std::map<std::string, double> out;
  std::size_t owned = 0;
  for (const auto& [id, count] : snapshot.sentence_counts) owned += count;
  if (owned == 0) return out;
  for (const auto& [id, count] : snapshot.sentence_counts) {
    out[id] = static_cast<double>(count) / static_cast<double>(owned);
  }
  return out;
}

namespace {

// LCS lengths of a against every prefix of b: row[k] = LCS(a, b[0..k)).
void lcs_row(std::span<const int> a, std::span<const int> b, std::vector<std::uint32_t>& row) {
  row.assign(b.size() + 1, 0);
  for (int x : a) {
    std::uint32_t diag = 0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      const std::uint32_t up = row[j + 1];
      row[j + 1] = x == b[j] ? diag + 1 : std::max(up, row[j]);
      diag = up;
    }
  }
}

void lcs_small(std::span<const int> a, std::size_t a_off, std::span<const int> b,
               std::size_t b_off, std::vector<std::ptrdiff_t>& match) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  // suffix table: len[i][j] = LCS(a[i..], b[j..])
  std::vector<std::uint32_t> len((n + 1) * (m + 1), 0);
  const auto at = [m](std::size_t i, std::size_t j) { return i * (m + 1) + j; };
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = m; j-- > 0;) {
      len[at(i, j)] = a[i] == b[j] ? len[at(i + 1, j + 1)] + 1
                                   : std::max(len[at(i + 1, j)], len[at(i, j + 1)]);
    }
  }
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < n && j < m) {
    if (a[i] == b[j] && len[at(i, j)] == len[at(i + 1, j + 1)] + 1) {
      match[b_off + j] = static_cast<std::ptrdiff_t>(a_off + i);
      ++i;
      ++j;
    } else if (len[at(i + 1, j)] >= len[at(i, j + 1)]) {
      ++i;
    } else {
      ++j;
    }
  }
}

// Hirschberg's linear-space LCS.
void lcs_align(std::span<const int> a, std::size_t a_off, std::span<const int> b,
               std::size_t b_off, std::vector<std::ptrdiff_t>& match) {
  if (a.empty() || b.empty()) return;
  if (a.size() * b.size() <= (1u << 16) || a.size() == 1) {
    lcs_small(a, a_off, b, b_off, match);
    return;
  }
  const std::size_t mid = a.size() / 2;
  std::vector<std::uint32_t> forward;
  std::vector<std::uint32_t> backward;
  lcs_row(a.first(mid), b, forward);
  std::vector<int> a_rev(a.begin() + static_cast<std::ptrdiff_t>(mid), a.end());
  std::vector<int> b_rev(b.begin(), b.end());
  std::reverse(a_rev.begin(), a_rev.end());
  std::reverse(b_rev.begin(), b_rev.end());
  lcs_row(a_rev, b_rev, backward);

  std::size_t split = 0;
  std::uint32_t best = 0;
  for (std::size_t k = 0; k <= b.size(); ++k) {
    const std::uint32_t total = forward[k] + backward[b.size() - k];
    if (total > best || k == 0) {
      best = total;
      split = k;
    }
  }
  lcs_align(a.first(mid), a_off, b.first(split), b_off, match);
  lcs_align(a.subspan(mid), a_off + mid, b.subspan(split), b_off + split, match);
}

}  // namespace

std::vector<std::ptrdiff_t> align_words(const std::vector<std::string_view>& prev,
                                        const std::vector<std::string_view>& next) {
  std::vector<std::ptrdiff_t> match(next.size(), -1);
  std::size_t prefix = 0;
  while (prefix < prev.size() && prefix < next.size() && prev[prefix] == next[prefix]) {
    match[prefix] = static_cast<std::ptrdiff_t>(prefix);
    ++prefix;
  }
  std::size_t suffix = 0;
  while (suffix < prev.size() - prefix && suffix < next.size() - prefix &&
         prev[prev.size() - 1 - suffix] == next[next.size() - 1 - suffix]) {
    match[next.size() - 1 - suffix] = static_cast<std::ptrdiff_t>(prev.size() - 1 - suffix);
    ++suffix;
  }
  const std::size_t prev_mid = prev.size() - prefix - suffix;
  const std::size_t next_mid = next.size() - prefix - suffix;
  if (prev_mid == 0 || next_mid == 0) return match;

  std::unordered_map<std::string_view, int> ids;
  const auto intern = [&](std::string_view w) {
    return ids.try_emplace(w, static_cast<int>(ids.size())).first->second;
  };
  std::vector<int> a(prev_mid);
  std::vector<int> b(next_mid);
  for (std::size_t k = 0; k < prev_mid; ++k) a[k] = intern(prev[prefix + k]);
  for (std::size_t k = 0; k < next_mid; ++k) b[k] = intern(next[prefix + k]);
  lcs_align(a, prefix, b, prefix, match);
  return match;
}

OwnershipLedger track_ownership(const Article& article, const TrackOptions& options) {
  validate_article(article);
  OwnershipLedger ledger;
  ledger.article_id = article.article_id;
  ledger.snapshots.reserve(article.revisions.size());

  std::vector<std::string> names;
  std::unordered_map<std::string, int> name_index;
  const auto owner_of = [&](const std::string& id) -> int {
    if (options.excluded.count(id) > 0) return -1;
    auto it = name_index.find(id);
    if (it != name_index.end()) return it->second;
    names.push_back(id);
    const int k = static_cast<int>(names.size() - 1);
    name_index.emplace(id, k);
    return k;
  };

  std::vector<std::string_view> prev_words;
  std::vector<int> prev_owner;
  std::vector<int> tally;

  for (const auto& rev : article.revisions) {
    const int editor = owner_of(rev.contributor_id);
    const auto words = tokenize_words(rev.text);
    std::vector<std::string_view> next_words;
    next_words.reserve(words.size());
    for (const auto& w : words) next_words.push_back(w.text);

    const auto match = align_words(prev_words, next_words);
    std::vector<int> owner(next_words.size());
    for (std::size_t k = 0; k < owner.size(); ++k) {
      owner[k] = match[k] >= 0 ? prev_owner[static_cast<std::size_t>(match[k])] : editor;
    }

    OwnershipSnapshot snap;
    snap.revision_id = rev.revision_id;
    snap.timestamp = rev.timestamp;
    tally.assign(names.size(), 0);
    for (const auto& span : sentence_spans(words)) {
      ++snap.total_sentences;
      const std::size_t length = span.end_word - span.first_word;
      int holder = -1;
      for (std::size_t w = span.first_word; w < span.end_word; ++w) {
        if (owner[w] < 0) continue;
        if (2 * static_cast<std::size_t>(++tally[static_cast<std::size_t>(owner[w])]) > length) {
          holder = owner[w];
        }
      }
      for (std::size_t w = span.first_word; w < span.end_word; ++w) {
        if (owner[w] >= 0) tally[static_cast<std::size_t>(owner[w])] = 0;
      }
      if (holder >= 0) {
        ++snap.sentence_counts[names[static_cast<std::size_t>(holder)]];
      } else {
        ++snap.ownerless;
      }
    }
    ledger.snapshots.push_back(std::move(snap));
    prev_words = std::move(next_words);
    prev_owner = std::move(owner);
  }
  ledger.final_ownership = ownership_fractions(ledger.snapshots.back());
  return ledger;
}

std::map<std::string, EffortProfile> contributor_profiles(const RevisionCorpus& corpus,
                                                          const TrackOptions& options) {
  std::map<std::string, EffortProfile> out;
  for (const auto& article : corpus.articles) {
    std::string_view previous;
    for (const auto& rev : article.revisions) {
      if (options.excluded.count(rev.contributor_id) == 0) {
        auto& profile = out[rev.contributor_id];
        profile.contributor_id = rev.contributor_id;
        profile.total_edit_size += levenshtein(previous, rev.text);
        profile.edit_count += 1;
      }
      previous = rev.text;
    }
  }
  for (auto& [id, profile] : out) {
    profile.beta = static_cast<double>(profile.total_edit_size) /
                   static_cast<double>(profile.edit_count);
  }
  return out;
}

}  // namespace coedit
