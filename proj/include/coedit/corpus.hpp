#pragma once

// Revision-history ingestion and the measurement side of the model:
// sentence ownership under the majority-of-words rule and per-contributor
// edit effort (average Levenshtein size per revision).

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace coedit {

using Timestamp = std::chrono::sys_seconds;

/// Parses "YYYY-MM-DDTHH:MM:SSZ" (a "+00:00" offset is also accepted).
Timestamp parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp ts);

struct Revision {
  std::string article_id;
  std::int64_t revision_id = 0;
  Timestamp timestamp{};
  std::string contributor_id;
  std::string text;  // full article text after the edit
};

struct Article {
  std::string article_id;
  std::vector<Revision> revisions;  // ordered by (timestamp, revision_id)
};

struct RevisionCorpus {
  std::vector<Article> articles;  // in order of first appearance

  const Article* find(std::string_view article_id) const;
  std::size_t revision_count() const noexcept;
};

/// Reads one JSON object per line with fields article_id, revision_id,
/// timestamp, contributor_id and text. Blank lines are skipped.
/// Throws ParseError (with line number) or OrderingError.
RevisionCorpus load_corpus(std::istream& source);

/// Writes the canonical line format read by load_corpus.
void write_corpus(std::ostream& out, const RevisionCorpus& corpus);

/// Re-checks article invariants: non-empty, shared article_id, strictly
/// increasing revision ids and non-decreasing timestamps.
void validate_article(const Article& article);

struct OwnershipSnapshot {
  std::int64_t revision_id = 0;
  Timestamp timestamp{};
  std::map<std::string, std::size_t> sentence_counts;  // s_i, owners only
  std::size_t ownerless = 0;
  std::size_t total_sentences = 0;
};

struct OwnershipLedger {
  std::string article_id;
  std::vector<OwnershipSnapshot> snapshots;       // one per revision
  std::map<std::string, double> final_ownership;  // s_i / sum_j s_j at the last revision
};

/// Fractions s_i / sum_j s_j of a snapshot; empty when nothing is owned.
std::map<std::string, double> ownership_fractions(const OwnershipSnapshot& snapshot);

struct TrackOptions {
  /// Contributors (e.g. bots) whose words carry no owner.
  std::set<std::string, std::less<>> excluded;
};

/// Word-provenance ownership tracking. Every word carries the contributor
/// who introduced it; words surviving between consecutive revisions (by a
/// longest common subsequence over words) keep their provenance and new
/// words take the editor's. A sentence belongs to whoever holds strictly
/// more than half of its words, otherwise it is ownerless.
OwnershipLedger track_ownership(const Article& article, const TrackOptions& options = {});

struct EffortProfile {
  std::string contributor_id;
  std::uint64_t total_edit_size = 0;  // e_i
  std::uint64_t edit_count = 0;       // zeta_i
  double beta = 0.0;                  // e_i / zeta_i
};

/// Corpus-wide effort per contributor: zeta_i counts revisions authored,
/// e_i sums the Levenshtein distance from the previous revision's text
/// (empty for an article's first revision).
std::map<std::string, EffortProfile> contributor_profiles(const RevisionCorpus& corpus,
                                                          const TrackOptions& options = {});

/// Word-level LCS alignment: for each word of `next`, the index of the
/// matched word in `prev` or -1.
std::vector<std::ptrdiff_t> align_words(const std::vector<std::string_view>& prev,
                                        const std::vector<std::string_view>& next);

}  // namespace coedit
