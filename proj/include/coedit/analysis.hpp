#pragma once

// Validation pipeline: model predictions against ledger-observed ownership,
// yearly bracketing, correlations, linear fits with train/test splits, and
// the entropy-quality correlation.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "coedit/corpus.hpp"
#include "coedit/model.hpp"
#include "coedit/stats.hpp"

namespace coedit {

using ProfileMap = std::map<std::string, EffortProfile>;

struct PredictionParams {
  double effort_constant = GameInstance::kDefaultEffortConstant;
  double governance = 0.0;
  FeasibilityMode mode = FeasibilityMode::iterative_exclusion;
};

struct ContributorComparison {
  std::string contributor_id;
  double beta = 0.0;
  double predicted = 0.0;
  double observed = 0.0;
};

struct ArticleComparison {
  std::string article_id;
  /// Non-increasing beta; ties by contributor id.
  std::vector<ContributorComparison> rows;
};

struct ComparisonSet {
  std::vector<ArticleComparison> articles;
  std::vector<std::string> notices;  // skipped articles and why
};

/// Builds one comparison for a contributor set. Returns nullopt (with a
/// reason in `notice`) when fewer than two contributors have a positive
/// beta or nothing is owned.
std::optional<ArticleComparison> compare_article(const std::string& article_id,
                                                 const std::set<std::string>& contributors,
                                                 const std::map<std::string, double>& observed,
                                                 const ProfileMap& profiles,
                                                 const PredictionParams& params,
                                                 std::string* notice = nullptr);

/// One game per article over its distinct contributors (corpus-wide beta),
/// paired with the final-revision ownership from `ledgers` (same order as
/// corpus.articles).
ComparisonSet predict_vs_observe(const RevisionCorpus& corpus,
                                 const std::vector<OwnershipLedger>& ledgers,
                                 const ProfileMap& profiles, const PredictionParams& params,
                                 const TrackOptions& options = {});

ComparisonSet predict_vs_observe(const RevisionCorpus& corpus, const ProfileMap& profiles,
                                 const PredictionParams& params,
                                 const TrackOptions& options = {});

inline constexpr std::int64_t kYearSeconds = 31557600;  // 365.25 days

struct BracketSnapshot {
  std::string article_id;
  int year_index = 1;
  bool final_state = false;  // state after the last revision, not a full year
  Timestamp cutoff{};
  std::map<std::string, double> observed;
  std::map<std::string, double> predicted;
  std::size_t n_active = 0;
};

/// Ownership at the last revision strictly before inception + k years.
/// Throws ArgumentError when year_index < 1.
BracketSnapshot snapshot_at_year(const Article& article, const OwnershipLedger& ledger,
                                 int year_index, const ProfileMap& profiles,
                                 const PredictionParams& params,
                                 const TrackOptions& options = {});

/// Every complete year the article spans up to `study_end` (default: its last
/// revision), followed by the end-of-study state.
std::vector<BracketSnapshot> bracket(const Article& article, const OwnershipLedger& ledger,
                                     const ProfileMap& profiles, const PredictionParams& params,
                                     std::optional<Timestamp> study_end = std::nullopt,
                                     const TrackOptions& options = {});

struct CorrelationSummary {
  std::optional<double> pooled;            // over all (predicted, observed) pairs
  std::optional<double> mean_per_article;  // mean of per-article coefficients
  std::size_t pairs = 0;
  std::size_t articles_with_correlation = 0;
};

CorrelationSummary correlations(const ComparisonSet& set);

/// Pooled (predicted, observed) vectors in reporting order.
void pooled_pairs(const ComparisonSet& set, std::vector<double>& predicted,
                  std::vector<double>& observed);

struct RankPoint {
  std::size_t rank = 0;  // 1 = largest beta
  std::size_t articles = 0;
  double mean_predicted = 0.0;
  double mean_observed = 0.0;
};

/// Per-rank averages over articles.
std::vector<RankPoint> rank_curve(const ComparisonSet& set);

struct ArticleFit {
  std::string article_id;
  FitResult fit;
};

/// Per-article least-squares fits; articles with fewer than three rows or
/// constant predictions are left out.
std::vector<ArticleFit> per_article_fits(const ComparisonSet& set);

struct SplitResult {
  FitResult train;
  double test_mean_abs_error = 0.0;
  double test_p_value = 1.0;
};

struct ValidationSummary {
  std::size_t train_count = 0;
  std::size_t test_count = 0;
  std::size_t repeats = 0;
  std::uint64_t seed = 0;
  std::vector<SplitResult> splits;
  double mean_train_error = 0.0;
  double mean_test_error = 0.0;
  double min_test_error = 0.0;
  double max_test_error = 0.0;
  double mean_test_p_value = 0.0;
  double significant_fraction = 0.0;  // share of splits with test p < 0.05
};

/// Repeated random article splits: fit on the pooled pairs of `train_count`
/// articles, score the fitted line and a fresh regression on the rest.
ValidationSummary train_test_validation(const ComparisonSet& set, std::size_t train_count,
                                        std::size_t repeats, std::uint64_t seed);

/// Normalized entropy of observed ownership over all of the article's
/// compared contributors.
double observed_entropy(const ArticleComparison& article);

/// Pearson correlation over the articles present in both maps.
double quality_correlation(const std::map<std::string, double>& entropies,
                           const std::map<std::string, double>& scores);

/// CSV with header `article_id,score`.
std::map<std::string, double> read_quality_scores(std::istream& in);

struct SweepPoint {
  double governance = 0.0;
  std::optional<double> pooled_pearson;
  double mean_abs_error = 0.0;
};

std::vector<SweepPoint> governance_sweep(const RevisionCorpus& corpus,
                                         const std::vector<OwnershipLedger>& ledgers,
                                         const ProfileMap& profiles, PredictionParams params,
                                         const std::vector<double>& levels,
                                         const TrackOptions& options = {});

}  // namespace coedit
