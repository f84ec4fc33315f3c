#pragma once

// End-to-end analysis run and its on-disk artifacts.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "coedit/analysis.hpp"
#include "coedit/governance.hpp"

namespace coedit {

/// CSV with header `contributor_id,beta`.
std::vector<ContributorProfile> read_profiles_csv(std::istream& in);

struct AnalyzeOptions {
  PredictionParams params;
  TrackOptions track;
  std::optional<std::map<std::string, double>> quality;
  std::size_t train_count = 0;  // 0 derives it from train_fraction
  double train_fraction = 0.35;
  std::size_t repeats = 100;
  std::uint64_t seed = 0;
  std::vector<double> sweep;  // extra governance levels to evaluate
};

struct AnalysisReport {
  ProfileMap profiles;
  ComparisonSet comparisons;
  CorrelationSummary correlation;
  std::optional<FitResult> pooled_fit;
  std::vector<ArticleFit> article_fits;
  std::optional<ValidationSummary> validation;
  std::vector<BracketSnapshot> brackets;
  std::vector<RankPoint> curve;
  std::map<std::string, double> entropies;  // observed, normalized
  std::optional<double> quality_pearson;
  std::size_t quality_articles = 0;
  std::vector<SweepPoint> sweep;
  std::vector<std::string> notices;
};

AnalysisReport run_analysis(const RevisionCorpus& corpus, const AnalyzeOptions& options);

nlohmann::ordered_json summary_json(const AnalysisReport& report, const AnalyzeOptions& options);

void write_comparison_csv(std::ostream& out, const ComparisonSet& set);
void write_brackets_csv(std::ostream& out, const std::vector<BracketSnapshot>& brackets);
void write_profiles_csv(std::ostream& out, const ProfileMap& profiles);
void write_curve_csv(std::ostream& out, const std::vector<RankPoint>& curve);
void write_entropy_grid_csv(std::ostream& out, const EntropyProfile& profile);

/// Writes every artifact into a sibling temporary directory and renames it
/// onto `dir`, so a failed run leaves no partial output.
void write_report_directory(const std::filesystem::path& dir, const AnalysisReport& report,
                            const AnalyzeOptions& options, const nlohmann::ordered_json& metadata);

/// Shortest round-trip decimal form.
std::string format_number(double value);

/// Writes `content` to `path` through a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace coedit
