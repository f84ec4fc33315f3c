#include "coedit/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <numeric>

#include "coedit/error.hpp"
#include "coedit/governance.hpp"
#include "coedit/random.hpp"

namespace coedit {

namespace {

std::map<std::string, double> predict_for(const std::set<std::string>& contributors,
                                          const ProfileMap& profiles,
                                          const PredictionParams& params) {
  std::vector<ContributorProfile> players;
  for (const auto& id : contributors) {
    auto it = profiles.find(id);
    if (it != profiles.end() && it->second.beta > 0.0) players.push_back({id, it->second.beta});
  }
  std::map<std::string, double> out;
  if (players.size() == 1) {
    out[players.front().contributor_id] = 1.0;
  } else if (players.size() >= 2) {
    const GameInstance game(players, params.effort_constant, params.governance);
    const auto c = equilibrium_ownership(game, params.mode);
    for (std::size_t i = 0; i < players.size(); ++i) out[players[i].contributor_id] = c[i];
  }
  return out;
}

BracketSnapshot snapshot_through(const Article& article, const OwnershipLedger& ledger,
                                 std::size_t count, const ProfileMap& profiles,
                                 const PredictionParams& params, const TrackOptions& options) {
  BracketSnapshot snap;
  snap.article_id = article.article_id;
  if (count == 0) return snap;
  std::set<std::string> active;
  for (std::size_t r = 0; r < count; ++r) {
    const auto& id = article.revisions[r].contributor_id;
    if (!options.excluded.contains(id)) active.insert(id);
  }
  snap.observed = ownership_fractions(ledger.snapshots.at(count - 1));
  snap.predicted = predict_for(active, profiles, params);
  snap.n_active = active.size();
  return snap;
}

void check_ledger(const Article& article, const OwnershipLedger& ledger) {
  if (article.revisions.empty()) throw ArgumentError("article has no revisions");
  if (ledger.snapshots.size() != article.revisions.size() ||
      ledger.article_id != article.article_id) {
    throw ArgumentError("ledger was not built from article " + article.article_id);
  }
}

}  // namespace

std::optional<ArticleComparison> compare_article(const std::string& article_id,
                                                 const std::set<std::string>& contributors,
                                                 const std::map<std::string, double>& observed,
                                                 const ProfileMap& profiles,
                                                 const PredictionParams& params,
                                                 std::string* notice) {
  auto skip = [&](const std::string& why) -> std::optional<ArticleComparison> {
    if (notice) *notice = "article " + article_id + " skipped: " + why;
    return std::nullopt;
  };

  std::vector<ContributorProfile> players;
  for (const auto& id : contributors) {
    auto it = profiles.find(id);
    if (it == profiles.end()) return skip("no effort profile for contributor " + id);
    if (it->second.beta > 0.0) players.push_back({id, it->second.beta});
  }
  if (players.size() < 2) return skip("fewer than two contributors with positive edit size");

  double owned = 0.0;
  for (const auto& p : players) {
    auto it = observed.find(p.contributor_id);
    if (it != observed.end()) owned += it->second;
  }
  if (!(owned > 0.0)) return skip("no owned sentences");

  std::stable_sort(players.begin(), players.end(), [](const auto& a, const auto& b) {
    if (a.beta != b.beta) return a.beta > b.beta;
    return a.contributor_id < b.contributor_id;
  });

  const GameInstance game(players, params.effort_constant, params.governance);
  const auto c = equilibrium_ownership(game, params.mode);

  ArticleComparison out;
  out.article_id = article_id;
  out.rows.reserve(players.size());
  for (std::size_t i = 0; i < players.size(); ++i) {
    auto it = observed.find(players[i].contributor_id);
    out.rows.push_back({players[i].contributor_id, players[i].beta, c[i],
                        it == observed.end() ? 0.0 : it->second});
  }
  return out;
}

ComparisonSet predict_vs_observe(const RevisionCorpus& corpus,
                                 const std::vector<OwnershipLedger>& ledgers,
                                 const ProfileMap& profiles, const PredictionParams& params,
                                 const TrackOptions& options) {
  if (ledgers.size() != corpus.articles.size()) {
    throw ArgumentError("one ledger per article is required");
  }
  ComparisonSet set;
  for (std::size_t a = 0; a < corpus.articles.size(); ++a) {
    const auto& article = corpus.articles[a];
    std::set<std::string> contributors;
    for (const auto& rev : article.revisions) {
      if (!options.excluded.contains(rev.contributor_id)) contributors.insert(rev.contributor_id);
    }
    std::string notice;
    auto cmp = compare_article(article.article_id, contributors, ledgers[a].final_ownership,
                               profiles, params, &notice);
    if (cmp) {
      set.articles.push_back(std::move(*cmp));
    } else {
      set.notices.push_back(std::move(notice));
    }
  }
  return set;
}

ComparisonSet predict_vs_observe(const RevisionCorpus& corpus, const ProfileMap& profiles,
                                 const PredictionParams& params, const TrackOptions& options) {
  std::vector<OwnershipLedger> ledgers;
  ledgers.reserve(corpus.articles.size());
  for (const auto& article : corpus.articles) ledgers.push_back(track_ownership(article, options));
  return predict_vs_observe(corpus, ledgers, profiles, params, options);
}

BracketSnapshot snapshot_at_year(const Article& article, const OwnershipLedger& ledger,
                                 int year_index, const ProfileMap& profiles,
                                 const PredictionParams& params, const TrackOptions& options) {
  if (year_index < 1) throw ArgumentError("year_index must be >= 1");
  check_ledger(article, ledger);
  const Timestamp cutoff =
      article.revisions.front().timestamp + std::chrono::seconds(kYearSeconds * year_index);
  const auto end = std::lower_bound(
      article.revisions.begin(), article.revisions.end(), cutoff,
      [](const Revision& rev, Timestamp ts) { return rev.timestamp < ts; });
  const auto count = static_cast<std::size_t>(end - article.revisions.begin());
  auto snap = snapshot_through(article, ledger, count, profiles, params, options);
  snap.year_index = year_index;
  snap.cutoff = cutoff;
  return snap;
}

std::vector<BracketSnapshot> bracket(const Article& article, const OwnershipLedger& ledger,
                                     const ProfileMap& profiles, const PredictionParams& params,
                                     std::optional<Timestamp> study_end,
                                     const TrackOptions& options) {
  check_ledger(article, ledger);
  const Timestamp inception = article.revisions.front().timestamp;
  const Timestamp end = study_end.value_or(article.revisions.back().timestamp);
  if (end < inception) throw ArgumentError("study end precedes article inception");

  const auto span = (end - inception).count();
  const int complete = static_cast<int>(span / kYearSeconds);
  std::vector<BracketSnapshot> out;
  out.reserve(static_cast<std::size_t>(complete) + 1);
  for (int k = 1; k <= complete; ++k) {
    out.push_back(snapshot_at_year(article, ledger, k, profiles, params, options));
  }

  const auto last = std::upper_bound(
      article.revisions.begin(), article.revisions.end(), end,
      [](Timestamp ts, const Revision& rev) { return ts < rev.timestamp; });
  auto final_snap = snapshot_through(
      article, ledger, static_cast<std::size_t>(last - article.revisions.begin()), profiles,
      params, options);
  final_snap.year_index = complete + 1;
  final_snap.final_state = true;
  final_snap.cutoff = end;
  out.push_back(std::move(final_snap));
  return out;
}

void pooled_pairs(const ComparisonSet& set, std::vector<double>& predicted,
                  std::vector<double>& observed) {
  predicted.clear();
  observed.clear();
  for (const auto& article : set.articles) {
    for (const auto& row : article.rows) {
      predicted.push_back(row.predicted);
      observed.push_back(row.observed);
    }
  }
}

CorrelationSummary correlations(const ComparisonSet& set) {
  CorrelationSummary out;
  std::vector<double> a;
  std::vector<double> d;
  pooled_pairs(set, a, d);
  out.pairs = a.size();
  if (a.size() >= 2) {
    try {
      out.pooled = pearson(a, d);
    } catch (const StatisticsError&) {
    }
  }

  double total = 0.0;
  for (const auto& article : set.articles) {
    std::vector<double> pa;
    std::vector<double> pd;
    for (const auto& row : article.rows) {
      pa.push_back(row.predicted);
      pd.push_back(row.observed);
    }
    try {
      total += pearson(pa, pd);
      ++out.articles_with_correlation;
    } catch (const StatisticsError&) {
    }
  }
  if (out.articles_with_correlation > 0) {
    out.mean_per_article = total / static_cast<double>(out.articles_with_correlation);
  }
  return out;
}

std::vector<RankPoint> rank_curve(const ComparisonSet& set) {
  std::vector<RankPoint> curve;
  for (const auto& article : set.articles) {
    if (curve.size() < article.rows.size()) curve.resize(article.rows.size());
    for (std::size_t r = 0; r < article.rows.size(); ++r) {
      curve[r].articles += 1;
      curve[r].mean_predicted += article.rows[r].predicted;
      curve[r].mean_observed += article.rows[r].observed;
    }
  }
  for (std::size_t r = 0; r < curve.size(); ++r) {
    curve[r].rank = r + 1;
    const auto n = static_cast<double>(curve[r].articles);
    curve[r].mean_predicted /= n;
    curve[r].mean_observed /= n;
  }
  return curve;
}

std::vector<ArticleFit> per_article_fits(const ComparisonSet& set) {
  std::vector<ArticleFit> out;
  for (const auto& article : set.articles) {
    if (article.rows.size() < 3) continue;
    std::vector<double> a;
    std::vector<double> d;
    for (const auto& row : article.rows) {
      a.push_back(row.predicted);
      d.push_back(row.observed);
    }
    try {
      out.push_back({article.article_id, linear_fit(a, d)});
    } catch (const StatisticsError&) {
    }
  }
  return out;
}

ValidationSummary train_test_validation(const ComparisonSet& set, std::size_t train_count,
                                        std::size_t repeats, std::uint64_t seed) {
  const std::size_t n = set.articles.size();
  if (train_count == 0 || train_count >= n) {
    throw ArgumentError("train_count must be in [1, " + std::to_string(n) + "), got " +
                        std::to_string(train_count));
  }
  if (repeats == 0) throw ArgumentError("repeats must be >= 1");

  ValidationSummary out;
  out.train_count = train_count;
  out.test_count = n - train_count;
  out.repeats = repeats;
  out.seed = seed;
  out.splits.reserve(repeats);

  std::vector<std::size_t> order(n);
  std::vector<double> a;
  std::vector<double> d;
  auto gather = [&](std::size_t from, std::size_t to) {
    a.clear();
    d.clear();
    for (std::size_t k = from; k < to; ++k) {
      for (const auto& row : set.articles[order[k]].rows) {
        a.push_back(row.predicted);
        d.push_back(row.observed);
      }
    }
  };

  std::size_t significant = 0;
  for (std::size_t r = 0; r < repeats; ++r) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    rng.shuffle(order);

    SplitResult split;
    gather(0, train_count);
    split.train = linear_fit(a, d);
    gather(train_count, n);
    split.test_mean_abs_error = mean_abs_error(a, d, split.train.rho, split.train.delta);
    if (a.size() >= 3) {
      try {
        split.test_p_value = linear_fit(a, d).p_value;
      } catch (const StatisticsError&) {
        split.test_p_value = 1.0;
      }
    }
    if (split.test_p_value < 0.05) ++significant;
    out.splits.push_back(split);
  }

  out.min_test_error = out.splits.front().test_mean_abs_error;
  out.max_test_error = out.min_test_error;
  for (const auto& s : out.splits) {
    out.mean_train_error += s.train.mean_abs_error;
    out.mean_test_error += s.test_mean_abs_error;
    out.mean_test_p_value += s.test_p_value;
    out.min_test_error = std::min(out.min_test_error, s.test_mean_abs_error);
    out.max_test_error = std::max(out.max_test_error, s.test_mean_abs_error);
  }
  const auto count = static_cast<double>(repeats);
  out.mean_train_error /= count;
  out.mean_test_error /= count;
  out.mean_test_p_value /= count;
  out.significant_fraction = static_cast<double>(significant) / count;
  return out;
}

double observed_entropy(const ArticleComparison& article) {
  std::vector<double> shares;
  shares.reserve(article.rows.size());
  double total = 0.0;
  for (const auto& row : article.rows) {
    shares.push_back(row.observed);
    total += row.observed;
  }
  if (!(total > 0.0)) throw ArgumentError("article " + article.article_id + " owns nothing");
  for (auto& s : shares) s /= total;
  return entropy(shares, true);
}

double quality_correlation(const std::map<std::string, double>& entropies,
                           const std::map<std::string, double>& scores) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& [id, h] : entropies) {
    auto it = scores.find(id);
    if (it == scores.end()) continue;
    xs.push_back(h);
    ys.push_back(it->second);
  }
  if (xs.size() < 2) {
    throw ArgumentError("quality correlation needs at least 2 shared articles, got " +
                        std::to_string(xs.size()));
  }
  return pearson(xs, ys);
}

std::map<std::string, double> read_quality_scores(std::istream& in) {
  auto trim = [](std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return std::string{};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
  };

  std::map<std::string, double> out;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError(line_no, "expected two columns");
    const auto id = trim(line.substr(0, comma));
    const auto value = trim(line.substr(comma + 1));
    if (!header) {
      if (id != "article_id" || value != "score") {
        throw ParseError(line_no, "expected header 'article_id,score'");
      }
      header = true;
      continue;
    }
    if (id.empty()) throw ParseError(line_no, "empty article_id");
    char* endp = nullptr;
    const double score = std::strtod(value.c_str(), &endp);
    if (value.empty() || *endp != '\0' || !std::isfinite(score)) {
      throw ParseError(line_no, "score is not a finite number: '" + value + "'");
    }
    if (!out.emplace(id, score).second) throw ParseError(line_no, "duplicate article " + id);
  }
  if (!header) throw ParseError(line_no, "missing header 'article_id,score'");
  return out;
}

std::vector<SweepPoint> governance_sweep(const RevisionCorpus& corpus,
                                         const std::vector<OwnershipLedger>& ledgers,
                                         const ProfileMap& profiles, PredictionParams params,
                                         const std::vector<double>& levels,
                                         const TrackOptions& options) {
  std::vector<SweepPoint> out;
  out.reserve(levels.size());
  std::vector<double> a;
  std::vector<double> d;
  for (double t : levels) {
    params.governance = t;
    const auto set = predict_vs_observe(corpus, ledgers, profiles, params, options);
    pooled_pairs(set, a, d);
    SweepPoint point;
    point.governance = t;
    if (a.size() >= 2) {
      try {
        point.pooled_pearson = pearson(a, d);
      } catch (const StatisticsError&) {
      }
    }
    double err = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) err += std::abs(a[i] - d[i]);
    point.mean_abs_error = a.empty() ? 0.0 : err / static_cast<double>(a.size());
    out.push_back(point);
  }
  return out;
}

}  // namespace coedit
