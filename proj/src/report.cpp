#include "coedit/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include "coedit/error.hpp"

namespace coedit {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string format_number(double value) {
  if (!std::isfinite(value)) return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::vector<ContributorProfile> read_profiles_csv(std::istream& in) {
  std::vector<ContributorProfile> out;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  auto trim = [](const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return std::string{};
    return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError(line_no, "expected two columns");
    const auto id = trim(line.substr(0, comma));
    const auto value = trim(line.substr(comma + 1));
    if (!header) {
      if (id != "contributor_id" || value != "beta") {
        throw ParseError(line_no, "expected header 'contributor_id,beta'");
      }
      header = true;
      continue;
    }
    char* end = nullptr;
    const double beta = std::strtod(value.c_str(), &end);
    if (id.empty() || value.empty() || *end != '\0' || !std::isfinite(beta)) {
      throw ParseError(line_no, "bad profile row '" + line + "'");
    }
    out.push_back({id, beta});
  }
  if (!header) throw ParseError(line_no, "missing header 'contributor_id,beta'");
  return out;
}

AnalysisReport run_analysis(const RevisionCorpus& corpus, const AnalyzeOptions& options) {
  AnalysisReport report;
  report.profiles = contributor_profiles(corpus, options.track);
  for (const auto& [id, profile] : report.profiles) {
    if (!(profile.beta > 0.0)) {
      report.notices.push_back("contributor " + id + " has zero edit size and is left out of games");
    }
  }

  std::vector<OwnershipLedger> ledgers;
  ledgers.reserve(corpus.articles.size());
  for (const auto& article : corpus.articles) {
    ledgers.push_back(track_ownership(article, options.track));
  }

  report.comparisons =
      predict_vs_observe(corpus, ledgers, report.profiles, options.params, options.track);
  report.notices.insert(report.notices.end(), report.comparisons.notices.begin(),
                        report.comparisons.notices.end());
  if (report.comparisons.articles.empty()) {
    report.notices.push_back("no article has two or more contributors with owned sentences; "
                             "nothing to compare");
  }

  report.correlation = correlations(report.comparisons);
  {
    std::vector<double> a;
    std::vector<double> d;
    pooled_pairs(report.comparisons, a, d);
    if (a.size() >= 3) {
      try {
        report.pooled_fit = linear_fit(a, d);
      } catch (const StatisticsError& e) {
        report.notices.push_back(std::string("pooled fit skipped: ") + e.what());
      }
    }
  }
  report.article_fits = per_article_fits(report.comparisons);

  const std::size_t n = report.comparisons.articles.size();
  if (n >= 2 && options.repeats > 0) {
    std::size_t train = options.train_count;
    if (train == 0) {
      const auto scaled = std::llround(options.train_fraction * static_cast<double>(n));
      train = static_cast<std::size_t>(std::clamp<long long>(scaled, 1, static_cast<long long>(n) - 1));
    }
    try {
      report.validation = train_test_validation(report.comparisons, train, options.repeats,
                                                options.seed);
    } catch (const std::exception& e) {
      report.notices.push_back(std::string("train/test validation skipped: ") + e.what());
    }
  } else {
    report.notices.push_back("train/test validation needs at least 2 compared articles");
  }

  std::optional<Timestamp> study_end;
  for (const auto& article : corpus.articles) {
    if (!article.revisions.empty() &&
        (!study_end || article.revisions.back().timestamp > *study_end)) {
      study_end = article.revisions.back().timestamp;
    }
  }
  for (std::size_t a = 0; a < corpus.articles.size(); ++a) {
    auto snaps = bracket(corpus.articles[a], ledgers[a], report.profiles, options.params,
                         study_end, options.track);
    for (auto& s : snaps) report.brackets.push_back(std::move(s));
  }

  report.curve = rank_curve(report.comparisons);
  for (const auto& article : report.comparisons.articles) {
    report.entropies[article.article_id] = observed_entropy(article);
  }

  if (options.quality) {
    for (const auto& [id, h] : report.entropies) {
      if (options.quality->contains(id)) ++report.quality_articles;
    }
    try {
      report.quality_pearson = quality_correlation(report.entropies, *options.quality);
    } catch (const std::exception& e) {
      report.notices.push_back(std::string("quality correlation skipped: ") + e.what());
    }
  }

  if (!options.sweep.empty()) {
    report.sweep = governance_sweep(corpus, ledgers, report.profiles, options.params,
                                    options.sweep, options.track);
  }
  return report;
}

namespace {

ordered_json optional_number(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json fit_json(const FitResult& fit) {
  return ordered_json{{"rho", fit.rho},
                      {"delta", fit.delta},
                      {"mean_abs_error", fit.mean_abs_error},
                      {"p_value", fit.p_value},
                      {"slope_stderr", fit.slope_stderr},
                      {"n", fit.n}};
}

std::vector<std::string> snapshot_contributors(const BracketSnapshot& snap) {
  std::vector<std::string> ids;
  for (const auto& [id, c] : snap.predicted) ids.push_back(id);
  for (const auto& [id, c] : snap.observed) {
    if (!snap.predicted.contains(id)) ids.push_back(id);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

double lookup(const std::map<std::string, double>& m, const std::string& id) {
  auto it = m.find(id);
  return it == m.end() ? 0.0 : it->second;
}

ordered_json bracket_series(const std::vector<BracketSnapshot>& brackets) {
  struct Group {
    std::size_t snapshots = 0;
    std::vector<double> predicted;
    std::vector<double> observed;
  };
  std::map<int, Group> years;
  Group final_group;
  for (const auto& snap : brackets) {
    Group& g = snap.final_state ? final_group : years[snap.year_index];
    ++g.snapshots;
    if (snap.predicted.size() < 2) continue;
    for (const auto& id : snapshot_contributors(snap)) {
      g.predicted.push_back(lookup(snap.predicted, id));
      g.observed.push_back(lookup(snap.observed, id));
    }
  }
  auto entry = [](const Group& g) {
    ordered_json j;
    j["snapshots"] = g.snapshots;
    j["pairs"] = g.predicted.size();
    std::optional<double> r;
    double err = 0.0;
    for (std::size_t i = 0; i < g.predicted.size(); ++i) {
      err += std::abs(g.predicted[i] - g.observed[i]);
    }
    if (g.predicted.size() >= 2) {
      try {
        r = pearson(g.predicted, g.observed);
      } catch (const StatisticsError&) {
      }
    }
    j["pearson"] = optional_number(r);
    j["mean_abs_difference"] =
        g.predicted.empty() ? 0.0 : err / static_cast<double>(g.predicted.size());
    return j;
  };
  ordered_json series = ordered_json::array();
  for (const auto& [year, g] : years) {
    ordered_json j{{"year_index", year}, {"final", false}};
    j.update(entry(g));
    series.push_back(std::move(j));
  }
  if (final_group.snapshots > 0) {
    ordered_json j{{"year_index", nullptr}, {"final", true}};
    j.update(entry(final_group));
    series.push_back(std::move(j));
  }
  return series;
}

}  // namespace

ordered_json summary_json(const AnalysisReport& report, const AnalyzeOptions& options) {
  ordered_json j;
  j["effort_constant"] = options.params.effort_constant;
  j["governance"] = options.params.governance;
  j["governance_note"] =
      "predictions use the stated governance level; see the sweep for sensitivity";
  j["feasibility_mode"] = std::string(to_string(options.params.mode));
  j["excluded_contributors"] = options.track.excluded;

  std::size_t total_articles = report.comparisons.articles.size() + report.comparisons.notices.size();
  j["articles"] = {{"total", total_articles},
                   {"compared", report.comparisons.articles.size()},
                   {"skipped", report.comparisons.notices.size()}};
  j["contributors"] = report.profiles.size();
  j["pairs"] = report.correlation.pairs;

  double max_err = 0.0;
  double sum_err = 0.0;
  for (const auto& article : report.comparisons.articles) {
    for (const auto& row : article.rows) {
      max_err = std::max(max_err, std::abs(row.predicted - row.observed));
      sum_err += std::abs(row.predicted - row.observed);
    }
  }
  j["max_abs_difference"] = max_err;
  j["mean_abs_difference"] =
      report.correlation.pairs ? sum_err / static_cast<double>(report.correlation.pairs) : 0.0;

  j["pearson"] = {{"pooled", optional_number(report.correlation.pooled)},
                  {"mean_per_article", optional_number(report.correlation.mean_per_article)},
                  {"articles_with_correlation", report.correlation.articles_with_correlation}};
  j["pooled_fit"] = report.pooled_fit ? fit_json(*report.pooled_fit) : ordered_json(nullptr);

  {
    ordered_json fits;
    fits["count"] = report.article_fits.size();
    if (!report.article_fits.empty()) {
      double rho = 0.0, delta = 0.0, err = 0.0;
      std::size_t significant = 0;
      for (const auto& f : report.article_fits) {
        rho += f.fit.rho;
        delta += f.fit.delta;
        err += f.fit.mean_abs_error;
        if (f.fit.p_value < 0.05) ++significant;
      }
      const auto n = static_cast<double>(report.article_fits.size());
      fits["mean_rho"] = rho / n;
      fits["mean_delta"] = delta / n;
      fits["mean_abs_error"] = err / n;
      fits["significant_fraction"] = static_cast<double>(significant) / n;
    }
    j["article_fits"] = std::move(fits);
  }

  if (report.validation) {
    const auto& v = *report.validation;
    j["validation"] = {{"train_articles", v.train_count},
                       {"test_articles", v.test_count},
                       {"repeats", v.repeats},
                       {"seed", v.seed},
                       {"mean_train_error", v.mean_train_error},
                       {"mean_test_error", v.mean_test_error},
                       {"min_test_error", v.min_test_error},
                       {"max_test_error", v.max_test_error},
                       {"mean_test_p_value", v.mean_test_p_value},
                       {"significant_fraction", v.significant_fraction}};
  } else {
    j["validation"] = nullptr;
  }

  j["brackets"] = bracket_series(report.brackets);

  if (options.quality) {
    j["quality"] = {{"pearson", optional_number(report.quality_pearson)},
                    {"articles", report.quality_articles}};
  } else {
    j["quality"] = nullptr;
  }

  ordered_json sweep = ordered_json::array();
  for (const auto& p : report.sweep) {
    sweep.push_back({{"governance", p.governance},
                     {"pearson", optional_number(p.pooled_pearson)},
                     {"mean_abs_difference", p.mean_abs_error}});
  }
  j["sweep"] = std::move(sweep);
  j["notices"] = report.notices;
  return j;
}

void write_comparison_csv(std::ostream& out, const ComparisonSet& set) {
  out << "article_id,contributor_id,beta,predicted,observed\n";
  for (const auto& article : set.articles) {
    for (const auto& row : article.rows) {
      out << article.article_id << ',' << row.contributor_id << ',' << format_number(row.beta)
          << ',' << format_number(row.predicted) << ',' << format_number(row.observed) << '\n';
    }
  }
}

void write_brackets_csv(std::ostream& out, const std::vector<BracketSnapshot>& brackets) {
  out << "article_id,year_index,final,cutoff,n_active,contributor_id,predicted,observed\n";
  for (const auto& snap : brackets) {
    const auto prefix = snap.article_id + ',' + std::to_string(snap.year_index) + ',' +
                        (snap.final_state ? "1" : "0") + ',' + format_timestamp(snap.cutoff) +
                        ',' + std::to_string(snap.n_active) + ',';
    for (const auto& id : snapshot_contributors(snap)) {
      out << prefix << id << ',' << format_number(lookup(snap.predicted, id)) << ','
          << format_number(lookup(snap.observed, id)) << '\n';
    }
  }
}

void write_profiles_csv(std::ostream& out, const ProfileMap& profiles) {
  out << "contributor_id,total_edit_size,edit_count,beta\n";
  for (const auto& [id, p] : profiles) {
    out << id << ',' << p.total_edit_size << ',' << p.edit_count << ',' << format_number(p.beta)
        << '\n';
  }
}

void write_curve_csv(std::ostream& out, const std::vector<RankPoint>& curve) {
  out << "rank,articles,mean_predicted,mean_observed\n";
  for (const auto& p : curve) {
    out << p.rank << ',' << p.articles << ',' << format_number(p.mean_predicted) << ','
        << format_number(p.mean_observed) << '\n';
  }
}

void write_entropy_grid_csv(std::ostream& out, const EntropyProfile& profile) {
  out << "t,entropy\n";
  for (const auto& [t, h] : profile.grid) {
    out << format_number(t) << ',' << format_number(h) << '\n';
  }
}

namespace {

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  out.close();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

fs::path temp_sibling(const fs::path& target) {
  auto parent = target.parent_path();
  if (parent.empty()) parent = ".";
  return parent / ("." + target.filename().string() + ".tmp-" + std::to_string(::getpid()));
}

}  // namespace

void write_file_atomic(const fs::path& path, const std::string& content) {
  const auto tmp = temp_sibling(path);
  try {
    write_text(tmp, content);
    fs::rename(tmp, path);
  } catch (...) {
    std::error_code ec;
    fs::remove(tmp, ec);
    throw;
  }
}

void write_report_directory(const fs::path& dir, const AnalysisReport& report,
                            const AnalyzeOptions& options, const ordered_json& metadata) {
  const auto tmp = temp_sibling(dir);
  std::error_code ec;
  fs::remove_all(tmp, ec);
  try {
    fs::create_directories(tmp);
    write_text(tmp / "summary.json", summary_json(report, options).dump(2) + "\n");
    write_text(tmp / "metadata.json", metadata.dump(2) + "\n");
    auto emit = [&](const char* name, auto&& writer) {
      std::ostringstream out;
      writer(out);
      write_text(tmp / name, out.str());
    };
    emit("per_contributor.csv", [&](std::ostream& o) { write_comparison_csv(o, report.comparisons); });
    emit("brackets.csv", [&](std::ostream& o) { write_brackets_csv(o, report.brackets); });
    emit("profiles.csv", [&](std::ostream& o) { write_profiles_csv(o, report.profiles); });
    emit("curve.csv", [&](std::ostream& o) { write_curve_csv(o, report.curve); });
    if (!report.sweep.empty()) {
      emit("sweep.csv", [&](std::ostream& o) {
        o << "governance,pearson,mean_abs_difference\n";
        for (const auto& p : report.sweep) {
          o << format_number(p.governance) << ','
            << (p.pooled_pearson ? format_number(*p.pooled_pearson) : std::string{}) << ','
            << format_number(p.mean_abs_error) << '\n';
        }
      });
    }
    if (fs::exists(dir)) fs::remove_all(dir);
    fs::rename(tmp, dir);
  } catch (...) {
    fs::remove_all(tmp, ec);
    throw;
  }
}

}  // namespace coedit
