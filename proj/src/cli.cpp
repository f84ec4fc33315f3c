#include "coedit/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "coedit/analysis.hpp"
#include "coedit/error.hpp"
#include "coedit/governance.hpp"
#include "coedit/random.hpp"
#include "coedit/report.hpp"
#include "coedit/simulator.hpp"
#include "coedit/solvers.hpp"

namespace coedit::cli {

namespace {

using nlohmann::ordered_json;

/// Thrown for input problems that should exit with the usage code.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GameArgs {
  std::vector<double> betas;
  std::string profile_path;
  double effort_constant = 1.0;
  double governance = 0.0;
  std::string mode = "iterative-exclusion";
};

struct SolveArgs {
  GameArgs game;
  bool check = false;
  bool json = false;
};

struct StackelbergArgs {
  GameArgs game;
  double z_star = 1.0;
  double tolerance = 0.0;
  std::size_t grid = 65;
  bool raw = false;
  std::string format = "json";
  std::string out_path;
};

struct AnalyzeArgs {
  std::string corpus;
  std::string out_dir;
  double effort_constant = 1.0;
  double governance = 0.0;
  std::string mode = "iterative-exclusion";
  std::vector<std::string> exclude;
  std::string exclude_file;
  std::string quality;
  std::size_t train_count = 0;
  double train_fraction = 0.35;
  std::size_t repeats = 100;
  std::uint64_t seed = 0;
  std::vector<double> sweep;
};

struct SimulateArgs {
  PopulationConfig population;
  SynthesisConfig synthesis;
  std::string out_path;
  std::uint64_t seed = 0;
};

std::uint64_t fresh_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

std::string now_utc() {
  return format_timestamp(std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()));
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

std::vector<ContributorProfile> load_players(const GameArgs& args) {
  if (!args.betas.empty() && !args.profile_path.empty()) {
    throw UsageError("give either --beta or --profiles, not both");
  }
  if (!args.profile_path.empty()) {
    auto in = open_input(args.profile_path);
    return read_profiles_csv(in);
  }
  if (args.betas.empty()) throw UsageError("no contributors: pass --beta or --profiles");
  std::vector<ContributorProfile> players;
  for (std::size_t i = 0; i < args.betas.size(); ++i) {
    players.push_back({"c" + std::to_string(i + 1), args.betas[i]});
  }
  return players;
}

GameInstance make_game(const GameArgs& args) {
  auto players = load_players(args);
  try {
    return GameInstance(std::move(players), args.effort_constant, args.governance);
  } catch (const ArgumentError& e) {
    throw UsageError(e.what());
  }
}

void add_game_options(CLI::App* cmd, GameArgs& args) {
  cmd->add_option("--beta", args.betas, "Comma-separated average edit sizes")->delimiter(',');
  cmd->add_option("--profiles", args.profile_path, "CSV with header contributor_id,beta");
  cmd->add_option("--L", args.effort_constant, "Effort constant")->check(CLI::PositiveNumber);
  cmd->add_option("--t", args.governance, "Governance level")->check(CLI::NonNegativeNumber);
  cmd->add_option("--mode", args.mode, "iterative-exclusion or clamp");
}

int cmd_solve(const SolveArgs& args, std::ostream& out) {
  const auto game = make_game(args.game);
  FeasibilityMode mode;
  try {
    mode = parse_feasibility_mode(args.game.mode);
  } catch (const ArgumentError& e) {
    throw UsageError(e.what());
  }
  const auto sol = closed_form_equilibrium(game, mode);
  const auto& players = game.profiles();

  ordered_json check;
  if (args.check) {
    auto discrepancy = [](const Allocation& a, const Allocation& b) {
      double d = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
      return d;
    };
    const auto exact = closed_form_equilibrium(game, FeasibilityMode::iterative_exclusion);
    const auto sub = game.subgame(exact.active_set);
    const auto spectral = spectral_equilibrium(sub);
    Allocation embedded(game.size(), 0.0);
    for (std::size_t k = 0; k < exact.active_set.size(); ++k) {
      embedded[exact.active_set[k]] = spectral.contributions[k];
    }
    const auto br = best_response_equilibrium(game);
    check = {{"closed_form_vs_spectral", discrepancy(exact.contributions, embedded)},
             {"closed_form_vs_best_response", discrepancy(exact.contributions, br.contributions)},
             {"spectral_vs_best_response", discrepancy(embedded, br.contributions)}};
  }

  if (args.json) {
    ordered_json j;
    j["effort_constant"] = game.effort_constant();
    j["governance"] = game.governance();
    j["mode"] = std::string(to_string(mode));
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < players.size(); ++i) {
      rows.push_back({{"contributor_id", players[i].contributor_id},
                      {"beta", players[i].beta},
                      {"contribution", sol.contributions[i]},
                      {"ownership", sol.ownership[i]},
                      {"feasible", static_cast<bool>(sol.feasible[i])}});
    }
    j["contributors"] = std::move(rows);
    ordered_json active = ordered_json::array();
    for (auto i : sol.active_set) active.push_back(players[i].contributor_id);
    j["active_set"] = std::move(active);
    if (args.check) j["check"] = check;
    out << j.dump(2) << '\n';
    return kOk;
  }

  out << "mode " << to_string(mode) << ", L = " << game.effort_constant()
      << ", t = " << game.governance() << '\n';
  out << std::left << std::setw(16) << "contributor" << std::right << std::setw(12) << "beta"
      << std::setw(14) << "x*" << std::setw(12) << "c*" << "  feasible\n";
  out << std::fixed << std::setprecision(6);
  for (std::size_t i = 0; i < players.size(); ++i) {
    out << std::left << std::setw(16) << players[i].contributor_id << std::right << std::setw(12)
        << players[i].beta << std::setw(14) << sol.contributions[i] << std::setw(12)
        << sol.ownership[i] << "  " << (sol.feasible[i] ? "yes" : "no") << '\n';
  }
  out << "active set:";
  for (auto i : sol.active_set) out << ' ' << players[i].contributor_id;
  out << '\n';
  if (args.check) {
    out << std::scientific << std::setprecision(3);
    out << "check: max |dx| closed-form/spectral " << check["closed_form_vs_spectral"].get<double>()
        << ", closed-form/best-response " << check["closed_form_vs_best_response"].get<double>()
        << ", spectral/best-response " << check["spectral_vs_best_response"].get<double>() << '\n';
  }
  return kOk;
}

int cmd_stackelberg(const StackelbergArgs& args, std::ostream& out) {
  const auto players = load_players(args.game);
  GovernanceSearch search;
  search.z_star = args.z_star;
  search.search_tolerance = args.tolerance;
  search.grid_points = args.grid;
  search.normalization = !args.raw;
  EntropyProfile profile;
  try {
    search.validate();
    GameInstance(players, args.game.effort_constant, 0.0);
    profile = optimal_governance(players, args.game.effort_constant, search);
  } catch (const ArgumentError& e) {
    throw UsageError(e.what());
  }

  std::ostringstream body;
  if (args.format == "csv") {
    write_entropy_grid_csv(body, profile);
  } else {
    const GameInstance game(players, args.game.effort_constant, profile.argmax_t);
    const auto c = equilibrium_ownership(game);
    ordered_json j;
    j["effort_constant"] = args.game.effort_constant;
    j["z_star"] = search.z_star;
    j["tolerance"] = search.effective_tolerance();
    j["normalized"] = search.normalization;
    j["argmax_t"] = profile.argmax_t;
    j["max_entropy"] = profile.max_entropy;
    j["constrained"] = profile.constrained;
    j["grid_non_decreasing"] = profile.grid_non_decreasing;
    ordered_json own = ordered_json::array();
    for (std::size_t i = 0; i < players.size(); ++i) {
      own.push_back({{"contributor_id", players[i].contributor_id}, {"ownership", c[i]}});
    }
    j["ownership_at_argmax"] = std::move(own);
    ordered_json grid = ordered_json::array();
    for (const auto& [t, h] : profile.grid) grid.push_back({t, h});
    j["grid"] = std::move(grid);
    body << j.dump(2) << '\n';
  }

  if (args.out_path.empty()) {
    out << body.str();
  } else {
    write_file_atomic(args.out_path, body.str());
  }
  return kOk;
}

int cmd_analyze(const AnalyzeArgs& args, bool seed_given, std::ostream& out, std::ostream& err) {
  AnalyzeOptions options;
  options.params.effort_constant = args.effort_constant;
  options.params.governance = args.governance;
  try {
    options.params.mode = parse_feasibility_mode(args.mode);
  } catch (const ArgumentError& e) {
    throw UsageError(e.what());
  }
  for (const auto& id : args.exclude) options.track.excluded.insert(id);
  if (!args.exclude_file.empty()) {
    auto in = open_input(args.exclude_file);
    std::string line;
    while (std::getline(in, line)) {
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
      if (!line.empty() && line.front() != '#') options.track.excluded.insert(line);
    }
  }
  if (!args.quality.empty()) {
    auto in = open_input(args.quality);
    options.quality = read_quality_scores(in);
  }
  options.train_count = args.train_count;
  options.train_fraction = args.train_fraction;
  options.repeats = args.repeats;
  options.seed = seed_given ? args.seed : fresh_seed();
  options.sweep = args.sweep;

  auto in = open_input(args.corpus);
  const auto corpus = load_corpus(in);
  const auto report = run_analysis(corpus, options);

  ordered_json meta;
  meta["tool"] = "coedit";
  meta["version"] = kVersion;
  meta["command"] = "analyze";
  meta["created_at"] = now_utc();
  meta["corpus"] = args.corpus;
  meta["articles"] = corpus.articles.size();
  meta["revisions"] = corpus.revision_count();
  meta["seed"] = options.seed;
  meta["seed_generated"] = !seed_given;
  meta["config"] = {{"effort_constant", args.effort_constant},
                    {"governance", args.governance},
                    {"mode", std::string(to_string(options.params.mode))},
                    {"excluded", options.track.excluded},
                    {"quality", args.quality},
                    {"train_count", args.train_count},
                    {"train_fraction", args.train_fraction},
                    {"repeats", args.repeats},
                    {"sweep", args.sweep}};
  write_report_directory(args.out_dir, report, options, meta);

  for (const auto& notice : report.notices) err << "notice: " << notice << '\n';
  out << "compared " << report.comparisons.articles.size() << " of " << corpus.articles.size()
      << " articles (" << report.correlation.pairs << " contributor pairs)\n";
  if (report.correlation.pooled) out << "pooled pearson " << *report.correlation.pooled << '\n';
  if (report.quality_pearson) out << "entropy-quality pearson " << *report.quality_pearson << '\n';
  out << "wrote " << args.out_dir << '\n';
  return kOk;
}

int cmd_simulate(SimulateArgs args, bool seed_given, std::ostream& out, std::ostream& err) {
  const std::uint64_t seed = seed_given ? args.seed : fresh_seed();
  args.population.seed = seed;
  args.synthesis.seed = derive_seed(seed, "synthesis");
  Population population;
  SynthesisResult result;
  try {
    args.population.validate();
    args.synthesis.validate();
  } catch (const ArgumentError& e) {
    throw UsageError(e.what());
  }
  population = sample_population(args.population);
  result = synthesize_corpus(population.articles, args.synthesis);

  std::ostringstream body;
  write_corpus(body, result.corpus);
  write_file_atomic(args.out_path, body.str());

  const auto& p = args.population;
  const auto& s = args.synthesis;
  ordered_json meta;
  meta["tool"] = "coedit";
  meta["version"] = kVersion;
  meta["command"] = "simulate";
  meta["created_at"] = now_utc();
  meta["seed"] = seed;
  meta["seed_generated"] = !seed_given;
  meta["population"] = {{"article_count", p.article_count},
                        {"contributors_min", p.contributors_min},
                        {"contributors_max", p.contributors_max},
                        {"beta_mean", p.beta_mean},
                        {"beta_min", p.beta_min},
                        {"pool_size", p.effective_pool_size()},
                        {"seed", p.seed}};
  meta["synthesis"] = {{"effort_constant", s.effort_constant},
                       {"governance", s.governance},
                       {"rounds", s.rounds},
                       {"noise", s.noise},
                       {"sentences_per_article", s.sentences_per_article},
                       {"max_revisions", s.max_revisions},
                       {"span_days", s.span_days},
                       {"start", s.start},
                       {"stagger_days", s.stagger_days},
                       {"seed", s.seed}};
  meta["articles"] = result.corpus.articles.size();
  meta["revisions"] = result.corpus.revision_count();
  meta["warnings"] = result.warnings;
  write_file_atomic(args.out_path + ".meta.json", meta.dump(2) + "\n");

  for (const auto& w : result.warnings) err << "warning: " << w << '\n';
  out << "wrote " << result.corpus.revision_count() << " revisions in "
      << result.corpus.articles.size() << " articles to " << args.out_path << '\n';
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Contributor game solver and revision-history analysis"};
  app.name("coedit");
  app.set_config("--config", "", "Read options from a TOML or INI file");
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Nash equilibrium of one contributor game");
  add_game_options(solve_cmd, solve.game);
  solve_cmd->add_flag("--check", solve.check, "Cross-check closed form, spectral and best response");
  solve_cmd->add_flag("--json", solve.json, "Emit JSON");

  StackelbergArgs stack;
  auto* stack_cmd = app.add_subcommand("stackelberg", "Entropy-maximizing governance level");
  add_game_options(stack_cmd, stack.game);
  stack_cmd->add_option("--z-star", stack.z_star, "Upper bound on t")->required()->check(CLI::PositiveNumber);
  stack_cmd->add_option("--tolerance", stack.tolerance, "Search tolerance (default 1e-6 z*)");
  stack_cmd->add_option("--grid", stack.grid, "Reported grid points")->check(CLI::Range(2, 100000));
  stack_cmd->add_flag("--raw", stack.raw, "Unnormalized entropy");
  stack_cmd->add_option("--format", stack.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  stack_cmd->add_option("--out", stack.out_path, "Write to a file instead of stdout");

  AnalyzeArgs analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "Compare predictions with a revision corpus");
  analyze_cmd->add_option("corpus", analyze.corpus, "Corpus JSONL file")->required();
  analyze_cmd->add_option("--out", analyze.out_dir, "Output directory")->required();
  analyze_cmd->add_option("--L", analyze.effort_constant, "Effort constant")->check(CLI::PositiveNumber);
  analyze_cmd->add_option("--t", analyze.governance, "Governance level")->check(CLI::NonNegativeNumber);
  analyze_cmd->add_option("--mode", analyze.mode, "iterative-exclusion or clamp");
  analyze_cmd->add_option("--exclude", analyze.exclude, "Contributor ids to treat as bots")->delimiter(',');
  analyze_cmd->add_option("--exclude-file", analyze.exclude_file, "File with one excluded id per line");
  analyze_cmd->add_option("--quality", analyze.quality, "CSV with header article_id,score");
  analyze_cmd->add_option("--train-count", analyze.train_count, "Training articles per split");
  analyze_cmd->add_option("--train-fraction", analyze.train_fraction,
                          "Training share when --train-count is not given")
      ->check(CLI::Range(0.0, 1.0));
  analyze_cmd->add_option("--repeats", analyze.repeats, "Train/test repetitions");
  auto* analyze_seed = analyze_cmd->add_option("--seed", analyze.seed, "Split seed");
  analyze_cmd->add_option("--sweep", analyze.sweep, "Governance levels for the sensitivity sweep")
      ->delimiter(',');

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic revision corpus");
  sim_cmd->add_option("--out", sim.out_path, "Corpus output path")->required();
  sim_cmd->add_option("--articles", sim.population.article_count, "Number of articles")
      ->check(CLI::PositiveNumber);
  sim_cmd->add_option("--contributors-min", sim.population.contributors_min);
  sim_cmd->add_option("--contributors-max", sim.population.contributors_max);
  sim_cmd->add_option("--beta-mean", sim.population.beta_mean);
  sim_cmd->add_option("--beta-min", sim.population.beta_min);
  sim_cmd->add_option("--pool-size", sim.population.pool_size, "Shared contributor pool (0 = auto)");
  sim_cmd->add_option("--L", sim.synthesis.effort_constant)->check(CLI::PositiveNumber);
  sim_cmd->add_option("--t", sim.synthesis.governance)->check(CLI::NonNegativeNumber);
  sim_cmd->add_option("--rounds", sim.synthesis.rounds);
  sim_cmd->add_option("--noise", sim.synthesis.noise);
  sim_cmd->add_option("--sentences", sim.synthesis.sentences_per_article);
  sim_cmd->add_option("--max-revisions", sim.synthesis.max_revisions);
  sim_cmd->add_option("--span-days", sim.synthesis.span_days);
  sim_cmd->add_option("--start", sim.synthesis.start, "First inception, YYYY-MM-DDTHH:MM:SSZ");
  sim_cmd->add_option("--stagger-days", sim.synthesis.stagger_days);
  auto* sim_seed = sim_cmd->add_option("--seed", sim.seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*solve_cmd) return cmd_solve(solve, out);
    if (*stack_cmd) return cmd_stackelberg(stack, out);
    if (*analyze_cmd) return cmd_analyze(analyze, analyze_seed->count() > 0, out, err);
    if (*sim_cmd) return cmd_simulate(sim, sim_seed->count() > 0, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kUsage;
}

}  // namespace coedit::cli
