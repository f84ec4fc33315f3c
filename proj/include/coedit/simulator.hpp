#pragma once

// Synthetic populations and revision histories built by running the
// measurement pipeline backwards: solve each article's game, then emit edits
// whose ledger and effort measurements reproduce the equilibrium.

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "coedit/corpus.hpp"
#include "coedit/model.hpp"

namespace coedit {

struct PopulationConfig {
  std::size_t article_count = 50;
  std::size_t contributors_min = 2;  // uniform integer range per article
  std::size_t contributors_max = 249;
  double beta_mean = 8.4;
  double beta_min = 1.0;  // betas are beta_min + Exp(beta_mean - beta_min)
  std::size_t pool_size = 0;  // shared contributors; 0 picks 4 * contributors_max
  std::uint64_t seed = 0;

  void validate() const;
  std::size_t effective_pool_size() const;
};

struct ArticleCast {
  std::string article_id;
  std::vector<ContributorProfile> members;
};

struct Population {
  std::vector<ContributorProfile> pool;
  std::vector<ArticleCast> articles;
};

Population sample_population(const PopulationConfig& cfg);

struct SynthesisConfig {
  double effort_constant = GameInstance::kDefaultEffortConstant;
  double governance = 0.0;
  std::size_t rounds = 1;  // minimum revisions per contributor per article
  double noise = 0.0;      // relative perturbation of target ownership, in [0, 1)
  std::uint64_t seed = 0;
  std::size_t sentences_per_article = 100;
  std::size_t max_revisions = 100;  // per contributor per article
  int span_days = 1096;
  std::string start = "2004-01-01T00:00:00Z";
  int stagger_days = 7;  // offset between consecutive article inceptions

  void validate() const;
};

struct ArticlePlan {
  std::string article_id;
  std::vector<std::string> contributors;
  std::vector<double> equilibrium;       // c* at the quantized betas
  std::vector<double> target;            // c* after noise
  std::vector<std::size_t> sentences;    // planned sentence counts
};

struct SynthesisResult {
  RevisionCorpus corpus;
  /// Effort actually emitted per contributor; equals what contributor_profiles
  /// measures on `corpus`. Games are solved with these values.
  std::map<std::string, EffortProfile> effort;
  std::vector<ArticlePlan> plans;
  std::vector<std::string> warnings;
};

SynthesisResult synthesize_corpus(const std::vector<ArticleCast>& articles,
                                  const SynthesisConfig& cfg);

/// Largest-remainder apportionment of `total` units to the given weights.
std::vector<std::size_t> apportion(const std::vector<double>& weights, std::size_t total);

}  // namespace coedit
