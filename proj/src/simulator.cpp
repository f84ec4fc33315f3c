#include "coedit/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string_view>
#include <set>
#include <unordered_map>

#include "coedit/error.hpp"
#include "coedit/random.hpp"

namespace coedit {

void PopulationConfig::validate() const {
  if (article_count < 1) throw ArgumentError("article_count must be >= 1");
  if (contributors_min < 2) throw ArgumentError("contributors_min must be >= 2");
  if (contributors_max < contributors_min) {
    throw ArgumentError("contributors_max must be >= contributors_min");
  }
  if (!(beta_min > 0.0) || !std::isfinite(beta_min)) throw ArgumentError("beta_min must be > 0");
  if (!(beta_mean > beta_min) || !std::isfinite(beta_mean)) {
    throw ArgumentError("beta_mean must exceed beta_min");
  }
  if (pool_size != 0 && pool_size < contributors_max) {
    throw ArgumentError("pool_size must be >= contributors_max");
  }
}

std::size_t PopulationConfig::effective_pool_size() const {
  return pool_size != 0 ? pool_size : 4 * contributors_max;
}

void SynthesisConfig::validate() const {
  if (!(effort_constant > 0.0) || !std::isfinite(effort_constant)) {
    throw ArgumentError("effort constant must be positive");
  }
  if (!(governance >= 0.0) || !std::isfinite(governance)) {
    throw ArgumentError("governance level must be non-negative");
  }
  if (rounds < 1) throw ArgumentError("rounds must be >= 1");
  if (!(noise >= 0.0) || !(noise < 1.0)) throw ArgumentError("noise must be in [0, 1)");
  if (sentences_per_article < 1) throw ArgumentError("sentences_per_article must be >= 1");
  if (max_revisions < std::max<std::size_t>(rounds, 2)) {
    throw ArgumentError("max_revisions must be >= max(rounds, 2)");
  }
  if (span_days < 1) throw ArgumentError("span_days must be >= 1");
  if (stagger_days < 0) throw ArgumentError("stagger_days must be >= 0");
  parse_timestamp(start);
}

Population sample_population(const PopulationConfig& cfg) {
  cfg.validate();
  const std::size_t pool_size = cfg.effective_pool_size();

  Population pop;
  pop.pool.reserve(pool_size);
  Rng pool_rng(derive_seed(cfg.seed, "pool"));
  char buf[32];
  for (std::size_t i = 0; i < pool_size; ++i) {
    std::snprintf(buf, sizeof buf, "u%06zu", i + 1);
    pop.pool.push_back({buf, cfg.beta_min + pool_rng.exponential(cfg.beta_mean - cfg.beta_min)});
  }

  std::vector<std::size_t> slots(pool_size);
  pop.articles.reserve(cfg.article_count);
  for (std::size_t a = 0; a < cfg.article_count; ++a) {
    std::snprintf(buf, sizeof buf, "a%05zu", a + 1);
    ArticleCast cast{buf, {}};
    Rng rng(derive_seed(cfg.seed, cast.article_id));
    const auto n = static_cast<std::size_t>(rng.uniform_int(cfg.contributors_min, cfg.contributors_max));
    std::iota(slots.begin(), slots.end(), std::size_t{0});
    for (std::size_t j = 0; j < n; ++j) {
      std::swap(slots[j], slots[static_cast<std::size_t>(rng.uniform_int(j, pool_size - 1))]);
    }
    std::sort(slots.begin(), slots.begin() + static_cast<std::ptrdiff_t>(n));
    for (std::size_t j = 0; j < n; ++j) cast.members.push_back(pop.pool[slots[j]]);
    pop.articles.push_back(std::move(cast));
  }
  return pop;
}

std::vector<std::size_t> apportion(const std::vector<double>& weights, std::size_t total) {
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ArgumentError("apportion: invalid weight");
    sum += w;
  }
  if (!(sum > 0.0)) throw ArgumentError("apportion: weights sum to zero");

  std::vector<std::size_t> out(weights.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double quota = weights[i] / sum * static_cast<double>(total);
    const double whole = std::floor(quota);
    out[i] = static_cast<std::size_t>(whole);
    assigned += out[i];
    remainders.emplace_back(quota - whole, i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& x, const auto& y) { return x.first > y.first; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) {
    out[remainders[k % remainders.size()].second] += 1;
  }
  return out;
}

namespace {

struct Contributor {
  std::string id;
  double beta = 0.0;
  std::uint64_t revisions = 0;  // Z
  std::uint64_t effort = 0;     // E
  std::uint64_t fixed = 0;      // F, minimum cost above one unit per revision
  std::uint64_t min_revisions = 0;
  std::uint64_t cap = 0;
  double quantized() const {
    return revisions == 0 ? beta : static_cast<double>(effort) / static_cast<double>(revisions);
  }
};

struct Slot {
  std::size_t who = 0;  // contributor index
  double noise_draw = 0.0;
  std::size_t sentences = 0;
  bool tail_extra = false;  // also adds a word to the ownerless tail
  std::size_t revisions = 0;
  std::uint64_t padding = 0;
  bool opens = false;  // makes the article's first revision
};

struct Work {
  std::size_t index = 0;
  std::string article_id;
  std::vector<Slot> slots;
  std::size_t width = 1;
  std::vector<double> equilibrium;
  std::vector<double> target;
  std::vector<std::size_t> schedule;  // slot per revision
};

std::size_t code_width(std::size_t count) {
  std::size_t width = 1;
  std::size_t capacity = 26;
  while (capacity < count) {
    capacity *= 26;
    ++width;
  }
  return width;
}

std::string code(std::size_t serial, std::size_t width) {
  std::string out(width, 'a');
  for (std::size_t k = width; k-- > 0;) {
    out[k] = static_cast<char>('a' + serial % 26);
    serial /= 26;
  }
  return out;
}

void plan_article(Work& work, const std::vector<Contributor>& people, const SynthesisConfig& cfg) {
  std::vector<ContributorProfile> players;
  players.reserve(work.slots.size());
  for (const auto& slot : work.slots) {
    players.push_back({people[slot.who].id, people[slot.who].quantized()});
  }
  const GameInstance game(players, cfg.effort_constant, cfg.governance);
  work.equilibrium = equilibrium_ownership(game);
  work.target = work.equilibrium;
  if (cfg.noise > 0.0) {
    for (std::size_t i = 0; i < work.target.size(); ++i) {
      work.target[i] *= 1.0 + cfg.noise * work.slots[i].noise_draw;
    }
    const double sum = std::accumulate(work.target.begin(), work.target.end(), 0.0);
    for (auto& c : work.target) c /= sum;
  }
  const auto counts = apportion(work.target, cfg.sentences_per_article);

  std::size_t guests = 0;
  std::size_t top = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    work.slots[i].sentences = counts[i];
    work.slots[i].tail_extra = false;
    if (counts[i] == 0) ++guests;
    if (counts[i] > counts[top]) top = i;
  }
  if (guests == 1) work.slots[top].tail_extra = true;
}

// Cost above one unit per revision, counting a separator for every inserted
// word. The first word a contributor writes carries a filler region of at
// least one character; later revisions rewrite a prefix of that region.
std::uint64_t fixed_cost(const Slot& slot, std::size_t width) {
  if (slot.sentences == 0) return width + 1;
  std::uint64_t f = slot.sentences * (width + 2);
  if (slot.tail_extra) f += width;
  return f;
}

std::size_t later_revisions(const Slot& slot) {
  return slot.revisions - 1 - (slot.tail_extra ? 1 : 0);
}

char fresh_letter(std::string_view region) {
  for (char c = 'a'; c <= 'z'; ++c) {
    if (region.find(c) == std::string_view::npos) return c;
  }
  throw std::logic_error("filler region uses every letter");
}

std::uint64_t min_revisions(const Slot& slot, const SynthesisConfig& cfg) {
  return std::max<std::uint64_t>(cfg.rounds, slot.tail_extra ? 2 : 1);
}

}  // namespace

SynthesisResult synthesize_corpus(const std::vector<ArticleCast>& articles,
                                  const SynthesisConfig& cfg) {
  cfg.validate();
  if (articles.empty()) throw ArgumentError("no articles to synthesize");

  std::vector<Contributor> people;
  std::unordered_map<std::string, std::size_t> lookup;
  std::vector<Work> works;
  works.reserve(articles.size());
  std::set<std::string> article_ids;
  for (std::size_t a = 0; a < articles.size(); ++a) {
    const auto& cast = articles[a];
    if (!article_ids.insert(cast.article_id).second) {
      throw ArgumentError("duplicate article id " + cast.article_id);
    }
    if (cast.members.size() < 2) {
      throw ArgumentError("article " + cast.article_id + " needs at least 2 contributors");
    }
    Work work;
    work.index = a;
    work.article_id = cast.article_id;
    Rng rng(derive_seed(cfg.seed, "noise:" + cast.article_id));
    std::set<std::string> seen;
    for (const auto& member : cast.members) {
      if (!seen.insert(member.contributor_id).second) {
        throw ArgumentError("article " + cast.article_id + " lists contributor " +
                            member.contributor_id + " twice");
      }
      if (!(member.beta > 0.0) || !std::isfinite(member.beta)) {
        throw ArgumentError("contributor " + member.contributor_id + " has non-positive beta");
      }
      auto [it, fresh] = lookup.emplace(member.contributor_id, people.size());
      if (fresh) {
        people.push_back({member.contributor_id, member.beta});
      } else if (people[it->second].beta != member.beta) {
        throw ArgumentError("contributor " + member.contributor_id +
                            " has different betas across articles");
      }
      work.slots.push_back({it->second, rng.uniform(-1.0, 1.0)});
    }
    work.width = code_width(cfg.sentences_per_article + cast.members.size() + 1);
    works.push_back(std::move(work));
  }
  for (const auto& work : works) {
    for (const auto& slot : work.slots) people[slot.who].cap += cfg.max_revisions;
  }

  // Quantize each beta to E/Z with enough budget for the planned content.
  // Z and E only grow, so the loop terminates.
  constexpr int kMaxPasses = 10000;
  bool settled = false;
  for (int pass = 0; pass < kMaxPasses && !settled; ++pass) {
    for (auto& p : people) {
      p.fixed = 0;
      p.min_revisions = 0;
    }
    for (auto& work : works) {
      plan_article(work, people, cfg);
      for (const auto& slot : work.slots) {
        people[slot.who].fixed += fixed_cost(slot, work.width);
        people[slot.who].min_revisions += min_revisions(slot, cfg);
      }
    }
    settled = true;
    for (auto& p : people) {
      if (p.revisions >= p.min_revisions && p.effort >= p.revisions + p.fixed) continue;
      settled = false;
      double needed = static_cast<double>(p.cap);
      if (p.beta > 1.0) needed = std::ceil(static_cast<double>(p.fixed) / (p.beta - 1.0));
      std::uint64_t z = std::max(p.revisions, p.min_revisions);
      if (needed > static_cast<double>(z)) {
        z = needed >= static_cast<double>(p.cap) ? p.cap : static_cast<std::uint64_t>(needed);
      }
      z = std::max(z, p.min_revisions);
      p.revisions = z;
      const auto scaled = static_cast<std::uint64_t>(std::llround(p.beta * static_cast<double>(z)));
      p.effort = std::max({p.effort, scaled, z + p.fixed});
    }
  }
  if (!settled) throw std::runtime_error("synthesis budget did not settle");

  SynthesisResult result;

  // Spread each contributor's revisions over their articles, then padding.
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> places(people.size());
  for (std::size_t a = 0; a < works.size(); ++a) {
    for (std::size_t i = 0; i < works[a].slots.size(); ++i) {
      auto& slot = works[a].slots[i];
      slot.revisions = static_cast<std::size_t>(min_revisions(slot, cfg));
      places[slot.who].emplace_back(a, i);
    }
  }
  for (std::size_t p = 0; p < people.size(); ++p) {
    std::uint64_t extra = people[p].revisions - people[p].min_revisions;
    while (extra > 0) {
      bool placed = false;
      for (auto [a, i] : places[p]) {
        auto& slot = works[a].slots[i];
        if (extra == 0) break;
        if (slot.revisions < cfg.max_revisions) {
          ++slot.revisions;
          --extra;
          placed = true;
        }
      }
      if (!placed) throw std::logic_error("revision cap exceeded");
    }
  }

  const std::int64_t span_seconds = std::int64_t{cfg.span_days} * 86400;
  std::vector<std::uint64_t> base(people.size(), 0);
  for (auto& work : works) {
    Rng rng(derive_seed(cfg.seed, "schedule:" + work.article_id));
    std::size_t longest = 0;
    for (const auto& slot : work.slots) longest = std::max(longest, slot.revisions);
    std::vector<std::size_t> round;
    for (std::size_t r = 0; r < longest; ++r) {
      round.clear();
      for (std::size_t i = 0; i < work.slots.size(); ++i) {
        if (work.slots[i].revisions > r) round.push_back(i);
      }
      rng.shuffle(round);
      work.schedule.insert(work.schedule.end(), round.begin(), round.end());
    }
    if (static_cast<std::int64_t>(work.schedule.size()) > span_seconds) {
      throw ArgumentError("article " + work.article_id + " has more revisions than seconds in its span");
    }
    work.slots[work.schedule.front()].opens = true;
    for (const auto& slot : work.slots) {
      std::uint64_t cost = fixed_cost(slot, work.width) + slot.revisions;
      if (slot.opens) cost -= 1;
      base[slot.who] += cost;
    }
  }

  std::vector<std::vector<std::uint64_t>> shares(people.size());
  for (std::size_t p = 0; p < people.size(); ++p) {
    if (people[p].effort < base[p]) throw std::logic_error("synthesis budget below content cost");
    std::vector<double> weights;
    for (auto [a, i] : places[p]) weights.push_back(static_cast<double>(works[a].slots[i].revisions));
    const auto split = apportion(weights, people[p].effort - base[p]);
    for (std::size_t k = 0; k < places[p].size(); ++k) {
      works[places[p][k].first].slots[places[p][k].second].padding = split[k];
    }
  }

  const Timestamp start = parse_timestamp(cfg.start);
  std::int64_t next_revision_id = 1;
  for (auto& work : works) {
    Article article{work.article_id, {}};
    article.revisions.reserve(work.schedule.size());
    const Timestamp inception =
        start + std::chrono::seconds(std::int64_t{cfg.stagger_days} * 86400 *
                                     static_cast<std::int64_t>(work.index));

    std::vector<std::string> words;
    std::size_t tail_begin = 0;
    std::size_t serial = 0;
    std::vector<std::size_t> done(work.slots.size(), 0);
    std::vector<std::size_t> anchor(work.slots.size(), 0);  // own token or tail offset
    std::string text;
    const std::size_t total = work.schedule.size();

    for (std::size_t r = 0; r < total; ++r) {
      const std::size_t i = work.schedule[r];
      auto& slot = work.slots[i];
      const std::size_t k = done[i]++;
      const std::size_t later = later_revisions(slot);
      const std::uint64_t budget = slot.padding + 1 + later;
      const std::uint64_t filler = (budget + later) / (later + 1);

      std::uint64_t cost = 0;
      if (k == 0 || (k == 1 && slot.tail_extra)) {
        const bool owner_first = k == 0 && slot.sentences > 0;
        std::vector<std::string> block;
        if (owner_first) {
          for (std::size_t s = 0; s < slot.sentences; ++s) {
            block.push_back(code(serial++, work.width) + std::string(s == 0 ? filler : 0, 'x') + ".");
          }
        } else {
          block.push_back(code(serial++, work.width) + std::string(k == 0 ? filler : 0, 'x'));
        }
        const std::size_t before = text.size();
        if (owner_first) {
          anchor[i] = tail_begin;
          words.insert(words.begin() + static_cast<std::ptrdiff_t>(tail_begin), block.begin(),
                       block.end());
          tail_begin += block.size();
        } else {
          if (k == 0) anchor[i] = words.size() - tail_begin;
          words.push_back(block.front());
        }
        text.clear();
        for (std::size_t w = 0; w < words.size(); ++w) {
          if (w) text += ' ';
          text += words[w];
        }
        cost = text.size() - before;
      } else {
        // Rewrite a prefix of the filler with a letter it does not contain;
        // the edit distance is exactly the prefix length.
        const std::size_t j = k - 1 - (slot.tail_extra ? 1 : 0);
        const std::uint64_t spread = budget - filler;
        cost = spread / later + (j < spread % later ? 1 : 0);
        const std::size_t index = slot.sentences > 0 ? anchor[i] : tail_begin + anchor[i];
        std::size_t offset = 0;
        for (std::size_t w = 0; w < index; ++w) offset += words[w].size() + 1;
        auto& token = words[index];
        const auto region = std::string_view(token).substr(work.width, cost);
        const char letter = fresh_letter(region);
        std::fill_n(token.begin() + static_cast<std::ptrdiff_t>(work.width), cost, letter);
        std::fill_n(text.begin() + static_cast<std::ptrdiff_t>(offset + work.width), cost, letter);
      }

      const auto& who = people[slot.who];
      auto& effort = result.effort[who.id];
      effort.contributor_id = who.id;
      effort.total_edit_size += cost;
      effort.edit_count += 1;

      Revision rev;
      rev.article_id = work.article_id;
      rev.revision_id = next_revision_id++;
      rev.timestamp = inception + std::chrono::seconds(span_seconds * static_cast<std::int64_t>(r) /
                                                       static_cast<std::int64_t>(total));
      rev.contributor_id = who.id;
      rev.text = text;
      article.revisions.push_back(std::move(rev));
    }
    result.corpus.articles.push_back(std::move(article));

    ArticlePlan plan;
    plan.article_id = work.article_id;
    plan.equilibrium = work.equilibrium;
    plan.target = work.target;
    std::size_t owners = 0;
    for (const auto& slot : work.slots) {
      plan.contributors.push_back(people[slot.who].id);
      plan.sentences.push_back(slot.sentences);
      if (slot.sentences > 0) ++owners;
    }
    if (owners == 1) {
      result.warnings.push_back("article " + work.article_id +
                                ": single active contributor, emitted as a single-owner article");
    }
    result.plans.push_back(std::move(plan));
  }

  std::size_t raised = 0;
  for (const auto& p : people) {
    auto& effort = result.effort.at(p.id);
    if (effort.total_edit_size != p.effort || effort.edit_count != p.revisions) {
      throw std::logic_error("emitted effort for " + p.id + " differs from its budget");
    }
    effort.beta = static_cast<double>(effort.total_edit_size) / static_cast<double>(effort.edit_count);
    if (effort.beta > p.beta * 1.05) ++raised;
  }
  if (raised > 0) {
    result.warnings.push_back(std::to_string(raised) +
                              " contributor(s) needed an edit size more than 5% above their "
                              "profile to fit the revision cap");
  }
  return result;
}

}  // namespace coedit
