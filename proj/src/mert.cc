#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "lyricbench/error.h"
#include "lyricbench/rng.h"
#include "lyricbench/smt.h"

namespace lyricbench::smt {

namespace {

constexpr int kBleuOrder = 4;
constexpr double kBleuEpsilon = metrics::MetricConfig{}.bleu_epsilon;
constexpr double kInf = std::numeric_limits<double>::infinity();

void subtract(metrics::BleuStats& a, const metrics::BleuStats& b) {
  for (std::size_t n = 0; n < a.matches.size(); ++n) {
    a.matches[n] -= b.matches[n];
    a.totals[n] -= b.totals[n];
  }
  a.candidate_length -= b.candidate_length;
  a.reference_length -= b.reference_length;
}

bool all_zero(const FeatureWeights& w) {
  return std::all_of(w.w.begin(), w.w.end(), [](double v) { return v == 0.0; });
}

}  // namespace

std::size_t pool_argmax(const std::vector<NBestEntry>& entries, const FeatureWeights& weights) {
  if (entries.empty()) throw InvalidArgument("pool_argmax: empty candidate list");
  std::size_t best = 0;
  double best_score = weights.dot(entries[0].features);
  for (std::size_t i = 1; i < entries.size(); ++i) {
    const double s = weights.dot(entries[i].features);
    if (s > best_score) {
      best = i;
      best_score = s;
    }
  }
  return best;
}

double pool_bleu(const NBestPool& pool, const FeatureWeights& weights) {
  metrics::BleuStats total(kBleuOrder);
  for (const auto& entries : pool) {
    if (entries.empty()) continue;
    total += entries[pool_argmax(entries, weights)].stats;
  }
  return metrics::bleu_from_stats(total, kBleuEpsilon);
}

LineSearchResult line_search(const NBestPool& pool, const FeatureWeights& weights, int feature) {
  if (feature < 0 || feature >= kNumFeatures) throw InvalidArgument("line_search: bad feature index");
  struct Line {
    double slope, intercept;
    std::size_t index;
  };
  struct Event {
    double x;
    std::size_t sentence, from, to;
  };
  metrics::BleuStats stats(kBleuOrder);
  std::vector<Event> events;
  for (std::size_t s = 0; s < pool.size(); ++s) {
    const auto& entries = pool[s];
    if (entries.empty()) continue;
    std::vector<Line> lines;
    lines.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
      double b = 0.0;
      for (int k = 0; k < kNumFeatures; ++k) {
        if (k != feature) b += weights.w[k] * entries[i].features[k];
      }
      lines.push_back({entries[i].features[feature], b, i});
    }
    std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) {
      if (a.slope != b.slope) return a.slope < b.slope;
      if (a.intercept != b.intercept) return a.intercept > b.intercept;
      return a.index < b.index;
    });
    // Upper envelope as (line, x where it starts to dominate).
    std::vector<std::pair<Line, double>> env;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (i > 0 && lines[i].slope == lines[i - 1].slope) continue;
      const Line& l = lines[i];
      double x = -kInf;
      while (!env.empty()) {
        const Line& top = env.back().first;
        x = (top.intercept - l.intercept) / (l.slope - top.slope);
        if (x <= env.back().second) {
          env.pop_back();
          x = -kInf;
        } else {
          break;
        }
      }
      env.emplace_back(l, x);
    }
    stats += entries[env.front().first.index].stats;
    for (std::size_t j = 1; j < env.size(); ++j) {
      events.push_back({env[j].second, s, env[j - 1].first.index, env[j].first.index});
    }
  }
  std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.x < b.x; });

  const double current = weights.w[feature];
  struct Interval {
    double lo, hi, bleu;
  };
  std::vector<Interval> intervals;
  double lo = -kInf;
  for (std::size_t e = 0; e < events.size();) {
    const double x = events[e].x;
    intervals.push_back({lo, x, metrics::bleu_from_stats(stats, kBleuEpsilon)});
    for (; e < events.size() && events[e].x == x; ++e) {
      subtract(stats, pool[events[e].sentence][events[e].from].stats);
      stats += pool[events[e].sentence][events[e].to].stats;
    }
    lo = x;
  }
  intervals.push_back({lo, kInf, metrics::bleu_from_stats(stats, kBleuEpsilon)});

  // Prefer keeping the current value; a value sitting on a breakpoint is not
  // inside either neighbour.
  auto inside = [&](const Interval& iv) { return iv.lo < current && current < iv.hi; };
  auto distance = [&](const Interval& iv) {
    if (current <= iv.lo) return iv.lo - current;
    if (current >= iv.hi) return current - iv.hi;
    return 0.0;
  };
  const Interval* best = &intervals.front();
  for (const auto& iv : intervals) {
    if (iv.bleu != best->bleu) {
      if (iv.bleu > best->bleu) best = &iv;
    } else if (inside(iv) != inside(*best)) {
      if (inside(iv)) best = &iv;
    } else if (distance(iv) < distance(*best)) {
      best = &iv;
    }
  }
  double value = current;
  if (!inside(*best)) {
    if (std::isinf(best->lo)) {
      value = best->hi - 1.0;
    } else if (std::isinf(best->hi)) {
      value = best->lo + 1.0;
    } else {
      value = 0.5 * (best->lo + best->hi);
    }
  }
  LineSearchResult result{weights, 0.0};
  result.weights.w[feature] = value;
  result.bleu = pool_bleu(pool, result.weights);
  return result;
}

PoolOptimization optimize_on_pool(const NBestPool& pool, const FeatureWeights& start, int restarts,
                                  std::uint64_t seed) {
  if (restarts < 1) throw InvalidArgument("restarts must be >= 1");
  start.validate();
  Rng rng(seed);
  PoolOptimization best;
  constexpr int kMaxRounds = 100;
  for (int r = 0; r < restarts; ++r) {
    FeatureWeights w = start;
    if (r > 0) {
      for (double& v : w.w) v = rng.uniform(-1.0, 1.0);
      if (all_zero(w)) w = start;
    }
    double bleu = pool_bleu(pool, w);
    std::vector<double> accepted{bleu};
    for (int round = 0; round < kMaxRounds; ++round) {
      bool improved = false;
      for (int k = 0; k < kNumFeatures; ++k) {
        LineSearchResult res = line_search(pool, w, k);
        if (res.bleu > bleu && !all_zero(res.weights)) {
          w = res.weights;
          bleu = res.bleu;
          accepted.push_back(bleu);
          improved = true;
        }
      }
      if (!improved) break;
    }
    if (r == 0 || bleu > best.bleu) {
      best.weights = w;
      best.bleu = bleu;
    }
    best.accepted.push_back(std::move(accepted));
  }
  return best;
}

MertResult mert(const std::vector<TuningPair>& dev, const Decoder& decoder, const FeatureWeights& initial,
                const MertOptions& options) {
  if (dev.empty()) throw InvalidArgument("mert: empty dev set");
  if (options.max_iters < 1) throw InvalidArgument("mert: max_iters must be >= 1");
  if (options.nbest < 1) throw InvalidArgument("mert: nbest must be >= 1");
  initial.validate();

  NBestPool pool(dev.size());
  std::vector<std::unordered_set<std::string>> seen(dev.size());
  MertResult result{initial, -1.0, {}};
  FeatureWeights w = initial;
  for (int iter = 0; iter < options.max_iters; ++iter) {
    metrics::BleuStats heads(kBleuOrder);
    std::size_t added = 0;
    for (std::size_t i = 0; i < dev.size(); ++i) {
      const TokenSeq refs[] = {dev[i].reference};
      auto list = decoder.nbest(dev[i].source, w, options.nbest);
      for (std::size_t j = 0; j < list.size(); ++j) {
        auto stats = metrics::bleu_stats(list[j].output, refs, kBleuOrder);
        if (j == 0) heads += stats;
        if (seen[i].insert(textproc::join(list[j].output)).second) {
          pool[i].push_back({std::move(list[j].output), list[j].features, std::move(stats)});
          ++added;
        }
      }
    }
    const double bleu = metrics::bleu_from_stats(heads, kBleuEpsilon);
    result.iteration_bleu.push_back(bleu);
    if (bleu > result.dev_bleu) {
      result.dev_bleu = bleu;
      result.weights = w;
    }
    if ((iter > 0 && added == 0) || iter + 1 == options.max_iters) break;
    w = optimize_on_pool(pool, w, options.restarts, options.seed + static_cast<std::uint64_t>(iter)).weights;
  }
  return result;
}

}  // namespace lyricbench::smt
