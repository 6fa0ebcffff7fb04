// Exhaustive reference decoder and random toy instances for decoder tests.
#ifndef LYRICBENCH_TESTS_SMT_ORACLES_H
#define LYRICBENCH_TESTS_SMT_ORACLES_H

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "lyricbench/smt.h"

namespace lyricbench::oracle {

struct Derivation {
  std::vector<smt::DerivationStep> steps;
  TokenSeq output;
  smt::FeatureVector features{};
  double score = 0;
};

// Scores a complete derivation from scratch: phrase features from the table,
// LM over the whole output, word count and summed jumps.
inline void score_derivation(Derivation& d, const smt::PhraseTable& table, const smt::NGramLM& lm,
                             const smt::FeatureWeights& w, const TokenSeq& source) {
  d.features = {};
  d.output.clear();
  int prev_end = 0;
  for (const auto& st : d.steps) {
    if (st.copied) {
      for (int k = 0; k < 4; ++k) d.features[k] += smt::oov_log_cost();
    } else {
      const TokenSeq phrase(source.begin() + st.start, source.begin() + st.end);
      for (const auto& o : *table.options(phrase)) {
        if (o.target != st.target) continue;
        d.features[smt::kPhiFe] += std::log(o.scores.phi_fe);
        d.features[smt::kPhiEf] += std::log(o.scores.phi_ef);
        d.features[smt::kLexFe] += std::log(o.scores.lex_fe);
        d.features[smt::kLexEf] += std::log(o.scores.lex_ef);
      }
    }
    d.features[smt::kDistortion] -= std::abs(st.start - prev_end);
    prev_end = st.end;
    d.output.insert(d.output.end(), st.target.begin(), st.target.end());
  }
  d.features[smt::kLm] = lm.sentence_log_score(d.output);
  d.features[smt::kWordPenalty] = -static_cast<double>(d.output.size());
  d.score = w.dot(d.features);
}

// Every legal derivation under the decoder's move rules, without pruning.
inline std::vector<Derivation> enumerate_derivations(const TokenSeq& source, const smt::PhraseTable& table,
                                                     const smt::NGramLM& lm, const smt::FeatureWeights& w,
                                                     int distortion_limit) {
  const int n = static_cast<int>(source.size());
  // Options per span, with the copy rule for words lacking a one-word entry.
  std::map<std::pair<int, int>, std::vector<smt::DerivationStep>> options;
  for (int s = 0; s < n; ++s) {
    for (int e = s + 1; e <= n; ++e) {
      const TokenSeq phrase(source.begin() + s, source.begin() + e);
      if (const auto* opts = table.options(phrase)) {
        for (const auto& o : *opts) options[{s, e}].push_back({s, e, o.target, false});
      }
    }
    if (!options.count({s, s + 1})) options[{s, s + 1}].push_back({s, s + 1, {source[s]}, true});
  }
  std::vector<Derivation> out;
  std::vector<bool> cov(n, false);
  Derivation cur;
  auto rec = [&](auto&& self, int prev_end, int covered) -> void {
    if (covered == n) {
      Derivation d = cur;
      score_derivation(d, table, lm, w, source);
      out.push_back(std::move(d));
      return;
    }
    for (const auto& [span, list] : options) {
      const auto [s, e] = span;
      bool free = true;
      for (int i = s; i < e; ++i) free = free && !cov[i];
      if (!free || std::abs(s - prev_end) > distortion_limit) continue;
      for (int i = s; i < e; ++i) cov[i] = true;
      int gap = 0;
      while (gap < n && cov[gap]) ++gap;
      if (!(gap < s && e - gap > distortion_limit)) {
        for (const auto& step : list) {
          cur.steps.push_back(step);
          self(self, e, covered + (e - s));
          cur.steps.pop_back();
        }
      }
      for (int i = s; i < e; ++i) cov[i] = false;
    }
  };
  rec(rec, 0, 0);
  return out;
}

struct ToyInstance {
  TokenSeq source;
  smt::PhraseTable table;
  smt::NGramLM lm;
  smt::FeatureWeights weights;
};

// Source of 1-4 words; every span of up to 3 words gets 0-3 options with
// random scores; some words are left without options.
inline ToyInstance random_toy_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  const std::vector<std::string> src_vocab{"a", "b", "c", "d", "e"};
  const std::vector<std::string> tgt_vocab{"u", "v", "w", "x", "y", "z"};
  ToyInstance inst;
  const int n = 1 + static_cast<int>(rng() % 4);
  for (int i = 0; i < n; ++i) inst.source.push_back(src_vocab[rng() % src_vocab.size()]);
  for (int s = 0; s < n; ++s) {
    for (int e = s + 1; e <= std::min(n, s + 3); ++e) {
      const TokenSeq phrase(inst.source.begin() + s, inst.source.begin() + e);
      if (inst.table.options(phrase)) continue;
      const int k = static_cast<int>(rng() % (e - s == 1 ? 4 : 3));
      for (int o = 0; o < k; ++o) {
        TokenSeq target;
        const int len = 1 + static_cast<int>(rng() % 2);
        for (int j = 0; j < len; ++j) target.push_back(tgt_vocab[rng() % tgt_vocab.size()]);
        inst.table.add(phrase, target, {uni(0.05, 1), uni(0.05, 1), uni(0.05, 1), uni(0.05, 1)});
      }
    }
  }
  std::vector<TokenSeq> lm_corpus;
  for (int i = 0; i < 8; ++i) {
    TokenSeq sent;
    const int len = 1 + static_cast<int>(rng() % 5);
    for (int j = 0; j < len; ++j) sent.push_back(tgt_vocab[rng() % tgt_vocab.size()]);
    lm_corpus.push_back(sent);
  }
  inst.lm = smt::NGramLM::train(lm_corpus, 3, 0.4);
  for (double& v : inst.weights.w) v = uni(-1, 1);
  return inst;
}

}  // namespace lyricbench::oracle

#endif  // LYRICBENCH_TESTS_SMT_ORACLES_H
