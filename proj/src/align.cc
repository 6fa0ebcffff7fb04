#include "lyricbench/align.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "lyricbench/error.h"

namespace lyricbench::align {

// ---------------------------------------------------------------------------
// TranslationTable

double TranslationTable::prob(std::string_view source, std::string_view target) const {
  auto row = rows_.find(std::string(source));
  if (row == rows_.end()) return 0.0;
  auto it = row->second.find(std::string(target));
  return it == row->second.end() ? 0.0 : it->second;
}

bool TranslationTable::has_source(std::string_view source) const {
  return rows_.count(std::string(source)) > 0;
}

double TranslationTable::row_sum(std::string_view source) const {
  auto row = rows_.find(std::string(source));
  if (row == rows_.end()) return 0.0;
  std::map<std::string, double> sorted(row->second.begin(), row->second.end());
  double sum = 0.0;
  for (const auto& [t, p] : sorted) sum += p;
  return sum;
}

void TranslationTable::set(const std::string& source, const std::string& target, double p) {
  rows_[source][target] = p;
}

std::vector<std::tuple<std::string, std::string, double>> TranslationTable::entries() const {
  std::vector<std::tuple<std::string, std::string, double>> out;
  for (const auto& [s, row] : rows_) {
    for (const auto& [t, p] : row) out.emplace_back(s, t, p);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
    if (std::get<2>(a) != std::get<2>(b)) return std::get<2>(a) > std::get<2>(b);
    return std::get<1>(a) < std::get<1>(b);
  });
  return out;
}

void TranslationTable::dump(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write translation table " + path.string());
  char buf[64];
  for (const auto& [s, t, p] : entries()) {
    if (p < 1e-6) continue;
    std::snprintf(buf, sizeof buf, "%.9g", p);
    out << s << '\t' << t << '\t' << buf << '\n';
  }
}

// ---------------------------------------------------------------------------
// Model 1

namespace {

// Dense parameter layout: one contiguous row per source word holding its
// co-occurring target words; sentence pairs refer to parameters by index.
struct Model1Problem {
  std::vector<std::string> source_vocab;  // id 0 is NULL
  std::vector<std::string> target_vocab;
  std::vector<std::size_t> row_start;     // size source_vocab + 1
  std::vector<std::uint32_t> row_target;  // target id per parameter
  // Per sentence: number of source slots and a target-major index matrix.
  struct Sentence {
    std::size_t slots = 0;
    std::vector<std::size_t> params;  // params[j * slots + i]
  };
  std::vector<Sentence> sentences;
};

Model1Problem build_problem(const std::vector<SentencePair>& pairs, bool use_null) {
  Model1Problem prob;
  std::map<std::string, std::uint32_t> src_ids{{std::string(kNullToken), 0}};
  std::map<std::string, std::uint32_t> tgt_ids;
  std::vector<std::vector<std::uint32_t>> src_seq(pairs.size());
  std::vector<std::vector<std::uint32_t>> tgt_seq(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    if (use_null) src_seq[k].push_back(0);
    for (const auto& s : pairs[k].first) {
      auto [it, fresh] = src_ids.emplace(s, static_cast<std::uint32_t>(src_ids.size()));
      src_seq[k].push_back(it->second);
    }
    for (const auto& t : pairs[k].second) {
      auto [it, fresh] = tgt_ids.emplace(t, static_cast<std::uint32_t>(tgt_ids.size()));
      tgt_seq[k].push_back(it->second);
    }
  }
  prob.source_vocab.resize(src_ids.size());
  for (const auto& [w, id] : src_ids) prob.source_vocab[id] = w;
  prob.target_vocab.resize(tgt_ids.size());
  for (const auto& [w, id] : tgt_ids) prob.target_vocab[id] = w;

  std::vector<std::vector<std::uint32_t>> cooc(src_ids.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    for (auto s : src_seq[k]) cooc[s].insert(cooc[s].end(), tgt_seq[k].begin(), tgt_seq[k].end());
  }
  prob.row_start.assign(src_ids.size() + 1, 0);
  for (std::size_t s = 0; s < cooc.size(); ++s) {
    auto& row = cooc[s];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    prob.row_start[s + 1] = prob.row_start[s] + row.size();
    prob.row_target.insert(prob.row_target.end(), row.begin(), row.end());
  }

  prob.sentences.resize(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    auto& sent = prob.sentences[k];
    sent.slots = src_seq[k].size();
    sent.params.reserve(sent.slots * tgt_seq[k].size());
    for (auto t : tgt_seq[k]) {
      for (auto s : src_seq[k]) {
        auto begin = prob.row_target.begin() + static_cast<long>(prob.row_start[s]);
        auto end = prob.row_target.begin() + static_cast<long>(prob.row_start[s + 1]);
        auto it = std::lower_bound(begin, end, t);
        sent.params.push_back(static_cast<std::size_t>(it - prob.row_target.begin()));
      }
    }
  }
  return prob;
}

double log_likelihood(const Model1Problem& prob, const std::vector<double>& t) {
  double ll = 0.0;
  for (const auto& sent : prob.sentences) {
    if (sent.slots == 0) continue;
    const std::size_t m = sent.params.size() / sent.slots;
    for (std::size_t j = 0; j < m; ++j) {
      double sum = 0.0;
      for (std::size_t i = 0; i < sent.slots; ++i) sum += t[sent.params[j * sent.slots + i]];
      ll += std::log(sum / static_cast<double>(sent.slots));
    }
  }
  return ll;
}

}  // namespace

TranslationTable train_model1(const std::vector<SentencePair>& pairs, const Model1Options& options,
                              std::vector<double>* log_likelihood_trace, std::string direction) {
  if (pairs.empty()) throw InvalidArgument("train_model1: empty pair list");
  if (options.iterations < 1) throw InvalidArgument("train_model1: iterations must be >= 1");
  const Model1Problem prob = build_problem(pairs, options.use_null);

  std::vector<double> t(prob.row_target.size());
  for (std::size_t s = 0; s + 1 < prob.row_start.size(); ++s) {
    const std::size_t n = prob.row_start[s + 1] - prob.row_start[s];
    for (std::size_t k = prob.row_start[s]; k < prob.row_start[s + 1]; ++k) t[k] = 1.0 / static_cast<double>(n);
  }
  if (log_likelihood_trace) {
    log_likelihood_trace->clear();
    log_likelihood_trace->push_back(log_likelihood(prob, t));
  }

  std::vector<double> counts(t.size());
  for (int iter = 0; iter < options.iterations; ++iter) {
    std::fill(counts.begin(), counts.end(), 0.0);
    for (const auto& sent : prob.sentences) {
      if (sent.slots == 0) continue;
      const std::size_t m = sent.params.size() / sent.slots;
      for (std::size_t j = 0; j < m; ++j) {
        const std::size_t* row = &sent.params[j * sent.slots];
        double denom = 0.0;
        for (std::size_t i = 0; i < sent.slots; ++i) denom += t[row[i]];
        for (std::size_t i = 0; i < sent.slots; ++i) counts[row[i]] += t[row[i]] / denom;
      }
    }
    for (std::size_t s = 0; s + 1 < prob.row_start.size(); ++s) {
      double total = 0.0;
      for (std::size_t k = prob.row_start[s]; k < prob.row_start[s + 1]; ++k) total += counts[k];
      if (total <= 0.0) continue;
      for (std::size_t k = prob.row_start[s]; k < prob.row_start[s + 1]; ++k) {
        t[k] = std::max(counts[k] / total, kProbabilityFloor);
      }
    }
    if (log_likelihood_trace) log_likelihood_trace->push_back(log_likelihood(prob, t));
  }

  TranslationTable table(std::move(direction));
  for (std::size_t s = 0; s + 1 < prob.row_start.size(); ++s) {
    for (std::size_t k = prob.row_start[s]; k < prob.row_start[s + 1]; ++k) {
      table.set(prob.source_vocab[s], prob.target_vocab[prob.row_target[k]], t[k]);
    }
  }
  return table;
}

double model1_log_likelihood(const TranslationTable& table, const std::vector<SentencePair>& pairs,
                             bool use_null) {
  double ll = 0.0;
  for (const auto& [src, tgt] : pairs) {
    const std::size_t slots = src.size() + (use_null ? 1 : 0);
    if (slots == 0) continue;
    for (const auto& t : tgt) {
      double sum = use_null ? table.prob(kNullToken, t) : 0.0;
      for (const auto& s : src) sum += table.prob(s, t);
      ll += std::log(sum / static_cast<double>(slots));
    }
  }
  return ll;
}

// ---------------------------------------------------------------------------
// Alignments

void Alignment::add(std::size_t source_pos, std::size_t target_pos) {
  if (source_pos >= source_length || target_pos >= target_length) {
    throw InvalidArgument("alignment link (" + std::to_string(source_pos) + "," +
                          std::to_string(target_pos) + ") out of range");
  }
  links.emplace(source_pos, target_pos);
}

Alignment Alignment::transposed() const {
  Alignment out(target_length, source_length);
  for (const auto& [s, t] : links) out.links.emplace(t, s);
  return out;
}

Alignment viterbi_align(const TranslationTable& table, const TokenSeq& source, const TokenSeq& target,
                        bool use_null) {
  Alignment a(source.size(), target.size());
  for (std::size_t j = 0; j < target.size(); ++j) {
    double best = 0.0;
    std::size_t best_i = source.size();
    for (std::size_t i = 0; i < source.size(); ++i) {
      const double p = table.prob(source[i], target[j]);
      if (p > best) {
        best = p;
        best_i = i;
      }
    }
    if (best_i == source.size()) continue;
    if (use_null && table.prob(kNullToken, target[j]) > best) continue;
    a.links.emplace(best_i, j);
  }
  return a;
}

Alignment symmetrize(const Alignment& forward, const Alignment& reverse) {
  if (forward.source_length != reverse.source_length || forward.target_length != reverse.target_length) {
    throw InvalidArgument("symmetrize: alignments cover different sentence lengths");
  }
  const std::size_t ns = forward.source_length;
  const std::size_t nt = forward.target_length;
  Alignment out(ns, nt);
  std::set<std::pair<std::size_t, std::size_t>> uni = forward.links;
  uni.insert(reverse.links.begin(), reverse.links.end());
  for (const auto& link : forward.links) {
    if (reverse.links.count(link)) out.links.insert(link);
  }
  std::vector<char> src_covered(ns, 0);
  std::vector<char> tgt_covered(nt, 0);
  for (const auto& [s, t] : out.links) {
    src_covered[s] = 1;
    tgt_covered[t] = 1;
  }

  static constexpr std::array<std::pair<int, int>, 8> kNeighbors{
      {{-1, 0}, {0, -1}, {1, 0}, {0, 1}, {-1, -1}, {-1, 1}, {1, -1}, {1, 1}}};
  bool added = true;
  while (added) {
    added = false;
    for (std::size_t s = 0; s < ns; ++s) {
      for (std::size_t t = 0; t < nt; ++t) {
        if (!out.contains(s, t)) continue;
        for (const auto& [ds, dt] : kNeighbors) {
          const long s2 = static_cast<long>(s) + ds;
          const long t2 = static_cast<long>(t) + dt;
          if (s2 < 0 || t2 < 0 || s2 >= static_cast<long>(ns) || t2 >= static_cast<long>(nt)) continue;
          const auto cand = std::make_pair(static_cast<std::size_t>(s2), static_cast<std::size_t>(t2));
          if ((src_covered[cand.first] && tgt_covered[cand.second]) || !uni.count(cand) ||
              out.links.count(cand)) {
            continue;
          }
          out.links.insert(cand);
          src_covered[cand.first] = 1;
          tgt_covered[cand.second] = 1;
          added = true;
        }
      }
    }
  }

  for (const Alignment* directional : {&forward, &reverse}) {
    for (const auto& [s, t] : directional->links) {
      if (!src_covered[s] && !tgt_covered[t]) {
        out.links.emplace(s, t);
        src_covered[s] = 1;
        tgt_covered[t] = 1;
      }
    }
  }
  return out;
}

}  // namespace lyricbench::align
