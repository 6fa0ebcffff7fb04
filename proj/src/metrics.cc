#include "lyricbench/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "lyricbench/error.h"

namespace lyricbench::metrics {

void MetricConfig::validate() const {
  if (bleu_max_n < 1) throw InvalidArgument("bleu_max_n must be >= 1");
  if (sari_max_n < 1) throw InvalidArgument("sari_max_n must be >= 1");
  if (!(ibleu_alpha >= 0.0 && ibleu_alpha <= 1.0)) throw InvalidArgument("ibleu_alpha must be in [0,1]");
  if (!(bleu_epsilon > 0.0)) throw InvalidArgument("bleu_epsilon must be positive");
  if (!(meteor_alpha >= 0.0 && meteor_alpha <= 1.0)) {
    throw InvalidArgument("meteor_alpha must be in [0,1]");
  }
  if (!(meteor_gamma >= 0.0 && meteor_gamma <= 1.0)) {
    throw InvalidArgument("meteor_gamma must be in [0,1]");
  }
}

namespace {

void check_instances(std::span<const EvalInstance> instances, const char* metric) {
  if (instances.empty()) throw InvalidArgument(std::string(metric) + ": empty instance list");
  for (const auto& inst : instances) {
    if (inst.references.empty()) {
      throw InvalidArgument(std::string(metric) + ": instance without references");
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// BLEU

BleuStats& BleuStats::operator+=(const BleuStats& other) {
  if (matches.size() < other.matches.size()) {
    matches.resize(other.matches.size(), 0);
    totals.resize(other.totals.size(), 0);
  }
  for (std::size_t i = 0; i < other.matches.size(); ++i) {
    matches[i] += other.matches[i];
    totals[i] += other.totals[i];
  }
  candidate_length += other.candidate_length;
  reference_length += other.reference_length;
  return *this;
}

BleuStats bleu_stats(const TokenSeq& candidate, std::span<const TokenSeq> references, int max_n) {
  if (max_n < 1) throw InvalidArgument("bleu_stats: max_n must be >= 1");
  BleuStats stats(max_n);
  stats.candidate_length = static_cast<long>(candidate.size());

  long best_len = -1;
  long best_diff = 0;
  for (const auto& ref : references) {
    const long len = static_cast<long>(ref.size());
    const long diff = std::labs(len - stats.candidate_length);
    if (best_len < 0 || diff < best_diff || (diff == best_diff && len < best_len)) {
      best_len = len;
      best_diff = diff;
    }
  }
  stats.reference_length = std::max(best_len, 0L);

  for (int n = 1; n <= max_n; ++n) {
    const auto cand = textproc::ngrams(candidate, n);
    std::map<NGram, int> max_ref;
    for (const auto& ref : references) {
      for (const auto& [gram, c] : textproc::ngrams(ref, n).counts) {
        int& slot = max_ref[gram];
        slot = std::max(slot, c);
      }
    }
    long matched = 0;
    for (const auto& [gram, c] : cand.counts) {
      auto it = max_ref.find(gram);
      if (it != max_ref.end()) matched += std::min(c, it->second);
    }
    stats.matches[n - 1] = matched;
    stats.totals[n - 1] = cand.total();
  }
  return stats;
}

double bleu_from_stats(const BleuStats& stats, double epsilon) {
  if (stats.candidate_length == 0) return 0.0;
  double log_sum = 0.0;
  int orders = 0;
  for (std::size_t i = 0; i < stats.totals.size(); ++i) {
    if (stats.totals[i] == 0) continue;
    const double p = static_cast<double>(stats.matches[i]) / static_cast<double>(stats.totals[i]);
    log_sum += std::log(std::max(p, epsilon));
    ++orders;
  }
  if (orders == 0) return 0.0;
  const double c = static_cast<double>(stats.candidate_length);
  const double r = static_cast<double>(stats.reference_length);
  const double log_bp = std::min(0.0, 1.0 - r / c);
  return 100.0 * std::exp(log_sum / orders + log_bp);
}

double bleu(std::span<const EvalInstance> instances, const MetricConfig& cfg) {
  check_instances(instances, "bleu");
  cfg.validate();
  BleuStats total(cfg.bleu_max_n);
  for (const auto& inst : instances) total += bleu_stats(inst.candidate, inst.references, cfg.bleu_max_n);
  return bleu_from_stats(total, cfg.bleu_epsilon);
}

double combine_ibleu(double bleu_ref, double bleu_src, double alpha) {
  return alpha * bleu_ref - (1.0 - alpha) * bleu_src;
}

double ibleu(std::span<const EvalInstance> instances, const MetricConfig& cfg) {
  check_instances(instances, "ibleu");
  cfg.validate();
  BleuStats vs_ref(cfg.bleu_max_n);
  BleuStats vs_src(cfg.bleu_max_n);
  for (const auto& inst : instances) {
    vs_ref += bleu_stats(inst.candidate, inst.references, cfg.bleu_max_n);
    vs_src += bleu_stats(inst.candidate, std::span<const TokenSeq>(&inst.source, 1), cfg.bleu_max_n);
  }
  return combine_ibleu(bleu_from_stats(vs_ref, cfg.bleu_epsilon),
                       bleu_from_stats(vs_src, cfg.bleu_epsilon), cfg.ibleu_alpha);
}

// ---------------------------------------------------------------------------
// METEOR

SynonymLexicon SynonymLexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open synonym file " + path.string());
  SynonymLexicon lex;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream words(line);
    std::vector<std::string> set;
    std::string w;
    while (words >> w) set.push_back(w);
    if (set.size() >= 2) lex.add_set(set);
  }
  return lex;
}

void SynonymLexicon::add_set(const std::vector<std::string>& words) {
  const int id = next_id_++;
  for (const auto& w : words) sets_[w].insert(id);
}

bool SynonymLexicon::synonyms(const std::string& a, const std::string& b) const {
  auto ia = sets_.find(a);
  if (ia == sets_.end()) return false;
  auto ib = sets_.find(b);
  if (ib == sets_.end()) return false;
  for (int id : ia->second) {
    if (ib->second.count(id)) return true;
  }
  return false;
}

namespace {

constexpr long kMeteorNodeBudget = 2'000'000;

// Maximum bipartite matching size by augmenting paths.
int max_matching(const std::vector<std::vector<int>>& adj, int n_right) {
  std::vector<int> owner(n_right, -1);
  int size = 0;
  for (std::size_t u = 0; u < adj.size(); ++u) {
    std::vector<char> seen(n_right, 0);
    std::function<bool(int)> augment = [&](int v) -> bool {
      for (int w : adj[v]) {
        if (seen[w]) continue;
        seen[w] = 1;
        if (owner[w] < 0 || augment(owner[w])) {
          owner[w] = v;
          return true;
        }
      }
      return false;
    };
    if (augment(static_cast<int>(u))) ++size;
  }
  return size;
}

class StageSearch {
 public:
  StageSearch(std::vector<int>& ref_of, std::vector<char>& ref_used,
              const std::vector<std::vector<int>>& options, int target)
      : ref_of_(ref_of), ref_used_(ref_used), options_(options), target_(target) {
    const int n = static_cast<int>(ref_of_.size());
    active_after_.assign(n + 1, 0);
    for (int i = n - 1; i >= 0; --i) active_after_[i] = active_after_[i + 1] + (options_[i].empty() ? 0 : 1);
  }

  void run() {
    best_.clear();
    best_chunks_ = std::numeric_limits<int>::max();
    dfs(0, 0, 0);
    if (!best_.empty()) ref_of_ = best_;
  }

 private:
  void dfs(int i, int added, int chunks) {
    if (++nodes_ > kMeteorNodeBudget && !best_.empty()) return;
    if (chunks >= best_chunks_) return;
    if (added + active_after_[i] < target_) return;
    const int n = static_cast<int>(ref_of_.size());
    if (i == n) {
      best_chunks_ = chunks;
      best_ = ref_of_;
      return;
    }
    auto starts_chunk = [&](int j) {
      return i == 0 || ref_of_[i - 1] < 0 || ref_of_[i - 1] + 1 != j;
    };
    if (options_[i].empty()) {
      const int j = ref_of_[i];
      dfs(i + 1, added, chunks + (j >= 0 && starts_chunk(j) ? 1 : 0));
      return;
    }
    for (int j : options_[i]) {
      if (ref_used_[j]) continue;
      ref_used_[j] = 1;
      ref_of_[i] = j;
      dfs(i + 1, added + 1, chunks + (starts_chunk(j) ? 1 : 0));
      ref_of_[i] = -1;
      ref_used_[j] = 0;
    }
    dfs(i + 1, added, chunks);
  }

  std::vector<int>& ref_of_;
  std::vector<char>& ref_used_;
  const std::vector<std::vector<int>>& options_;
  const int target_;
  std::vector<int> active_after_;
  std::vector<int> best_;
  int best_chunks_ = 0;
  long nodes_ = 0;
};

}  // namespace

MeteorAlignment meteor_align(const TokenSeq& candidate, const TokenSeq& reference,
                             const SynonymLexicon* synonyms) {
  const int n = static_cast<int>(candidate.size());
  const int m = static_cast<int>(reference.size());
  MeteorAlignment result;
  result.ref_of.assign(n, -1);
  std::vector<char> ref_used(m, 0);

  std::vector<std::string> cand_stems;
  std::vector<std::string> ref_stems;
  for (const auto& t : candidate) cand_stems.push_back(textproc::stem(t));
  for (const auto& t : reference) ref_stems.push_back(textproc::stem(t));

  using Matcher = std::function<bool(int, int)>;
  std::vector<Matcher> stages{
      [&](int i, int j) { return candidate[i] == reference[j]; },
      [&](int i, int j) { return cand_stems[i] == ref_stems[j]; },
  };
  if (synonyms != nullptr && !synonyms->empty()) {
    stages.emplace_back([&](int i, int j) { return synonyms->synonyms(candidate[i], reference[j]); });
  }

  for (const auto& matches : stages) {
    std::vector<std::vector<int>> options(n);
    for (int i = 0; i < n; ++i) {
      if (result.ref_of[i] >= 0) continue;
      for (int j = 0; j < m; ++j) {
        if (!ref_used[j] && matches(i, j)) options[i].push_back(j);
      }
    }
    const int target = max_matching(options, m);
    if (target == 0) continue;
    StageSearch search(result.ref_of, ref_used, options, target);
    search.run();
    std::fill(ref_used.begin(), ref_used.end(), 0);
    for (int j : result.ref_of) {
      if (j >= 0) ref_used[j] = 1;
    }
  }

  for (int i = 0; i < n; ++i) {
    const int j = result.ref_of[i];
    if (j < 0) continue;
    ++result.matches;
    if (i == 0 || result.ref_of[i - 1] < 0 || result.ref_of[i - 1] + 1 != j) ++result.chunks;
  }
  return result;
}

double meteor_sentence(const TokenSeq& candidate, const TokenSeq& reference, const MetricConfig& cfg,
                       const SynonymLexicon* synonyms) {
  if (candidate.empty() || reference.empty()) return 0.0;
  const MeteorAlignment a = meteor_align(candidate, reference, synonyms);
  if (a.matches == 0) return 0.0;
  const double m = a.matches;
  const double precision = m / static_cast<double>(candidate.size());
  const double recall = m / static_cast<double>(reference.size());
  const double fmean =
      precision * recall / (cfg.meteor_alpha * precision + (1.0 - cfg.meteor_alpha) * recall);
  const double penalty = cfg.meteor_gamma * std::pow(a.chunks / m, cfg.meteor_beta);
  return fmean * (1.0 - penalty);
}

double meteor(std::span<const EvalInstance> instances, const MetricConfig& cfg,
              const SynonymLexicon* synonyms) {
  check_instances(instances, "meteor");
  cfg.validate();
  double sum = 0.0;
  for (const auto& inst : instances) {
    double best = 0.0;
    for (const auto& ref : inst.references) {
      best = std::max(best, meteor_sentence(inst.candidate, ref, cfg, synonyms));
    }
    sum += best;
  }
  return 100.0 * sum / static_cast<double>(instances.size());
}

// ---------------------------------------------------------------------------
// SARI

namespace {

// 0/0 is defined as 1: nothing was required and nothing was produced.
double ratio(double num, double den) { return den == 0.0 ? 1.0 : num / den; }

double f1(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

}  // namespace

double sari_sentence(const TokenSeq& source, const TokenSeq& candidate,
                     std::span<const TokenSeq> references, int max_n) {
  if (references.empty()) throw InvalidArgument("sari: instance without references");
  if (max_n < 1) throw InvalidArgument("sari: max_n must be >= 1");
  const double k = static_cast<double>(references.size());
  double total = 0.0;
  int orders = 0;
  for (int n = 1; n <= max_n; ++n) {
    const auto src = textproc::ngrams(source, n).counts;
    const auto cand = textproc::ngrams(candidate, n).counts;
    // Number of references containing each n-gram.
    std::map<NGram, int> in_refs;
    for (const auto& ref : references) {
      for (const auto& [gram, c] : textproc::ngrams(ref, n).counts) ++in_refs[gram];
    }
    if (src.empty() && cand.empty() && in_refs.empty()) continue;
    auto ref_count = [&in_refs](const NGram& g) {
      auto it = in_refs.find(g);
      return it == in_refs.end() ? 0 : it->second;
    };

    long keep_sys = 0;
    long keep_good = 0;
    long add_sys = 0;
    long add_good = 0;
    for (const auto& [gram, c] : cand) {
      if (src.count(gram)) {
        ++keep_sys;
        keep_good += ref_count(gram);
      } else {
        ++add_sys;
        add_good += ref_count(gram);
      }
    }
    long keep_ref = 0;
    long del_sys = 0;
    long del_good = 0;  // in units of references that also dropped the n-gram
    for (const auto& [gram, c] : src) {
      const int r = ref_count(gram);
      keep_ref += r;
      if (!cand.count(gram)) {
        ++del_sys;
        del_good += static_cast<long>(references.size()) - r;
      }
    }
    long add_ref = 0;
    for (const auto& [gram, r] : in_refs) {
      if (!src.count(gram)) add_ref += r;
    }

    const double keep_p = ratio(keep_good / k, static_cast<double>(keep_sys));
    const double keep_r = ratio(keep_good / k, keep_ref / k);
    const double add_p = ratio(add_good / k, static_cast<double>(add_sys));
    const double add_r = ratio(add_good / k, add_ref / k);
    const double del_p = ratio(del_good / k, static_cast<double>(del_sys));
    total += (f1(add_p, add_r) + f1(keep_p, keep_r) + del_p) / 3.0;
    ++orders;
  }
  return orders == 0 ? 1.0 : total / orders;
}

double sari(std::span<const EvalInstance> instances, const MetricConfig& cfg) {
  check_instances(instances, "sari");
  cfg.validate();
  double sum = 0.0;
  for (const auto& inst : instances) {
    sum += sari_sentence(inst.source, inst.candidate, inst.references, cfg.sari_max_n);
  }
  return 100.0 * sum / static_cast<double>(instances.size());
}

// ---------------------------------------------------------------------------
// Surface properties

double length_ratio(std::span<const EvalInstance> instances) {
  if (instances.empty()) throw InvalidArgument("length_ratio: empty instance list");
  double sum = 0.0;
  for (const auto& inst : instances) {
    if (inst.source.empty()) throw InvalidArgument("length_ratio: zero-length source");
    sum += static_cast<double>(inst.candidate.size()) / static_cast<double>(inst.source.size());
  }
  return sum / static_cast<double>(instances.size());
}

WordList load_word_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open word list " + path.string());
  WordList words;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string w;
    if (!(ss >> w) || w[0] == '#') continue;
    words.insert(w);
  }
  return words;
}

double profanity_rate(std::span<const EvalInstance> instances, const WordList& lexicon) {
  if (lexicon.empty()) throw InvalidArgument("profanity_rate: empty lexicon");
  long hits = 0;
  long tokens = 0;
  for (const auto& inst : instances) {
    for (const auto& t : inst.candidate) {
      ++tokens;
      if (lexicon.count(t)) ++hits;
    }
  }
  return tokens == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(tokens);
}

// ---------------------------------------------------------------------------
// Report

MetricReport build_report(const std::string& name, std::span<const EvalInstance> instances,
                          const MetricConfig& cfg, const WordList& profanity,
                          const SynonymLexicon* synonyms) {
  MetricReport row;
  row.system = name;
  row.bleu = bleu(instances, cfg);
  row.ibleu = ibleu(instances, cfg);
  row.meteor = meteor(instances, cfg, synonyms);
  row.sari = sari(instances, cfg);
  row.length_ratio = length_ratio(instances);
  row.profanity_per_token = profanity_rate(instances, profanity);
  return row;
}

MetricReport build_reference_report(const std::string& name,
                                    std::span<const EvalInstance> instances,
                                    const WordList& profanity) {
  check_instances(instances, "reference report");
  std::vector<EvalInstance> as_candidates;
  as_candidates.reserve(instances.size());
  for (const auto& inst : instances) {
    as_candidates.push_back(EvalInstance{inst.source, inst.references.front(), inst.references});
  }
  MetricReport row;
  row.system = name;
  row.length_ratio = length_ratio(as_candidates);
  row.profanity_per_token = profanity_rate(as_candidates, profanity);
  return row;
}

std::string report_header() { return "system\tbleu\tibleu\tmeteor\tsari\tlength_ratio\tprofanity_per_token"; }

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string fixed2(double v) { return fixed(v, 2); }

std::string fixed2(const std::optional<double>& v) { return v ? fixed2(*v) : std::string(); }

}  // namespace

std::string format_report_row(const MetricReport& row) {
  return row.system + "\t" + fixed2(row.bleu) + "\t" + fixed2(row.ibleu) + "\t" + fixed2(row.meteor) +
         "\t" + fixed2(row.sari) + "\t" + fixed2(row.length_ratio) + "\t" +
         fixed(row.profanity_per_token, 4);
}

}  // namespace lyricbench::metrics
