#ifndef LYRICBENCH_METRICS_H
#define LYRICBENCH_METRICS_H

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "lyricbench/textproc.h"

namespace lyricbench::metrics {

// One scored item: the lyric, the system annotation and the human
// annotation(s). References must be non-empty.
struct EvalInstance {
  TokenSeq source;
  TokenSeq candidate;
  std::vector<TokenSeq> references;
};

struct MetricConfig {
  int bleu_max_n = 4;
  double bleu_epsilon = 1e-9;
  double ibleu_alpha = 0.9;
  double meteor_alpha = 0.9;
  double meteor_beta = 3.0;
  double meteor_gamma = 0.5;
  int sari_max_n = 4;

  // Throws InvalidArgument when a field is out of range.
  void validate() const;
};

// Sufficient statistics for corpus BLEU; additive across sentences.
struct BleuStats {
  std::vector<long> matches;  // clipped n-gram matches, index n-1
  std::vector<long> totals;   // candidate n-gram counts, index n-1
  long candidate_length = 0;
  long reference_length = 0;  // closest reference length, ties to the shorter

  explicit BleuStats(int max_n = 4) : matches(max_n, 0), totals(max_n, 0) {}
  BleuStats& operator+=(const BleuStats& other);
  friend bool operator==(const BleuStats&, const BleuStats&) = default;
};

BleuStats bleu_stats(const TokenSeq& candidate, std::span<const TokenSeq> references, int max_n);

// BLEU in [0,100] from pooled statistics. Orders with no candidate n-grams are
// skipped, precisions are floored at epsilon, brevity penalty min(1, e^(1-r/c)).
double bleu_from_stats(const BleuStats& stats, double epsilon);

// Corpus-level BLEU of candidates against references.
double bleu(std::span<const EvalInstance> instances, const MetricConfig& cfg = {});

// alpha * bleu_ref - (1 - alpha) * bleu_src.
double combine_ibleu(double bleu_ref, double bleu_src, double alpha);

// BLEU against the references, penalized by BLEU against the source.
double ibleu(std::span<const EvalInstance> instances, const MetricConfig& cfg = {});

// Synonym sets; two words match when they share a set.
class SynonymLexicon {
 public:
  SynonymLexicon() = default;
  // One set per line, whitespace-separated lowercase words.
  static SynonymLexicon load(const std::filesystem::path& path);
  void add_set(const std::vector<std::string>& words);
  bool synonyms(const std::string& a, const std::string& b) const;
  bool empty() const { return sets_.empty(); }

 private:
  std::map<std::string, std::set<int>, std::less<>> sets_;
  int next_id_ = 0;
};

struct MeteorAlignment {
  std::vector<int> ref_of;  // candidate position -> reference position, -1 if unmatched
  int matches = 0;
  int chunks = 0;
};

// Staged unigram alignment (exact, stem, synonym). Each stage adds a maximum
// set of new matches, choosing the fewest chunks and then the
// lexicographically smallest assignment. The search is exact up to a node
// budget that only very long, highly repetitive sentences can exhaust.
MeteorAlignment meteor_align(const TokenSeq& candidate, const TokenSeq& reference,
                             const SynonymLexicon* synonyms = nullptr);

// Fragmentation-penalized harmonic mean for one candidate/reference pair, in [0,1].
double meteor_sentence(const TokenSeq& candidate, const TokenSeq& reference,
                       const MetricConfig& cfg = {}, const SynonymLexicon* synonyms = nullptr);

// Mean over instances of the best reference score, x100.
double meteor(std::span<const EvalInstance> instances, const MetricConfig& cfg = {},
              const SynonymLexicon* synonyms = nullptr);

// Per-instance SARI in [0,1].
double sari_sentence(const TokenSeq& source, const TokenSeq& candidate,
                     std::span<const TokenSeq> references, int max_n = 4);

// Mean of per-instance SARI, x100.
double sari(std::span<const EvalInstance> instances, const MetricConfig& cfg = {});

// Mean of |candidate| / |source|.
double length_ratio(std::span<const EvalInstance> instances);

using WordList = std::unordered_set<std::string>;

// One lowercase word per line; blank lines and '#' comments are ignored.
WordList load_word_list(const std::filesystem::path& path);

// Lexicon hits over all candidate tokens.
double profanity_rate(std::span<const EvalInstance> instances, const WordList& lexicon);

// One row of the system comparison table. Score columns are empty for the
// human row.
struct MetricReport {
  std::string system;
  std::optional<double> bleu;
  std::optional<double> ibleu;
  std::optional<double> meteor;
  std::optional<double> sari;
  double length_ratio = 0.0;
  double profanity_per_token = 0.0;
};

MetricReport build_report(const std::string& name, std::span<const EvalInstance> instances,
                          const MetricConfig& cfg, const WordList& profanity,
                          const SynonymLexicon* synonyms = nullptr);

// Properties of the references themselves: length ratio against the source
// and profanity rate. Uses the first reference of each instance.
MetricReport build_reference_report(const std::string& name,
                                    std::span<const EvalInstance> instances,
                                    const WordList& profanity);

// Tab-separated; scores and length ratio with 2 decimals, profanity rate
// with 4 (typical rates are a few per thousand tokens).
std::string report_header();
std::string format_report_row(const MetricReport& row);

}  // namespace lyricbench::metrics

#endif  // LYRICBENCH_METRICS_H
