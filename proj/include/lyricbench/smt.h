#ifndef LYRICBENCH_SMT_H
#define LYRICBENCH_SMT_H

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lyricbench/align.h"
#include "lyricbench/metrics.h"
#include "lyricbench/textproc.h"

namespace lyricbench::smt {

// ---------------------------------------------------------------------------
// Features and weights

enum Feature : int { kPhiFe, kPhiEf, kLexFe, kLexEf, kLm, kWordPenalty, kDistortion };
inline constexpr int kNumFeatures = 7;
using FeatureVector = std::array<double, kNumFeatures>;

// Names in Feature order, as used by weight files.
const std::array<std::string_view, kNumFeatures>& feature_names();

// log(kProbabilityFloor): the per-feature phrase cost of a copied OOV token.
double oov_log_cost();

struct FeatureWeights {
  FeatureVector w{};

  static FeatureWeights defaults();

  double dot(const FeatureVector& f) const;
  // Throws InvalidArgument unless finite with at least one nonzero weight.
  void validate() const;

  void save(const std::filesystem::path& path) const;
  static FeatureWeights load(const std::filesystem::path& path);

  friend bool operator==(const FeatureWeights&, const FeatureWeights&) = default;
};

// ---------------------------------------------------------------------------
// Phrase extraction and scoring

// A word-aligned sentence pair; alignment positions index (source, target).
struct AlignedPair {
  TokenSeq source;
  TokenSeq target;
  align::Alignment alignment;
};

// One extracted phrase pair with its links relative to the phrase boxes.
struct PhrasePair {
  TokenSeq source;
  TokenSeq target;
  std::vector<std::pair<std::uint8_t, std::uint8_t>> links;

  friend bool operator==(const PhrasePair&, const PhrasePair&) = default;
};

// All phrase pairs consistent with the alignment, both sides at most
// max_phrase_len tokens, with unaligned boundary words folded in.
std::vector<PhrasePair> extract_phrases(const AlignedPair& pair, int max_phrase_len = 7);
std::vector<PhrasePair> extract_phrases(const std::vector<AlignedPair>& pairs, int max_phrase_len = 7);

struct PhraseScores {
  double phi_fe = 0;  // p(target | source)
  double phi_ef = 0;  // p(source | target)
  double lex_fe = 0;
  double lex_ef = 0;

  friend bool operator==(const PhraseScores&, const PhraseScores&) = default;
};

struct PhraseOption {
  TokenSeq target;
  PhraseScores scores;
};

// Source phrase -> scored target options. For every source phrase the
// phi_fe values sum to one.
class PhraseTable {
 public:
  void add(const TokenSeq& source, const TokenSeq& target, const PhraseScores& scores);

  // nullptr when the source phrase is unknown. Options are sorted by target.
  const std::vector<PhraseOption>* options(const TokenSeq& source) const;
  std::size_t num_sources() const { return rows_.size(); }
  std::size_t num_entries() const;
  int max_source_length() const { return max_source_length_; }

  // Sorted source phrases, for deterministic iteration.
  std::vector<std::string> sources() const;
  const std::vector<PhraseOption>& row(const std::string& joined_source) const;

  // Lines "source ||| target ||| phi_fe phi_ef lex_fe lex_ef".
  void save(const std::filesystem::path& path) const;
  static PhraseTable load(const std::filesystem::path& path);

 private:
  std::unordered_map<std::string, std::vector<PhraseOption>> rows_;
  int max_source_length_ = 0;
};

// Lexical weight of target given source: product over target words of the
// mean t(target word | linked source word), t(. | NULL) for unlinked words.
double lexical_weight(const TokenSeq& source, const TokenSeq& target,
                      const std::vector<std::pair<std::uint8_t, std::uint8_t>>& links,
                      const align::TranslationTable& table);

// Streaming form of score_phrases for large extractions.
class PhraseScorer {
 public:
  PhraseScorer(const align::TranslationTable& forward, const align::TranslationTable& reverse)
      : forward_(forward), reverse_(reverse) {}
  void add(const PhrasePair& pair);
  bool empty() const { return pairs_.empty(); }
  PhraseTable finish() const;

 private:
  struct Acc {
    TokenSeq source, target;
    std::int64_t count = 0;
    double lex_fe = 0, lex_ef = 0;
  };
  const align::TranslationTable& forward_;
  const align::TranslationTable& reverse_;
  std::map<std::pair<std::string, std::string>, Acc> pairs_;
  std::map<std::string, std::int64_t> source_counts_, target_counts_;
};

// Relative frequencies plus lexical weights. lex_fe uses `forward`
// (t(target|source)); lex_ef uses `reverse` (t(source|target)). A phrase pair
// seen with several internal alignments keeps the largest lexical weight.
PhraseTable score_phrases(const std::vector<PhrasePair>& extracted, const align::TranslationTable& forward,
                          const align::TranslationTable& reverse);

// ---------------------------------------------------------------------------
// Language model

using WordId = std::uint32_t;
inline constexpr WordId kUnknownWord = 0xFFFFFFFFu;
inline constexpr std::string_view kBos = "<s>";
inline constexpr std::string_view kEos = "</s>";

// Stupid Backoff n-gram model over sentences wrapped in <s> ... </s>.
class NGramLM {
 public:
  NGramLM() = default;
  // Throws InvalidArgument on an empty corpus, order < 1 or alpha outside (0,1].
  static NGramLM train(const std::vector<TokenSeq>& sentences, int order = 3, double alpha = 0.4);

  int order() const { return order_; }
  double alpha() const { return alpha_; }
  // Distinct word types excluding <s>, including </s>.
  std::size_t vocab_size() const { return vocab_size_; }
  // Unigram tokens excluding <s>, including one </s> per sentence.
  std::int64_t total_tokens() const { return total_; }

  WordId id(std::string_view word) const;
  std::int64_t count(const TokenSeq& ngram) const;

  // S(word | history); only the last order-1 history words matter.
  double score(const TokenSeq& history, std::string_view word) const;
  double score_ids(const WordId* history, std::size_t history_len, WordId word) const;
  // Sum of log S over the words and the closing </s>.
  double sentence_log_score(const TokenSeq& sentence) const;

  // Every stored n-gram as (n, words, count), sorted by n then words.
  std::vector<std::tuple<int, TokenSeq, std::int64_t>> entries() const;

  // TSV "n<TAB>ngram<TAB>count".
  void save(const std::filesystem::path& path) const;
  static NGramLM load(const std::filesystem::path& path, double alpha = 0.4);

 private:
  WordId intern(const std::string& word);
  void finalize();

  int order_ = 3;
  double alpha_ = 0.4;
  std::unordered_map<std::string, WordId> ids_;
  std::vector<std::string> words_;
  std::unordered_map<std::u32string, std::int64_t> counts_;
  std::int64_t total_ = 0;
  std::size_t vocab_size_ = 0;
};

// ---------------------------------------------------------------------------
// Decoder

struct DecoderOptions {
  int beam_size = 100;
  int distortion_limit = 6;  // 0 = monotone
  int max_options = 20;      // per source span, best by weighted phrase score

  void validate() const;
};

// One translated source span [start, end) and its output.
struct DerivationStep {
  int start = 0;
  int end = 0;
  TokenSeq target;
  bool copied = false;  // OOV pass-through
};

struct Translation {
  TokenSeq output;
  FeatureVector features{};
  double score = 0;
  std::vector<DerivationStep> derivation;
};

// Coverage-stack beam search. Stacks are indexed by the number of covered
// source words; hypotheses recombine on (coverage, LM history, end of the
// last span). A move is legal when its jump |start - last end| and the
// distance back to the first uncovered word are both within the limit.
class Decoder {
 public:
  Decoder(const PhraseTable& table, const NGramLM& lm, DecoderOptions options = {});

  // Throws InvalidArgument on an empty source.
  Translation decode(const TokenSeq& source, const FeatureWeights& weights) const;
  // Up to n distinct outputs, best first; the head equals decode().
  std::vector<Translation> nbest(const TokenSeq& source, const FeatureWeights& weights, int n) const;

  const DecoderOptions& options() const { return options_; }

 private:
  const PhraseTable& table_;
  const NGramLM& lm_;
  DecoderOptions options_;
};

// ---------------------------------------------------------------------------
// MERT

struct NBestEntry {
  TokenSeq output;
  FeatureVector features{};
  metrics::BleuStats stats;
};

// Per tuning sentence, the accumulated candidate list.
using NBestPool = std::vector<std::vector<NBestEntry>>;

// Index of the best-scoring entry (first on ties).
std::size_t pool_argmax(const std::vector<NBestEntry>& entries, const FeatureWeights& weights);
// Corpus BLEU (0-100) of the per-sentence argmax entries.
double pool_bleu(const NBestPool& pool, const FeatureWeights& weights);

struct LineSearchResult {
  FeatureWeights weights;
  double bleu = 0;
};

// Exact line search over one weight: sweeps the upper envelopes of all
// sentences and returns the best BLEU region's representative point. The
// current value is kept when its region is among the best.
LineSearchResult line_search(const NBestPool& pool, const FeatureWeights& weights, int feature);

struct PoolOptimization {
  FeatureWeights weights;
  double bleu = 0;
  // Pool BLEU after each accepted update, one list per restart, starting
  // with the restart's initial BLEU.
  std::vector<std::vector<double>> accepted;
};

// Coordinate ascent by line search from `start` and restarts-1 random points
// in [-1,1]^7; updates are accepted only when BLEU strictly improves.
PoolOptimization optimize_on_pool(const NBestPool& pool, const FeatureWeights& start, int restarts,
                                  std::uint64_t seed);

struct MertOptions {
  int max_iters = 10;
  int nbest = 100;
  int restarts = 20;
  std::uint64_t seed = 1;
};

struct TuningPair {
  TokenSeq source;
  TokenSeq reference;
};

struct MertResult {
  FeatureWeights weights;
  double dev_bleu = 0;
  std::vector<double> iteration_bleu;  // decoded dev BLEU per iteration
};

// Decode, merge n-best lists into the pool, optimize; stops after max_iters
// decodes or once the pool stops growing. Returns the decoded best.
MertResult mert(const std::vector<TuningPair>& dev, const Decoder& decoder, const FeatureWeights& initial,
                const MertOptions& options);

// ---------------------------------------------------------------------------
// Training and model directories

struct TrainOptions {
  int max_phrase_len = 7;
  int lm_order = 3;
  double lm_alpha = 0.4;
  align::Model1Options model1{};
};

struct SmtModel {
  PhraseTable phrases;
  NGramLM lm;
  FeatureWeights weights = FeatureWeights::defaults();
  align::TranslationTable forward{"fwd"};
  align::TranslationTable reverse{"rev"};

  // phrase-table.txt, lm.tsv, weights.tsv, lex.fwd.tsv, lex.rev.tsv.
  void save(const std::filesystem::path& dir) const;
  // Reads phrase-table.txt, lm.tsv and weights.tsv.
  static SmtModel load(const std::filesystem::path& dir, double lm_alpha = 0.4);
};

// Word alignment in both directions, grow-diag-final-and, extraction,
// scoring, and an LM over the targets. Throws InvalidArgument if empty.
SmtModel train_smt(const std::vector<align::SentencePair>& pairs, const TrainOptions& options = {});

}  // namespace lyricbench::smt

#endif  // LYRICBENCH_SMT_H
