#ifndef LYRICBENCH_ALIGN_H
#define LYRICBENCH_ALIGN_H

#include <cstdint>
#include <filesystem>
#include <set>
#include <tuple>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lyricbench/textproc.h"

namespace lyricbench::align {

// Source token used for the empty word.
inline constexpr std::string_view kNullToken = "<null>";
// Lower bound applied to every probability after an M-step.
inline constexpr double kProbabilityFloor = 1e-12;

using SentencePair = std::pair<TokenSeq, TokenSeq>;  // (source, target)

// Lexical translation probabilities t(target | source). Every source row
// sums to one.
class TranslationTable {
 public:
  TranslationTable() = default;
  explicit TranslationTable(std::string direction) : direction_(std::move(direction)) {}

  // 0 for pairs never seen together.
  double prob(std::string_view source, std::string_view target) const;
  bool has_source(std::string_view source) const;
  // Sum over targets of one source row.
  double row_sum(std::string_view source) const;

  void set(const std::string& source, const std::string& target, double p);
  const std::string& direction() const { return direction_; }

  // (source, target, prob) for every stored entry.
  std::vector<std::tuple<std::string, std::string, double>> entries() const;

  // TSV "source target prob" sorted by source, then probability descending;
  // entries below 1e-6 are omitted.
  void dump(const std::filesystem::path& path) const;

 private:
  std::string direction_;
  std::unordered_map<std::string, std::unordered_map<std::string, double>> rows_;
};

struct Model1Options {
  int iterations = 5;
  bool use_null = true;
};

// IBM Model 1 by EM. When `log_likelihood` is non-null it receives the corpus
// log-likelihood before training and after every iteration.
TranslationTable train_model1(const std::vector<SentencePair>& pairs, const Model1Options& options,
                              std::vector<double>* log_likelihood = nullptr,
                              std::string direction = "fwd");

// Corpus log-likelihood under Model 1 with uniform alignment probabilities.
double model1_log_likelihood(const TranslationTable& table, const std::vector<SentencePair>& pairs,
                             bool use_null);

// Word alignment of one sentence pair as (source position, target position) links.
struct Alignment {
  std::size_t source_length = 0;
  std::size_t target_length = 0;
  std::set<std::pair<std::size_t, std::size_t>> links;

  Alignment() = default;
  Alignment(std::size_t src_len, std::size_t tgt_len) : source_length(src_len), target_length(tgt_len) {}

  // Throws InvalidArgument for an out-of-range link.
  void add(std::size_t source_pos, std::size_t target_pos);
  bool contains(std::size_t source_pos, std::size_t target_pos) const {
    return links.count({source_pos, target_pos}) > 0;
  }
  Alignment transposed() const;

  friend bool operator==(const Alignment&, const Alignment&) = default;
};

// Links each target word to its most probable source word (leftmost on
// ties). With use_null a target word whose NULL probability is strictly
// larger stays unlinked, as do target words unknown to the table.
Alignment viterbi_align(const TranslationTable& table, const TokenSeq& source, const TokenSeq& target,
                        bool use_null);

// grow-diag-final-and over a source-to-target alignment and a
// target-to-source alignment already expressed in (source, target) order.
Alignment symmetrize(const Alignment& forward, const Alignment& reverse);

}  // namespace lyricbench::align

#endif  // LYRICBENCH_ALIGN_H
