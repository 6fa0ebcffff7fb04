#ifndef LYRICBENCH_CORPUS_H
#define LYRICBENCH_CORPUS_H

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "lyricbench/langid.h"
#include "lyricbench/textproc.h"

namespace lyricbench::corpus {

enum class ContextLabel { kUnlabeled, kCI, kCS };

std::string_view to_string(ContextLabel label);

// One lyric excerpt with its annotation. Lyric and annotation are non-empty
// after whitespace trimming.
struct AnnotationPair {
  std::string id;
  std::string song_id;
  std::string lyric;
  std::string annotation;
  ContextLabel context_label = ContextLabel::kUnlabeled;

  friend bool operator==(const AnnotationPair&, const AnnotationPair&) = default;
};

// Insertion-ordered pairs with unique ids.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::string provenance) : provenance_(std::move(provenance)) {}

  // Throws InvalidArgument on a duplicate id or an empty lyric/annotation.
  void add(AnnotationPair pair);

  const std::vector<AnnotationPair>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  const AnnotationPair& operator[](std::size_t i) const { return pairs_[i]; }
  auto begin() const { return pairs_.begin(); }
  auto end() const { return pairs_.end(); }

  bool contains(std::string_view id) const;

  const std::string& provenance() const { return provenance_; }
  void set_provenance(std::string p) { provenance_ = std::move(p); }

 private:
  std::vector<AnnotationPair> pairs_;
  std::unordered_set<std::string> ids_;
  std::string provenance_;
};

struct SplitSpec {
  std::size_t test_size = 354;
  std::size_t dev_size = 2000;
  std::uint64_t seed = 0;
};

struct Splits {
  Corpus test;
  Corpus dev;
  Corpus train;
};

struct CorpusStats {
  std::size_t n_pairs = 0;
  double mean_lyric_tokens = 0.0;
  double mean_annotation_tokens = 0.0;
  std::size_t vocab_lyrics = 0;
  std::size_t vocab_annotations = 0;
};

// JSONL reader. Blank lines are skipped; any malformed line aborts with a
// FormatError naming the line.
Corpus load_corpus(const std::filesystem::path& path);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

// Keeps pairs whose annotation is classified as "en" against `profiles`.
Corpus filter_english(const Corpus& corpus, const langid::ProfileSet& profiles);

// Drops pairs whose annotation has no alphabetic token once URL-shaped tokens
// are removed.
Corpus strip_link_only(const Corpus& corpus);

bool is_url_token(std::string_view token);

// Sentence splitter used for annotation text.
std::vector<std::string> split_sentences(std::string_view text);

// One pair per annotation sentence, ids suffixed "#k", lyric unchanged.
Corpus expand_sentences(const Corpus& corpus);

// Test is sampled from CI pairs only, dev from everything else, train keeps
// the remainder. Each split preserves corpus order.
Splits make_splits(const Corpus& corpus, const SplitSpec& spec);

CorpusStats corpus_stats(const Corpus& corpus,
                         const Tokenizer& tokenizer = textproc::default_tokenizer());

// |CI| / |sample|; every pair must carry a CI or CS label.
double estimate_ci_fraction(const Corpus& sample);

// Split manifest: TSV with header "id\tsplit".
void write_split_manifest(const Splits& splits, const std::filesystem::path& path);

// Rebuilds splits of `corpus` from a manifest written by write_split_manifest.
Splits read_split_manifest(const Corpus& corpus, const std::filesystem::path& path);

}  // namespace lyricbench::corpus

#endif  // LYRICBENCH_CORPUS_H
