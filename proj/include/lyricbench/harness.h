#ifndef LYRICBENCH_HARNESS_H
#define LYRICBENCH_HARNESS_H

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "lyricbench/corpus.h"
#include "lyricbench/error.h"
#include "lyricbench/metrics.h"
#include "lyricbench/smt.h"

namespace lyricbench::harness {

// A pipeline stage failed; what() starts with "stage <name>: ".
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error("stage " + stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct KeyValue {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

// Flat "key = value" file. Blank lines and lines starting with '#' are
// skipped; keys and values are trimmed. Throws FormatError on a line without
// '=' or with an empty key.
std::vector<KeyValue> read_key_values(const std::filesystem::path& path);

// Slang term -> standard term, in file order.
using SlangLexicon = std::vector<std::pair<std::string, std::string>>;

// "slang<TAB>standard" lines; '#' comments and blank lines skipped. Throws
// FormatError on a malformed line or a repeated slang term.
SlangLexicon load_slang_lexicon(const std::filesystem::path& path);

// Lyric/annotation template pairs. Slots {0}, {1}, ... take lexicon entries
// (slang in the lyric, standard term in the annotation); {who} names the
// narrator in the annotation.
struct Template {
  std::string lyric;
  std::string annotation;
};

// "lyric ||| annotation" lines; both sides must use the same slot set.
std::vector<Template> load_templates(const std::filesystem::path& path);

struct SynthSpec {
  std::size_t n_pairs = 5000;
  double ci_fraction = 0.35;
  std::uint64_t seed = 0;
  SlangLexicon slang_lexicon;
  std::vector<Template> templates;
  // Unrelated sentences used as context-sensitive annotations.
  std::vector<std::string> backgrounds;

  // Throws InvalidArgument on an empty lexicon or template list, a fraction
  // outside [0,1], or missing backgrounds when CS pairs are needed.
  void validate() const;

  // Key=value file with n_pairs, ci_fraction, seed, and lexicon, templates,
  // backgrounds paths relative to the file itself.
  static SynthSpec load(const std::filesystem::path& path);
};

// A pure function of `spec`. Exactly round(n_pairs * ci_fraction) pairs are
// labelled CI; their annotations are the template paraphrase with every slang
// slot replaced by its standard term. CS pairs get a background sentence.
corpus::Corpus generate_synthetic(const SynthSpec& spec);

struct SlangMapping {
  std::size_t mapped = 0;
  std::size_t total = 0;
  // mapped / total; 0 when no slang occurs.
  double rate() const { return total == 0 ? 0.0 : static_cast<double>(mapped) / total; }
};

// Every slang token occurrence in a test lyric counts once; it is mapped when
// the standard term occurs as a contiguous token run in the hypothesis.
SlangMapping slang_mapping(const corpus::Corpus& test, const std::vector<TokenSeq>& hypotheses,
                           const SlangLexicon& lexicon);

struct RunConfig {
  // Exactly one of corpus (JSONL) and synth (SynthSpec file) is set.
  std::filesystem::path corpus;
  std::filesystem::path synth;
  std::vector<std::string> systems{"smt", "retrieval"};
  corpus::SplitSpec split{};
  bool english_only = false;
  bool strip_links = true;
  // Index one entry per annotation sentence instead of whole annotations.
  bool retrieval_expanded = false;
  smt::TrainOptions train{};
  smt::DecoderOptions decoder{};
  smt::MertOptions mert{};
  bool tune = true;
  std::filesystem::path profanity;
  std::filesystem::path synonyms;

  // Config keys in canonical order; CLI flags are the same names with '-'.
  static const std::vector<std::string>& keys();

  // Throws InvalidArgument on an unknown key or a malformed value. Paths are
  // stored absolute; relative ones are resolved against `base`.
  void set(const std::string& key, const std::string& value, const std::filesystem::path& base = {});

  void validate() const;

  static RunConfig load(const std::filesystem::path& path);

  // Canonical key=value text; load(serialize()) round-trips.
  std::string serialize() const;
};

struct RunResult {
  std::vector<metrics::MetricReport> rows;  // human first, then config.systems order
  std::vector<std::pair<std::string, SlangMapping>> slang;  // synthetic corpora only
};

// ingest -> split -> train -> annotate -> evaluate. Writes run.conf,
// corpus.jsonl, splits.tsv, models/<system>/, hyp.<system>.txt, report.tsv
// and, for synthetic corpora, slang.tsv into out_dir. Progress goes to `log`.
// Throws StageError.
RunResult run_pipeline(const RunConfig& config, const std::filesystem::path& out_dir,
                       std::ostream* log = nullptr);

// Recomputes the report from run.conf, corpus.jsonl, splits.tsv and the hyp
// files without retraining.
RunResult regenerate_report(const std::filesystem::path& run_dir);

std::string format_report(const std::vector<metrics::MetricReport>& rows);
std::string format_slang(const std::vector<std::pair<std::string, SlangMapping>>& slang);

}  // namespace lyricbench::harness

#endif  // LYRICBENCH_HARNESS_H
