#ifndef LYRICBENCH_RETRIEVAL_H
#define LYRICBENCH_RETRIEVAL_H

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lyricbench/corpus.h"
#include "lyricbench/textproc.h"

namespace lyricbench::retrieval {

struct RetrievalHit {
  std::string annotation;
  double score = 0.0;  // cosine similarity
  std::size_t doc = 0;
};

// Immutable TF-IDF index over training lyrics. Weights are raw term counts
// times idf = ln((1 + N) / (1 + df)) + 1, L2-normalized per document.
class TfIdfIndex {
 public:
  struct Posting {
    std::uint32_t doc;
    double weight;
  };

  // Lyrics that tokenize to nothing are skipped. Throws InvalidArgument when
  // no document remains.
  static TfIdfIndex build(const corpus::Corpus& train,
                          const Tokenizer& tokenizer = textproc::default_tokenizer());

  // Best document by cosine, ties to the smallest document id. nullopt means
  // "no match": the query has no tokens or no term known to the index.
  std::optional<RetrievalHit> retrieve(std::string_view lyric,
                                       const Tokenizer& tokenizer = textproc::default_tokenizer()) const;

  // Cosine similarity of a query against every document, by document id.
  std::vector<double> similarities(const TokenSeq& query) const;

  std::size_t n_docs() const { return docs_.size(); }
  std::size_t vocabulary_size() const { return terms_.size(); }
  std::optional<std::uint32_t> term_id(std::string_view term) const;
  double idf(std::uint32_t term) const { return idf_[term]; }
  std::uint32_t document_frequency(std::uint32_t term) const { return df_[term]; }
  const std::string& payload(std::size_t doc) const { return docs_[doc].annotation; }
  const std::string& key(std::size_t doc) const { return docs_[doc].key; }
  // Sparse normalized vector of a document, sorted by term id.
  std::vector<std::pair<std::uint32_t, double>> vector(std::size_t doc) const;
  double norm(std::size_t doc) const { return docs_[doc].norm; }

  // Versioned text format holding vocabulary, term counts and payloads;
  // weights are recomputed on load, so retrieval is bit-identical.
  void save(const std::filesystem::path& path) const;
  static TfIdfIndex load(const std::filesystem::path& path);

 private:
  struct Doc {
    std::string key;
    std::string annotation;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> term_counts;  // sorted by term id
    double norm = 0.0;  // of the unnormalized tf-idf vector
  };

  void finalize();

  std::vector<std::string> terms_;
  std::unordered_map<std::string, std::uint32_t> term_ids_;
  std::vector<std::uint32_t> df_;
  std::vector<double> idf_;
  std::vector<Doc> docs_;
  std::vector<std::vector<Posting>> postings_;
};

// Retrieves for every test lyric in order; misses become nullopt.
std::vector<std::optional<RetrievalHit>> annotate_corpus(
    const TfIdfIndex& index, const corpus::Corpus& test,
    const Tokenizer& tokenizer = textproc::default_tokenizer());

}  // namespace lyricbench::retrieval

#endif  // LYRICBENCH_RETRIEVAL_H
