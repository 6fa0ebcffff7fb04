#include "lyricbench/retrieval.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>

#include "lyricbench/error.h"

namespace lyricbench::retrieval {

namespace {

constexpr const char* kMagic = "lyricbench-tfidf";
constexpr int kVersion = 1;
constexpr double kTieTolerance = 1e-12;

// Term counts of a document, assigning ids to new terms.
std::vector<std::pair<std::uint32_t, std::uint32_t>> count_terms(
    const TokenSeq& tokens, std::unordered_map<std::string, std::uint32_t>& ids,
    std::vector<std::string>& terms) {
  std::map<std::uint32_t, std::uint32_t> counts;
  for (const auto& t : tokens) {
    auto it = ids.find(t);
    if (it == ids.end()) {
      it = ids.emplace(t, static_cast<std::uint32_t>(terms.size())).first;
      terms.push_back(t);
    }
    ++counts[it->second];
  }
  return {counts.begin(), counts.end()};
}

}  // namespace

TfIdfIndex TfIdfIndex::build(const corpus::Corpus& train, const Tokenizer& tokenizer) {
  TfIdfIndex index;
  for (const auto& pair : train) {
    auto tokens = tokenizer(pair.lyric);
    if (tokens.empty()) continue;
    Doc doc;
    doc.key = pair.id;
    doc.annotation = pair.annotation;
    doc.term_counts = count_terms(tokens, index.term_ids_, index.terms_);
    index.docs_.push_back(std::move(doc));
  }
  if (index.docs_.empty()) throw InvalidArgument("build_index: no indexable documents");
  index.finalize();
  return index;
}

void TfIdfIndex::finalize() {
  df_.assign(terms_.size(), 0);
  for (const auto& doc : docs_) {
    for (const auto& [term, c] : doc.term_counts) ++df_[term];
  }
  const double n = static_cast<double>(docs_.size());
  idf_.resize(terms_.size());
  for (std::size_t t = 0; t < terms_.size(); ++t) {
    idf_[t] = std::log((1.0 + n) / (1.0 + df_[t])) + 1.0;
  }
  postings_.assign(terms_.size(), {});
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    auto& doc = docs_[d];
    double sq = 0.0;
    for (const auto& [term, c] : doc.term_counts) {
      const double w = c * idf_[term];
      sq += w * w;
    }
    doc.norm = std::sqrt(sq);
    for (const auto& [term, c] : doc.term_counts) {
      postings_[term].push_back({static_cast<std::uint32_t>(d), c * idf_[term] / doc.norm});
    }
  }
}

std::optional<std::uint32_t> TfIdfIndex::term_id(std::string_view term) const {
  auto it = term_ids_.find(std::string(term));
  if (it == term_ids_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::pair<std::uint32_t, double>> TfIdfIndex::vector(std::size_t doc) const {
  std::vector<std::pair<std::uint32_t, double>> out;
  for (const auto& [term, c] : docs_[doc].term_counts) {
    out.emplace_back(term, c * idf_[term] / docs_[doc].norm);
  }
  return out;
}

std::vector<double> TfIdfIndex::similarities(const TokenSeq& query) const {
  std::vector<double> scores(docs_.size(), 0.0);
  std::map<std::uint32_t, std::uint32_t> counts;
  for (const auto& t : query) {
    if (auto it = term_ids_.find(t); it != term_ids_.end()) ++counts[it->second];
  }
  double sq = 0.0;
  for (const auto& [term, c] : counts) {
    const double w = c * idf_[term];
    sq += w * w;
  }
  if (sq == 0.0) return scores;
  const double qnorm = std::sqrt(sq);
  for (const auto& [term, c] : counts) {
    const double qw = c * idf_[term] / qnorm;
    for (const auto& p : postings_[term]) scores[p.doc] += qw * p.weight;
  }
  return scores;
}

std::optional<RetrievalHit> TfIdfIndex::retrieve(std::string_view lyric,
                                                 const Tokenizer& tokenizer) const {
  const TokenSeq query = tokenizer(lyric);
  bool known = false;
  for (const auto& t : query) known = known || term_ids_.count(t) > 0;
  if (!known) return std::nullopt;
  const auto scores = similarities(query);
  // Scores within kTieTolerance count as tied, so rounding noise in the
  // sparse dot products cannot reorder mathematically equal documents.
  std::size_t best = 0;
  for (std::size_t d = 1; d < scores.size(); ++d) {
    if (scores[d] > scores[best] + kTieTolerance) best = d;
  }
  return RetrievalHit{docs_[best].annotation, scores[best], best};
}

void TfIdfIndex::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write index " + path.string());
  out << kMagic << '\t' << kVersion << '\n';
  nlohmann::json vocab = terms_;
  out << vocab.dump() << '\n';
  for (const auto& doc : docs_) {
    nlohmann::json j;
    j["key"] = doc.key;
    j["annotation"] = doc.annotation;
    j["terms"] = doc.term_counts;
    out << j.dump() << '\n';
  }
}

TfIdfIndex TfIdfIndex::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open index " + path.string());
  const std::string name = path.string();
  std::string line;
  if (!std::getline(in, line) || line != std::string(kMagic) + "\t" + std::to_string(kVersion)) {
    throw FormatError(name, 1, "not a version " + std::to_string(kVersion) + " lyricbench index");
  }
  TfIdfIndex index;
  std::size_t lineno = 1;
  try {
    ++lineno;
    if (!std::getline(in, line)) throw FormatError(name, lineno, "missing vocabulary");
    index.terms_ = nlohmann::json::parse(line).get<std::vector<std::string>>();
    for (std::uint32_t i = 0; i < index.terms_.size(); ++i) index.term_ids_.emplace(index.terms_[i], i);
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      auto j = nlohmann::json::parse(line);
      Doc doc;
      doc.key = j.at("key").get<std::string>();
      doc.annotation = j.at("annotation").get<std::string>();
      doc.term_counts = j.at("terms").get<std::vector<std::pair<std::uint32_t, std::uint32_t>>>();
      for (const auto& [term, c] : doc.term_counts) {
        if (term >= index.terms_.size() || c == 0) throw FormatError(name, lineno, "bad term entry");
      }
      if (doc.term_counts.empty()) throw FormatError(name, lineno, "empty document");
      index.docs_.push_back(std::move(doc));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(name, lineno, e.what());
  }
  if (index.docs_.empty()) throw FormatError(name, lineno, "index has no documents");
  index.finalize();
  return index;
}

std::vector<std::optional<RetrievalHit>> annotate_corpus(const TfIdfIndex& index,
                                                         const corpus::Corpus& test,
                                                         const Tokenizer& tokenizer) {
  std::vector<std::optional<RetrievalHit>> out;
  out.reserve(test.size());
  for (const auto& pair : test) out.push_back(index.retrieve(pair.lyric, tokenizer));
  return out;
}

}  // namespace lyricbench::retrieval
