#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "lyricbench/error.h"
#include "lyricbench/smt.h"

namespace lyricbench::smt {

namespace {
// <s> is always interned first.
constexpr WordId kBosId = 0;
}  // namespace

WordId NGramLM::intern(const std::string& word) {
  auto [it, fresh] = ids_.emplace(word, static_cast<WordId>(words_.size()));
  if (fresh) words_.push_back(word);
  return it->second;
}

void NGramLM::finalize() {
  total_ = 0;
  vocab_size_ = 0;
  for (const auto& [key, c] : counts_) {
    if (key.size() != 1 || key[0] == kBosId) continue;
    total_ += c;
    ++vocab_size_;
  }
}

NGramLM NGramLM::train(const std::vector<TokenSeq>& sentences, int order, double alpha) {
  if (sentences.empty()) throw InvalidArgument("train_lm: empty corpus");
  if (order < 1) throw InvalidArgument("train_lm: order must be >= 1");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidArgument("train_lm: alpha must be in (0, 1]");
  NGramLM lm;
  lm.order_ = order;
  lm.alpha_ = alpha;
  const WordId bos = lm.intern(std::string(kBos));
  const WordId eos = lm.intern(std::string(kEos));
  std::u32string padded;
  for (const auto& sent : sentences) {
    padded.clear();
    padded.push_back(bos);
    for (const auto& w : sent) padded.push_back(lm.intern(w));
    padded.push_back(eos);
    for (std::size_t i = 0; i < padded.size(); ++i) {
      for (int n = 1; n <= order && i + static_cast<std::size_t>(n) <= padded.size(); ++n) {
        ++lm.counts_[padded.substr(i, static_cast<std::size_t>(n))];
      }
    }
  }
  lm.finalize();
  return lm;
}

WordId NGramLM::id(std::string_view word) const {
  auto it = ids_.find(std::string(word));
  return it == ids_.end() ? kUnknownWord : it->second;
}

std::int64_t NGramLM::count(const TokenSeq& ngram) const {
  std::u32string key;
  for (const auto& w : ngram) {
    const WordId i = id(w);
    if (i == kUnknownWord) return 0;
    key.push_back(i);
  }
  auto it = counts_.find(key);
  return it == counts_.end() ? 0 : it->second;
}

double NGramLM::score_ids(const WordId* history, std::size_t history_len, WordId word) const {
  const std::size_t keep = std::min<std::size_t>(history_len, static_cast<std::size_t>(order_ - 1));
  const WordId* h = history + (history_len - keep);
  std::u32string key;
  double scale = 1.0;
  for (std::size_t skip = 0; skip < keep; ++skip) {
    key.assign(h + skip, h + keep);
    auto hist = counts_.find(key);
    if (hist != counts_.end() && word != kUnknownWord) {
      key.push_back(word);
      auto full = counts_.find(key);
      if (full != counts_.end()) {
        return scale * static_cast<double>(full->second) / static_cast<double>(hist->second);
      }
    }
    scale *= alpha_;
  }
  if (word != kUnknownWord) {
    key.assign(1, word);
    auto it = counts_.find(key);
    if (it != counts_.end() && word != kBosId) {
      return scale * static_cast<double>(it->second) / static_cast<double>(total_);
    }
  }
  return scale * alpha_ / static_cast<double>(vocab_size_);
}

double NGramLM::score(const TokenSeq& history, std::string_view word) const {
  std::vector<WordId> ids;
  ids.reserve(history.size());
  for (const auto& w : history) ids.push_back(id(w));
  return score_ids(ids.data(), ids.size(), id(word));
}

double NGramLM::sentence_log_score(const TokenSeq& sentence) const {
  std::vector<WordId> ids{id(kBos)};
  double total = 0.0;
  for (const auto& w : sentence) {
    const WordId i = id(w);
    total += std::log(score_ids(ids.data(), ids.size(), i));
    ids.push_back(i);
  }
  return total + std::log(score_ids(ids.data(), ids.size(), id(kEos)));
}

std::vector<std::tuple<int, TokenSeq, std::int64_t>> NGramLM::entries() const {
  std::vector<std::tuple<int, TokenSeq, std::int64_t>> out;
  out.reserve(counts_.size());
  for (const auto& [key, c] : counts_) {
    TokenSeq words;
    for (WordId i : key) words.push_back(words_[i]);
    out.emplace_back(static_cast<int>(key.size()), std::move(words), c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void NGramLM::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write language model " + path.string());
  for (const auto& [n, words, c] : entries()) out << n << '\t' << textproc::join(words) << '\t' << c << '\n';
}

NGramLM NGramLM::load(const std::filesystem::path& path, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must be in (0, 1]");
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read language model " + path.string());
  NGramLM lm;
  lm.alpha_ = alpha;
  lm.order_ = 0;
  lm.intern(std::string(kBos));
  lm.intern(std::string(kEos));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string n_str, ngram, c_str, extra;
    if (!std::getline(fields, n_str, '\t') || !std::getline(fields, ngram, '\t') ||
        !std::getline(fields, c_str, '\t') || std::getline(fields, extra, '\t')) {
      throw FormatError(path.string(), lineno, "expected n<TAB>ngram<TAB>count");
    }
    int n = 0;
    std::int64_t c = 0;
    try {
      n = std::stoi(n_str);
      c = std::stoll(c_str);
    } catch (const std::exception&) {
      throw FormatError(path.string(), lineno, "bad number");
    }
    std::u32string key;
    std::istringstream words(ngram);
    std::string w;
    while (words >> w) key.push_back(lm.intern(w));
    if (n < 1 || static_cast<int>(key.size()) != n || c < 1) {
      throw FormatError(path.string(), lineno, "inconsistent n-gram entry");
    }
    lm.counts_[key] = c;
    lm.order_ = std::max(lm.order_, n);
  }
  if (lm.counts_.empty()) throw FormatError(path.string(), 0, "empty language model");
  lm.finalize();
  return lm;
}

}  // namespace lyricbench::smt
