#include "lyricbench/corpus.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>

#include "lyricbench/error.h"
#include "lyricbench/rng.h"

namespace lyricbench::corpus {

using nlohmann::json;

std::string_view to_string(ContextLabel label) {
  switch (label) {
    case ContextLabel::kCI:
      return "CI";
    case ContextLabel::kCS:
      return "CS";
    case ContextLabel::kUnlabeled:
      break;
  }
  return "unlabeled";
}

namespace {

std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && textproc::is_space(s[b])) ++b;
  while (e > b && textproc::is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

}  // namespace

void Corpus::add(AnnotationPair pair) {
  if (trim(pair.lyric).empty()) throw InvalidArgument("pair '" + pair.id + "': empty lyric");
  if (trim(pair.annotation).empty()) {
    throw InvalidArgument("pair '" + pair.id + "': empty annotation");
  }
  if (!ids_.insert(pair.id).second) throw InvalidArgument("duplicate pair id '" + pair.id + "'");
  pairs_.push_back(std::move(pair));
}

bool Corpus::contains(std::string_view id) const { return ids_.count(std::string(id)) > 0; }

// ---------------------------------------------------------------------------
// JSONL

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open corpus file " + path.string());
  Corpus corpus(path.string());
  std::string line;
  std::size_t lineno = 0;
  const std::string name = path.string();
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw FormatError(name, lineno, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw FormatError(name, lineno, "record is not a JSON object");
    auto required = [&](const char* key) -> std::string {
      auto it = obj.find(key);
      if (it == obj.end()) throw FormatError(name, lineno, std::string("missing field '") + key + "'");
      if (!it->is_string()) {
        throw FormatError(name, lineno, std::string("field '") + key + "' is not a string");
      }
      return it->get<std::string>();
    };
    AnnotationPair pair;
    pair.id = required("id");
    pair.lyric = required("lyric");
    pair.annotation = required("annotation");
    if (auto it = obj.find("song_id"); it != obj.end() && !it->is_null()) {
      if (!it->is_string()) throw FormatError(name, lineno, "field 'song_id' is not a string");
      pair.song_id = it->get<std::string>();
    }
    if (auto it = obj.find("context_label"); it != obj.end() && !it->is_null()) {
      const std::string label = it->is_string() ? it->get<std::string>() : std::string();
      if (label == "CI") {
        pair.context_label = ContextLabel::kCI;
      } else if (label == "CS") {
        pair.context_label = ContextLabel::kCS;
      } else {
        throw FormatError(name, lineno, "context_label must be \"CI\", \"CS\" or null");
      }
    }
    try {
      corpus.add(std::move(pair));
    } catch (const InvalidArgument& e) {
      throw FormatError(name, lineno, e.what());
    }
  }
  return corpus;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write corpus file " + path.string());
  for (const auto& p : corpus) {
    json obj;
    obj["id"] = p.id;
    obj["song_id"] = p.song_id;
    obj["lyric"] = p.lyric;
    obj["annotation"] = p.annotation;
    if (p.context_label == ContextLabel::kUnlabeled) {
      obj["context_label"] = nullptr;
    } else {
      obj["context_label"] = std::string(to_string(p.context_label));
    }
    out << obj.dump() << '\n';
  }
}

// ---------------------------------------------------------------------------
// Filters

Corpus filter_english(const Corpus& corpus, const langid::ProfileSet& profiles) {
  if (profiles.empty()) throw InvalidArgument("filter_english: empty profile set");
  if (profiles.count("en") == 0) throw InvalidArgument("filter_english: no English profile");
  Corpus out(corpus.provenance());
  for (const auto& p : corpus) {
    if (langid::classify(p.annotation, profiles) == "en") out.add(p);
  }
  return out;
}

bool is_url_token(std::string_view token) {
  std::string t = lower(token);
  while (!t.empty() && std::string_view("()[]<>\"',;:.!?").find(t.back()) != std::string_view::npos) {
    t.pop_back();
  }
  while (!t.empty() && std::string_view("()[]<>\"'").find(t.front()) != std::string_view::npos) {
    t.erase(t.begin());
  }
  if (t.empty()) return false;
  if (t.rfind("http://", 0) == 0 || t.rfind("https://", 0) == 0 || t.rfind("www.", 0) == 0 ||
      t.rfind("ftp://", 0) == 0) {
    return true;
  }
  // Bare domains such as "example.com/artists".
  static constexpr std::array<std::string_view, 9> kTlds{".com", ".org", ".net", ".edu", ".gov",
                                                         ".io",  ".co",  ".uk",  ".be"};
  std::string host = t.substr(0, t.find('/'));
  for (auto tld : kTlds) {
    if (host.size() > tld.size() && host.compare(host.size() - tld.size(), tld.size(), tld) == 0) {
      return true;
    }
  }
  return false;
}

Corpus strip_link_only(const Corpus& corpus) {
  Corpus out(corpus.provenance());
  for (const auto& p : corpus) {
    std::istringstream words(p.annotation);
    std::string w;
    bool has_text = false;
    while (!has_text && words >> w) {
      if (is_url_token(w)) continue;
      has_text = std::any_of(w.begin(), w.end(), [](char c) {
        return std::isalpha(static_cast<unsigned char>(c)) != 0 || static_cast<unsigned char>(c) >= 0x80;
      });
    }
    if (has_text) out.add(p);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sentences

namespace {

bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }

bool is_abbreviation(std::string_view text, std::size_t dot) {
  static constexpr std::array<std::string_view, 17> kAbbrev{
      "mr.", "mrs.", "ms.", "dr.",  "ft.",   "feat.", "st.", "jr.", "sr.",
      "vs.", "prof.", "no.", "vol.", "etc.", "e.g.",  "i.e.", "mt."};
  std::size_t start = dot;
  while (start > 0 && !textproc::is_space(text[start - 1])) --start;
  std::string word = lower(text.substr(start, dot + 1 - start));
  while (!word.empty() && (word.front() == '(' || word.front() == '"')) word.erase(word.begin());
  return std::find(kAbbrev.begin(), kAbbrev.end(), word) != kAbbrev.end();
}

// Uppercase letter, possibly behind opening quotes or brackets.
bool starts_upper(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size() && (s[i] == '"' || s[i] == '(' || s[i] == '\'')) ++i;
  return i < s.size() && s[i] >= 'A' && s[i] <= 'Z';
}

}  // namespace

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  auto push = [&out](std::string_view s) {
    s = trim(s);
    if (!s.empty()) out.emplace_back(s);
  };
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_terminal(text[i])) {
      ++i;
      continue;
    }
    std::size_t run_end = i;
    while (run_end < text.size() && is_terminal(text[run_end])) ++run_end;
    // Closing quotes and brackets stay with the sentence they close.
    while (run_end < text.size() && (text[run_end] == '"' || text[run_end] == ')')) ++run_end;
    std::size_t next = run_end;
    while (next < text.size() && textproc::is_space(text[next])) ++next;
    bool boundary = false;
    if (next == text.size()) {
      boundary = true;
    } else if (next > run_end && starts_upper(text.substr(next))) {
      boundary = !(text[i] == '.' && run_end == i + 1 && is_abbreviation(text, i));
    }
    if (boundary) {
      push(text.substr(start, run_end - start));
      start = next;
    }
    i = run_end;
  }
  if (start < text.size()) push(text.substr(start));
  return out;
}

Corpus expand_sentences(const Corpus& corpus) {
  Corpus out(corpus.provenance());
  for (const auto& p : corpus) {
    auto sentences = split_sentences(p.annotation);
    for (std::size_t k = 0; k < sentences.size(); ++k) {
      AnnotationPair q = p;
      q.id = p.id + "#" + std::to_string(k);
      q.annotation = std::move(sentences[k]);
      out.add(std::move(q));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Splits

Splits make_splits(const Corpus& corpus, const SplitSpec& spec) {
  if (spec.test_size + spec.dev_size > corpus.size()) {
    throw InvalidArgument("make_splits: test_size + dev_size exceeds corpus size " +
                          std::to_string(corpus.size()));
  }
  std::vector<std::size_t> ci_pool;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (corpus[i].context_label == ContextLabel::kCI) ci_pool.push_back(i);
  }
  if (ci_pool.size() < spec.test_size) {
    throw InvalidArgument("make_splits: only " + std::to_string(ci_pool.size()) +
                          " CI pairs for a test split of " + std::to_string(spec.test_size));
  }

  Rng rng(spec.seed);
  // Partial Fisher-Yates: the first k entries become a uniform sample.
  auto sample = [&rng](std::vector<std::size_t>& pool, std::size_t k) {
    for (std::size_t i = 0; i < k; ++i) {
      std::size_t j = i + rng.below(pool.size() - i);
      std::swap(pool[i], pool[j]);
    }
    std::vector<std::size_t> picked(pool.begin(), pool.begin() + static_cast<long>(k));
    std::sort(picked.begin(), picked.end());
    return picked;
  };

  std::vector<char> taken(corpus.size(), 0);
  auto test_idx = sample(ci_pool, spec.test_size);
  for (auto i : test_idx) taken[i] = 1;

  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (!taken[i]) rest.push_back(i);
  }
  auto dev_idx = sample(rest, spec.dev_size);
  for (auto i : dev_idx) taken[i] = 2;

  Splits s{Corpus(corpus.provenance() + " [test]"), Corpus(corpus.provenance() + " [dev]"),
           Corpus(corpus.provenance() + " [train]")};
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    switch (taken[i]) {
      case 1:
        s.test.add(corpus[i]);
        break;
      case 2:
        s.dev.add(corpus[i]);
        break;
      default:
        s.train.add(corpus[i]);
    }
  }
  return s;
}

void write_split_manifest(const Splits& splits, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write split manifest " + path.string());
  out << "id\tsplit\n";
  for (const auto& p : splits.test) out << p.id << "\ttest\n";
  for (const auto& p : splits.dev) out << p.id << "\tdev\n";
  for (const auto& p : splits.train) out << p.id << "\ttrain\n";
}

Splits read_split_manifest(const Corpus& corpus, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open split manifest " + path.string());
  std::map<std::string, std::string, std::less<>> assignment;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && line == "id\tsplit") continue;
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw FormatError(path.string(), lineno, "expected id<TAB>split");
    std::string split = line.substr(tab + 1);
    if (split != "test" && split != "dev" && split != "train") {
      throw FormatError(path.string(), lineno, "unknown split '" + split + "'");
    }
    if (!assignment.emplace(line.substr(0, tab), split).second) {
      throw FormatError(path.string(), lineno, "id listed twice");
    }
  }
  Splits s;
  for (const auto& p : corpus) {
    auto it = assignment.find(p.id);
    if (it == assignment.end()) continue;
    if (it->second == "test") {
      s.test.add(p);
    } else if (it->second == "dev") {
      s.dev.add(p);
    } else {
      s.train.add(p);
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Statistics

CorpusStats corpus_stats(const Corpus& corpus, const Tokenizer& tokenizer) {
  CorpusStats stats;
  stats.n_pairs = corpus.size();
  if (corpus.empty()) return stats;
  std::unordered_set<std::string> lyric_vocab;
  std::unordered_set<std::string> annot_vocab;
  std::size_t lyric_tokens = 0;
  std::size_t annot_tokens = 0;
  for (const auto& p : corpus) {
    auto l = tokenizer(p.lyric);
    auto a = tokenizer(p.annotation);
    lyric_tokens += l.size();
    annot_tokens += a.size();
    lyric_vocab.insert(l.begin(), l.end());
    annot_vocab.insert(a.begin(), a.end());
  }
  const auto n = static_cast<double>(corpus.size());
  stats.mean_lyric_tokens = static_cast<double>(lyric_tokens) / n;
  stats.mean_annotation_tokens = static_cast<double>(annot_tokens) / n;
  stats.vocab_lyrics = lyric_vocab.size();
  stats.vocab_annotations = annot_vocab.size();
  return stats;
}

double estimate_ci_fraction(const Corpus& sample) {
  if (sample.empty()) throw InvalidArgument("estimate_ci_fraction: empty sample");
  std::size_t ci = 0;
  for (const auto& p : sample) {
    switch (p.context_label) {
      case ContextLabel::kCI:
        ++ci;
        break;
      case ContextLabel::kCS:
        break;
      case ContextLabel::kUnlabeled:
        throw InvalidArgument("estimate_ci_fraction: pair '" + p.id + "' is unlabeled");
    }
  }
  return static_cast<double>(ci) / static_cast<double>(sample.size());
}

}  // namespace lyricbench::corpus
