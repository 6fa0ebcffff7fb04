#include "lyricbench/textproc.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <utility>

#include "lyricbench/error.h"

namespace lyricbench::textproc {

int NGramBag::total() const {
  int sum = 0;
  for (const auto& [gram, n] : counts) sum += n;
  return sum;
}

int NGramBag::count(const NGram& gram) const {
  auto it = counts.find(gram);
  return it == counts.end() ? 0 : it->second;
}

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

namespace {

bool is_punct(char c) {
  return c != '\'' && std::ispunct(static_cast<unsigned char>(c)) != 0;
}

void emit_chunk(std::string_view chunk, TokenSeq& out) {
  std::size_t begin = 0;
  std::size_t end = chunk.size();
  while (begin < end && is_punct(chunk[begin])) ++begin;
  while (end > begin && is_punct(chunk[end - 1])) --end;
  for (std::size_t i = 0; i < begin; ++i) out.emplace_back(1, chunk[i]);
  if (begin < end) {
    std::string word(chunk.substr(begin, end - begin));
    for (char& c : word) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    out.push_back(std::move(word));
  }
  for (std::size_t i = end; i < chunk.size(); ++i) out.emplace_back(1, chunk[i]);
}

}  // namespace

TokenSeq tokenize(std::string_view text) {
  TokenSeq out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) emit_chunk(text.substr(start, i - start), out);
  }
  return out;
}

Tokenizer default_tokenizer() {
  return [](std::string_view text) { return tokenize(text); };
}

NGramBag ngrams(const TokenSeq& seq, int n) {
  if (n < 1) throw InvalidArgument("ngrams: order must be >= 1, got " + std::to_string(n));
  NGramBag bag;
  bag.order = n;
  const auto len = static_cast<int>(seq.size());
  for (int i = 0; i + n <= len; ++i) {
    ++bag.counts[NGram(seq.begin() + i, seq.begin() + i + n)];
  }
  return bag;
}

std::string join(const TokenSeq& seq, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i > 0) out += sep;
    out += seq[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Porter stemmer

namespace {

class PorterWord {
 public:
  explicit PorterWord(std::string w) : b_(std::move(w)) {}

  std::string take() { return std::move(b_); }

  void step1ab() {
    if (ends("sses")) {
      chop(2);
    } else if (ends("ies")) {
      chop(2);
    } else if (ends("ss")) {
      // unchanged
    } else if (ends("s")) {
      chop(1);
    }

    if (ends("eed")) {
      if (measure(b_.size() - 3) > 0) chop(1);
      return;
    }
    bool stripped = false;
    if (ends("ed") && has_vowel(b_.size() - 2)) {
      chop(2);
      stripped = true;
    } else if (ends("ing") && has_vowel(b_.size() - 3)) {
      chop(3);
      stripped = true;
    }
    if (!stripped) return;
    if (ends("at") || ends("bl") || ends("iz")) {
      b_ += 'e';
    } else if (double_consonant(b_.size())) {
      char last = b_.back();
      if (last != 'l' && last != 's' && last != 'z') chop(1);
    } else if (measure(b_.size()) == 1 && cvc(b_.size())) {
      b_ += 'e';
    }
  }

  void step1c() {
    if (ends("y") && has_vowel(b_.size() - 1)) b_.back() = 'i';
  }

  void step2() {
    static constexpr std::array<std::pair<std::string_view, std::string_view>, 20> kRules{{
        {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},   {"anci", "ance"},
        {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},     {"entli", "ent"},
        {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
        {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"}, {"fulness", "ful"},
        {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},   {"biliti", "ble"},
    }};
    apply_longest(kRules, 0);
  }

  void step3() {
    static constexpr std::array<std::pair<std::string_view, std::string_view>, 7> kRules{{
        {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
        {"ical", "ic"},  {"ful", ""},   {"ness", ""},
    }};
    apply_longest(kRules, 0);
  }

  void step4() {
    static constexpr std::array<std::string_view, 19> kSuffixes{
        "al",  "ance", "ence", "er",  "ic",  "able", "ible", "ant", "ement", "ment",
        "ent", "ion",  "ou",   "ism", "ate", "iti",  "ous",  "ive", "ize"};
    std::string_view best;
    for (auto s : kSuffixes) {
      if (s.size() > best.size() && ends(s)) best = s;
    }
    if (best.empty()) return;
    std::size_t stem_len = b_.size() - best.size();
    if (best == "ion") {
      if (stem_len == 0) return;
      char c = b_[stem_len - 1];
      if (c != 's' && c != 't') return;
    }
    if (measure(stem_len) > 1) b_.resize(stem_len);
  }

  void step5() {
    if (ends("e")) {
      std::size_t stem_len = b_.size() - 1;
      int m = measure(stem_len);
      if (m > 1 || (m == 1 && !cvc(stem_len))) b_.resize(stem_len);
    }
    if (ends("ll") && measure(b_.size()) > 1) chop(1);
  }

 private:
  template <std::size_t N>
  void apply_longest(const std::array<std::pair<std::string_view, std::string_view>, N>& rules,
                     int min_measure) {
    const std::pair<std::string_view, std::string_view>* best = nullptr;
    for (const auto& rule : rules) {
      if (ends(rule.first) && (best == nullptr || rule.first.size() > best->first.size())) {
        best = &rule;
      }
    }
    if (best == nullptr) return;
    std::size_t stem_len = b_.size() - best->first.size();
    if (measure(stem_len) > min_measure) {
      b_.resize(stem_len);
      b_ += best->second;
    }
  }

  bool ends(std::string_view suffix) const {
    return b_.size() >= suffix.size() &&
           std::string_view(b_).substr(b_.size() - suffix.size()) == suffix;
  }

  void chop(std::size_t n) { b_.resize(b_.size() - n); }

  bool consonant(std::size_t i) const {
    switch (b_[i]) {
      case 'a':
      case 'e':
      case 'i':
      case 'o':
      case 'u':
        return false;
      case 'y':
        return i == 0 || !consonant(i - 1);
      default:
        return true;
    }
  }

  // m in [C](VC)^m[V] over the prefix of length len.
  int measure(std::size_t len) const {
    int m = 0;
    std::size_t i = 0;
    while (i < len && consonant(i)) ++i;
    while (i < len) {
      while (i < len && !consonant(i)) ++i;
      if (i >= len) break;
      while (i < len && consonant(i)) ++i;
      ++m;
    }
    return m;
  }

  bool has_vowel(std::size_t len) const {
    for (std::size_t i = 0; i < len; ++i) {
      if (!consonant(i)) return true;
    }
    return false;
  }

  bool double_consonant(std::size_t len) const {
    return len >= 2 && b_[len - 1] == b_[len - 2] && consonant(len - 1);
  }

  // Prefix ends consonant-vowel-consonant and the last consonant is not w, x or y.
  bool cvc(std::size_t len) const {
    if (len < 3) return false;
    if (!consonant(len - 1) || consonant(len - 2) || !consonant(len - 3)) return false;
    char c = b_[len - 1];
    return c != 'w' && c != 'x' && c != 'y';
  }

  std::string b_;
};

}  // namespace

std::string stem(std::string_view token) {
  if (token.size() <= 2) return std::string(token);
  for (char c : token) {
    if (c < 'a' || c > 'z') return std::string(token);
  }
  PorterWord w{std::string(token)};
  w.step1ab();
  w.step1c();
  w.step2();
  w.step3();
  w.step4();
  w.step5();
  return w.take();
}

}  // namespace lyricbench::textproc
