#ifndef LYRICBENCH_TEXTPROC_H
#define LYRICBENCH_TEXTPROC_H

#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace lyricbench {

// Lowercase tokens, no empty tokens, no whitespace inside a token.
using TokenSeq = std::vector<std::string>;
using NGram = std::vector<std::string>;
using Tokenizer = std::function<TokenSeq(std::string_view)>;

namespace textproc {

// Multiset of contiguous n-token windows of one sequence.
struct NGramBag {
  int order = 1;
  std::map<NGram, int> counts;

  // Number of windows counted, with multiplicity.
  int total() const;
  int count(const NGram& gram) const;
};

// Lowercases ASCII letters, splits on whitespace and peels leading and
// trailing punctuation characters into single-character tokens. Apostrophes
// are word characters, so "ridin'" and "g's" stay whole.
TokenSeq tokenize(std::string_view text);

// The default tokenizer as a callable, for APIs parameterized by tokenizer.
Tokenizer default_tokenizer();

// Throws InvalidArgument when n < 1.
NGramBag ngrams(const TokenSeq& seq, int n);

// Original (1980) Porter stemmer. Input is expected lowercase; tokens of
// length <= 2 and tokens with non-letter characters are returned unchanged.
std::string stem(std::string_view token);

std::string join(const TokenSeq& seq, std::string_view sep = " ");

bool is_space(char c);

}  // namespace textproc
}  // namespace lyricbench

#endif  // LYRICBENCH_TEXTPROC_H
