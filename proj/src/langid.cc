#include "lyricbench/langid.h"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <utility>

#include "langid_samples.h"
#include "lyricbench/error.h"

namespace lyricbench::langid {
namespace {

bool is_word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '\'' || c >= 0x80;
}

}  // namespace

LanguageProfile LanguageProfile::from_text(std::string_view text, std::size_t max_size) {
  std::map<std::string, long, std::less<>> counts;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
    std::string word = "_";
    while (i < text.size() && is_word_byte(static_cast<unsigned char>(text[i]))) {
      char c = text[i++];
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
      word += c;
    }
    if (word.size() == 1) continue;
    word += '_';
    for (std::size_t k = 0; k + 3 <= word.size(); ++k) ++counts[word.substr(k, 3)];
  }

  std::vector<std::pair<std::string, long>> sorted(counts.begin(), counts.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (sorted.size() > max_size) sorted.resize(max_size);

  LanguageProfile profile;
  profile.ranked_.reserve(sorted.size());
  for (std::size_t r = 0; r < sorted.size(); ++r) {
    profile.ranked_.push_back(sorted[r].first);
    profile.rank_.emplace(sorted[r].first, r);
  }
  return profile;
}

long LanguageProfile::distance_to(const LanguageProfile& language) const {
  const long penalty = static_cast<long>(language.ranked_.size());
  long total = 0;
  for (std::size_t r = 0; r < ranked_.size(); ++r) {
    auto it = language.rank_.find(ranked_[r]);
    if (it == language.rank_.end()) {
      total += penalty;
    } else {
      total += std::labs(static_cast<long>(r) - static_cast<long>(it->second));
    }
  }
  return total;
}

const ProfileSet& bundled_profiles() {
  static const ProfileSet profiles = [] {
    ProfileSet p;
    p.emplace("de", LanguageProfile::from_text(samples::kGerman));
    p.emplace("en", LanguageProfile::from_text(samples::kEnglish));
    p.emplace("es", LanguageProfile::from_text(samples::kSpanish));
    p.emplace("fr", LanguageProfile::from_text(samples::kFrench));
    return p;
  }();
  return profiles;
}

std::string classify(std::string_view text, const ProfileSet& profiles) {
  if (profiles.empty()) throw InvalidArgument("classify: empty profile set");
  const LanguageProfile doc = LanguageProfile::from_text(text);
  std::string best;
  long best_distance = std::numeric_limits<long>::max();
  for (const auto& [code, profile] : profiles) {
    long d = doc.distance_to(profile);
    if (d < best_distance) {
      best_distance = d;
      best = code;
    }
  }
  return best;
}

}  // namespace lyricbench::langid
