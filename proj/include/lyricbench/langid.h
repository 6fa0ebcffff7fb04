#ifndef LYRICBENCH_LANGID_H
#define LYRICBENCH_LANGID_H

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace lyricbench::langid {

// Character-trigram profile ranked by descending frequency.
class LanguageProfile {
 public:
  static constexpr std::size_t kDefaultSize = 300;

  LanguageProfile() = default;
  static LanguageProfile from_text(std::string_view text, std::size_t max_size = kDefaultSize);

  // Sum of out-of-place rank distances of this (document) profile against a
  // language profile. Trigrams missing from the language profile cost its size.
  long distance_to(const LanguageProfile& language) const;

  const std::vector<std::string>& ranked() const { return ranked_; }
  bool empty() const { return ranked_.empty(); }

 private:
  std::vector<std::string> ranked_;
  std::map<std::string, std::size_t, std::less<>> rank_;
};

// Named profiles. Keys are language codes ("en", "fr", ...).
using ProfileSet = std::map<std::string, LanguageProfile>;

// Profiles for en, fr, es and de built from bundled sample text.
const ProfileSet& bundled_profiles();

// Language code with the smallest distance; ties go to the smaller code.
// Throws InvalidArgument on an empty set.
std::string classify(std::string_view text, const ProfileSet& profiles);

}  // namespace lyricbench::langid

#endif  // LYRICBENCH_LANGID_H
