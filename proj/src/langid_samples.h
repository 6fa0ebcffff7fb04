#ifndef LYRICBENCH_SRC_LANGID_SAMPLES_H
#define LYRICBENCH_SRC_LANGID_SAMPLES_H

namespace lyricbench::langid::samples {

extern const char* const kEnglish;
extern const char* const kFrench;
extern const char* const kSpanish;
extern const char* const kGerman;

}  // namespace lyricbench::langid::samples

#endif  // LYRICBENCH_SRC_LANGID_SAMPLES_H
