#ifndef LYRICBENCH_AGREEMENT_H
#define LYRICBENCH_AGREEMENT_H

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lyricbench::agreement {

// Items x categories count matrix; every row sums to the same rater count.
class RatingMatrix {
 public:
  // Throws InvalidArgument on an empty matrix, ragged rows, negative counts
  // or unequal row sums.
  explicit RatingMatrix(std::vector<std::vector<int>> counts);

  // Builds counts from per-item ratings in [min_category, min_category + categories).
  static RatingMatrix from_ratings(const std::vector<std::vector<int>>& ratings, int categories = 5,
                                   int min_category = 1);

  std::size_t items() const { return counts_.size(); }
  std::size_t categories() const { return counts_.front().size(); }
  int raters() const { return raters_; }
  const std::vector<std::vector<int>>& counts() const { return counts_; }

 private:
  std::vector<std::vector<int>> counts_;
  int raters_ = 0;
};

// Fleiss' kappa. Throws InvalidArgument when N < 2, n < 2, or when every
// rating falls in one category (chance agreement 1).
double fleiss_kappa(const RatingMatrix& m);

// Sample Pearson correlation. Throws InvalidArgument on a length mismatch,
// fewer than two points, or a constant argument.
double pearson(std::span<const double> x, std::span<const double> y);

// Arithmetic mean per item. Throws InvalidArgument for an item without ratings.
std::vector<double> mean_ratings(const std::vector<std::vector<double>>& ratings);

struct Rating {
  std::string item_id;
  std::string rater_id;
  int fluency = 0;
  int information = 0;
};

// CSV with header "item_id,rater_id,fluency,information"; scores 1-5.
std::vector<Rating> load_ratings(const std::filesystem::path& path);

struct RatingKappas {
  double fluency = 0;
  double information = 0;
};

// Fleiss' kappa on each 5-point scale, categories treated as nominal.
RatingKappas rating_kappas(const std::vector<Rating>& ratings);

// item_id -> (mean fluency, mean information), sorted by item id.
std::map<std::string, std::pair<double, double>> item_means(const std::vector<Rating>& ratings);

// Per-item metric table: TSV with header "item_id<TAB>metric..." and one row per item.
struct ScoreTable {
  std::vector<std::string> metrics;
  std::map<std::string, std::vector<double>> rows;
};
ScoreTable load_scores(const std::filesystem::path& path);

struct Correlation {
  std::string metric;
  double fluency = 0;
  double information = 0;
  std::size_t items = 0;
};

// Pearson r between each metric column and the mean human ratings over the
// items present in both inputs.
std::vector<Correlation> correlate(const std::vector<Rating>& ratings, const ScoreTable& scores);

}  // namespace lyricbench::agreement

#endif  // LYRICBENCH_AGREEMENT_H
