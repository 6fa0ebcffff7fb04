#include "lyricbench/agreement.h"

#include <gtest/gtest.h>

#include <random>

#include "lyricbench/error.h"
#include "test_util.h"

namespace lyricbench::agreement {
namespace {

TEST(FleissKappa, Fixtures) {
  EXPECT_NEAR(fleiss_kappa(RatingMatrix({{2, 1}, {1, 2}})), -1.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(fleiss_kappa(RatingMatrix({{3, 0}, {0, 3}})), 1.0);
  EXPECT_DOUBLE_EQ(fleiss_kappa(RatingMatrix({{0, 4, 0}, {0, 0, 4}, {4, 0, 0}})), 1.0);
}

TEST(FleissKappa, ClassicTextbookTable) {
  // 10 items, 14 raters, 5 categories; kappa = 0.20993.
  RatingMatrix m({{0, 0, 0, 0, 14},
                  {0, 2, 6, 4, 2},
                  {0, 0, 3, 5, 6},
                  {0, 3, 9, 2, 0},
                  {2, 2, 8, 1, 1},
                  {7, 7, 0, 0, 0},
                  {3, 2, 6, 3, 0},
                  {2, 5, 3, 2, 2},
                  {6, 5, 2, 1, 0},
                  {0, 2, 2, 3, 7}});
  EXPECT_NEAR(fleiss_kappa(m), 0.20993, 1e-5);
}

TEST(FleissKappa, Errors) {
  EXPECT_THROW(fleiss_kappa(RatingMatrix({{3, 0}, {3, 0}})), InvalidArgument);
  EXPECT_THROW(RatingMatrix({{2, 1}, {1, 1}}), InvalidArgument);
  EXPECT_THROW(RatingMatrix({{2, 1}, {1, 2, 0}}), InvalidArgument);
  EXPECT_THROW(RatingMatrix({{-1, 4}, {1, 2}}), InvalidArgument);
  EXPECT_THROW(RatingMatrix({}), InvalidArgument);
  EXPECT_THROW(fleiss_kappa(RatingMatrix({{2, 1}})), InvalidArgument);
  EXPECT_THROW(fleiss_kappa(RatingMatrix({{1, 0}, {0, 1}})), InvalidArgument);
}

TEST(FleissKappa, BoundedOnRandomMatrices) {
  std::mt19937 rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    const int items = 2 + static_cast<int>(rng() % 8), raters = 2 + static_cast<int>(rng() % 5);
    const int k = 2 + static_cast<int>(rng() % 4);
    std::vector<std::vector<int>> ratings(items);
    for (auto& item : ratings) {
      for (int r = 0; r < raters; ++r) item.push_back(1 + static_cast<int>(rng() % k));
    }
    auto m = RatingMatrix::from_ratings(ratings, k);
    bool concentrated = true, single = true;
    const int first = ratings[0][0];
    for (const auto& item : ratings) {
      for (int r : item) {
        concentrated = concentrated && r == item[0];
        single = single && r == first;
      }
    }
    if (single) {
      EXPECT_THROW(fleiss_kappa(m), InvalidArgument);
      continue;
    }
    const double kappa = fleiss_kappa(m);
    EXPECT_GE(kappa, -1.0);
    EXPECT_LE(kappa, 1.0 + 1e-12);
    EXPECT_EQ(std::abs(kappa - 1.0) < 1e-12, concentrated);
  }
}

TEST(Pearson, Fixtures) {
  const std::vector<double> x{1, 2, 3}, y{1, 3, 2};
  EXPECT_EQ(pearson(x, y), 0.5);
  const std::vector<double> a{0.5, 1.5, 4, 7};
  std::vector<double> lin, neg;
  for (double v : a) {
    lin.push_back(2 * v + 1);
    neg.push_back(-v);
  }
  EXPECT_NEAR(pearson(a, lin), 1.0, 1e-15);
  EXPECT_NEAR(pearson(a, neg), -1.0, 1e-15);
  EXPECT_NEAR(pearson(a, a), 1.0, 1e-15);
}

TEST(Pearson, AffineInvariance) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(3 + rng() % 20), y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = u(rng);
      y[i] = u(rng);
    }
    const double a = std::abs(u(rng)) + 0.1, b = u(rng);
    std::vector<double> ax(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) ax[i] = a * x[i] + b;
    EXPECT_LE(std::abs(pearson(ax, y) - pearson(x, y)), 1e-12);
    EXPECT_LE(std::abs(pearson(x, ax) - 1.0), 1e-12);
  }
}

TEST(Pearson, Errors) {
  const std::vector<double> x{1, 2, 3}, c{2, 2, 2}, shorter{1, 2}, one{1};
  EXPECT_THROW(pearson(x, shorter), InvalidArgument);
  EXPECT_THROW(pearson(x, c), InvalidArgument);
  EXPECT_THROW(pearson(one, one), InvalidArgument);
}

TEST(MeanRatings, PerItem) {
  auto m = mean_ratings({{3, 4, 5}, {2}, {1, 2}});
  EXPECT_EQ(m, (std::vector<double>{4.0, 2.0, 1.5}));
  EXPECT_THROW(mean_ratings({{1}, {}}), InvalidArgument);
}

TEST(RatingsFile, KappasAndCorrelation) {
  testing::TempDir dir;
  testing::write_file(dir.path() / "r.csv",
                      "item_id,rater_id,fluency,information\n"
                      "i1,a,5,4\ni1,b,5,4\ni1,c,4,4\n"
                      "i2,a,2,1\ni2,b,2,2\ni2,c,2,1\n"
                      "i3,a,3,3\ni3,b,4,3\ni3,c,3,5\n");
  auto ratings = load_ratings(dir.path() / "r.csv");
  ASSERT_EQ(ratings.size(), 9u);
  auto k = rating_kappas(ratings);
  auto flu = RatingMatrix::from_ratings({{5, 5, 4}, {2, 2, 2}, {3, 4, 3}});
  EXPECT_DOUBLE_EQ(k.fluency, fleiss_kappa(flu));

  testing::write_file(dir.path() / "s.tsv", "item_id\tbleu\tsari\ni1\t30\t10\ni2\t10\t30\ni3\t20\t20\nzz\t1\t1\n");
  auto scores = load_scores(dir.path() / "s.tsv");
  auto corr = correlate(ratings, scores);
  ASSERT_EQ(corr.size(), 2u);
  EXPECT_EQ(corr[0].metric, "bleu");
  EXPECT_EQ(corr[0].items, 3u);
  const std::vector<double> bleu{30, 10, 20}, flu_mean{14.0 / 3, 2.0, 10.0 / 3};
  EXPECT_DOUBLE_EQ(corr[0].fluency, pearson(bleu, flu_mean));
  EXPECT_NEAR(corr[1].fluency, -corr[0].fluency, 1e-12);
}

TEST(RatingsFile, Malformed) {
  testing::TempDir dir;
  testing::write_file(dir.path() / "a.csv", "item,rater,f,i\n");
  EXPECT_THROW(load_ratings(dir.path() / "a.csv"), FormatError);
  testing::write_file(dir.path() / "b.csv", "item_id,rater_id,fluency,information\ni1,a,6,1\n");
  EXPECT_THROW(load_ratings(dir.path() / "b.csv"), FormatError);
  testing::write_file(dir.path() / "c.csv", "item_id,rater_id,fluency,information\ni1,a,3\n");
  try {
    load_ratings(dir.path() / "c.csv");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  testing::write_file(dir.path() / "s.tsv", "item_id\tbleu\ni1\tx\n");
  EXPECT_THROW(load_scores(dir.path() / "s.tsv"), FormatError);
}

}  // namespace
}  // namespace lyricbench::agreement
