#include "lyricbench/align.h"

#include <gtest/gtest.h>

#include <random>

#include "lyricbench/error.h"
#include "test_util.h"

namespace lyricbench::align {
namespace {

TokenSeq toks(const std::string& s) { return textproc::tokenize(s); }

std::vector<SentencePair> la_maison() {
  return {{toks("la maison"), toks("the house")}, {toks("la"), toks("the")}};
}

void expect_row_stochastic(const TranslationTable& table) {
  std::set<std::string> sources;
  for (const auto& [s, t, p] : table.entries()) {
    sources.insert(s);
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
  }
  for (const auto& s : sources) EXPECT_NEAR(table.row_sum(s), 1.0, 1e-6) << s;
}

TEST(Model1, HandSteppedIterations) {
  Model1Options opt{1, false};
  auto t1 = train_model1(la_maison(), opt);
  EXPECT_NEAR(t1.prob("la", "the"), 0.75, 1e-12);
  EXPECT_NEAR(t1.prob("la", "house"), 0.25, 1e-12);
  EXPECT_NEAR(t1.prob("maison", "the"), 0.5, 1e-12);
  EXPECT_NEAR(t1.prob("maison", "house"), 0.5, 1e-12);

  opt.iterations = 2;
  auto t2 = train_model1(la_maison(), opt);
  EXPECT_NEAR(t2.prob("la", "the"), 1.6 / (1.6 + 1.0 / 3.0), 1e-12);
  EXPECT_NEAR(t2.prob("la", "house"), (1.0 / 3.0) / (1.6 + 1.0 / 3.0), 1e-12);
  EXPECT_NEAR(t2.prob("maison", "the"), 0.375, 1e-12);
  EXPECT_NEAR(t2.prob("maison", "house"), 0.625, 1e-12);
}

TEST(Model1, ConvergesOnToyCorpus) {
  std::vector<double> ll;
  auto table = train_model1(la_maison(), {20, false}, &ll);
  EXPECT_GE(table.prob("la", "the"), 0.9);
  ASSERT_EQ(ll.size(), 21u);
  for (std::size_t i = 1; i < ll.size(); ++i) EXPECT_GE(ll[i], ll[i - 1] - 1e-9) << i;
  EXPECT_NEAR(ll.back(), model1_log_likelihood(table, la_maison(), false), 1e-9);
}

TEST(Model1, ForcedMassAndSymmetricFixedPoint) {
  auto one = train_model1({{toks("a"), toks("x")}}, {1, false});
  EXPECT_DOUBLE_EQ(one.prob("a", "x"), 1.0);

  for (int iters = 1; iters <= 4; ++iters) {
    auto sym = train_model1({{toks("a b"), toks("x y")}}, {iters, false});
    for (const char* s : {"a", "b"}) {
      for (const char* t : {"x", "y"}) EXPECT_DOUBLE_EQ(sym.prob(s, t), 0.5);
    }
  }
}

TEST(Model1, Errors) {
  EXPECT_THROW(train_model1({}, {}), InvalidArgument);
  EXPECT_THROW(train_model1(la_maison(), {0, true}), InvalidArgument);
}

std::vector<SentencePair> random_pairs(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  const std::vector<std::string> src_vocab{"a", "b", "c", "d", "e", "f"};
  const std::vector<std::string> tgt_vocab{"u", "v", "w", "x", "y", "z", "q"};
  std::vector<SentencePair> pairs;
  for (int k = 0; k < count; ++k) {
    SentencePair p;
    const int ls = 1 + static_cast<int>(rng() % 5);
    const int lt = static_cast<int>(rng() % 6);
    for (int i = 0; i < ls; ++i) p.first.push_back(src_vocab[rng() % src_vocab.size()]);
    for (int j = 0; j < lt; ++j) p.second.push_back(tgt_vocab[rng() % tgt_vocab.size()]);
    pairs.push_back(p);
  }
  return pairs;
}

TEST(Model1, MonotoneAndStochasticOnRandomCorpora) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto pairs = random_pairs(seed, 30);
    for (bool use_null : {false, true}) {
      std::vector<double> ll;
      auto table = train_model1(pairs, {8, use_null}, &ll);
      for (std::size_t i = 1; i < ll.size(); ++i) EXPECT_GE(ll[i], ll[i - 1] - 1e-9);
      expect_row_stochastic(table);
      EXPECT_EQ(use_null, table.has_source(kNullToken));
    }
  }
}

TEST(Model1, Deterministic) {
  auto pairs = random_pairs(99, 40);
  auto a = train_model1(pairs, {5, true});
  auto b = train_model1(pairs, {5, true});
  EXPECT_EQ(a.entries(), b.entries());
}

TEST(Model1, DumpFormat) {
  auto table = train_model1(la_maison(), {2, false});
  testing::TempDir dir;
  auto path = dir.path() / "t.tsv";
  table.dump(path);
  EXPECT_EQ(testing::read_file(path),
            "la\tthe\t0.827586207\n"
            "la\thouse\t0.172413793\n"
            "maison\thouse\t0.625\n"
            "maison\tthe\t0.375\n");
}

TEST(Viterbi, ArgmaxLinks) {
  auto table = train_model1(la_maison(), {20, false});
  auto a = viterbi_align(table, toks("la maison"), toks("the house"), false);
  Alignment expected(2, 2);
  expected.add(0, 0);
  expected.add(1, 1);
  EXPECT_EQ(a, expected);
}

TEST(Viterbi, UnknownAndEmpty) {
  auto table = train_model1(la_maison(), {5, false});
  auto a = viterbi_align(table, toks("la"), toks("zzz the"), false);
  EXPECT_EQ(a.links, (std::set<std::pair<std::size_t, std::size_t>>{{0, 1}}));
  auto empty = viterbi_align(table, toks("la maison"), {}, false);
  EXPECT_TRUE(empty.links.empty());
  EXPECT_EQ(empty.source_length, 2u);
}

TEST(Viterbi, TiesGoLeftAndNullMustWinStrictly) {
  TranslationTable table;
  table.set("a", "x", 0.5);
  table.set("b", "x", 0.5);
  table.set(std::string(kNullToken), "x", 0.5);
  table.set(std::string(kNullToken), "y", 0.9);
  table.set("a", "y", 0.1);
  auto a = viterbi_align(table, toks("a b"), toks("x y"), true);
  EXPECT_EQ(a.links, (std::set<std::pair<std::size_t, std::size_t>>{{0, 0}}));
}

Alignment make(std::size_t ls, std::size_t lt, std::initializer_list<std::pair<std::size_t, std::size_t>> links) {
  Alignment a(ls, lt);
  for (auto [s, t] : links) a.add(s, t);
  return a;
}

TEST(Symmetrize, Fixtures) {
  auto same = make(3, 3, {{0, 1}, {2, 2}});
  EXPECT_EQ(symmetrize(same, same), same);

  EXPECT_EQ(symmetrize(make(2, 2, {{0, 0}}), make(2, 2, {{0, 0}, {1, 1}})), make(2, 2, {{0, 0}, {1, 1}}));

  // (2,0) is far from (0,0) and its target word is already covered.
  EXPECT_EQ(symmetrize(make(3, 2, {{0, 0}}), make(3, 2, {{0, 0}, {2, 0}})), make(3, 2, {{0, 0}}));
}

TEST(Symmetrize, GrowsThenFinalAnd) {
  // (1,0) is a neighbour of (0,0) covering source word 1; (3,3) joins only in the final pass.
  auto fwd = make(4, 4, {{0, 0}, {1, 0}, {3, 3}});
  auto rev = make(4, 4, {{0, 0}, {1, 1}});
  EXPECT_EQ(symmetrize(fwd, rev), make(4, 4, {{0, 0}, {1, 0}, {1, 1}, {3, 3}}));
}

TEST(Symmetrize, BoundedByIntersectionAndUnion) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t ls = 1 + rng() % 6, lt = 1 + rng() % 6;
    Alignment f(ls, lt), r(ls, lt);
    for (std::size_t s = 0; s < ls; ++s) {
      for (std::size_t t = 0; t < lt; ++t) {
        if (rng() % 4 == 0) f.add(s, t);
        if (rng() % 4 == 0) r.add(s, t);
      }
    }
    auto out = symmetrize(f, r);
    for (const auto& l : f.links) {
      if (r.links.count(l)) EXPECT_TRUE(out.links.count(l));
    }
    for (const auto& l : out.links) EXPECT_TRUE(f.links.count(l) || r.links.count(l));
  }
}

TEST(Symmetrize, Errors) {
  EXPECT_THROW(symmetrize(Alignment(2, 2), Alignment(2, 3)), InvalidArgument);
  Alignment a(2, 2);
  EXPECT_THROW(a.add(2, 0), InvalidArgument);
}

TEST(Alignment, Transpose) {
  auto a = make(2, 3, {{0, 2}, {1, 0}});
  EXPECT_EQ(a.transposed(), make(3, 2, {{2, 0}, {0, 1}}));
  EXPECT_EQ(a.transposed().transposed(), a);
}

}  // namespace
}  // namespace lyricbench::align
