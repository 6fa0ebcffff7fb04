#include "lyricbench/metrics.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "lyricbench/error.h"
#include "metric_oracles.h"
#include "test_util.h"

namespace lyricbench::metrics {
namespace {

EvalInstance inst(TokenSeq source, TokenSeq candidate, std::vector<TokenSeq> refs) {
  return EvalInstance{std::move(source), std::move(candidate), std::move(refs)};
}

TEST(BleuTest, PerfectMatch) {
  std::vector<EvalInstance> v{inst({"x"}, {"the", "cat", "sat", "on", "the", "mat"},
                                   {{"the", "cat", "sat", "on", "the", "mat"}}),
                              inst({"y"}, {"a", "b"}, {{"a", "b"}})};
  EXPECT_DOUBLE_EQ(bleu(v), 100.0);
}

TEST(BleuTest, ShortOrdersSkippedWithBrevityPenalty) {
  std::vector<EvalInstance> v{inst({"x"}, {"the", "cat", "sat"}, {{"the", "cat", "sat", "down"}})};
  EXPECT_NEAR(bleu(v), 71.65, 0.01);
  EXPECT_NEAR(bleu(v), 100.0 * std::exp(1.0 - 4.0 / 3.0), 1e-12);
}

TEST(BleuTest, ZeroOverlapIsEpsilonFloored) {
  std::vector<EvalInstance> v{inst({"q"}, {"x", "y", "z"}, {{"a", "b", "c"}})};
  EXPECT_NEAR(bleu(v), 0.0, 1e-6);
  EXPECT_GT(bleu(v), 0.0);
}

TEST(BleuTest, ClosestReferenceTiesToShorter) {
  // Candidate of length 3; references of length 2 and 4 are equally close.
  BleuStats s = bleu_stats({"a", "b", "c"}, std::vector<TokenSeq>{{"a", "b", "c", "d"}, {"a", "b"}}, 4);
  EXPECT_EQ(s.reference_length, 2);
  EXPECT_EQ(s.matches[0], 3);
  EXPECT_EQ(s.totals[3], 0);
}

TEST(BleuTest, ClippedCounts) {
  BleuStats s = bleu_stats({"the", "the", "the"}, std::vector<TokenSeq>{{"the", "cat"}, {"the", "the", "dog"}}, 2);
  EXPECT_EQ(s.matches[0], 2);
  EXPECT_EQ(s.matches[1], 1);
}

TEST(BleuTest, EmptyCandidateContributesZeroCounts) {
  std::vector<EvalInstance> v{inst({"x"}, {}, {{"a", "b"}}), inst({"x"}, {"a", "b"}, {{"a", "b"}})};
  // c = 2, r = 4: perfect precision, brevity penalty only.
  EXPECT_NEAR(bleu(v), 100.0 * std::exp(1.0 - 2.0), 1e-12);
  std::vector<EvalInstance> only_empty{inst({"x"}, {}, {{"a"}})};
  EXPECT_EQ(bleu(only_empty), 0.0);
}

TEST(BleuTest, Errors) {
  EXPECT_THROW(bleu(std::vector<EvalInstance>{}), InvalidArgument);
  EXPECT_THROW(bleu(std::vector<EvalInstance>{inst({"a"}, {"a"}, {})}), InvalidArgument);
}

TEST(IbleuTest, FormulaSubstitution) {
  EXPECT_DOUBLE_EQ(combine_ibleu(50.0, 30.0, 0.9), 42.0);
}

TEST(IbleuTest, Extremes) {
  std::vector<EvalInstance> like_ref{inst({"p", "q", "r"}, {"a", "b", "c"}, {{"a", "b", "c"}})};
  EXPECT_NEAR(ibleu(like_ref), 90.0, 1e-6);
  std::vector<EvalInstance> like_src{inst({"a", "b", "c"}, {"a", "b", "c"}, {{"p", "q", "r"}})};
  EXPECT_NEAR(ibleu(like_src), -10.0, 1e-6);
}

TEST(IbleuTest, LinearInIndependentBleus) {
  auto v = oracle::random_instances(5, 30);
  std::vector<EvalInstance> vs_src = v;
  for (auto& i : vs_src) i.references = {i.source};
  EXPECT_EQ(ibleu(v), 0.9 * bleu(v) - (1.0 - 0.9) * bleu(vs_src));
}

TEST(MeteorTest, NoOverlap) {
  EXPECT_EQ(meteor_sentence({"x", "y"}, {"a", "b"}), 0.0);
}

TEST(MeteorTest, HandComputedFragment) {
  std::vector<EvalInstance> v{inst({"s"}, {"the", "cat"}, {{"the", "cat", "sat"}})};
  EXPECT_NEAR(meteor(v), 64.66, 0.01);
  const double f = (2.0 / 3.0) / (0.9 + 0.1 * 2.0 / 3.0);
  EXPECT_NEAR(meteor(v), 100.0 * f * (1 - 0.0625), 1e-9);
}

TEST(MeteorTest, IdenticalFourTokens) {
  TokenSeq s{"a", "b", "c", "d"};
  EXPECT_NEAR(meteor_sentence(s, s), 1.0 - 0.5 * std::pow(0.25, 3), 1e-12);
  std::vector<EvalInstance> v{inst({"q"}, s, {s})};
  EXPECT_NEAR(meteor(v), 99.22, 0.01);
}

TEST(MeteorTest, StemAndSynonymStages) {
  SynonymLexicon syns;
  syns.add_set({"money", "cash"});
  auto a = meteor_align({"he", "runs", "for", "cash"}, {"he", "running", "for", "money"}, &syns);
  EXPECT_EQ(a.matches, 4);
  EXPECT_EQ(a.chunks, 1);
  auto no_syn = meteor_align({"he", "runs", "for", "cash"}, {"he", "running", "for", "money"});
  EXPECT_EQ(no_syn.matches, 3);
}

TEST(MeteorTest, PrefersFewerChunks) {
  // Greedy left-to-right would match the first "the" and break the run.
  auto a = meteor_align({"the", "cat", "the", "dog"}, {"the", "dog"});
  EXPECT_EQ(a.matches, 2);
  EXPECT_EQ(a.chunks, 1);
  EXPECT_EQ(a.ref_of, (std::vector<int>{-1, -1, 0, 1}));
}

TEST(MeteorTest, BestReferenceWins) {
  std::vector<EvalInstance> v{inst({"s"}, {"a", "b"}, {{"x"}, {"a", "b"}})};
  EXPECT_NEAR(meteor(v), 100.0 * (1 - 0.5 * std::pow(0.5, 3)), 1e-9);
}

TEST(SariTest, KeepWhenReferenceRewrites) {
  std::vector<EvalInstance> v{inst({"a"}, {"a"}, {{"b"}})};
  EXPECT_NEAR(sari(v), 33.33, 0.01);
  EXPECT_NEAR(sari(v), 100.0 / 3.0, 1e-12);
}

TEST(SariTest, CandidateEqualsReference) {
  std::vector<EvalInstance> v{inst({"the", "kid", "wants", "cabbage"}, {"he", "wants", "money"},
                                   {{"he", "wants", "money"}})};
  EXPECT_DOUBLE_EQ(sari(v), 100.0);
}

TEST(SariTest, NothingToDo) {
  TokenSeq s{"a", "b", "c"};
  std::vector<EvalInstance> v{inst(s, s, {s})};
  EXPECT_DOUBLE_EQ(sari(v), 100.0);
}

TEST(SariTest, MultipleReferencesAreWeighted) {
  // Unigrams only: S={a,b}, C={a,c}; refs {a,c} and {b,c}.
  double got = sari_sentence({"a", "b"}, {"a", "c"}, std::vector<TokenSeq>{{"a", "c"}, {"b", "c"}}, 1);
  // keep: sys {a}, good 1/2 -> P=.5; ref keep mass r(a)+r(b)=1 -> R=.5; F=.5
  // add: sys {c}, good 1 -> P=1; ref add mass r(c)=1 -> R=1; F=1
  // del: sys {b}, good 1 - r(b) = .5 -> P=.5
  EXPECT_NEAR(got, (0.5 + 1.0 + 0.5) / 3.0, 1e-12);
}

TEST(LengthRatioTest, Examples) {
  TokenSeq ten(10, "w");
  TokenSeq twenty(20, "w");
  EXPECT_DOUBLE_EQ(length_ratio(std::vector<EvalInstance>{inst(ten, twenty, {ten})}), 2.0);
  EXPECT_DOUBLE_EQ(length_ratio(std::vector<EvalInstance>{inst(ten, ten, {ten})}), 1.0);
  EXPECT_THROW(length_ratio(std::vector<EvalInstance>{inst({}, ten, {ten})}), InvalidArgument);
}

TEST(ProfanityTest, Examples) {
  WordList lex{"damn"};
  TokenSeq cand{"damn", "b", "c", "d", "e", "f", "g", "h", "i", "j"};
  EXPECT_DOUBLE_EQ(profanity_rate(std::vector<EvalInstance>{inst({"x"}, cand, {{"x"}})}, lex), 0.1);
  EXPECT_DOUBLE_EQ(profanity_rate(std::vector<EvalInstance>{inst({"x"}, {"clean"}, {{"x"}})}, lex), 0.0);
  EXPECT_THROW(profanity_rate(std::vector<EvalInstance>{}, WordList{}), InvalidArgument);
}

TEST(ProfanityTest, BundledListLoads) {
  WordList lex = load_word_list(std::string(LYRICBENCH_DATA) + "/profanity.txt");
  EXPECT_GT(lex.size(), 20u);
  EXPECT_EQ(lex.count("#"), 0u);
}

TEST(ReportTest, IdentityCorpus) {
  std::vector<EvalInstance> v{inst({"i", "got", "cabbage"}, {"he", "has", "money"}, {{"he", "has", "money"}}),
                              inst({"my", "whip"}, {"his", "car", "is", "fast"}, {{"his", "car", "is", "fast"}})};
  MetricReport r = build_report("sys", v, MetricConfig{}, WordList{"damn"});
  EXPECT_DOUBLE_EQ(*r.bleu, 100.0);
  EXPECT_LE(*r.ibleu, 90.0 + 1e-9);
  EXPECT_DOUBLE_EQ(*r.sari, 100.0);
  EXPECT_THROW(build_report("sys", std::vector<EvalInstance>{}, MetricConfig{}, WordList{"x"}),
               InvalidArgument);
}

TEST(ReportTest, RowMatchesComponentsAndFormats) {
  auto v = oracle::random_instances(99, 40);
  WordList lex{"cat", "dog"};
  MetricConfig cfg;
  MetricReport r = build_report("smt", v, cfg, lex);
  EXPECT_EQ(*r.bleu, bleu(v, cfg));
  EXPECT_EQ(*r.ibleu, ibleu(v, cfg));
  EXPECT_EQ(*r.meteor, meteor(v, cfg));
  EXPECT_EQ(*r.sari, sari(v, cfg));
  EXPECT_EQ(r.length_ratio, length_ratio(v));
  EXPECT_EQ(r.profanity_per_token, profanity_rate(v, lex));

  MetricReport human = build_reference_report("human", v, lex);
  EXPECT_FALSE(human.bleu.has_value());
  std::string row = format_report_row(human);
  EXPECT_EQ(row.substr(0, 10), "human\t\t\t\t\t");
  EXPECT_EQ(report_header(), "system\tbleu\tibleu\tmeteor\tsari\tlength_ratio\tprofanity_per_token");
}

TEST(MetricPropertyTest, MatchBruteForceOracles) {
  auto v = oracle::random_instances(2024, 100);
  SynonymLexicon syns = oracle::random_synonyms();
  for (const auto& i : v) {
    std::vector<EvalInstance> one{i};
    ASSERT_NEAR(bleu(one), oracle::bleu(one), 1e-9);
    ASSERT_NEAR(sari(one), oracle::sari(one), 1e-9);
    ASSERT_NEAR(meteor(one, MetricConfig{}, &syns), oracle::meteor(one, &syns), 1e-9);
  }
  EXPECT_NEAR(bleu(v), oracle::bleu(v), 1e-9);
  EXPECT_NEAR(ibleu(v), oracle::ibleu(v), 1e-9);
  EXPECT_NEAR(sari(v), oracle::sari(v), 1e-9);
  EXPECT_NEAR(meteor(v, MetricConfig{}, &syns), oracle::meteor(v, &syns), 1e-9);
}

TEST(MetricPropertyTest, RangesAndReferencePermutation) {
  auto v = oracle::random_instances(77, 100);
  SynonymLexicon syns = oracle::random_synonyms();
  const double b = bleu(v);
  const double m = meteor(v, MetricConfig{}, &syns);
  const double s = sari(v);
  const double ib = ibleu(v);
  for (double x : {b, m, s}) {
    EXPECT_GE(x, 0.0);
    EXPECT_LE(x, 100.0);
  }
  EXPECT_GE(ib, -10.0);
  EXPECT_LE(ib, 90.0);
  auto shuffled = v;
  for (auto& i : shuffled) std::reverse(i.references.begin(), i.references.end());
  EXPECT_EQ(bleu(shuffled), b);
  EXPECT_EQ(meteor(shuffled, MetricConfig{}, &syns), m);
  EXPECT_EQ(sari(shuffled), s);
}

TEST(MetricPropertyTest, IdentityWithSoleReference) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 50; ++t) {
    TokenSeq src = oracle::random_seq(rng, 1, 12);
    TokenSeq ref = oracle::random_seq(rng, 1, 12);
    std::vector<EvalInstance> v{inst(src, ref, {ref})};
    EXPECT_DOUBLE_EQ(bleu(v), 100.0);
    EXPECT_DOUBLE_EQ(sari(v), 100.0);
    const double m = static_cast<double>(ref.size());
    EXPECT_NEAR(meteor(v), 100.0 * (1 - 0.5 * std::pow(1.0 / m, 3.0)), 1e-9);
  }
}

TEST(MetricPropertyTest, Deterministic) {
  auto v = oracle::random_instances(3, 50);
  EXPECT_EQ(bleu(v), bleu(v));
  EXPECT_EQ(meteor(v), meteor(v));
  EXPECT_EQ(sari(v), sari(v));
}

}  // namespace
}  // namespace lyricbench::metrics
