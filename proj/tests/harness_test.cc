#include "lyricbench/harness.h"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "lyricbench/error.h"
#include "test_util.h"

namespace lyricbench::harness {
namespace {

namespace fs = std::filesystem;
using lyricbench::testing::read_file;
using lyricbench::testing::TempDir;
using lyricbench::testing::write_file;

const fs::path kSynthDir = fs::path(LYRICBENCH_DATA) / "synth";

SynthSpec small_spec(std::size_t n, double fraction, std::uint64_t seed = 3) {
  SynthSpec spec;
  spec.n_pairs = n;
  spec.ci_fraction = fraction;
  spec.seed = seed;
  spec.slang_lexicon = {{"cheddar", "money"}, {"whip", "car"}, {"crib", "house"}};
  spec.templates = {{"I keep my {0} safe", "{who} keeps his {0} safe."},
                    {"My {0} and my {1}", "{who} talks about his {0} and his {1}."}};
  spec.backgrounds = {"This song was recorded in Atlanta.", "The beat samples a soul record."};
  return spec;
}

std::string corpus_bytes(const corpus::Corpus& c, const TempDir& dir, const std::string& name) {
  corpus::save_corpus(c, dir / name);
  return read_file(dir / name);
}

TEST(SynthTest, SameSpecGivesIdenticalBytes) {
  TempDir dir;
  const auto spec = SynthSpec::load(kSynthDir / "synth5k.spec");
  EXPECT_EQ(corpus_bytes(generate_synthetic(spec), dir, "a.jsonl"),
            corpus_bytes(generate_synthetic(spec), dir, "b.jsonl"));
}

TEST(SynthTest, SeedChangesCorpus) {
  TempDir dir;
  EXPECT_NE(corpus_bytes(generate_synthetic(small_spec(50, 0.5, 1)), dir, "a.jsonl"),
            corpus_bytes(generate_synthetic(small_spec(50, 0.5, 2)), dir, "b.jsonl"));
}

TEST(SynthTest, CiCountFollowsFraction) {
  const auto c = generate_synthetic(small_spec(500, 0.35));
  ASSERT_EQ(c.size(), 500u);
  std::size_t ci = 0;
  for (const auto& p : c) {
    EXPECT_NE(p.context_label, corpus::ContextLabel::kUnlabeled);
    ci += p.context_label == corpus::ContextLabel::kCI;
  }
  EXPECT_EQ(ci, 175u);
  EXPECT_DOUBLE_EQ(corpus::estimate_ci_fraction(c), 0.35);
}

TEST(SynthTest, FractionExtremes) {
  for (double f : {0.0, 1.0}) {
    const auto c = generate_synthetic(small_spec(40, f));
    std::size_t ci = 0;
    for (const auto& p : c) ci += p.context_label == corpus::ContextLabel::kCI;
    EXPECT_EQ(ci, static_cast<std::size_t>(40 * f));
  }
}

TEST(SynthTest, SlangMapsThroughLexicon) {
  SynthSpec spec = small_spec(200, 1.0);
  spec.slang_lexicon = {{"cabbage", "money"}};
  spec.templates = {{"I got that {0}", "{who} has the {0}."}};
  const auto c = generate_synthetic(spec);
  for (const auto& p : c) {
    const auto lyric = textproc::tokenize(p.lyric);
    ASSERT_NE(std::find(lyric.begin(), lyric.end(), "cabbage"), lyric.end()) << p.lyric;
    const auto ann = textproc::tokenize(p.annotation);
    EXPECT_NE(std::find(ann.begin(), ann.end(), "money"), ann.end()) << p.annotation;
  }
}

TEST(SynthTest, CiAnnotationsMapEverySlot) {
  const auto spec = SynthSpec::load(kSynthDir / "synth5k.spec");
  const auto c = generate_synthetic(spec);
  std::vector<TokenSeq> references;
  for (const auto& p : c) references.push_back(textproc::tokenize(p.annotation));
  // A CI annotation contains the standard term of every slang word in its lyric.
  corpus::Corpus ci;
  std::vector<TokenSeq> ci_refs;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i].context_label == corpus::ContextLabel::kCI) {
      ci.add(c[i]);
      ci_refs.push_back(references[i]);
    }
  }
  const auto m = slang_mapping(ci, ci_refs, spec.slang_lexicon);
  EXPECT_GT(m.total, ci.size());
  EXPECT_EQ(m.mapped, m.total);
}

TEST(SynthTest, LyricsAreFirstPersonAnnotationsThird) {
  const auto c = generate_synthetic(SynthSpec::load(kSynthDir / "synth5k.spec"));
  for (const auto& p : c) {
    if (p.context_label != corpus::ContextLabel::kCI) continue;
    const auto ann = textproc::tokenize(p.annotation);
    for (const char* w : {"i", "my", "me"}) {
      EXPECT_EQ(std::find(ann.begin(), ann.end(), w), ann.end()) << p.annotation;
    }
  }
}

TEST(SynthTest, Errors) {
  SynthSpec spec = small_spec(10, 0.5);
  spec.slang_lexicon.clear();
  EXPECT_THROW(generate_synthetic(spec), InvalidArgument);
  spec = small_spec(10, 0.5);
  spec.templates.clear();
  EXPECT_THROW(generate_synthetic(spec), InvalidArgument);
  spec = small_spec(10, 1.5);
  EXPECT_THROW(generate_synthetic(spec), InvalidArgument);
  spec = small_spec(10, 0.5);
  spec.backgrounds.clear();
  EXPECT_THROW(generate_synthetic(spec), InvalidArgument);
  spec = small_spec(10, 0.5);
  spec.templates = {{"my {0}", "his {1}"}};
  EXPECT_THROW(generate_synthetic(spec), InvalidArgument);
}

TEST(SynthTest, LoadResolvesRelativePaths) {
  TempDir dir;
  fs::create_directories(dir / "res");
  write_file(dir / "res" / "lex.tsv", "# comment\ncheddar\tmoney\n");
  write_file(dir / "res" / "tpl.txt", "I keep my {0} ||| {who} keeps his {0}.\n");
  write_file(dir / "res" / "bg.txt", "Recorded in Atlanta.\n");
  write_file(dir / "s.spec", "n_pairs = 12\nci_fraction = 0.5\nseed = 9\nlexicon = res/lex.tsv\n"
                             "templates = res/tpl.txt\nbackgrounds = res/bg.txt\n");
  const auto spec = SynthSpec::load(dir / "s.spec");
  EXPECT_EQ(spec.n_pairs, 12u);
  EXPECT_EQ(spec.seed, 9u);
  ASSERT_EQ(spec.slang_lexicon.size(), 1u);
  EXPECT_EQ(spec.slang_lexicon[0].second, "money");
  EXPECT_EQ(spec.backgrounds, std::vector<std::string>{"Recorded in Atlanta."});
}

TEST(SynthTest, LoadErrorsNameTheLine) {
  TempDir dir;
  write_file(dir / "tpl.txt", "ok {0} ||| fine {0}\nbad {0} ||| no slot here\n");
  try {
    load_templates(dir / "tpl.txt");
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  write_file(dir / "lex.tsv", "a\tb\na\tc\n");
  EXPECT_THROW(load_slang_lexicon(dir / "lex.tsv"), FormatError);
  write_file(dir / "s.spec", "n_pairs = 10\ncolour = blue\n");
  EXPECT_THROW(SynthSpec::load(dir / "s.spec"), FormatError);
  write_file(dir / "kv.txt", "just words\n");
  EXPECT_THROW(read_key_values(dir / "kv.txt"), FormatError);
}

TEST(SlangMappingTest, CountsOccurrences) {
  corpus::Corpus test;
  test.add({"a", "s", "my cheddar and my whip", "x", corpus::ContextLabel::kCI});
  test.add({"b", "s", "cheddar cheddar", "x", corpus::ContextLabel::kCI});
  test.add({"c", "s", "nothing here", "x", corpus::ContextLabel::kCI});
  const SlangLexicon lex{{"cheddar", "money"}, {"whip", "nice car"}};
  const std::vector<TokenSeq> hyps{{"his", "money", "and", "car"}, {"money"}, {"money"}};
  const auto m = slang_mapping(test, hyps, lex);
  EXPECT_EQ(m.total, 4u);
  EXPECT_EQ(m.mapped, 3u);  // "nice car" is not a contiguous run of the first hypothesis
  EXPECT_DOUBLE_EQ(m.rate(), 0.75);
  EXPECT_THROW(slang_mapping(test, {}, lex), InvalidArgument);
}

TEST(RunConfigTest, SetAndSerializeRoundTrip) {
  TempDir dir;
  RunConfig cfg;
  cfg.set("synth", "x.spec", dir.path());
  cfg.set("systems", "retrieval, smt");
  cfg.set("test", "30");
  cfg.set("dev", "20");
  cfg.set("seed", "5");
  cfg.set("lm_alpha", "0.25");
  cfg.set("tune", "false");
  cfg.set("retrieval_expanded", "yes");
  EXPECT_EQ(cfg.synth, (dir.path() / "x.spec").lexically_normal());
  EXPECT_EQ(cfg.systems, (std::vector<std::string>{"retrieval", "smt"}));
  EXPECT_TRUE(cfg.retrieval_expanded);
  write_file(dir / "run.conf", cfg.serialize());
  const auto back = RunConfig::load(dir / "run.conf");
  EXPECT_EQ(back.serialize(), cfg.serialize());
  EXPECT_EQ(back.train.lm_alpha, 0.25);
  EXPECT_FALSE(back.tune);
  EXPECT_EQ(back.split.seed, 5u);
}

TEST(RunConfigTest, EveryKeyIsSettable) {
  RunConfig cfg;
  const std::string text = cfg.serialize();
  std::size_t lines = 0;
  for (char c : text) lines += c == '\n';
  EXPECT_EQ(lines, RunConfig::keys().size());
  for (const auto& key : RunConfig::keys()) {
    EXPECT_NE(text.find(key + " = "), std::string::npos) << key;
  }
}

TEST(RunConfigTest, LaterValuesOverride) {
  TempDir dir;
  write_file(dir / "run.conf", "synth = a.spec\ntest = 10\n");
  auto cfg = RunConfig::load(dir / "run.conf");
  EXPECT_EQ(cfg.split.test_size, 10u);
  cfg.set("test", "12");  // what the CLI does with --test
  EXPECT_EQ(cfg.split.test_size, 12u);
}

TEST(RunConfigTest, Errors) {
  RunConfig cfg;
  EXPECT_THROW(cfg.set("colour", "blue"), InvalidArgument);
  EXPECT_THROW(cfg.set("test", "-3"), InvalidArgument);
  EXPECT_THROW(cfg.set("lm_alpha", "abc"), InvalidArgument);
  EXPECT_THROW(cfg.set("tune", "maybe"), InvalidArgument);
  EXPECT_THROW(cfg.validate(), InvalidArgument);  // no corpus
  cfg.set("synth", "/x.spec");
  cfg.validate();
  cfg.set("corpus", "/c.jsonl");
  EXPECT_THROW(cfg.validate(), InvalidArgument);  // both corpus and synth
  cfg.corpus.clear();
  cfg.set("systems", "smt,seq2seq");
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg.set("systems", "smt,smt");
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  TempDir dir;
  write_file(dir / "bad.conf", "test = 3\nbeam = wide\n");
  try {
    RunConfig::load(dir / "bad.conf");
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

// Writes a small synthetic spec next to the bundled resources and a fast config.
RunConfig small_run(const TempDir& dir) {
  write_file(dir / "small.spec", "n_pairs = 400\nci_fraction = 0.35\nseed = 4\nlexicon = " +
                                     (kSynthDir / "lexicon.tsv").string() + "\ntemplates = " +
                                     (kSynthDir / "templates.txt").string() + "\nbackgrounds = " +
                                     (kSynthDir / "backgrounds.txt").string() + "\n");
  RunConfig cfg;
  cfg.set("synth", (dir / "small.spec").string());
  cfg.set("test", "30");
  cfg.set("dev", "20");
  cfg.set("seed", "2");
  cfg.set("mert_iters", "2");
  cfg.set("nbest", "10");
  cfg.set("mert_restarts", "2");
  cfg.set("beam", "20");
  cfg.set("profanity", (fs::path(LYRICBENCH_DATA) / "profanity.txt").string());
  return cfg;
}

std::size_t count_lines(const fs::path& p) {
  const auto text = read_file(p);
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

TEST(PipelineTest, WritesLayoutAndReport) {
  TempDir dir;
  const auto cfg = small_run(dir);
  std::ostringstream log;
  const auto result = run_pipeline(cfg, dir / "out", &log);
  for (const char* f : {"report.tsv", "splits.tsv", "run.conf", "corpus.jsonl", "slang.tsv", "hyp.smt.txt",
                        "hyp.retrieval.txt", "models/smt/phrase-table.txt", "models/smt/weights.tsv",
                        "models/retrieval/index.tsv"}) {
    EXPECT_TRUE(fs::exists(dir / "out" / f)) << f;
  }
  EXPECT_EQ(count_lines(dir / "out" / "hyp.smt.txt"), 30u);
  EXPECT_EQ(count_lines(dir / "out" / "hyp.retrieval.txt"), 30u);
  ASSERT_EQ(result.rows.size(), 3u);
  EXPECT_EQ(result.rows[0].system, "human");
  EXPECT_FALSE(result.rows[0].bleu || result.rows[0].ibleu || result.rows[0].meteor || result.rows[0].sari);
  EXPECT_EQ(result.rows[1].system, "smt");
  EXPECT_EQ(result.rows[2].system, "retrieval");
  for (std::size_t i = 1; i < 3; ++i) {
    const auto& r = result.rows[i];
    ASSERT_TRUE(r.bleu && r.ibleu && r.meteor && r.sari);
    EXPECT_GE(*r.bleu, 0.0);
    EXPECT_LE(*r.bleu, 100.0);
    EXPECT_GE(*r.ibleu, -10.0);
    EXPECT_LE(*r.ibleu, 90.0);
    EXPECT_GE(*r.meteor, 0.0);
    EXPECT_LE(*r.meteor, 100.0);
    EXPECT_GE(*r.sari, 0.0);
    EXPECT_LE(*r.sari, 100.0);
    EXPECT_GE(r.length_ratio, 0.0);
    EXPECT_GE(r.profanity_per_token, 0.0);
    EXPECT_LE(r.profanity_per_token, 1.0);
  }
  EXPECT_EQ(read_file(dir / "out" / "report.tsv"), format_report(result.rows));
  EXPECT_NE(log.str().find("[train smt]"), std::string::npos);
}

TEST(PipelineTest, RerunAndRegenerationAreIdentical) {
  TempDir dir;
  auto cfg = small_run(dir);
  cfg.set("systems", "retrieval,smt");
  run_pipeline(cfg, dir / "a");
  run_pipeline(cfg, dir / "b");
  for (const char* f : {"report.tsv", "hyp.smt.txt", "hyp.retrieval.txt", "splits.tsv", "corpus.jsonl",
                        "models/smt/weights.tsv", "models/smt/phrase-table.txt"}) {
    EXPECT_EQ(read_file(dir / "a" / f), read_file(dir / "b" / f)) << f;
  }
  const auto regen = regenerate_report(dir / "a");
  EXPECT_EQ(format_report(regen.rows), read_file(dir / "a" / "report.tsv"));
  EXPECT_EQ(format_slang(regen.slang), read_file(dir / "a" / "slang.tsv"));
}

TEST(PipelineTest, RegenerationRejectsTruncatedHypotheses) {
  TempDir dir;
  auto cfg = small_run(dir);
  cfg.set("systems", "retrieval");
  run_pipeline(cfg, dir / "out");
  write_file(dir / "out" / "hyp.retrieval.txt", "only one line\n");
  try {
    regenerate_report(dir / "out");
    FAIL() << "expected StageError";
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "evaluate");
  }
}

TEST(PipelineTest, FailuresNameTheStage) {
  TempDir dir;
  auto cfg = small_run(dir);
  cfg.set("test", "1000");
  try {
    run_pipeline(cfg, dir / "a");
    FAIL() << "expected StageError";
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "split");
    EXPECT_EQ(std::string(e.what()).rfind("stage split: ", 0), 0u);
  }
  cfg = small_run(dir);
  cfg.synth.clear();
  cfg.set("corpus", (dir / "missing.jsonl").string());
  try {
    run_pipeline(cfg, dir / "b");
    FAIL() << "expected StageError";
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "ingest");
  }
  cfg = small_run(dir);
  cfg.set("profanity", (dir / "missing.txt").string());
  try {
    run_pipeline(cfg, dir / "c");
    FAIL() << "expected StageError";
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "resources");
  }
  cfg = small_run(dir);
  cfg.systems.clear();
  EXPECT_THROW(run_pipeline(cfg, dir / "d"), StageError);
}

TEST(PipelineTest, RealCorpusInput) {
  TempDir dir;
  corpus::Corpus c = generate_synthetic(SynthSpec::load(small_run(dir).synth));
  corpus::save_corpus(c, dir / "c.jsonl");
  RunConfig cfg = small_run(dir);
  cfg.synth.clear();
  cfg.set("corpus", (dir / "c.jsonl").string());
  cfg.set("systems", "retrieval");
  const auto result = run_pipeline(cfg, dir / "out");
  EXPECT_EQ(result.rows.size(), 2u);
  EXPECT_TRUE(result.slang.empty());
  EXPECT_FALSE(fs::exists(dir / "out" / "slang.tsv"));
}

}  // namespace
}  // namespace lyricbench::harness
