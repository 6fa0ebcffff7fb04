// lyricbench command-line interface.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lyricbench/agreement.h"
#include "lyricbench/corpus.h"
#include "lyricbench/harness.h"
#include "lyricbench/langid.h"
#include "lyricbench/metrics.h"
#include "lyricbench/retrieval.h"
#include "lyricbench/smt.h"

namespace fs = std::filesystem;
using namespace lyricbench;

namespace {

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

void write_lines(const fs::path& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  for (const auto& l : lines) out << l << '\n';
}

std::vector<align::SentencePair> sentence_pairs(const corpus::Corpus& c) {
  std::vector<align::SentencePair> out;
  for (const auto& p : corpus::expand_sentences(c)) {
    auto src = textproc::tokenize(p.lyric), tgt = textproc::tokenize(p.annotation);
    if (!src.empty() && !tgt.empty()) out.emplace_back(std::move(src), std::move(tgt));
  }
  return out;
}

struct DecodeFlags {
  int beam = smt::DecoderOptions{}.beam_size;
  int distortion = smt::DecoderOptions{}.distortion_limit;
  int max_options = smt::DecoderOptions{}.max_options;
  double lm_alpha = 0.4;

  void add(CLI::App* app) {
    app->add_option("--beam", beam, "Stack size")->capture_default_str();
    app->add_option("--distortion", distortion, "Distortion limit")->capture_default_str();
    app->add_option("--max-options", max_options, "Options per source span")->capture_default_str();
    app->add_option("--lm-alpha", lm_alpha, "Backoff factor used when loading the LM")->capture_default_str();
  }
  smt::DecoderOptions options() const { return {beam, distortion, max_options}; }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Automated lyric annotation benchmark"};
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Filter a JSONL corpus");
  std::string ingest_in, ingest_out;
  bool english_only = false, strip_links = false;
  ingest->add_option("--in", ingest_in, "Input JSONL")->required();
  ingest->add_option("--out", ingest_out, "Output JSONL")->required();
  ingest->add_flag("--english-only", english_only, "Keep English annotations only");
  ingest->add_flag("--strip-links", strip_links, "Drop link-only annotations");

  // split
  auto* split = app.add_subcommand("split", "Sample test/dev/train splits");
  std::string split_in, split_out;
  corpus::SplitSpec split_spec;
  split->add_option("--in", split_in, "Input JSONL")->required();
  split->add_option("--out", split_out, "Output directory")->required();
  split->add_option("--test", split_spec.test_size, "Test size (CI pairs)")->capture_default_str();
  split->add_option("--dev", split_spec.dev_size, "Dev size")->capture_default_str();
  split->add_option("--seed", split_spec.seed, "Sampling seed")->capture_default_str();

  // stats
  auto* stats = app.add_subcommand("stats", "Corpus statistics");
  std::string stats_in;
  stats->add_option("--in", stats_in, "Input JSONL")->required();

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score a hypothesis file against a test corpus");
  std::string eval_test, eval_hyp, eval_name, eval_syns, eval_profanity, eval_per_item;
  evaluate->add_option("--test", eval_test, "Test JSONL")->required();
  evaluate->add_option("--hyp", eval_hyp, "One annotation per line, in test order")->required();
  evaluate->add_option("--name", eval_name, "System name")->required();
  evaluate->add_option("--syns", eval_syns, "Synonym sets for METEOR");
  evaluate->add_option("--profanity", eval_profanity, "Profanity word list");
  evaluate->add_option("--per-item", eval_per_item, "Write per-item BLEU/METEOR/SARI TSV here");

  // retrieval
  auto* ret = app.add_subcommand("retrieval", "TF-IDF retrieval baseline");
  ret->require_subcommand(1);
  auto* ret_build = ret->add_subcommand("build", "Index training lyrics");
  std::string ret_train, ret_index_out;
  bool ret_expanded = false;
  ret_build->add_option("--train", ret_train, "Training JSONL")->required();
  ret_build->add_option("--out", ret_index_out, "Index file")->required();
  ret_build->add_flag("--expanded", ret_expanded, "One entry per annotation sentence");
  auto* ret_annotate = ret->add_subcommand("annotate", "Annotate test lyrics by nearest neighbour");
  std::string ret_index, ret_test, ret_out;
  ret_annotate->add_option("--index", ret_index, "Index file")->required();
  ret_annotate->add_option("--test", ret_test, "Test JSONL")->required();
  ret_annotate->add_option("--out", ret_out, "Hypothesis file")->required();

  // smt
  auto* smt_cmd = app.add_subcommand("smt", "Phrase-based translation baseline");
  smt_cmd->require_subcommand(1);
  auto* smt_train = smt_cmd->add_subcommand("train", "Align, extract phrases and train the LM");
  std::string smt_train_in, smt_train_out;
  smt::TrainOptions train_opts;
  smt_train->add_option("--train", smt_train_in, "Training JSONL")->required();
  smt_train->add_option("--out", smt_train_out, "Model directory")->required();
  smt_train->add_option("--max-phrase-len", train_opts.max_phrase_len)->capture_default_str();
  smt_train->add_option("--lm-order", train_opts.lm_order)->capture_default_str();
  smt_train->add_option("--lm-alpha", train_opts.lm_alpha)->capture_default_str();
  smt_train->add_option("--model1-iterations", train_opts.model1.iterations)->capture_default_str();

  auto* smt_tune = smt_cmd->add_subcommand("tune", "MERT on a dev corpus; rewrites weights.tsv");
  std::string smt_tune_dev, smt_tune_model;
  smt::MertOptions mert_opts;
  DecodeFlags tune_flags;
  smt_tune->add_option("--dev", smt_tune_dev, "Dev JSONL")->required();
  smt_tune->add_option("--model", smt_tune_model, "Model directory")->required();
  smt_tune->add_option("--nbest", mert_opts.nbest, "n-best size")->capture_default_str();
  smt_tune->add_option("--seed", mert_opts.seed, "Restart seed")->capture_default_str();
  smt_tune->add_option("--iters", mert_opts.max_iters, "Decode/optimize rounds")->capture_default_str();
  smt_tune->add_option("--restarts", mert_opts.restarts, "Starting points per round")->capture_default_str();
  tune_flags.add(smt_tune);

  auto* smt_annotate = smt_cmd->add_subcommand("annotate", "Decode test lyrics");
  std::string smt_ann_model, smt_ann_test, smt_ann_out;
  DecodeFlags ann_flags;
  smt_annotate->add_option("--model", smt_ann_model, "Model directory")->required();
  smt_annotate->add_option("--test", smt_ann_test, "Test JSONL")->required();
  smt_annotate->add_option("--out", smt_ann_out, "Hypothesis file")->required();
  ann_flags.add(smt_annotate);

  // agreement / correlate
  auto* agree = app.add_subcommand("agreement", "Fleiss' kappa of human ratings");
  std::string agree_ratings;
  agree->add_option("--ratings", agree_ratings, "Ratings CSV")->required();
  auto* corr = app.add_subcommand("correlate", "Pearson r between metrics and mean ratings");
  std::string corr_ratings, corr_scores;
  corr->add_option("--ratings", corr_ratings, "Ratings CSV")->required();
  corr->add_option("--scores", corr_scores, "Per-item metric TSV")->required();

  // synth / run / report
  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus");
  std::string synth_spec, synth_out;
  synth->add_option("--spec", synth_spec, "Synthetic spec file")->required();
  synth->add_option("--out", synth_out, "Output JSONL")->required();

  auto* run = app.add_subcommand("run", "Full pipeline from a config file");
  std::string run_config, run_out;
  run->add_option("--config", run_config, "key=value config file");
  run->add_option("--out", run_out, "Output directory")->required();
  std::map<std::string, std::optional<std::string>> overrides;
  for (const auto& key : harness::RunConfig::keys()) {
    std::string flag = "--" + key;
    for (char& c : flag) {
      if (c == '_') c = '-';
    }
    overrides[key];
    run->add_option(flag, overrides[key], "Overrides config key " + key);
  }

  auto* report = app.add_subcommand("report", "Recompute report.tsv of a finished run from its artifacts");
  std::string report_run;
  bool report_write = false;
  report->add_option("--run", report_run, "Run directory")->required();
  report->add_flag("--write", report_write, "Overwrite report.tsv instead of printing");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      auto c = corpus::load_corpus(ingest_in);
      const auto before = c.size();
      if (english_only) c = corpus::filter_english(c, langid::bundled_profiles());
      const auto after_lang = c.size();
      if (strip_links) c = corpus::strip_link_only(c);
      corpus::save_corpus(c, ingest_out);
      std::cout << "read " << before << ", non-english dropped " << before - after_lang << ", link-only dropped "
                << after_lang - c.size() << ", kept " << c.size() << "\n";
    } else if (*split) {
      const auto c = corpus::load_corpus(split_in);
      const auto s = corpus::make_splits(c, split_spec);
      fs::create_directories(split_out);
      corpus::save_corpus(s.test, fs::path(split_out) / "test.jsonl");
      corpus::save_corpus(s.dev, fs::path(split_out) / "dev.jsonl");
      corpus::save_corpus(s.train, fs::path(split_out) / "train.jsonl");
      corpus::write_split_manifest(s, fs::path(split_out) / "splits.tsv");
      std::cout << "test " << s.test.size() << ", dev " << s.dev.size() << ", train " << s.train.size() << "\n";
    } else if (*stats) {
      const auto c = corpus::load_corpus(stats_in);
      const auto st = corpus::corpus_stats(c);
      std::cout << "pairs\t" << st.n_pairs << "\nmean_lyric_tokens\t" << fmt(st.mean_lyric_tokens, 2)
                << "\nmean_annotation_tokens\t" << fmt(st.mean_annotation_tokens, 2) << "\nvocab_lyrics\t"
                << st.vocab_lyrics << "\nvocab_annotations\t" << st.vocab_annotations << "\n";
      std::size_t labelled = 0;
      for (const auto& p : c) labelled += p.context_label != corpus::ContextLabel::kUnlabeled;
      if (labelled == c.size() && !c.empty()) std::cout << "ci_fraction\t" << fmt(corpus::estimate_ci_fraction(c)) << "\n";
    } else if (*evaluate) {
      const auto test = corpus::load_corpus(eval_test);
      const auto lines = read_lines(eval_hyp);
      if (lines.size() != test.size()) {
        throw InvalidArgument("hypothesis file has " + std::to_string(lines.size()) + " lines, test set has " +
                              std::to_string(test.size()));
      }
      std::vector<metrics::EvalInstance> inst;
      for (std::size_t i = 0; i < test.size(); ++i) {
        inst.push_back({textproc::tokenize(test[i].lyric), textproc::tokenize(lines[i]),
                        {textproc::tokenize(test[i].annotation)}});
      }
      const metrics::WordList profanity =
          eval_profanity.empty() ? metrics::WordList{} : metrics::load_word_list(eval_profanity);
      std::optional<metrics::SynonymLexicon> syns;
      if (!eval_syns.empty()) syns = metrics::SynonymLexicon::load(eval_syns);
      const metrics::MetricConfig cfg;
      const auto row = metrics::build_report(eval_name, inst, cfg, profanity, syns ? &*syns : nullptr);
      std::cout << metrics::report_header() << "\n" << metrics::format_report_row(row) << "\n";
      if (!eval_per_item.empty()) {
        std::vector<std::string> out{"item_id\tbleu\tmeteor\tsari"};
        for (std::size_t i = 0; i < inst.size(); ++i) {
          const std::span<const metrics::EvalInstance> one(&inst[i], 1);
          out.push_back(test[i].id + "\t" + fmt(metrics::bleu(one, cfg), 6) + "\t" +
                        fmt(metrics::meteor(one, cfg, syns ? &*syns : nullptr), 6) + "\t" +
                        fmt(metrics::sari(one, cfg), 6));
        }
        write_lines(eval_per_item, out);
      }
    } else if (*ret_build) {
      auto train = corpus::load_corpus(ret_train);
      if (ret_expanded) train = corpus::expand_sentences(train);
      const auto index = retrieval::TfIdfIndex::build(train);
      index.save(ret_index_out);
      std::cout << "indexed " << index.n_docs() << " lyrics, " << index.vocabulary_size() << " terms\n";
    } else if (*ret_annotate) {
      const auto index = retrieval::TfIdfIndex::load(ret_index);
      const auto test = corpus::load_corpus(ret_test);
      std::vector<std::string> lines;
      std::size_t misses = 0;
      for (const auto& hit : retrieval::annotate_corpus(index, test)) {
        if (!hit) ++misses;
        std::string text = hit ? hit->annotation : std::string();
        for (char& ch : text) {
          if (ch == '\n' || ch == '\r' || ch == '\t') ch = ' ';
        }
        lines.push_back(text);
      }
      write_lines(ret_out, lines);
      std::cout << "annotated " << lines.size() << " lyrics, " << misses << " without a match\n";
    } else if (*smt_train) {
      const auto pairs = sentence_pairs(corpus::load_corpus(smt_train_in));
      const auto model = smt::train_smt(pairs, train_opts);
      fs::create_directories(smt_train_out);
      model.save(smt_train_out);
      std::cout << "trained on " << pairs.size() << " sentence pairs, " << model.phrases.num_entries()
                << " phrase pairs\n";
    } else if (*smt_tune) {
      auto model = smt::SmtModel::load(smt_tune_model, tune_flags.lm_alpha);
      std::vector<smt::TuningPair> dev;
      for (const auto& p : corpus::load_corpus(smt_tune_dev)) {
        auto src = textproc::tokenize(p.lyric), ref = textproc::tokenize(p.annotation);
        if (!src.empty() && !ref.empty()) dev.push_back({std::move(src), std::move(ref)});
      }
      const smt::Decoder decoder(model.phrases, model.lm, tune_flags.options());
      const auto result = smt::mert(dev, decoder, model.weights, mert_opts);
      result.weights.save(fs::path(smt_tune_model) / "weights.tsv");
      std::cout << "dev BLEU " << fmt(result.dev_bleu, 2) << "\n";
    } else if (*smt_annotate) {
      const auto model = smt::SmtModel::load(smt_ann_model, ann_flags.lm_alpha);
      const smt::Decoder decoder(model.phrases, model.lm, ann_flags.options());
      std::vector<std::string> lines;
      for (const auto& p : corpus::load_corpus(smt_ann_test)) {
        const auto src = textproc::tokenize(p.lyric);
        lines.push_back(src.empty() ? std::string() : textproc::join(decoder.decode(src, model.weights).output));
      }
      write_lines(smt_ann_out, lines);
      std::cout << "annotated " << lines.size() << " lyrics\n";
    } else if (*agree) {
      const auto k = agreement::rating_kappas(agreement::load_ratings(agree_ratings));
      std::cout << "kappa_fluency\t" << fmt(k.fluency) << "\nkappa_information\t" << fmt(k.information) << "\n";
    } else if (*corr) {
      const auto rs = agreement::correlate(agreement::load_ratings(corr_ratings), agreement::load_scores(corr_scores));
      std::cout << "metric\tr_fluency\tr_information\titems\n";
      for (const auto& c : rs) {
        std::cout << c.metric << "\t" << fmt(c.fluency) << "\t" << fmt(c.information) << "\t" << c.items << "\n";
      }
    } else if (*synth) {
      const auto c = harness::generate_synthetic(harness::SynthSpec::load(synth_spec));
      corpus::save_corpus(c, synth_out);
      std::cout << "wrote " << c.size() << " pairs\n";
    } else if (*run) {
      harness::RunConfig cfg = run_config.empty() ? harness::RunConfig{} : harness::RunConfig::load(run_config);
      for (const auto& [key, value] : overrides) {
        if (value) cfg.set(key, *value, fs::current_path());
      }
      const auto result = harness::run_pipeline(cfg, run_out, &std::cerr);
      std::cout << harness::format_report(result.rows);
      if (!result.slang.empty()) std::cout << "\n" << harness::format_slang(result.slang);
    } else if (*report) {
      const auto result = harness::regenerate_report(report_run);
      const std::string text = harness::format_report(result.rows);
      if (report_write) {
        write_lines(fs::path(report_run) / "report.tsv", {text.substr(0, text.size() - 1)});
      } else {
        std::cout << text;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "lyricbench: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
