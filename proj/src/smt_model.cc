#include "lyricbench/error.h"
#include "lyricbench/smt.h"

namespace lyricbench::smt {

void SmtModel::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  phrases.save(dir / "phrase-table.txt");
  lm.save(dir / "lm.tsv");
  weights.save(dir / "weights.tsv");
  forward.dump(dir / "lex.fwd.tsv");
  reverse.dump(dir / "lex.rev.tsv");
}

SmtModel SmtModel::load(const std::filesystem::path& dir, double lm_alpha) {
  SmtModel model;
  model.phrases = PhraseTable::load(dir / "phrase-table.txt");
  model.lm = NGramLM::load(dir / "lm.tsv", lm_alpha);
  model.weights = FeatureWeights::load(dir / "weights.tsv");
  return model;
}

SmtModel train_smt(const std::vector<align::SentencePair>& pairs, const TrainOptions& options) {
  if (pairs.empty()) throw InvalidArgument("train_smt: no training pairs");
  SmtModel model;
  model.forward = align::train_model1(pairs, options.model1, nullptr, "fwd");
  std::vector<align::SentencePair> swapped;
  swapped.reserve(pairs.size());
  for (const auto& [src, tgt] : pairs) swapped.emplace_back(tgt, src);
  model.reverse = align::train_model1(swapped, options.model1, nullptr, "rev");

  PhraseScorer scorer(model.forward, model.reverse);
  std::vector<TokenSeq> targets;
  targets.reserve(pairs.size());
  for (const auto& [src, tgt] : pairs) {
    AlignedPair ap{src, tgt, {}};
    const auto fwd = align::viterbi_align(model.forward, src, tgt, options.model1.use_null);
    const auto rev = align::viterbi_align(model.reverse, tgt, src, options.model1.use_null).transposed();
    ap.alignment = align::symmetrize(fwd, rev);
    for (const auto& p : extract_phrases(ap, options.max_phrase_len)) scorer.add(p);
    targets.push_back(tgt);
  }
  if (scorer.empty()) throw InvalidArgument("train_smt: no phrase pairs could be extracted");
  model.phrases = scorer.finish();
  model.lm = NGramLM::train(targets, options.lm_order, options.lm_alpha);
  return model;
}

}  // namespace lyricbench::smt
