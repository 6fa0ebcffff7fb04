#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "lyricbench/error.h"
#include "lyricbench/smt.h"

namespace lyricbench::smt {

using textproc::join;

// ---------------------------------------------------------------------------
// Weights

const std::array<std::string_view, kNumFeatures>& feature_names() {
  static const std::array<std::string_view, kNumFeatures> names{
      "phi_fe", "phi_ef", "lex_fe", "lex_ef", "lm", "word_penalty", "distortion"};
  return names;
}

double oov_log_cost() { return std::log(align::kProbabilityFloor); }

FeatureWeights FeatureWeights::defaults() { return FeatureWeights{{0.2, 0.2, 0.2, 0.2, 0.5, -0.5, 0.3}}; }

double FeatureWeights::dot(const FeatureVector& f) const {
  double s = 0.0;
  for (int k = 0; k < kNumFeatures; ++k) s += w[k] * f[k];
  return s;
}

void FeatureWeights::validate() const {
  bool nonzero = false;
  for (double v : w) {
    if (!std::isfinite(v)) throw InvalidArgument("feature weights must be finite");
    nonzero = nonzero || v != 0.0;
  }
  if (!nonzero) throw InvalidArgument("feature weights are all zero");
}

void FeatureWeights::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write weights " + path.string());
  char buf[64];
  for (int k = 0; k < kNumFeatures; ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", w[k]);
    out << feature_names()[k] << '\t' << buf << '\n';
  }
}

FeatureWeights FeatureWeights::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read weights " + path.string());
  FeatureWeights out;
  std::array<bool, kNumFeatures> seen{};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw FormatError(path.string(), lineno, "expected feature<TAB>value");
    const std::string name = line.substr(0, tab);
    auto it = std::find(feature_names().begin(), feature_names().end(), name);
    if (it == feature_names().end()) throw FormatError(path.string(), lineno, "unknown feature '" + name + "'");
    const int k = static_cast<int>(it - feature_names().begin());
    try {
      std::size_t used = 0;
      const std::string value = line.substr(tab + 1);
      out.w[k] = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw FormatError(path.string(), lineno, "bad weight value");
    }
    seen[k] = true;
  }
  for (int k = 0; k < kNumFeatures; ++k) {
    if (!seen[k]) throw FormatError(path.string(), 0, "missing feature " + std::string(feature_names()[k]));
  }
  out.validate();
  return out;
}

// ---------------------------------------------------------------------------
// Extraction

std::vector<PhrasePair> extract_phrases(const AlignedPair& pair, int max_phrase_len) {
  if (max_phrase_len < 1) throw InvalidArgument("max_phrase_len must be >= 1");
  if (max_phrase_len > 255) throw InvalidArgument("max_phrase_len must be <= 255");
  const int ns = static_cast<int>(pair.source.size());
  const int nt = static_cast<int>(pair.target.size());
  const auto& a = pair.alignment;
  if (a.source_length != pair.source.size() || a.target_length != pair.target.size()) {
    throw InvalidArgument("alignment does not match sentence lengths");
  }
  std::vector<std::vector<int>> by_target(nt);
  std::vector<std::vector<int>> by_source(ns);
  for (const auto& [s, t] : a.links) {
    by_target[t].push_back(static_cast<int>(s));
    by_source[s].push_back(static_cast<int>(t));
  }

  std::vector<PhrasePair> out;
  for (int ts = 0; ts < nt; ++ts) {
    for (int te = ts; te < std::min(nt, ts + max_phrase_len); ++te) {
      int smin = ns, smax = -1;
      for (int t = ts; t <= te; ++t) {
        for (int s : by_target[t]) {
          smin = std::min(smin, s);
          smax = std::max(smax, s);
        }
      }
      if (smax < 0 || smax - smin + 1 > max_phrase_len) continue;
      bool consistent = true;
      for (int s = smin; s <= smax && consistent; ++s) {
        for (int t : by_source[s]) consistent = consistent && t >= ts && t <= te;
      }
      if (!consistent) continue;

      for (int ss = smin; ss >= 0 && (ss == smin || by_source[ss].empty()); --ss) {
        for (int se = smax; se < ns && (se == smax || by_source[se].empty()); ++se) {
          if (se - ss + 1 > max_phrase_len) break;
          PhrasePair p;
          p.source.assign(pair.source.begin() + ss, pair.source.begin() + se + 1);
          p.target.assign(pair.target.begin() + ts, pair.target.begin() + te + 1);
          for (const auto& [s, t] : a.links) {
            if (static_cast<int>(s) >= ss && static_cast<int>(s) <= se && static_cast<int>(t) >= ts &&
                static_cast<int>(t) <= te) {
              p.links.emplace_back(static_cast<std::uint8_t>(s - ss), static_cast<std::uint8_t>(t - ts));
            }
          }
          out.push_back(std::move(p));
        }
      }
    }
  }
  return out;
}

std::vector<PhrasePair> extract_phrases(const std::vector<AlignedPair>& pairs, int max_phrase_len) {
  std::vector<PhrasePair> out;
  for (const auto& p : pairs) {
    auto part = extract_phrases(p, max_phrase_len);
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Phrase table

void PhraseTable::add(const TokenSeq& source, const TokenSeq& target, const PhraseScores& scores) {
  if (source.empty() || target.empty()) throw InvalidArgument("phrase table entries must be non-empty");
  auto& row = rows_[join(source)];
  auto it = std::lower_bound(row.begin(), row.end(), target,
                             [](const PhraseOption& o, const TokenSeq& t) { return o.target < t; });
  if (it != row.end() && it->target == target) {
    it->scores = scores;
  } else {
    row.insert(it, PhraseOption{target, scores});
  }
  max_source_length_ = std::max(max_source_length_, static_cast<int>(source.size()));
}

const std::vector<PhraseOption>* PhraseTable::options(const TokenSeq& source) const {
  auto it = rows_.find(join(source));
  return it == rows_.end() ? nullptr : &it->second;
}

std::size_t PhraseTable::num_entries() const {
  std::size_t n = 0;
  for (const auto& [s, row] : rows_) n += row.size();
  return n;
}

std::vector<std::string> PhraseTable::sources() const {
  std::vector<std::string> out;
  out.reserve(rows_.size());
  for (const auto& [s, row] : rows_) out.push_back(s);
  std::sort(out.begin(), out.end());
  return out;
}

const std::vector<PhraseOption>& PhraseTable::row(const std::string& joined_source) const {
  auto it = rows_.find(joined_source);
  if (it == rows_.end()) throw InvalidArgument("unknown source phrase '" + joined_source + "'");
  return it->second;
}

void PhraseTable::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write phrase table " + path.string());
  char buf[128];
  for (const auto& src : sources()) {
    for (const auto& opt : rows_.at(src)) {
      const auto& s = opt.scores;
      std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g", s.phi_fe, s.phi_ef, s.lex_fe, s.lex_ef);
      out << src << " ||| " << join(opt.target) << " ||| " << buf << '\n';
    }
  }
}

namespace {

TokenSeq split_spaces(const std::string& s) {
  TokenSeq out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

}  // namespace

PhraseTable PhraseTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read phrase table " + path.string());
  PhraseTable table;
  std::string line;
  std::size_t lineno = 0;
  static constexpr std::string_view kSep = " ||| ";
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto p1 = line.find(kSep);
    auto p2 = p1 == std::string::npos ? p1 : line.find(kSep, p1 + kSep.size());
    if (p2 == std::string::npos) throw FormatError(path.string(), lineno, "expected 3 '|||' fields");
    auto src = split_spaces(line.substr(0, p1));
    auto tgt = split_spaces(line.substr(p1 + kSep.size(), p2 - p1 - kSep.size()));
    std::istringstream nums(line.substr(p2 + kSep.size()));
    PhraseScores s;
    std::string extra;
    if (!(nums >> s.phi_fe >> s.phi_ef >> s.lex_fe >> s.lex_ef) || (nums >> extra)) {
      throw FormatError(path.string(), lineno, "expected 4 scores");
    }
    if (src.empty() || tgt.empty()) throw FormatError(path.string(), lineno, "empty phrase");
    table.add(src, tgt, s);
  }
  return table;
}

// ---------------------------------------------------------------------------
// Scoring

double lexical_weight(const TokenSeq& source, const TokenSeq& target,
                      const std::vector<std::pair<std::uint8_t, std::uint8_t>>& links,
                      const align::TranslationTable& table) {
  double weight = 1.0;
  for (std::size_t j = 0; j < target.size(); ++j) {
    double sum = 0.0;
    int n = 0;
    for (const auto& [s, t] : links) {
      if (t != j) continue;
      sum += table.prob(source.at(s), target[j]);
      ++n;
    }
    const double p = n == 0 ? table.prob(align::kNullToken, target[j]) : sum / n;
    weight *= std::max(p, align::kProbabilityFloor);
  }
  return weight;
}

void PhraseScorer::add(const PhrasePair& p) {
  const std::string s = join(p.source), t = join(p.target);
  auto& acc = pairs_[{s, t}];
  if (acc.count == 0) {
    acc.source = p.source;
    acc.target = p.target;
  }
  ++acc.count;
  ++source_counts_[s];
  ++target_counts_[t];
  std::vector<std::pair<std::uint8_t, std::uint8_t>> swapped;
  swapped.reserve(p.links.size());
  for (const auto& [a, b] : p.links) swapped.emplace_back(b, a);
  acc.lex_fe = std::max(acc.lex_fe, lexical_weight(p.source, p.target, p.links, forward_));
  acc.lex_ef = std::max(acc.lex_ef, lexical_weight(p.target, p.source, swapped, reverse_));
}

PhraseTable PhraseScorer::finish() const {
  if (pairs_.empty()) throw InvalidArgument("score_phrases: nothing to score");
  PhraseTable table;
  for (const auto& [key, acc] : pairs_) {
    PhraseScores s;
    s.phi_fe = static_cast<double>(acc.count) / static_cast<double>(source_counts_.at(key.first));
    s.phi_ef = static_cast<double>(acc.count) / static_cast<double>(target_counts_.at(key.second));
    s.lex_fe = acc.lex_fe;
    s.lex_ef = acc.lex_ef;
    table.add(acc.source, acc.target, s);
  }
  return table;
}

PhraseTable score_phrases(const std::vector<PhrasePair>& extracted, const align::TranslationTable& forward,
                          const align::TranslationTable& reverse) {
  PhraseScorer scorer(forward, reverse);
  for (const auto& p : extracted) scorer.add(p);
  return scorer.finish();
}

}  // namespace lyricbench::smt
