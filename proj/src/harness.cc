#include "lyricbench/harness.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "lyricbench/langid.h"
#include "lyricbench/retrieval.h"
#include "lyricbench/rng.h"

namespace lyricbench::harness {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && textproc::is_space(s[b])) ++b;
  while (e > b && textproc::is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

// Non-comment, non-blank lines with their 1-based numbers.
std::vector<std::pair<std::size_t, std::string>> content_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read " + path.string());
  std::vector<std::pair<std::size_t, std::string>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    out.emplace_back(lineno, line);
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << text;
  if (!out) throw FormatError("write failed: " + path.string());
}

fs::path resolve(const fs::path& base, const std::string& value) {
  if (value.empty()) return {};
  fs::path p(value);
  if (p.is_relative() && !base.empty()) p = base / p;
  return fs::absolute(p).lexically_normal();
}

// Slot indices referenced as {k}; throws on a malformed brace.
std::set<int> slots_of(const std::string& text, const std::string& where) {
  std::set<int> out;
  for (std::size_t i = text.find('{'); i != std::string::npos; i = text.find('{', i + 1)) {
    const auto close = text.find('}', i);
    if (close == std::string::npos) throw InvalidArgument(where + ": unterminated '{'");
    const std::string name = text.substr(i + 1, close - i - 1);
    if (name == "who") continue;
    if (name.empty() || !std::all_of(name.begin(), name.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      throw InvalidArgument(where + ": unknown slot {" + name + "}");
    }
    out.insert(std::stoi(name));
  }
  return out;
}

std::string replace_all(std::string text, const std::string& from, const std::string& to) {
  for (std::size_t i = text.find(from); i != std::string::npos; i = text.find(from, i + to.size())) {
    text.replace(i, from.size(), to);
  }
  return text;
}

std::string capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

// Lowercases the first letter unless the sentence opens with the pronoun I.
std::string decapitalize(std::string s) {
  const bool pronoun = s.size() >= 2 && s[0] == 'I' && (s[1] == ' ' || s[1] == '\'');
  if (!pronoun && !s.empty() && s[0] >= 'A' && s[0] <= 'Z') s[0] = static_cast<char>(s[0] - 'A' + 'a');
  return s;
}

std::string format_id(const char* prefix, std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s-%05zu", prefix, n);
  return buf;
}

bool contains_run(const TokenSeq& hay, const TokenSeq& needle) {
  if (needle.empty()) return true;
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

}  // namespace

// ---------------------------------------------------------------------------
// Resource files

std::vector<KeyValue> read_key_values(const fs::path& path) {
  std::vector<KeyValue> out;
  for (const auto& [lineno, line] : content_lines(path)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError(path.string(), lineno, "expected key = value");
    KeyValue kv{trim(std::string_view(line).substr(0, eq)), trim(std::string_view(line).substr(eq + 1)), lineno};
    if (kv.key.empty()) throw FormatError(path.string(), lineno, "empty key");
    out.push_back(std::move(kv));
  }
  return out;
}

SlangLexicon load_slang_lexicon(const fs::path& path) {
  SlangLexicon out;
  std::set<std::string> seen;
  for (const auto& [lineno, line] : content_lines(path)) {
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw FormatError(path.string(), lineno, "expected slang<TAB>standard");
    std::string slang = trim(std::string_view(line).substr(0, tab));
    std::string standard = trim(std::string_view(line).substr(tab + 1));
    if (slang.empty() || standard.empty()) throw FormatError(path.string(), lineno, "empty lexicon field");
    if (!seen.insert(slang).second) throw FormatError(path.string(), lineno, "repeated slang term '" + slang + "'");
    out.emplace_back(std::move(slang), std::move(standard));
  }
  return out;
}

std::vector<Template> load_templates(const fs::path& path) {
  static constexpr std::string_view kSep = "|||";
  std::vector<Template> out;
  for (const auto& [lineno, line] : content_lines(path)) {
    const auto sep = line.find(kSep);
    if (sep == std::string::npos) throw FormatError(path.string(), lineno, "expected lyric ||| annotation");
    Template t{trim(std::string_view(line).substr(0, sep)), trim(std::string_view(line).substr(sep + kSep.size()))};
    if (t.lyric.empty() || t.annotation.empty()) throw FormatError(path.string(), lineno, "empty template side");
    try {
      if (slots_of(t.lyric, "lyric") != slots_of(t.annotation, "annotation")) {
        throw InvalidArgument("lyric and annotation use different slots");
      }
    } catch (const InvalidArgument& e) {
      throw FormatError(path.string(), lineno, e.what());
    }
    out.push_back(std::move(t));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic corpus

void SynthSpec::validate() const {
  if (slang_lexicon.empty()) throw InvalidArgument("synthetic spec: empty slang lexicon");
  if (templates.empty()) throw InvalidArgument("synthetic spec: no templates");
  if (!(ci_fraction >= 0.0 && ci_fraction <= 1.0)) throw InvalidArgument("synthetic spec: ci_fraction outside [0,1]");
  if (ci_fraction < 1.0 && n_pairs > 0 && backgrounds.empty()) {
    throw InvalidArgument("synthetic spec: CS pairs need background sentences");
  }
  for (const auto& [slang, standard] : slang_lexicon) {
    if (slang.empty() || standard.empty()) throw InvalidArgument("synthetic spec: empty lexicon entry");
  }
  for (const auto& t : templates) {
    const auto lyric = slots_of(t.lyric, "template lyric");
    if (lyric != slots_of(t.annotation, "template annotation")) {
      throw InvalidArgument("synthetic spec: template sides use different slots: " + t.lyric);
    }
    if (t.lyric.find("{who}") != std::string::npos) {
      throw InvalidArgument("synthetic spec: {who} is only allowed in annotations");
    }
    int expected = 0;
    for (int s : lyric) {
      if (s != expected++) throw InvalidArgument("synthetic spec: template slots must be {0}..{k-1}: " + t.lyric);
    }
  }
}

SynthSpec SynthSpec::load(const fs::path& path) {
  const fs::path base = path.parent_path();
  SynthSpec spec;
  bool have_lexicon = false, have_templates = false;
  for (const auto& kv : read_key_values(path)) {
    try {
      if (kv.key == "n_pairs") {
        spec.n_pairs = std::stoull(kv.value);
      } else if (kv.key == "ci_fraction") {
        spec.ci_fraction = std::stod(kv.value);
      } else if (kv.key == "seed") {
        spec.seed = std::stoull(kv.value);
      } else if (kv.key == "lexicon") {
        spec.slang_lexicon = load_slang_lexicon(resolve(base, kv.value));
        have_lexicon = true;
      } else if (kv.key == "templates") {
        spec.templates = load_templates(resolve(base, kv.value));
        have_templates = true;
      } else if (kv.key == "backgrounds") {
        spec.backgrounds.clear();
        for (auto& [n, line] : content_lines(resolve(base, kv.value))) spec.backgrounds.push_back(trim(line));
      } else {
        throw FormatError(path.string(), kv.line, "unknown key '" + kv.key + "'");
      }
    } catch (const std::invalid_argument&) {
      throw FormatError(path.string(), kv.line, "bad value for " + kv.key);
    } catch (const std::out_of_range&) {
      throw FormatError(path.string(), kv.line, "bad value for " + kv.key);
    }
  }
  if (!have_lexicon) throw FormatError(path.string(), 0, "missing key 'lexicon'");
  if (!have_templates) throw FormatError(path.string(), 0, "missing key 'templates'");
  spec.validate();
  return spec;
}

corpus::Corpus generate_synthetic(const SynthSpec& spec) {
  spec.validate();
  static const std::vector<std::string> kNarrators{"he", "the rapper", "the narrator"};
  static const std::vector<std::string> kPrefixes{"", "", "", "yeah, ", "uh, ", "yo, "};
  static const std::vector<std::string> kSuffixes{"", "", "", " for real", " ya know"};
  constexpr double kGlossProbability = 0.25;
  constexpr std::size_t kPairsPerSong = 8;

  const std::size_t n = spec.n_pairs;
  const auto n_ci = static_cast<std::size_t>(std::llround(static_cast<double>(n) * spec.ci_fraction));
  Rng rng(spec.seed);

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(order);
  std::vector<char> is_ci(n, 0);
  for (std::size_t k = 0; k < n_ci; ++k) is_ci[order[k]] = 1;

  corpus::Corpus out("synthetic seed=" + std::to_string(spec.seed));
  const std::size_t lex = spec.slang_lexicon.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Template& t = spec.templates[rng.below(spec.templates.size())];
    const auto n_slots = slots_of(t.lyric, "template").size();
    // Distinct entries per template while the lexicon allows it.
    std::vector<std::size_t> picks;
    while (picks.size() < n_slots) {
      const std::size_t e = rng.below(lex);
      if (picks.size() < lex && std::find(picks.begin(), picks.end(), e) != picks.end()) continue;
      picks.push_back(e);
    }
    std::string lyric = t.lyric, annotation = t.annotation;
    for (std::size_t s = 0; s < n_slots; ++s) {
      const std::string slot = "{" + std::to_string(s) + "}";
      lyric = replace_all(lyric, slot, spec.slang_lexicon[picks[s]].first);
      annotation = replace_all(annotation, slot, spec.slang_lexicon[picks[s]].second);
    }
    annotation = capitalize(replace_all(annotation, "{who}", kNarrators[rng.below(kNarrators.size())]));
    const std::string& prefix = kPrefixes[rng.below(kPrefixes.size())];
    const std::string& suffix = kSuffixes[rng.below(kSuffixes.size())];
    lyric = prefix.empty() ? lyric + suffix : capitalize(prefix + decapitalize(lyric) + suffix);
    const bool gloss = rng.uniform() < kGlossProbability;
    const std::string& background = spec.backgrounds.empty() ? annotation
                                                              : spec.backgrounds[rng.below(spec.backgrounds.size())];

    corpus::AnnotationPair p;
    p.id = format_id("syn", i + 1);
    p.song_id = format_id("song", i / kPairsPerSong + 1);
    p.lyric = std::move(lyric);
    if (is_ci[i]) {
      p.context_label = corpus::ContextLabel::kCI;
      if (gloss && n_slots > 0) {
        const auto& [slang, standard] = spec.slang_lexicon[picks[0]];
        annotation += " " + capitalize(slang) + " is slang for " + standard + ".";
      }
      p.annotation = std::move(annotation);
    } else {
      p.context_label = corpus::ContextLabel::kCS;
      p.annotation = background;
    }
    out.add(std::move(p));
  }
  return out;
}

SlangMapping slang_mapping(const corpus::Corpus& test, const std::vector<TokenSeq>& hypotheses,
                           const SlangLexicon& lexicon) {
  if (hypotheses.size() != test.size()) throw InvalidArgument("slang_mapping: one hypothesis per test pair required");
  std::map<std::string, TokenSeq> standard;
  for (const auto& [slang, target] : lexicon) {
    const auto tok = textproc::tokenize(slang);
    if (tok.size() == 1) standard.emplace(tok[0], textproc::tokenize(target));
  }
  SlangMapping out;
  for (std::size_t i = 0; i < test.size(); ++i) {
    for (const auto& word : textproc::tokenize(test[i].lyric)) {
      auto it = standard.find(word);
      if (it == standard.end()) continue;
      ++out.total;
      if (contains_run(hypotheses[i], it->second)) ++out.mapped;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Run configuration

namespace {

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw InvalidArgument(key + ": expected a boolean, got '" + v + "'");
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  if (v.empty() || !std::all_of(v.begin(), v.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw InvalidArgument(key + ": expected a non-negative integer, got '" + v + "'");
  }
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    throw InvalidArgument(key + ": integer out of range");
  }
}

int parse_int(const std::string& key, const std::string& v) {
  const auto u = parse_uint(key, v);
  if (u > 1000000000ULL) throw InvalidArgument(key + ": integer out of range");
  return static_cast<int>(u);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size() && std::isfinite(d)) return d;
  } catch (const std::exception&) {
  }
  throw InvalidArgument(key + ": expected a number, got '" + v + "'");
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream in(v);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> k{
      "corpus",     "synth",        "systems",       "test",          "dev",       "seed",
      "english_only", "strip_links", "retrieval_expanded", "max_phrase_len", "lm_order", "lm_alpha",
      "model1_iterations", "beam",  "distortion",    "max_options",   "tune",      "mert_iters",
      "nbest",      "mert_restarts", "mert_seed",    "profanity",     "syns"};
  return k;
}

void RunConfig::set(const std::string& key, const std::string& value, const fs::path& base) {
  if (key == "corpus") {
    corpus = resolve(base, value);
  } else if (key == "synth") {
    synth = resolve(base, value);
  } else if (key == "systems") {
    systems = split_list(value);
  } else if (key == "test") {
    split.test_size = parse_uint(key, value);
  } else if (key == "dev") {
    split.dev_size = parse_uint(key, value);
  } else if (key == "seed") {
    split.seed = parse_uint(key, value);
  } else if (key == "english_only") {
    english_only = parse_bool(key, value);
  } else if (key == "strip_links") {
    strip_links = parse_bool(key, value);
  } else if (key == "retrieval_expanded") {
    retrieval_expanded = parse_bool(key, value);
  } else if (key == "max_phrase_len") {
    train.max_phrase_len = parse_int(key, value);
  } else if (key == "lm_order") {
    train.lm_order = parse_int(key, value);
  } else if (key == "lm_alpha") {
    train.lm_alpha = parse_double(key, value);
  } else if (key == "model1_iterations") {
    train.model1.iterations = parse_int(key, value);
  } else if (key == "beam") {
    decoder.beam_size = parse_int(key, value);
  } else if (key == "distortion") {
    decoder.distortion_limit = parse_int(key, value);
  } else if (key == "max_options") {
    decoder.max_options = parse_int(key, value);
  } else if (key == "tune") {
    tune = parse_bool(key, value);
  } else if (key == "mert_iters") {
    mert.max_iters = parse_int(key, value);
  } else if (key == "nbest") {
    mert.nbest = parse_int(key, value);
  } else if (key == "mert_restarts") {
    mert.restarts = parse_int(key, value);
  } else if (key == "mert_seed") {
    mert.seed = parse_uint(key, value);
  } else if (key == "profanity") {
    profanity = resolve(base, value);
  } else if (key == "syns") {
    synonyms = resolve(base, value);
  } else {
    throw InvalidArgument("unknown config key '" + key + "'");
  }
}

void RunConfig::validate() const {
  if (corpus.empty() == synth.empty()) throw InvalidArgument("config: set exactly one of corpus and synth");
  if (systems.empty()) throw InvalidArgument("config: no systems");
  std::set<std::string> seen;
  for (const auto& s : systems) {
    if (s != "smt" && s != "retrieval") throw InvalidArgument("config: unknown system '" + s + "'");
    if (!seen.insert(s).second) throw InvalidArgument("config: system '" + s + "' listed twice");
  }
  if (split.test_size == 0) throw InvalidArgument("config: test must be > 0");
  if (tune && seen.count("smt") && split.dev_size == 0) throw InvalidArgument("config: tuning needs dev > 0");
  if (train.max_phrase_len < 1) throw InvalidArgument("config: max_phrase_len must be >= 1");
  if (train.lm_order < 1) throw InvalidArgument("config: lm_order must be >= 1");
  if (!(train.lm_alpha > 0.0 && train.lm_alpha <= 1.0)) throw InvalidArgument("config: lm_alpha must be in (0,1]");
  if (decoder.beam_size < 1) throw InvalidArgument("config: beam must be >= 1");
  if (decoder.max_options < 1) throw InvalidArgument("config: max_options must be >= 1");
  if (mert.max_iters < 1 || mert.nbest < 1 || mert.restarts < 1) {
    throw InvalidArgument("config: mert_iters, nbest and mert_restarts must be >= 1");
  }
}

RunConfig RunConfig::load(const fs::path& path) {
  RunConfig cfg;
  const fs::path base = path.parent_path();
  for (const auto& kv : read_key_values(path)) {
    try {
      cfg.set(kv.key, kv.value, base);
    } catch (const InvalidArgument& e) {
      throw FormatError(path.string(), kv.line, e.what());
    }
  }
  return cfg;
}

std::string RunConfig::serialize() const {
  std::string systems_list;
  for (const auto& s : systems) systems_list += (systems_list.empty() ? "" : ",") + s;
  auto b = [](bool v) { return std::string(v ? "true" : "false"); };
  const std::map<std::string, std::string> values{
      {"corpus", corpus.string()},
      {"synth", synth.string()},
      {"systems", systems_list},
      {"test", std::to_string(split.test_size)},
      {"dev", std::to_string(split.dev_size)},
      {"seed", std::to_string(split.seed)},
      {"english_only", b(english_only)},
      {"strip_links", b(strip_links)},
      {"retrieval_expanded", b(retrieval_expanded)},
      {"max_phrase_len", std::to_string(train.max_phrase_len)},
      {"lm_order", std::to_string(train.lm_order)},
      {"lm_alpha", fmt_double(train.lm_alpha)},
      {"model1_iterations", std::to_string(train.model1.iterations)},
      {"beam", std::to_string(decoder.beam_size)},
      {"distortion", std::to_string(decoder.distortion_limit)},
      {"max_options", std::to_string(decoder.max_options)},
      {"tune", b(tune)},
      {"mert_iters", std::to_string(mert.max_iters)},
      {"nbest", std::to_string(mert.nbest)},
      {"mert_restarts", std::to_string(mert.restarts)},
      {"mert_seed", std::to_string(mert.seed)},
      {"profanity", profanity.string()},
      {"syns", synonyms.string()},
  };
  std::string out;
  for (const auto& k : keys()) out += k + " = " + values.at(k) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Pipeline

namespace {

std::string hyp_file(const std::string& system) { return "hyp." + system + ".txt"; }

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r' || c == '\t') c = ' ';
  }
  return trim(s);
}

template <typename F>
auto stage(const std::string& name, std::ostream* log, F&& body) {
  const auto start = std::chrono::steady_clock::now();
  try {
    if constexpr (std::is_void_v<decltype(body())>) {
      body();
      if (log) {
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
        *log << "[" << name << "] done in " << dt.count() << " s\n";
      }
    } else {
      auto result = body();
      if (log) {
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
        *log << "[" << name << "] done in " << dt.count() << " s\n";
      }
      return result;
    }
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

struct Resources {
  metrics::WordList profanity;
  metrics::SynonymLexicon synonyms;
  SlangLexicon slang;
};

Resources load_resources(const RunConfig& config) {
  Resources r;
  if (!config.profanity.empty()) r.profanity = metrics::load_word_list(config.profanity);
  if (!config.synonyms.empty()) r.synonyms = metrics::SynonymLexicon::load(config.synonyms);
  if (!config.synth.empty()) r.slang = SynthSpec::load(config.synth).slang_lexicon;
  return r;
}

RunResult evaluate(const RunConfig& config, const Resources& res, const corpus::Corpus& test,
                   const std::map<std::string, std::vector<std::string>>& hyps) {
  std::vector<metrics::EvalInstance> base;
  base.reserve(test.size());
  for (const auto& p : test) {
    base.push_back({textproc::tokenize(p.lyric), {}, {textproc::tokenize(p.annotation)}});
  }
  RunResult result;
  result.rows.push_back(metrics::build_reference_report("human", base, res.profanity));
  const metrics::SynonymLexicon* syns = res.synonyms.empty() ? nullptr : &res.synonyms;
  for (const auto& system : config.systems) {
    const auto& lines = hyps.at(system);
    if (lines.size() != test.size()) {
      throw FormatError(hyp_file(system) + " has " + std::to_string(lines.size()) + " lines, test set has " +
                        std::to_string(test.size()));
    }
    auto instances = base;
    std::vector<TokenSeq> candidates;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      instances[i].candidate = textproc::tokenize(lines[i]);
      candidates.push_back(instances[i].candidate);
    }
    result.rows.push_back(metrics::build_report(system, instances, metrics::MetricConfig{}, res.profanity, syns));
    if (!res.slang.empty()) result.slang.emplace_back(system, slang_mapping(test, candidates, res.slang));
  }
  return result;
}

void write_report(const fs::path& dir, const RunResult& r) {
  write_text(dir / "report.tsv", format_report(r.rows));
  if (!r.slang.empty()) write_text(dir / "slang.tsv", format_slang(r.slang));
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

}  // namespace

std::string format_report(const std::vector<metrics::MetricReport>& rows) {
  std::string out = metrics::report_header() + "\n";
  for (const auto& r : rows) out += metrics::format_report_row(r) + "\n";
  return out;
}

std::string format_slang(const std::vector<std::pair<std::string, SlangMapping>>& slang) {
  std::string out = "system\tmapped\ttotal\trate\n";
  char buf[32];
  for (const auto& [system, m] : slang) {
    std::snprintf(buf, sizeof buf, "%.4f", m.rate());
    out += system + "\t" + std::to_string(m.mapped) + "\t" + std::to_string(m.total) + "\t" + buf + "\n";
  }
  return out;
}

RunResult run_pipeline(const RunConfig& config, const fs::path& out_dir, std::ostream* log) {
  stage("config", log, [&] {
    config.validate();
    fs::create_directories(out_dir / "models");
    write_text(out_dir / "run.conf", config.serialize());
  });
  const Resources res = stage("resources", log, [&] { return load_resources(config); });

  const corpus::Corpus data = stage("ingest", log, [&] {
    corpus::Corpus c = config.synth.empty() ? corpus::load_corpus(config.corpus)
                                            : generate_synthetic(SynthSpec::load(config.synth));
    if (config.english_only) c = corpus::filter_english(c, langid::bundled_profiles());
    if (config.strip_links) c = corpus::strip_link_only(c);
    corpus::save_corpus(c, out_dir / "corpus.jsonl");
    if (log) *log << "[ingest] " << c.size() << " pairs\n";
    return c;
  });

  const corpus::Splits splits = stage("split", log, [&] {
    auto s = corpus::make_splits(data, config.split);
    corpus::write_split_manifest(s, out_dir / "splits.tsv");
    if (log) *log << "[split] test " << s.test.size() << ", dev " << s.dev.size() << ", train " << s.train.size() << "\n";
    return s;
  });

  std::map<std::string, std::vector<std::string>> hyps;
  for (const auto& system : config.systems) {
    const fs::path model_dir = out_dir / "models" / system;
    if (system == "retrieval") {
      const auto index = stage("train retrieval", log, [&] {
        fs::create_directories(model_dir);
        auto idx = retrieval::TfIdfIndex::build(config.retrieval_expanded ? corpus::expand_sentences(splits.train)
                                                                          : splits.train);
        idx.save(model_dir / "index.tsv");
        return idx;
      });
      hyps[system] = stage("annotate retrieval", log, [&] {
        std::vector<std::string> lines;
        for (const auto& hit : retrieval::annotate_corpus(index, splits.test)) {
          lines.push_back(hit ? one_line(hit->annotation) : std::string());
        }
        write_text(out_dir / hyp_file(system), join_lines(lines));
        return lines;
      });
    } else {
      const auto model = stage("train smt", log, [&] {
        std::vector<align::SentencePair> pairs;
        for (const auto& p : corpus::expand_sentences(splits.train)) {
          auto src = textproc::tokenize(p.lyric), tgt = textproc::tokenize(p.annotation);
          if (!src.empty() && !tgt.empty()) pairs.emplace_back(std::move(src), std::move(tgt));
        }
        smt::SmtModel m = smt::train_smt(pairs, config.train);
        if (log) *log << "[train smt] " << pairs.size() << " pairs, " << m.phrases.num_entries() << " phrases\n";
        return m;
      });
      smt::FeatureWeights weights = model.weights;
      if (config.tune) {
        weights = stage("tune smt", log, [&] {
          std::vector<smt::TuningPair> dev;
          for (const auto& p : splits.dev) {
            auto src = textproc::tokenize(p.lyric), ref = textproc::tokenize(p.annotation);
            if (!src.empty() && !ref.empty()) dev.push_back({std::move(src), std::move(ref)});
          }
          const smt::Decoder decoder(model.phrases, model.lm, config.decoder);
          const auto r = smt::mert(dev, decoder, model.weights, config.mert);
          if (log) *log << "[tune smt] dev BLEU " << r.dev_bleu << " after " << r.iteration_bleu.size() << " decodes\n";
          return r.weights;
        });
      }
      stage("save smt", log, [&] {
        fs::create_directories(model_dir);
        smt::SmtModel tuned = model;
        tuned.weights = weights;
        tuned.save(model_dir);
      });
      hyps[system] = stage("annotate smt", log, [&] {
        const smt::Decoder decoder(model.phrases, model.lm, config.decoder);
        std::vector<std::string> lines;
        for (const auto& p : splits.test) {
          const auto src = textproc::tokenize(p.lyric);
          lines.push_back(src.empty() ? std::string() : textproc::join(decoder.decode(src, weights).output));
        }
        write_text(out_dir / hyp_file(system), join_lines(lines));
        return lines;
      });
    }
  }

  return stage("evaluate", log, [&] {
    RunResult r = evaluate(config, res, splits.test, hyps);
    write_report(out_dir, r);
    return r;
  });
}

RunResult regenerate_report(const fs::path& run_dir) {
  const RunConfig config = stage("config", nullptr, [&] {
    auto c = RunConfig::load(run_dir / "run.conf");
    c.validate();
    return c;
  });
  const Resources res = stage("resources", nullptr, [&] { return load_resources(config); });
  const corpus::Corpus data = stage("ingest", nullptr, [&] { return corpus::load_corpus(run_dir / "corpus.jsonl"); });
  const corpus::Splits splits =
      stage("split", nullptr, [&] { return corpus::read_split_manifest(data, run_dir / "splits.tsv"); });
  return stage("evaluate", nullptr, [&] {
    std::map<std::string, std::vector<std::string>> hyps;
    for (const auto& system : config.systems) hyps[system] = read_lines(run_dir / hyp_file(system));
    return evaluate(config, res, splits.test, hyps);
  });
}

}  // namespace lyricbench::harness
