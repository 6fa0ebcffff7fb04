#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <string>
#include <vector>

#include "lyricbench/agreement.h"
#include "lyricbench/align.h"
#include "lyricbench/corpus.h"
#include "lyricbench/error.h"
#include "lyricbench/harness.h"
#include "lyricbench/metrics.h"
#include "lyricbench/retrieval.h"
#include "lyricbench/smt.h"
#include "lyricbench/textproc.h"

namespace py = pybind11;
using namespace lyricbench;

namespace {

using Seqs = std::vector<TokenSeq>;

std::vector<metrics::EvalInstance> instances(const Seqs& sources, const Seqs& candidates,
                                             const std::vector<Seqs>& references) {
  if (candidates.size() != references.size() || (!sources.empty() && sources.size() != candidates.size())) {
    throw InvalidArgument("sources, candidates and references must have equal lengths");
  }
  std::vector<metrics::EvalInstance> out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    out.push_back({sources.empty() ? TokenSeq{} : sources[i], candidates[i], references[i]});
  }
  return out;
}

py::dict pair_to_dict(const corpus::AnnotationPair& p) {
  py::dict d;
  d["id"] = p.id;
  d["song_id"] = p.song_id;
  d["lyric"] = p.lyric;
  d["annotation"] = p.annotation;
  d["context_label"] = p.context_label == corpus::ContextLabel::kUnlabeled
                           ? py::object(py::none())
                           : py::object(py::str(std::string(corpus::to_string(p.context_label))));
  return d;
}

py::list corpus_to_list(const corpus::Corpus& c) {
  py::list out;
  for (const auto& p : c) out.append(pair_to_dict(p));
  return out;
}

py::dict report_to_dict(const metrics::MetricReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? py::object(py::float_(*v)) : py::object(py::none()); };
  py::dict d;
  d["system"] = r.system;
  d["bleu"] = opt(r.bleu);
  d["ibleu"] = opt(r.ibleu);
  d["meteor"] = opt(r.meteor);
  d["sari"] = opt(r.sari);
  d["length_ratio"] = r.length_ratio;
  d["profanity_per_token"] = r.profanity_per_token;
  return d;
}

py::dict run_result_to_dict(const harness::RunResult& r) {
  py::list rows;
  for (const auto& row : r.rows) rows.append(report_to_dict(row));
  py::dict slang;
  for (const auto& [system, m] : r.slang) slang[py::str(system)] = py::make_tuple(m.mapped, m.total, m.rate());
  py::dict d;
  d["rows"] = rows;
  d["slang"] = slang;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Automated lyric annotation benchmark: metrics, baselines and pipeline";

  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", error.ptr());
  py::register_exception<harness::StageError>(m, "StageError", error.ptr());

  m.def("tokenize", &textproc::tokenize, py::arg("text"));
  m.def("stem", [](const std::string& token) { return textproc::stem(token); }, py::arg("token"));

  // Metrics over parallel lists; every reference entry is a list of token lists.
  m.def(
      "bleu",
      [](const Seqs& candidates, const std::vector<Seqs>& references) {
        return metrics::bleu(instances({}, candidates, references));
      },
      py::arg("candidates"), py::arg("references"));
  m.def(
      "ibleu",
      [](const Seqs& sources, const Seqs& candidates, const std::vector<Seqs>& references) {
        return metrics::ibleu(instances(sources, candidates, references));
      },
      py::arg("sources"), py::arg("candidates"), py::arg("references"));
  m.def(
      "meteor",
      [](const Seqs& candidates, const std::vector<Seqs>& references) {
        return metrics::meteor(instances({}, candidates, references));
      },
      py::arg("candidates"), py::arg("references"));
  m.def(
      "sari",
      [](const Seqs& sources, const Seqs& candidates, const std::vector<Seqs>& references) {
        return metrics::sari(instances(sources, candidates, references));
      },
      py::arg("sources"), py::arg("candidates"), py::arg("references"));
  m.def("combine_ibleu", &metrics::combine_ibleu, py::arg("bleu_ref"), py::arg("bleu_src"), py::arg("alpha") = 0.9);

  m.def(
      "fleiss_kappa",
      [](const std::vector<std::vector<int>>& counts) {
        return agreement::fleiss_kappa(agreement::RatingMatrix(counts));
      },
      py::arg("counts"));
  m.def(
      "pearson", [](const std::vector<double>& x, const std::vector<double>& y) { return agreement::pearson(x, y); },
      py::arg("x"), py::arg("y"));

  m.def(
      "load_corpus", [](const std::filesystem::path& path) { return corpus_to_list(corpus::load_corpus(path)); },
      py::arg("path"));
  m.def(
      "generate_synthetic",
      [](const std::filesystem::path& spec) {
        return corpus_to_list(harness::generate_synthetic(harness::SynthSpec::load(spec)));
      },
      py::arg("spec_path"));
  m.def(
      "split_sentences", [](const std::string& text) { return corpus::split_sentences(text); }, py::arg("text"));

  py::class_<retrieval::TfIdfIndex>(m, "TfIdfIndex")
      .def_static(
          "build",
          [](const std::vector<std::pair<std::string, std::string>>& pairs) {
            corpus::Corpus c;
            for (std::size_t i = 0; i < pairs.size(); ++i) {
              c.add({std::to_string(i), "", pairs[i].first, pairs[i].second, corpus::ContextLabel::kUnlabeled});
            }
            return retrieval::TfIdfIndex::build(c);
          },
          py::arg("pairs"), "Index (lyric, annotation) pairs.")
      .def_static("load", &retrieval::TfIdfIndex::load, py::arg("path"))
      .def("save", &retrieval::TfIdfIndex::save, py::arg("path"))
      .def(
          "retrieve",
          [](const retrieval::TfIdfIndex& idx, const std::string& lyric) -> py::object {
            const auto hit = idx.retrieve(lyric);
            if (!hit) return py::none();
            return py::make_tuple(hit->annotation, hit->score, hit->doc);
          },
          py::arg("lyric"), "(annotation, cosine, doc) of the best match, or None.")
      .def_property_readonly("n_docs", &retrieval::TfIdfIndex::n_docs)
      .def_property_readonly("vocabulary_size", &retrieval::TfIdfIndex::vocabulary_size);

  m.def(
      "train_model1",
      [](const std::vector<std::pair<TokenSeq, TokenSeq>>& pairs, int iterations) {
        align::Model1Options opts;
        opts.iterations = iterations;
        std::vector<double> ll;
        const auto table = align::train_model1(pairs, opts, &ll);
        py::dict probs;
        for (const auto& [s, t, p] : table.entries()) probs[py::make_tuple(s, t)] = p;
        return py::make_tuple(probs, ll);
      },
      py::arg("pairs"), py::arg("iterations") = 5,
      "Returns ({(source, target): t(target|source)}, log-likelihood per iteration).");

  m.def(
      "run_pipeline",
      [](const std::filesystem::path& config, const std::filesystem::path& out_dir,
         const std::map<std::string, std::string>& overrides) {
        auto cfg = harness::RunConfig::load(config);
        for (const auto& [k, v] : overrides) cfg.set(k, v, std::filesystem::current_path());
        harness::RunResult r;
        {
          py::gil_scoped_release release;
          r = harness::run_pipeline(cfg, out_dir);
        }
        return run_result_to_dict(r);
      },
      py::arg("config"), py::arg("out_dir"), py::arg("overrides") = std::map<std::string, std::string>{});
  m.def(
      "regenerate_report",
      [](const std::filesystem::path& run_dir) { return run_result_to_dict(harness::regenerate_report(run_dir)); },
      py::arg("run_dir"));
  m.def("config_keys", &harness::RunConfig::keys);
}
