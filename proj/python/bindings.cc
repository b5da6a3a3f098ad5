// Copyright 2026 The medex Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Python extension module `medex._medex`. Documents and results cross the
// boundary as JSON text; the pure-Python package wraps them in dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>
#include <string>

#include "json.hpp"
#include "medex/errors.h"
#include "medex/evalkit.h"
#include "medex/geocoder.h"
#include "medex/learning.h"
#include "medex/nlp_adapter.h"
#include "medex/pipeline.h"
#include "medex/service.h"

namespace py = pybind11;
using namespace medex;

namespace {

// Pipeline options plus the geocoder objects they point to.
class Extractor {
 public:
  Extractor(std::optional<std::string> config_text, std::optional<std::string> geocoder_cache,
            std::optional<std::string> geocoder_url, std::optional<std::string> nlp_server,
            size_t top_k, std::optional<double> threshold_why,
            std::optional<double> threshold_how) {
    ScoringConfig cfg;
    if (config_text) cfg = ScoringConfig::from_text(*config_text);
    if (threshold_why) cfg.answer_threshold[static_cast<size_t>(Question::kWhy)] = threshold_why;
    if (threshold_how) cfg.answer_threshold[static_cast<size_t>(Question::kHow)] = threshold_how;
    cfg.validate();
    if (top_k == 0) throw ConfigError("top_k must be positive");
    options_.config = cfg;
    options_.top_k = top_k;
    if (geocoder_cache || geocoder_url) {
      cache_ = geocoder_cache ? std::make_unique<GeocodeCache>(*geocoder_cache)
                              : std::make_unique<GeocodeCache>();
      NominatimOptions opts;
      opts.url = geocoder_url.value_or("");
      geocoder_ = std::make_unique<NominatimClient>(opts, cache_.get());
      options_.geocoder = geocoder_.get();
    }
    if (nlp_server) {
      nlp_ = AnnotationServerConfig{*nlp_server};
      nlp_->validate();
    }
  }

  std::string extract_annotated(const std::string &document_json) const {
    py::gil_scoped_release release;
    return serialize_result(run_pipeline(load_annotated(document_json), options_));
  }

  std::string extract_article(const std::string &article_json) const {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(article_json);
    } catch (const nlohmann::json::parse_error &e) {
      throw SchemaError("$", e.what());
    }
    ArticleInput article = article_from_json(j);
    if (!nlp_) throw ConfigError("raw articles need an annotation server (nlp_server)");
    py::gil_scoped_release release;
    return serialize_result(run_pipeline(annotate_remote(article, *nlp_), options_));
  }

  std::string config_text() const { return options_.config.to_text(); }

  const PipelineOptions &options() const { return options_; }

 private:
  PipelineOptions options_;
  std::unique_ptr<GeocodeCache> cache_;
  std::unique_ptr<NominatimClient> geocoder_;
  std::optional<AnnotationServerConfig> nlp_;
};

GroupBy group_from_name(const std::string &name) {
  if (name == "question") return GroupBy::kQuestion;
  if (name == "category") return GroupBy::kCategory;
  if (name == "overall") return GroupBy::kOverall;
  throw ConfigError("group_by must be question, category or overall");
}

Question question_or_throw(const std::string &name) {
  auto q = question_from_name(name);
  if (!q) throw SchemaError("question", "unknown question '" + name + "'");
  return *q;
}

}  // namespace

PYBIND11_MODULE(_medex, m) {
  m.doc() = "Main event extraction core";

  auto base = py::register_exception<Error>(m, "MedexError", PyExc_RuntimeError);
  py::register_exception<SchemaError>(m, "SchemaError", base.ptr());
  py::register_exception<RangeError>(m, "RangeError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<NetworkError>(m, "NetworkError", base.ptr());
  py::register_exception<ProtocolError>(m, "ProtocolError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<DegenerateDocument>(m, "DegenerateDocument", base.ptr());
  py::register_exception<InvariantViolation>(m, "InvariantViolation", base.ptr());
  py::register_exception<AllOovError>(m, "AllOovError", base.ptr());
  py::register_exception<ArityError>(m, "ArityError", base.ptr());

  py::class_<Extractor>(m, "Extractor")
      .def(py::init<std::optional<std::string>, std::optional<std::string>,
                    std::optional<std::string>, std::optional<std::string>, size_t,
                    std::optional<double>, std::optional<double>>(),
           py::kw_only(), py::arg("config_text") = py::none(),
           py::arg("geocoder_cache") = py::none(), py::arg("geocoder_url") = py::none(),
           py::arg("nlp_server") = py::none(), py::arg("top_k") = kDefaultTopK,
           py::arg("threshold_why") = py::none(), py::arg("threshold_how") = py::none())
      .def("extract_annotated", &Extractor::extract_annotated, py::arg("document_json"),
           "Extracts from a pre-annotated document; returns result JSON text.")
      .def("extract_article", &Extractor::extract_article, py::arg("article_json"),
           "Annotates a raw article through the annotation server, then extracts.")
      .def("config_text", &Extractor::config_text);

  m.def("default_config_text", [] { return ScoringConfig{}.to_text(); });
  m.def("normalize_config_text", [](const std::string &text) {
    return ScoringConfig::from_text(text).to_text();
  });

  py::class_<EmbeddingStore>(m, "Embeddings")
      .def_static("load", &EmbeddingStore::load, py::arg("path"))
      .def_static("parse", [](const std::string &text) { return EmbeddingStore::parse(text); },
                  py::arg("text"))
      .def_property_readonly("dimension", &EmbeddingStore::dimension)
      .def("__len__", &EmbeddingStore::size)
      .def("wmd",
           [](const EmbeddingStore &self, const std::vector<std::string> &a,
              const std::vector<std::string> &b) { return wmd(a, b, self); },
           py::arg("a"), py::arg("b"));

  m.def(
      "magp",
      [](const std::vector<std::tuple<std::string, std::string, double, std::string>> &rows,
         const std::string &group_by) {
        std::vector<Assessment> assessments;
        for (const auto &[article, question, grade, category] : rows)
          assessments.push_back({article, question_or_throw(question), category, grade});
        return magp_report_to_json(magp(assessments, group_from_name(group_by))).dump();
      },
      py::arg("rows"), py::arg("group_by") = "question");

  m.def(
      "icr",
      [](const std::map<std::string, std::map<std::pair<std::string, std::string>, std::string>>
             &annos) {
        AnnotationSet set;
        for (const auto &[annotator, keys] : annos)
          for (const auto &[key, phrase] : keys)
            set[annotator][{key.first, question_or_throw(key.second)}] = phrase;
        return icr(set);
      },
      py::arg("annotations"));

  m.def(
      "learn",
      [](const std::string &dataset, const std::string &embeddings, const Extractor &extractor,
         uint64_t seed, double train_fraction, double grid_step) {
        py::gil_scoped_release release;
        auto articles = load_dataset(dataset);
        EmbeddingStore emb = EmbeddingStore::load(embeddings);
        LearningContext ctx{extractor.options(), &emb};
        LearnOptions opts;
        opts.seed = seed;
        opts.train_fraction = train_fraction;
        opts.grid_step = grid_step;
        LearnReport report = learn_weights(articles, ctx, opts);
        auto j = learn_report_to_json(report);
        j["config"] = report.config.to_text();
        return j.dump();
      },
      py::arg("dataset"), py::arg("embeddings"), py::arg("extractor"), py::arg("seed") = 0,
      py::arg("train_fraction") = 0.8, py::arg("grid_step") = 0.05);
}
