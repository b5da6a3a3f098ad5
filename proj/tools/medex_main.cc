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

// medex command line: extract, serve, learn, magp, icr.
//
// Exit codes: 0 ok, 1 input/schema error, 2 network error, 3 config error,
// 4 other failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "medex/errors.h"
#include "medex/evalkit.h"
#include "medex/geocoder.h"
#include "medex/learning.h"
#include "medex/nlp_adapter.h"
#include "medex/pipeline.h"
#include "medex/service.h"
#include "medex/textutil.h"

namespace {

using nlohmann::json;
using namespace medex;

const char *env_or_null(const char *name) {
  const char *v = std::getenv(name);
  return v && *v ? v : nullptr;
}

// Options shared by every subcommand that runs the pipeline.
struct PipelineFlags {
  std::string config = "default";
  std::string lexicon_dir;
  std::string geocoder_url;
  std::string geocoder_cache;
  std::string nlp_server;
  std::optional<double> threshold_why;
  std::optional<double> threshold_how;
  size_t top_k = kDefaultTopK;

  void add_to(CLI::App *cmd) {
    cmd->add_option("--config", config, "Scoring config file, or 'default'");
    cmd->add_option("--lexicon-dir", lexicon_dir, "Directory with marker lexicons");
    cmd->add_option("--geocoder-url", geocoder_url, "Nominatim base URL (env MED_GEOCODER_URL)");
    cmd->add_option("--geocoder-cache", geocoder_cache,
                    "Geocoder cache file (JSON lines); served offline without a URL");
    cmd->add_option("--nlp-server", nlp_server, "Annotation server URL (env MED_NLP_SERVER)");
    cmd->add_option("--threshold-why", threshold_why, "Minimum score for a why answer");
    cmd->add_option("--threshold-how", threshold_how, "Minimum score for a how answer");
    cmd->add_option("--top-k", top_k, "Candidates reported per question")->check(CLI::PositiveNumber);
  }

  // Owns the geocoder objects the PipelineOptions point to.
  struct Built {
    PipelineOptions pipeline;
    std::optional<AnnotationServerConfig> nlp;
    std::unique_ptr<GeocodeCache> cache;
    std::unique_ptr<NominatimClient> geocoder;
  };

  std::unique_ptr<Built> build() {
    auto b = std::make_unique<Built>();
    if (geocoder_url.empty())
      if (const char *v = env_or_null("MED_GEOCODER_URL")) geocoder_url = v;
    if (nlp_server.empty())
      if (const char *v = env_or_null("MED_NLP_SERVER")) nlp_server = v;

    ScoringConfig cfg;
    if (config != "default") cfg = ScoringConfig::from_text(read_file(config));
    if (threshold_why) cfg.answer_threshold[static_cast<size_t>(Question::kWhy)] = threshold_why;
    if (threshold_how) cfg.answer_threshold[static_cast<size_t>(Question::kHow)] = threshold_how;
    cfg.validate();
    b->pipeline.config = cfg;
    b->pipeline.lexicons =
        LexiconSet::load(lexicon_dir.empty() ? default_lexicon_dir() : lexicon_dir);
    b->pipeline.top_k = top_k;

    if (!geocoder_url.empty() || !geocoder_cache.empty()) {
      b->cache = geocoder_cache.empty() ? std::make_unique<GeocodeCache>()
                                        : std::make_unique<GeocodeCache>(geocoder_cache);
      NominatimOptions opts;
      opts.url = geocoder_url;
      b->geocoder = std::make_unique<NominatimClient>(opts, b->cache.get());
      b->pipeline.geocoder = b->geocoder.get();
    }
    if (!nlp_server.empty()) {
      AnnotationServerConfig nlp;
      nlp.endpoint = nlp_server;
      b->nlp = nlp;
    }
    return b;
  }
};

void write_output(const std::string &path, const std::string &text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path + ": cannot open for writing");
  out << text;
}

int run_extract(PipelineFlags &flags, const std::string &annotated, const std::string &raw,
                const std::string &out, bool dump_config) {
  if (dump_config) {
    write_output(out, ScoringConfig{}.to_text());
    return 0;
  }
  if (annotated.empty() == raw.empty())
    throw ConfigError("give exactly one of --annotated and --raw");
  auto built = flags.build();
  AnnotatedDocument doc;
  if (!annotated.empty()) {
    doc = annotate_offline(annotated);
  } else {
    json j;
    try {
      j = json::parse(read_file(raw));
    } catch (const json::parse_error &e) {
      throw SchemaError(raw, e.what());
    }
    ArticleInput article = article_from_json(j);
    if (!built->nlp) throw ConfigError("--raw needs --nlp-server or MED_NLP_SERVER");
    doc = annotate_remote(article, *built->nlp);
  }
  write_output(out, serialize_result(run_pipeline(doc, built->pipeline)));
  return 0;
}

int run_serve(PipelineFlags &flags, const std::string &host, int port) {
  auto built = flags.build();
  ServiceOptions opts;
  opts.pipeline = built->pipeline;
  opts.nlp = built->nlp;
  ExtractionService service(opts);
  std::cerr << "medex: listening on " << host << ":" << port << "\n";
  if (!service.listen(host, port)) throw NetworkError("cannot bind " + host + ":" + std::to_string(port));
  return 0;
}

int run_learn(PipelineFlags &flags, const std::string &dataset, const std::string &embeddings,
              const LearnOptions &opts, const std::string &out, const std::string &report_path) {
  auto built = flags.build();
  auto articles = load_dataset(dataset);
  EmbeddingStore emb = EmbeddingStore::load(embeddings);
  LearningContext ctx{built->pipeline, &emb};
  LearnReport report = learn_weights(articles, ctx, opts);
  for (const auto &w : report.warnings) std::cerr << "medex: warning: " << w << "\n";
  write_output(out, report.config.to_text());
  if (!report_path.empty()) {
    write_output(report_path, learn_report_to_json(report).dump(2) + "\n");
  }
  return 0;
}

int run_magp(const std::string &path, const std::string &group) {
  GroupBy g = group == "question" ? GroupBy::kQuestion
              : group == "category" ? GroupBy::kCategory
                                    : GroupBy::kOverall;
  std::cout << magp_report_to_json(magp(load_assessments(path), g)).dump(2) << "\n";
  return 0;
}

int run_icr(const std::string &path) {
  json j = {{"icr", icr(load_annotations(path))}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"medex: main event extraction from news articles"};
  app.require_subcommand(1);

  PipelineFlags extract_flags, serve_flags, learn_flags;

  auto *extract = app.add_subcommand("extract", "Extract the main event of one article");
  std::string annotated, raw, out;
  bool dump_config = false;
  extract->add_option("--annotated", annotated, "Pre-annotated document (JSON)");
  extract->add_option("--raw", raw, "Raw article JSON {title, lead?, body, date?}");
  extract->add_option("--out", out, "Output file (default stdout)");
  extract->add_flag("--dump-default-config", dump_config, "Print the default scoring config");
  extract_flags.add_to(extract);

  auto *serve = app.add_subcommand("serve", "Run the REST service");
  std::string host = "127.0.0.1";
  int port = 8080;
  serve->add_option("--host", host);
  serve->add_option("--port", port);
  serve_flags.add_to(serve);

  auto *learn = app.add_subcommand("learn", "Grid-search scoring weights on a gold dataset");
  std::string dataset, embeddings, learn_out, report_path;
  LearnOptions learn_opts;
  learn->add_option("--dataset", dataset, "Gold dataset (JSON lines)")->required();
  learn->add_option("--embeddings", embeddings, "Word vectors (word2vec text)")->required();
  learn->add_option("--train-split", learn_opts.train_fraction)->check(CLI::Range(0.0, 1.0));
  learn->add_option("--seed", learn_opts.seed);
  learn->add_option("--grid-step", learn_opts.grid_step);
  learn->add_option("--out", learn_out, "Learned config file (default stdout)");
  learn->add_option("--report", report_path, "Search report (JSON)");
  learn_flags.add_to(learn);

  auto *magp_cmd = app.add_subcommand("magp", "Mean average generalized precision");
  std::string assessments, group = "question";
  magp_cmd->add_option("--assessments", assessments)->required();
  magp_cmd->add_option("--group-by", group)->check(CLI::IsMember({"question", "category", "overall"}));

  auto *icr_cmd = app.add_subcommand("icr", "Intercoder reliability");
  std::string annotations;
  icr_cmd->add_option("--annotations", annotations)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*extract) return run_extract(extract_flags, annotated, raw, out, dump_config);
    if (*serve) return run_serve(serve_flags, host, port);
    if (*learn) return run_learn(learn_flags, dataset, embeddings, learn_opts, learn_out, report_path);
    if (*magp_cmd) return run_magp(assessments, group);
    if (*icr_cmd) return run_icr(annotations);
  } catch (const SchemaError &e) {
    std::cerr << "medex: schema error: " << e.what() << "\n";
    return 1;
  } catch (const IoError &e) {
    std::cerr << "medex: schema error: " << e.what() << "\n";
    return 1;
  } catch (const DegenerateDocument &e) {
    std::cerr << "medex: schema error: " << e.what() << "\n";
    return 1;
  } catch (const NetworkError &e) {
    std::cerr << "medex: network error: " << e.what() << "\n";
    return 2;
  } catch (const ProtocolError &e) {
    std::cerr << "medex: network error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError &e) {
    std::cerr << "medex: config error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception &e) {
    std::cerr << "medex: error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
