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

// Weight learning: error functions against gold annotations, min-max error
// normalization and a validated grid search over the weight simplices.

#ifndef MEDEX_LEARNING_H_
#define MEDEX_LEARNING_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "medex/canonicalize.h"
#include "medex/docmodel.h"
#include "medex/extractors.h"
#include "medex/pipeline.h"
#include "medex/scoring.h"

namespace medex {

// --- Embeddings and WMD --------------------------------------------------------

class EmbeddingStore {
 public:
  EmbeddingStore() = default;
  explicit EmbeddingStore(int dimension);

  // word2vec text format: a "V d" header, then one word and d floats per
  // line. Throws IoError or SchemaError.
  static EmbeddingStore load(const std::string &path);
  static EmbeddingStore parse(std::string_view text);

  // Throws SchemaError on a dimension mismatch.
  void add(std::string word, std::vector<double> vec);

  // Exact match first, then the lowercased word.
  const std::vector<double> *find(std::string_view word) const;

  int dimension() const { return dimension_; }
  size_t size() const { return vectors_.size(); }

 private:
  int dimension_ = 0;
  std::unordered_map<std::string, std::vector<double>> vectors_;
};

// Minimum-cost transport between supplies `a` and demands `b` (equal totals)
// under `cost` (row-major, a.size() x b.size()). Exact for these sizes.
double transport_cost(const std::vector<double> &a, const std::vector<double> &b,
                      const std::vector<double> &cost);

// Word mover's distance between normalized bag-of-words histograms of the
// in-vocabulary tokens, with Euclidean ground distance. Throws AllOovError
// when either phrase has no in-vocabulary token.
double wmd(const std::vector<std::string> &a, const std::vector<std::string> &b,
           const EmbeddingStore &emb);

// |midpoint(cand) - midpoint(gold)| in seconds.
double error_when(const Timex3Instance &cand, const Timex3Instance &gold);

// Haversine distance in meters.
double haversine_m(double lat1, double lon1, double lat2, double lon2);
double error_where(const Geocode &cand, double gold_lat, double gold_lon);

// --- Normalization -------------------------------------------------------------

// Min-max normalizer fitted on training errors; non-finite inputs (no answer,
// all out of vocabulary) map to 1 and out-of-range values are clamped.
class Normalizer {
 public:
  Normalizer() = default;
  // Non-finite values are ignored. Throws RangeError without a finite value.
  static Normalizer fit(const std::vector<double> &raw);

  double operator()(double raw) const;
  double min() const { return min_; }
  double max() const { return max_; }

 private:
  double min_ = 0;
  double max_ = 0;
};

// --- Gold data -------------------------------------------------------------------

struct GoldAnnotation {
  std::string article_id;
  std::string document_path;  // resolved against the dataset file's directory
  std::array<std::vector<std::string>, 6> phrases;  // indexed by Question
  std::optional<Timex3Instance> when;
  std::optional<std::pair<double, double>> where;  // lat, lon

  const std::vector<std::string> &gold(Question q) const {
    return phrases[static_cast<size_t>(q)];
  }
  // Throws SchemaError when a question lacks a gold phrase, has more than
  // three, or the WHEN interval is inverted.
  void validate() const;
};

struct DatasetArticle {
  GoldAnnotation gold;
  AnnotatedDocument doc;
};

// JSON lines: {"id", "document", "gold": {"who": [...], ...},
// "when": {"start", "end"}, "where": {"lat", "lon"}}.
std::vector<DatasetArticle> load_dataset(const std::string &path);

// Seeded split of `n` indices; the first holds round(train_fraction * n).
std::pair<std::vector<size_t>, std::vector<size_t>> train_test_split(size_t n,
                                                                     double train_fraction,
                                                                     uint64_t seed);

// --- Grid ----------------------------------------------------------------------

// All weight vectors of length k with entries in {0, g, 2g, ..., 1} summing to
// 1. Throws ConfigError unless 1/g is (close to) an integer.
std::vector<std::vector<double>> simplex_grid(int k, double step);

struct ParamGrid {
  double step = 0.05;
  ScoringConfig constants;  // weights ignored, constants held fixed

  // Grid for a question's weight vector (what shares who's).
  std::vector<std::vector<double>> points(Question q) const;
};

// --- Core search over precomputed factors -----------------------------------------

// One article's candidates for one question, with everything needed to
// re-rank them under any weight vector.
struct QuestionSample {
  std::vector<Candidate> candidates;
  FactorMatrix factors;
  std::vector<double> raw_error;  // per candidate; +inf when undefined
  // How only: the chosen action's sentence, for the distance adjustment.
  std::optional<int> action_sentence;
  int d_len = 1;
  double w0 = 0;
};

// Index of the candidate selected under `weights`, or nullopt.
std::optional<size_t> select_under(const QuestionSample &s, std::span<const double> weights);

// Normalized error of the selected candidate (1 when there is none).
double sample_error(const QuestionSample &s, std::span<const double> weights,
                    const Normalizer &norm);

// Normalizer fitted over every candidate's raw error.
Normalizer fit_normalizer(const std::vector<QuestionSample> &train);

struct WelchResult {
  double t = 0;
  double p = 1;
};
// Two-sided Welch t-test. Two zero-variance samples give p = 1 when their
// means agree and p = 0 otherwise. Throws RangeError for samples of size < 2.
WelchResult welch_test(const std::vector<double> &x, const std::vector<double> &y);

struct RankedConfig {
  std::vector<double> weights;
  double train_me = 0;
  std::optional<double> test_me;
  std::optional<double> p_value;
  bool discarded = false;
};

struct GridSearchResult {
  std::vector<RankedConfig> ranking;  // by train ME, then grid order
  size_t selected = 0;                // index into ranking
  bool fallback = false;
  std::vector<std::string> warnings;

  const RankedConfig &best() const { return ranking.at(selected); }
};

struct GridSearchOptions {
  double top_fraction = 0.05;
  double alpha = 0.05;
};

// Evaluates every grid point on train, re-evaluates the best top_fraction on
// test and discards those whose per-article errors differ significantly.
// `train` and `test` hold one or more samples per article: an article's error
// is the mean over its samples.
GridSearchResult grid_search(const std::vector<std::vector<double>> &grid,
                             const std::vector<std::vector<QuestionSample>> &train,
                             const std::vector<std::vector<QuestionSample>> &test,
                             const Normalizer &norm, const GridSearchOptions &opts = {});

// --- Dataset level -----------------------------------------------------------------

// Samples of one article for all questions. WHO and WHAT errors are WMD
// against their own golds; HOW is adjusted towards the action picked with
// `cfg`'s who weights.
std::array<QuestionSample, 6> build_samples(const DatasetArticle &article,
                                            const CandidateSets &sets,
                                            const EmbeddingStore &emb,
                                            const ScoringConfig &cfg);

struct MeanErrorReport {
  std::array<double, 6> per_question{};
  double overall = 0;
  int articles = 0;
  int skipped = 0;
  std::vector<std::string> warnings;
};

struct LearningContext {
  PipelineOptions pipeline;
  const EmbeddingStore *embeddings = nullptr;
};

// Mean normalized error of `cfg` over `articles`. Articles whose pipeline
// run fails are skipped and counted.
MeanErrorReport mean_error(const ScoringConfig &cfg, const std::vector<DatasetArticle> &articles,
                           const std::array<Normalizer, 6> &norms, const LearningContext &ctx);

struct LearnOptions {
  double train_fraction = 0.8;
  uint64_t seed = 0;
  double grid_step = 0.05;
  GridSearchOptions search;
};

struct LearnReport {
  ScoringConfig config;
  std::map<std::string, GridSearchResult> searches;  // "who" (shared by what), ...
  std::vector<size_t> train;
  std::vector<size_t> test;
  int skipped = 0;
  std::vector<std::string> warnings;
};

// Splits, searches every question's weights and returns the learned config.
LearnReport learn_weights(const std::vector<DatasetArticle> &articles,
                          const LearningContext &ctx, const LearnOptions &opts);

}  // namespace medex

#endif  // MEDEX_LEARNING_H_
