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

#include "medex/learning.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

#include "json.hpp"
#include "medex/errors.h"
#include "medex/textutil.h"
#include "medex/timeutil.h"

namespace medex {

using nlohmann::json;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

// --- EmbeddingStore ----------------------------------------------------------

EmbeddingStore::EmbeddingStore(int dimension) : dimension_(dimension) {
  if (dimension <= 0) throw RangeError("embedding dimension must be positive");
}

EmbeddingStore EmbeddingStore::load(const std::string &path) { return parse(read_file(path)); }

EmbeddingStore EmbeddingStore::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  long vocab = 0;
  int dim = 0;
  if (!std::getline(in, line) || !(std::istringstream(line) >> vocab >> dim) || dim <= 0 ||
      vocab < 0)
    throw SchemaError("line 1", "expected header 'V d'");
  EmbeddingStore store(dim);
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::istringstream fields(line);
    std::string word;
    fields >> word;
    std::vector<double> vec(dim);
    for (double &x : vec)
      if (!(fields >> x))
        throw SchemaError("line " + std::to_string(lineno),
                          "expected " + std::to_string(dim) + " values");
    double extra;
    if (fields >> extra)
      throw SchemaError("line " + std::to_string(lineno),
                        "more than " + std::to_string(dim) + " values");
    store.add(std::move(word), std::move(vec));
  }
  if (static_cast<long>(store.size()) != vocab)
    throw SchemaError("line 1", "header announces " + std::to_string(vocab) + " words, found " +
                                    std::to_string(store.size()));
  return store;
}

void EmbeddingStore::add(std::string word, std::vector<double> vec) {
  if (static_cast<int>(vec.size()) != dimension_)
    throw SchemaError(word, "vector has dimension " + std::to_string(vec.size()) +
                                ", store has " + std::to_string(dimension_));
  vectors_[std::move(word)] = std::move(vec);
}

const std::vector<double> *EmbeddingStore::find(std::string_view word) const {
  auto it = vectors_.find(std::string(word));
  if (it == vectors_.end()) it = vectors_.find(to_lower(word));
  return it == vectors_.end() ? nullptr : &it->second;
}

// --- Transport ---------------------------------------------------------------

double transport_cost(const std::vector<double> &a, const std::vector<double> &b,
                      const std::vector<double> &cost) {
  const int m = static_cast<int>(a.size());
  const int n = static_cast<int>(b.size());
  if (cost.size() != static_cast<size_t>(m) * n)
    throw RangeError("cost matrix does not match supplies and demands");

  // Successive shortest paths on source -> supplies -> demands -> sink.
  struct Edge {
    int to;
    double cap;
    double cost;
  };
  const int source = m + n, sink = m + n + 1, nodes = m + n + 2;
  std::vector<Edge> edges;
  std::vector<std::vector<int>> adj(nodes);
  auto add_edge = [&](int u, int v, double cap, double c) {
    adj[u].push_back(static_cast<int>(edges.size()));
    edges.push_back({v, cap, c});
    adj[v].push_back(static_cast<int>(edges.size()));
    edges.push_back({u, 0, -c});
  };
  double total = 0;
  for (int i = 0; i < m; ++i) {
    add_edge(source, i, a[i], 0);
    total += a[i];
  }
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) add_edge(i, m + j, kInf, cost[i * n + j]);
  for (int j = 0; j < n; ++j) add_edge(m + j, sink, b[j], 0);

  constexpr double kEps = 1e-13;
  double flow = 0, result = 0;
  while (flow < total - kEps) {
    std::vector<double> dist(nodes, kInf);
    std::vector<int> via(nodes, -1);
    dist[source] = 0;
    for (int round = 0; round < nodes - 1; ++round) {
      bool changed = false;
      for (int u = 0; u < nodes; ++u) {
        if (dist[u] == kInf) continue;
        for (int e : adj[u]) {
          const Edge &ed = edges[e];
          if (ed.cap <= kEps) continue;
          double nd = dist[u] + ed.cost;
          if (nd < dist[ed.to] - 1e-15) {
            dist[ed.to] = nd;
            via[ed.to] = e;
            changed = true;
          }
        }
      }
      if (!changed) break;
    }
    if (dist[sink] == kInf) break;
    double push = kInf;
    for (int v = sink; v != source; v = edges[via[v] ^ 1].to) push = std::min(push, edges[via[v]].cap);
    for (int v = sink; v != source; v = edges[via[v] ^ 1].to) {
      edges[via[v]].cap -= push;
      edges[via[v] ^ 1].cap += push;
    }
    flow += push;
    result += push * dist[sink];
  }
  return result;
}

double wmd(const std::vector<std::string> &a, const std::vector<std::string> &b,
           const EmbeddingStore &emb) {
  auto histogram = [&](const std::vector<std::string> &words, const char *which) {
    std::vector<const std::vector<double> *> vecs;
    std::vector<double> mass;
    for (const auto &w : words) {
      const auto *v = emb.find(w);
      if (!v) continue;
      auto it = std::find(vecs.begin(), vecs.end(), v);
      if (it == vecs.end()) {
        vecs.push_back(v);
        mass.push_back(1);
      } else {
        mass[it - vecs.begin()] += 1;
      }
    }
    if (vecs.empty()) throw AllOovError(std::string(which) + " phrase has no known word");
    double total = std::accumulate(mass.begin(), mass.end(), 0.0);
    for (double &x : mass) x /= total;
    return std::make_pair(vecs, mass);
  };
  auto [va, ma] = histogram(a, "first");
  auto [vb, mb] = histogram(b, "second");
  std::vector<double> cost(va.size() * vb.size());
  for (size_t i = 0; i < va.size(); ++i)
    for (size_t j = 0; j < vb.size(); ++j) {
      double s = 0;
      for (size_t k = 0; k < va[i]->size(); ++k) {
        double d = (*va[i])[k] - (*vb[j])[k];
        s += d * d;
      }
      cost[i * vb.size() + j] = std::sqrt(s);
    }
  return std::max(0.0, transport_cost(ma, mb, cost));
}

double error_when(const Timex3Instance &cand, const Timex3Instance &gold) {
  return std::fabs(cand.midpoint() - gold.midpoint());
}

double haversine_m(double lat1, double lon1, double lat2, double lon2) {
  constexpr double kRad = M_PI / 180.0;
  double dlat = (lat2 - lat1) * kRad;
  double dlon = (lon2 - lon1) * kRad;
  double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
             std::cos(lat1 * kRad) * std::cos(lat2 * kRad) * std::sin(dlon / 2) * std::sin(dlon / 2);
  return 2 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

double error_where(const Geocode &cand, double gold_lat, double gold_lon) {
  return haversine_m(cand.lat, cand.lon, gold_lat, gold_lon);
}

// --- Normalizer --------------------------------------------------------------

Normalizer Normalizer::fit(const std::vector<double> &raw) {
  Normalizer n;
  bool any = false;
  for (double x : raw) {
    if (!std::isfinite(x)) continue;
    if (!any) {
      n.min_ = n.max_ = x;
      any = true;
    }
    n.min_ = std::min(n.min_, x);
    n.max_ = std::max(n.max_, x);
  }
  if (!any) throw RangeError("no finite error to fit a normalizer on");
  return n;
}

double Normalizer::operator()(double raw) const {
  if (!std::isfinite(raw)) return 1.0;
  if (max_ == min_) return raw <= min_ ? 0.0 : 1.0;
  return std::clamp((raw - min_) / (max_ - min_), 0.0, 1.0);
}

// --- Gold data ---------------------------------------------------------------

void GoldAnnotation::validate() const {
  for (Question q : kAllQuestions) {
    const auto &g = gold(q);
    std::string path = "$." + article_id + ".gold." + std::string(question_name(q));
    if (g.empty()) throw SchemaError(path, "needs at least one gold phrase");
    if (g.size() > 3) throw SchemaError(path, "at most three gold phrases");
  }
  if (!when) throw SchemaError("$." + article_id + ".when", "missing gold interval");
  if (when->end < when->start) throw SchemaError("$." + article_id + ".when", "end before start");
  if (!where) throw SchemaError("$." + article_id + ".where", "missing gold coordinates");
}

std::vector<DatasetArticle> load_dataset(const std::string &path) {
  namespace fs = std::filesystem;
  fs::path base = fs::path(path).parent_path();
  std::istringstream in(read_file(path));
  std::vector<DatasetArticle> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::string where = path + ":" + std::to_string(lineno);
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error &e) {
      throw SchemaError(where, e.what());
    }
    try {
      GoldAnnotation g;
      g.article_id = rec.at("id").get<std::string>();
      fs::path doc = rec.at("document").get<std::string>();
      g.document_path = (doc.is_absolute() ? doc : base / doc).string();
      const json &gold = rec.at("gold");
      for (Question q : kAllQuestions) {
        auto key = std::string(question_name(q));
        if (!gold.contains(key)) continue;
        const json &v = gold[key];
        if (v.is_string())
          g.phrases[static_cast<size_t>(q)].push_back(v.get<std::string>());
        else
          g.phrases[static_cast<size_t>(q)] = v.get<std::vector<std::string>>();
      }
      if (rec.contains("when")) {
        auto start = parse_datetime(rec["when"].at("start").get<std::string>());
        auto end = parse_datetime(rec["when"].at("end").get<std::string>());
        if (!start || !end) throw SchemaError(where + ".when", "bad datetime");
        Timex3Instance t;
        t.start = start->utc;
        t.end = end->utc;
        t.kind = t.start == t.end ? TimexKind::kExactTime : TimexKind::kDuration;
        g.when = t;
      }
      if (rec.contains("where"))
        g.where = std::make_pair(rec["where"].at("lat").get<double>(),
                                 rec["where"].at("lon").get<double>());
      g.validate();
      DatasetArticle art;
      art.doc = load_annotated(read_file(g.document_path));
      art.gold = std::move(g);
      out.push_back(std::move(art));
    } catch (const json::exception &e) {
      throw SchemaError(where, e.what());
    }
  }
  return out;
}

std::pair<std::vector<size_t>, std::vector<size_t>> train_test_split(size_t n,
                                                                     double train_fraction,
                                                                     uint64_t seed) {
  if (!(train_fraction > 0 && train_fraction < 1))
    throw ConfigError("train fraction must lie in (0, 1)");
  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  // Fisher-Yates with an explicit draw keeps the split identical across
  // standard library implementations.
  for (size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[rng() % i]);
  size_t k = static_cast<size_t>(std::llround(train_fraction * static_cast<double>(n)));
  std::vector<size_t> train(idx.begin(), idx.begin() + k), test(idx.begin() + k, idx.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {train, test};
}

// --- Grid --------------------------------------------------------------------

std::vector<std::vector<double>> simplex_grid(int k, double step) {
  if (k <= 0) throw ConfigError("grid dimension must be positive");
  if (!(step > 0 && step <= 1)) throw ConfigError("grid step must lie in (0, 1]");
  double units_f = 1.0 / step;
  long units = std::lround(units_f);
  if (std::fabs(units_f - static_cast<double>(units)) > 1e-6)
    throw ConfigError("grid step must divide 1");
  std::vector<std::vector<double>> out;
  std::vector<long> parts(k, 0);
  // Enumerate compositions of `units` into k parts in lexicographic order.
  auto rec = [&](auto &self, int i, long left) -> void {
    if (i == k - 1) {
      parts[i] = left;
      std::vector<double> w(k);
      for (int j = 0; j < k; ++j) w[j] = static_cast<double>(parts[j]) / static_cast<double>(units);
      out.push_back(std::move(w));
      return;
    }
    for (long v = 0; v <= left; ++v) {
      parts[i] = v;
      self(self, i + 1, left - v);
    }
  };
  rec(rec, 0, units);
  return out;
}

std::vector<std::vector<double>> ParamGrid::points(Question q) const {
  return simplex_grid(static_cast<int>(factor_names(q).size()), step);
}

// --- Core search -------------------------------------------------------------

std::optional<size_t> select_under(const QuestionSample &s, std::span<const double> weights) {
  std::optional<size_t> best;
  double best_score = 0;
  for (size_t i = 0; i < s.candidates.size(); ++i) {
    double score = weighted_sum(weights, s.factors[i]);
    if (s.action_sentence)
      score -= s.w0 * std::abs(s.candidates[i].span.sentence - *s.action_sentence) /
               static_cast<double>(s.d_len);
    if (!best || outranks(score, s.candidates[i].span, best_score, s.candidates[*best].span)) {
      best = i;
      best_score = score;
    }
  }
  return best;
}

double sample_error(const QuestionSample &s, std::span<const double> weights,
                    const Normalizer &norm) {
  auto i = select_under(s, weights);
  return i ? norm(s.raw_error[*i]) : 1.0;
}

Normalizer fit_normalizer(const std::vector<QuestionSample> &train) {
  std::vector<double> all;
  for (const auto &s : train) all.insert(all.end(), s.raw_error.begin(), s.raw_error.end());
  return Normalizer::fit(all);
}

WelchResult welch_test(const std::vector<double> &x, const std::vector<double> &y) {
  if (x.size() < 2 || y.size() < 2) throw RangeError("Welch test needs two values per sample");
  auto moments = [](const std::vector<double> &v) {
    double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0;
    for (double e : v) ss += (e - mean) * (e - mean);
    return std::make_pair(mean, ss / static_cast<double>(v.size() - 1));
  };
  auto [mx, vx] = moments(x);
  auto [my, vy] = moments(y);
  double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
  double ax = vx / nx, ay = vy / ny;
  WelchResult r;
  if (ax + ay == 0) {
    r.t = mx == my ? 0 : (mx > my ? kInf : -kInf);
    r.p = mx == my ? 1 : 0;
    return r;
  }
  r.t = (mx - my) / std::sqrt(ax + ay);
  double df = (ax + ay) * (ax + ay) / (ax * ax / (nx - 1) + ay * ay / (ny - 1));
  boost::math::students_t dist(df);
  r.p = 2 * boost::math::cdf(boost::math::complement(dist, std::fabs(r.t)));
  return r;
}

namespace {

std::vector<double> article_errors(const std::vector<std::vector<QuestionSample>> &articles,
                                   std::span<const double> weights, const Normalizer &norm) {
  std::vector<double> out;
  out.reserve(articles.size());
  for (const auto &samples : articles) {
    if (samples.empty()) continue;
    double s = 0;
    for (const auto &sample : samples) s += sample_error(sample, weights, norm);
    out.push_back(s / static_cast<double>(samples.size()));
  }
  return out;
}

double mean_of(const std::vector<double> &v) {
  return v.empty() ? 1.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

GridSearchResult grid_search(const std::vector<std::vector<double>> &grid,
                             const std::vector<std::vector<QuestionSample>> &train,
                             const std::vector<std::vector<QuestionSample>> &test,
                             const Normalizer &norm, const GridSearchOptions &opts) {
  if (grid.empty()) throw ConfigError("empty parameter grid");
  GridSearchResult result;
  std::vector<std::vector<double>> train_errors;
  for (const auto &w : grid) {
    train_errors.push_back(article_errors(train, w, norm));
    result.ranking.push_back({w, mean_of(train_errors.back()), {}, {}, false});
  }
  std::vector<size_t> order(grid.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return result.ranking[a].train_me < result.ranking[b].train_me;
  });
  std::vector<RankedConfig> ranked;
  std::vector<std::vector<double>> ranked_errors;
  for (size_t i : order) {
    ranked.push_back(result.ranking[i]);
    ranked_errors.push_back(std::move(train_errors[i]));
  }
  result.ranking = std::move(ranked);

  size_t top = static_cast<size_t>(
      std::ceil(opts.top_fraction * static_cast<double>(grid.size()) - 1e-9));
  top = std::clamp<size_t>(top, 1, grid.size());
  bool warned = false;
  std::optional<size_t> chosen;
  for (size_t r = 0; r < top; ++r) {
    RankedConfig &cfg = result.ranking[r];
    auto test_err = article_errors(test, cfg.weights, norm);
    cfg.test_me = mean_of(test_err);
    if (ranked_errors[r].size() >= 2 && test_err.size() >= 2) {
      cfg.p_value = welch_test(ranked_errors[r], test_err).p;
      cfg.discarded = *cfg.p_value < opts.alpha;
    } else if (!warned) {
      result.warnings.push_back("too few articles for a significance test; keeping all");
      warned = true;
    }
    if (!cfg.discarded && !chosen) chosen = r;
  }
  if (chosen) {
    result.selected = *chosen;
  } else {
    result.selected = 0;
    result.fallback = true;
    result.warnings.push_back(
        "every validated configuration differs significantly on test; using train best");
  }
  return result;
}

// --- Dataset level -----------------------------------------------------------

namespace {

std::vector<std::string> span_words(const AnnotatedDocument &doc, const PhraseSpan &span) {
  std::vector<std::string> words;
  const auto &tokens = doc.sentences.at(span.sentence).tokens;
  for (int i = span.begin; i < span.end; ++i) words.push_back(to_lower(tokens[i].text));
  return words;
}

double text_error(const AnnotatedDocument &doc, const Candidate &c,
                  const std::vector<std::string> &golds, const EmbeddingStore &emb) {
  double best = kInf;
  auto words = span_words(doc, c.span);
  for (const auto &g : golds) {
    try {
      best = std::min(best, wmd(words, simple_tokenize(g), emb));
    } catch (const AllOovError &) {
    }
  }
  return best;
}

}  // namespace

std::array<QuestionSample, 6> build_samples(const DatasetArticle &article,
                                            const CandidateSets &sets,
                                            const EmbeddingStore &emb,
                                            const ScoringConfig &cfg) {
  const AnnotatedDocument &doc = article.doc;
  const GoldAnnotation &gold = article.gold;
  std::array<QuestionSample, 6> out;
  auto at = [&](Question q) -> QuestionSample & { return out[static_cast<size_t>(q)]; };
  for (auto &s : out) s.d_len = doc.d_len();

  auto &who = at(Question::kWho);
  who.candidates = sets[Question::kWho];
  who.factors = who_factors(who.candidates, doc);
  for (const auto &c : who.candidates)
    who.raw_error.push_back(text_error(doc, c, gold.gold(Question::kWho), emb));

  auto &what = at(Question::kWhat);
  what.candidates = sets[Question::kWhat];
  for (const auto &c : what.candidates) {
    auto it = std::find_if(who.candidates.begin(), who.candidates.end(),
                           [&](const Candidate &w) { return w.partner == c.partner; });
    if (!c.partner || it == who.candidates.end())
      throw InvariantViolation("what candidate '" + c.text + "' has no who partner");
    what.factors.push_back(who.factors[it - who.candidates.begin()]);
    what.raw_error.push_back(text_error(doc, c, gold.gold(Question::kWhat), emb));
  }

  auto &when = at(Question::kWhen);
  when.candidates = sets[Question::kWhen];
  when.factors = when_factors(when.candidates, doc.d_len(), doc.source.publish_date, cfg);
  for (const auto &c : when.candidates)
    when.raw_error.push_back(gold.when ? error_when(*c.timex, *gold.when) : kInf);

  auto &where = at(Question::kWhere);
  where.candidates = sets[Question::kWhere];
  where.factors = where_factors(where.candidates, doc.d_len(), cfg);
  for (const auto &c : where.candidates)
    where.raw_error.push_back(
        gold.where ? error_where(*c.geocode, gold.where->first, gold.where->second) : kInf);

  auto &why = at(Question::kWhy);
  why.candidates = sets[Question::kWhy];
  why.factors = why_factors(why.candidates, doc.d_len(), cfg);
  for (const auto &c : why.candidates)
    why.raw_error.push_back(text_error(doc, c, gold.gold(Question::kWhy), emb));

  auto &how = at(Question::kHow);
  how.candidates = sets[Question::kHow];
  how.factors = how_factors(how.candidates, doc, cfg);
  for (const auto &c : how.candidates)
    how.raw_error.push_back(text_error(doc, c, gold.gold(Question::kHow), emb));
  how.w0 = cfg.w0;
  if (auto a = select_under(who, cfg.w_who)) how.action_sentence = who.candidates[*a].span.sentence;
  return out;
}

MeanErrorReport mean_error(const ScoringConfig &cfg, const std::vector<DatasetArticle> &articles,
                           const std::array<Normalizer, 6> &norms, const LearningContext &ctx) {
  if (!ctx.embeddings) throw ConfigError("mean_error needs word embeddings");
  MeanErrorReport report;
  std::array<double, 6> sums{};
  for (const auto &art : articles) {
    std::array<QuestionSample, 6> samples;
    try {
      CandidateSets sets = extract_candidates(art.doc, ctx.pipeline);
      samples = build_samples(art, sets, *ctx.embeddings, cfg);
    } catch (const Error &e) {
      ++report.skipped;
      report.warnings.push_back(art.gold.article_id + ": " + e.what());
      continue;
    }
    for (Question q : kAllQuestions) {
      size_t k = static_cast<size_t>(q);
      sums[k] += sample_error(samples[k], cfg.weights(q), norms[k]);
    }
    ++report.articles;
  }
  if (report.articles == 0) {
    report.per_question.fill(1.0);
    report.overall = 1.0;
    return report;
  }
  for (size_t k = 0; k < 6; ++k) report.per_question[k] = sums[k] / report.articles;
  report.overall = std::accumulate(report.per_question.begin(), report.per_question.end(), 0.0) / 6;
  return report;
}

LearnReport learn_weights(const std::vector<DatasetArticle> &articles,
                          const LearningContext &ctx, const LearnOptions &opts) {
  if (!ctx.embeddings) throw ConfigError("learning needs word embeddings");
  const ScoringConfig &base = ctx.pipeline.config;
  base.validate();
  LearnReport report;
  report.config = base;
  std::tie(report.train, report.test) =
      train_test_split(articles.size(), opts.train_fraction, opts.seed);

  std::vector<std::optional<std::array<QuestionSample, 6>>> samples(articles.size());
  for (size_t i = 0; i < articles.size(); ++i) {
    try {
      CandidateSets sets = extract_candidates(articles[i].doc, ctx.pipeline);
      samples[i] = build_samples(articles[i], sets, *ctx.embeddings, base);
    } catch (const Error &e) {
      ++report.skipped;
      report.warnings.push_back(articles[i].gold.article_id + ": skipped: " + e.what());
    }
  }

  auto gather = [&](const std::vector<size_t> &idx, std::initializer_list<Question> qs) {
    std::vector<std::vector<QuestionSample>> out;
    for (size_t i : idx) {
      if (!samples[i]) continue;
      std::vector<QuestionSample> per;
      for (Question q : qs) per.push_back((*samples[i])[static_cast<size_t>(q)]);
      out.push_back(std::move(per));
    }
    return out;
  };
  auto normalizer = [&](std::initializer_list<Question> qs, const std::string &name) {
    std::vector<QuestionSample> flat;
    for (const auto &per : gather(report.train, qs)) flat.insert(flat.end(), per.begin(), per.end());
    try {
      return fit_normalizer(flat);
    } catch (const RangeError &) {
      report.warnings.push_back(name + ": no finite training error; errors normalize to 0");
      return Normalizer{};
    }
  };
  ParamGrid grid{opts.grid_step, base};

  auto search = [&](std::initializer_list<Question> qs, Question weights_of,
                    const std::string &name) {
    Normalizer norm = normalizer(qs, name);
    GridSearchResult r = grid_search(grid.points(weights_of), gather(report.train, qs),
                                     gather(report.test, qs), norm, opts.search);
    for (const auto &w : r.warnings) report.warnings.push_back(name + ": " + w);
    auto dst = report.config.weights(weights_of);
    std::copy(r.best().weights.begin(), r.best().weights.end(), dst.begin());
    report.searches[name] = std::move(r);
  };

  search({Question::kWho, Question::kWhat}, Question::kWho, "who");
  // The how adjustment follows the action chosen by the learned who weights.
  for (auto &s : samples) {
    if (!s) continue;
    auto &how = (*s)[static_cast<size_t>(Question::kHow)];
    const auto &who = (*s)[static_cast<size_t>(Question::kWho)];
    auto a = select_under(who, report.config.w_who);
    how.action_sentence = a ? std::optional<int>(who.candidates[*a].span.sentence) : std::nullopt;
  }
  search({Question::kWhen}, Question::kWhen, "when");
  search({Question::kWhere}, Question::kWhere, "where");
  search({Question::kWhy}, Question::kWhy, "why");
  search({Question::kHow}, Question::kHow, "how");

  // Grid weights are multiples of the step; renormalize away rounding.
  for (Question q : {Question::kWho, Question::kWhen, Question::kWhere, Question::kWhy,
                     Question::kHow}) {
    auto w = report.config.weights(q);
    double sum = std::accumulate(w.begin(), w.end(), 0.0);
    for (double &x : w) x /= sum;
  }
  report.config.validate();
  return report;
}

}  // namespace medex
