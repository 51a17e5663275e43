#include "stylos/explain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "stylos/error.hpp"
#include "stylos/featurize.hpp"
#include "stylos/sampling.hpp"
#include "stylos/text.hpp"

namespace stylos::explain {

std::string_view to_string(RankOrder o) { return o == RankOrder::Signed ? "signed" : "absolute"; }

RankOrder parse_rank_order(std::string_view s) {
  const auto v = text::ascii_lower(s);
  if (v == "signed") return RankOrder::Signed;
  if (v == "absolute" || v == "abs") return RankOrder::Absolute;
  throw Error(ErrorCode::InvalidArgument, "unknown ranking order '" + std::string(s) + "'");
}

std::string_view to_string(Space s) { return s == Space::TfIdf ? "tfidf" : "embedding"; }

Space parse_space(std::string_view s) {
  const auto v = text::ascii_lower(s);
  if (v == "tfidf") return Space::TfIdf;
  if (v == "embedding") return Space::Embedding;
  throw Error(ErrorCode::InvalidArgument, "unknown space '" + std::string(s) + "'");
}

std::string_view to_string(HighlightRole r) {
  switch (r) {
    case HighlightRole::FactualShared: return "FactualShared";
    case HighlightRole::CounterfactualShared: return "CounterfactualShared";
    case HighlightRole::TripleShared: return "TripleShared";
  }
  return "?";
}

std::vector<RankedFeature> FeatureRanking::top(std::size_t n) const {
  n = std::min(n, entries.size());
  return {entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(n)};
}

std::vector<RankedFeature> FeatureRanking::bottom(std::size_t n) const {
  n = std::min(n, entries.size());
  return {entries.rbegin(), entries.rbegin() + static_cast<std::ptrdiff_t>(n)};
}

DenseVector class_coefficients(const optim::LinearModel& model, const std::string& class_label,
                               double* intercept) {
  const int c = model.class_index(class_label);
  if (c < 0) throw Error(ErrorCode::UnknownClass, class_label);
  if (model.is_binary()) {
    DenseVector w = model.weights[0];
    double b = model.intercepts[0];
    if (c == 0) {
      for (auto& v : w) v = -v;
      b = -b;
    }
    if (intercept) *intercept = b;
    return w;
  }
  if (intercept) *intercept = model.intercepts[static_cast<std::size_t>(c)];
  return model.weights[static_cast<std::size_t>(c)];
}

namespace {

void check_names(const optim::LinearModel& model, const std::vector<std::string>& names) {
  if (names.size() != model.dim) {
    throw Error(ErrorCode::DimensionMismatch, std::to_string(names.size()) + " feature names for " +
                                                  std::to_string(model.dim) + " model columns");
  }
}

}  // namespace

FeatureRanking global_ranking(const optim::LinearModel& model, const std::vector<std::string>& names,
                              const std::string& class_label, RankOrder order) {
  check_names(model, names);
  const auto w = class_coefficients(model, class_label);
  FeatureRanking r;
  r.class_label = class_label;
  r.order = order;
  r.entries.reserve(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    r.entries.push_back({names[i], static_cast<std::uint32_t>(i), w[i]});
  }
  auto key = [order](double v) { return order == RankOrder::Signed ? v : std::abs(v); };
  std::stable_sort(r.entries.begin(), r.entries.end(), [&](const auto& a, const auto& b) {
    const double ka = key(a.coefficient), kb = key(b.coefficient);
    if (ka != kb) return ka > kb;
    return a.name < b.name;
  });
  return r;
}

LocalExplanation local_explanation(const optim::LinearModel& model, const SparseVector& x,
                                   const std::vector<std::string>& names,
                                   const std::string& class_label, std::size_t display_top,
                                   std::string instance_id) {
  check_names(model, names);
  if (x.min_dimension() > model.dim) {
    throw Error(ErrorCode::DimensionMismatch, "vector exceeds the model dimension");
  }
  LocalExplanation e;
  e.instance_id = std::move(instance_id);
  e.class_label = class_label;
  const auto w = class_coefficients(model, class_label, &e.intercept);

  std::set<std::uint32_t> columns(x.indices.begin(), x.indices.end());
  if (display_top > 0) {
    const auto ranking = global_ranking(model, names, class_label, RankOrder::Signed);
    for (const auto& f : ranking.top(display_top)) columns.insert(f.column);
    for (const auto& f : ranking.bottom(display_top)) columns.insert(f.column);
  }
  for (auto col : columns) {
    const double v = x.get(col);
    e.contributions.push_back({names[col], col, v, w[col] * v});
  }
  const int c = model.class_index(class_label);
  const double s = optim::decision_score(model, x, model.is_binary() ? 0 : static_cast<std::size_t>(c));
  e.total_score = model.is_binary() && c == 0 ? -s : s;
  return e;
}

std::vector<std::uint32_t> removal_ranking(const optim::LinearModel& model,
                                           const std::vector<std::string>& names) {
  check_names(model, names);
  std::vector<double> strength(model.dim, 0.0);
  for (const auto& row : model.weights) {
    for (std::size_t j = 0; j < model.dim; ++j) strength[j] = std::max(strength[j], std::abs(row[j]));
  }
  std::vector<std::uint32_t> order(model.dim);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (strength[a] != strength[b]) return strength[a] > strength[b];
    return names[a] < names[b];
  });
  return order;
}

namespace {

// Rescoring state for one removal sequence. Each instance's scores are
// updated in place as columns are zeroed; once an instance has lost all of
// its non-zero features its scores are reset to the bare intercepts so the
// endpoint does not carry rounding residue.
class RemovalCurve {
 public:
  RemovalCurve(const optim::LinearModel& model, const std::vector<SparseVector>& X,
               const std::vector<int>& y, tasks::Averaging scheme)
      : model_(model), X_(X), y_(y), scheme_(scheme), by_column_(model.dim) {
    for (std::size_t i = 0; i < X.size(); ++i) {
      for (std::size_t k = 0; k < X[i].indices.size(); ++k) {
        by_column_[X[i].indices[k]].push_back({i, X[i].values[k]});
      }
    }
  }

  std::vector<double> run(const std::vector<std::uint32_t>& order) {
    const std::size_t n = X_.size(), rows = model_.weights.size();
    std::vector<std::vector<double>> scores(n);
    std::vector<std::size_t> remaining(n);
    std::vector<int> pred(n);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = optim::decision_scores(model_, X_[i]);
      remaining[i] = X_[i].indices.size();
      pred[i] = decide(scores[i]);
    }
    const int n_classes = static_cast<int>(model_.n_classes());
    std::vector<double> curve;
    curve.reserve(order.size() + 1);
    curve.push_back(tasks::evaluate(pred, y_, scheme_, n_classes).f1);
    for (auto col : order) {
      for (const auto& [i, v] : by_column_[col]) {
        if (--remaining[i] == 0) {
          scores[i] = model_.intercepts;
        } else {
          for (std::size_t r = 0; r < rows; ++r) scores[i][r] -= model_.weights[r][col] * v;
        }
        pred[i] = decide(scores[i]);
      }
      curve.push_back(tasks::evaluate(pred, y_, scheme_, n_classes).f1);
    }
    return curve;
  }

 private:
  int decide(const std::vector<double>& s) const {
    if (model_.is_binary()) return s[0] > 0.0 ? 1 : 0;
    return static_cast<int>(std::max_element(s.begin(), s.end()) - s.begin());
  }

  const optim::LinearModel& model_;
  const std::vector<SparseVector>& X_;
  const std::vector<int>& y_;
  tasks::Averaging scheme_;
  std::vector<std::vector<std::pair<std::size_t, double>>> by_column_;
};

}  // namespace

IrofCurve irof(const optim::LinearModel& model, const std::vector<SparseVector>& X,
               const std::vector<int>& y, const std::vector<std::uint32_t>& ranking,
               const std::vector<std::string>& names, tasks::Averaging scheme, int trials,
               std::uint64_t seed) {
  if (X.empty()) throw Error(ErrorCode::EmptyTestSet, "IROF needs test instances");
  if (X.size() != y.size()) throw Error(ErrorCode::LengthMismatch, "|X| != |y|");
  if (trials < 0) throw Error(ErrorCode::InvalidArgument, "trials must be >= 0");
  check_names(model, names);
  std::vector<std::uint32_t> sorted = ranking;
  std::sort(sorted.begin(), sorted.end());
  bool permutation = sorted.size() == model.dim;
  for (std::size_t j = 0; permutation && j < sorted.size(); ++j) permutation = sorted[j] == j;
  if (!permutation) throw Error(ErrorCode::InvalidArgument, "ranking is not a permutation of the model columns");
  for (const auto& x : X) {
    if (x.min_dimension() > model.dim) throw Error(ErrorCode::DimensionMismatch, "test vector exceeds model");
  }

  RemovalCurve removal(model, X, y, scheme);
  IrofCurve c;
  c.trials = trials;
  c.seed = seed;
  c.scheme = scheme;
  for (auto col : ranking) c.removal_order.push_back(names[col]);
  c.sorted_f1 = removal.run(ranking);
  for (int t = 0; t < trials; ++t) {
    std::vector<std::uint32_t> perm(model.dim);
    std::iota(perm.begin(), perm.end(), 0u);
    auto rng = make_rng(seed, static_cast<std::uint64_t>(t));
    seeded_shuffle(perm, rng);
    c.random_f1.push_back(removal.run(perm));
  }
  const std::size_t steps = c.sorted_f1.size();
  c.random_mean.assign(steps, 0.0);
  c.random_std.assign(steps, 0.0);
  if (trials > 0) {
    for (std::size_t s = 0; s < steps; ++s) {
      double mean = 0.0;
      for (const auto& r : c.random_f1) mean += r[s];
      mean /= trials;
      double var = 0.0;
      for (const auto& r : c.random_f1) var += (r[s] - mean) * (r[s] - mean);
      c.random_mean[s] = mean;
      c.random_std[s] = std::sqrt(var / trials);
    }
  }
  return c;
}

double curve_area(const std::vector<double>& curve) {
  double a = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i) a += 0.5 * (curve[i - 1] + curve[i]);
  return a;
}

namespace {

template <typename Vec>
NeighborBundle scan(const std::string& query_id, const Vec& query, int predicted,
                    const std::vector<std::string>& ids, const std::vector<Vec>& reps,
                    const std::vector<int>& labels) {
  if (ids.size() != reps.size() || ids.size() != labels.size()) {
    throw Error(ErrorCode::LengthMismatch, "ids, representations and labels differ in length");
  }
  constexpr double inf = std::numeric_limits<double>::infinity();
  double best_same = inf, best_other = inf;
  std::ptrdiff_t same = -1, other = -1;
  for (std::size_t i = 0; i < reps.size(); ++i) {
    if (ids[i] == query_id) continue;
    const double d = squared_distance(query, reps[i]);
    if (labels[i] == predicted) {
      if (d < best_same || (d == best_same && ids[i] < ids[static_cast<std::size_t>(same)])) {
        best_same = d;
        same = static_cast<std::ptrdiff_t>(i);
      }
    } else if (d < best_other || (d == best_other && ids[i] < ids[static_cast<std::size_t>(other)])) {
      best_other = d;
      other = static_cast<std::ptrdiff_t>(i);
    }
  }
  if (same < 0) throw Error(ErrorCode::NoCandidate, "no training instance with the predicted label");
  if (other < 0) throw Error(ErrorCode::NoCandidate, "no training instance with a different label");
  NeighborBundle b;
  b.query_id = query_id;
  b.predicted_label = predicted;
  const auto s = static_cast<std::size_t>(same), o = static_cast<std::size_t>(other);
  b.factual = {ids[s], labels[s], std::sqrt(best_same)};
  b.counterfactual = {ids[o], labels[o], std::sqrt(best_other)};
  return b;
}

}  // namespace

NeighborBundle retrieve_neighbors(const std::string& query_id, const SparseVector& query,
                                  int predicted, const std::vector<std::string>& ids,
                                  const std::vector<SparseVector>& reps, const std::vector<int>& labels) {
  auto b = scan(query_id, query, predicted, ids, reps, labels);
  b.space = Space::TfIdf;
  return b;
}

NeighborBundle retrieve_neighbors(const std::string& query_id, const DenseVector& query,
                                  int predicted, const std::vector<std::string>& ids,
                                  const std::vector<DenseVector>& reps, const std::vector<int>& labels) {
  for (const auto& r : reps) {
    if (r.size() != query.size()) throw Error(ErrorCode::DimensionMismatch, "representation sizes differ");
  }
  auto b = scan(query_id, query, predicted, ids, reps, labels);
  b.space = Space::Embedding;
  return b;
}

std::vector<MinDiffFeature> highlight_min_diff(const SparseVector& a, const SparseVector& b,
                                               const std::vector<std::string>& names, std::size_t k) {
  if (a.min_dimension() > names.size() || b.min_dimension() > names.size()) {
    throw Error(ErrorCode::DimensionMismatch, "vector exceeds the feature-name table");
  }
  std::vector<MinDiffFeature> shared;
  std::size_t i = 0, j = 0;
  while (i < a.indices.size() && j < b.indices.size()) {
    if (a.indices[i] < b.indices[j]) {
      ++i;
    } else if (b.indices[j] < a.indices[i]) {
      ++j;
    } else {
      if (a.values[i] != 0.0 && b.values[j] != 0.0) {
        const auto col = a.indices[i];
        shared.push_back({names[col], col, std::abs(a.values[i] - b.values[j])});
      }
      ++i;
      ++j;
    }
  }
  std::stable_sort(shared.begin(), shared.end(), [](const auto& x, const auto& y) {
    if (x.diff != y.diff) return x.diff < y.diff;
    return x.name < y.name;
  });
  if (shared.size() > k) shared.resize(k);
  return shared;
}

std::vector<Span> locate(const std::string& normalized_text, const std::string& display_ngram) {
  std::string needle = display_ngram;
  std::replace(needle.begin(), needle.end(), '_', ' ');
  std::vector<Span> spans;
  if (needle.empty()) return spans;
  for (auto pos = normalized_text.find(needle); pos != std::string::npos;
       pos = normalized_text.find(needle, pos + 1)) {
    spans.push_back({pos, pos + needle.size()});
  }
  return spans;
}

HighlightSet highlight_neighbors(const SparseVector& query, const std::string& query_text,
                                 const SparseVector& factual, const std::string& factual_text,
                                 const SparseVector& counterfactual,
                                 const std::string& counterfactual_text,
                                 const std::vector<std::string>& names, bool lowercase,
                                 std::size_t k) {
  const auto with_f = highlight_min_diff(query, factual, names, k);
  const auto with_cf = highlight_min_diff(query, counterfactual, names, k);
  std::map<std::string, HighlightedNgram> merged;
  for (const auto& f : with_f) {
    merged[f.name] = {f.name, f.diff, 0.0, HighlightRole::FactualShared};
  }
  for (const auto& f : with_cf) {
    auto it = merged.find(f.name);
    if (it == merged.end()) {
      merged[f.name] = {f.name, 0.0, f.diff, HighlightRole::CounterfactualShared};
    } else {
      it->second.counterfactual_diff = f.diff;
      it->second.role = HighlightRole::TripleShared;
    }
  }
  HighlightSet h;
  h.texts = {{"query", featurize::normalize_for_ngrams(query_text, lowercase)},
             {"factual", featurize::normalize_for_ngrams(factual_text, lowercase)},
             {"counterfactual", featurize::normalize_for_ngrams(counterfactual_text, lowercase)}};
  for (auto& [name, ng] : merged) {
    h.spans["query"][name] = locate(h.texts["query"], name);
    if (ng.role != HighlightRole::CounterfactualShared) {
      h.spans["factual"][name] = locate(h.texts["factual"], name);
    }
    if (ng.role != HighlightRole::FactualShared) {
      h.spans["counterfactual"][name] = locate(h.texts["counterfactual"], name);
    }
    h.ngrams.push_back(std::move(ng));
  }
  return h;
}

LocalExplanation explain_instance(const tasks::TrainedTask& task, const std::string& instance_id,
                                  std::optional<std::string> class_label, std::size_t display_top) {
  const auto* inst = task.find_instance(instance_id);
  if (!inst) throw Error(ErrorCode::NotFound, "instance " + instance_id);
  std::string label;
  if (class_label) {
    label = *class_label;
  } else {
    // Default to the predicted class.
    label = task.model.classes[static_cast<std::size_t>(optim::predict(task.model, inst->vector))];
  }
  return local_explanation(task.model, inst->vector, task.feature_display_names(), label, display_top,
                           instance_id);
}

IrofCurve irof(const tasks::TrainedTask& task, int trials, std::uint64_t seed) {
  const auto names = task.feature_display_names();
  return irof(task.model, task.test_vectors(), task.test_labels(), removal_ranking(task.model, names),
              names, task.scheme, trials, seed);
}

NeighborReport neighbors(const tasks::TrainedTask& task, const std::string& instance_id, Space space,
                         const probe::EmbeddingSet* embeddings, std::size_t k) {
  const auto* inst = task.find_instance(instance_id);
  if (!inst) throw Error(ErrorCode::NotFound, "instance " + instance_id);
  const int predicted = optim::predict(task.model, inst->vector);
  std::vector<std::string> ids;
  std::vector<int> labels;
  for (const auto& t : task.train) {
    ids.push_back(t.id);
    labels.push_back(t.label);
  }

  NeighborReport report;
  if (space == Space::TfIdf) {
    report.bundle = retrieve_neighbors(instance_id, inst->vector, predicted, ids, task.train_vectors(), labels);
    if (task.spec.kind != tasks::TaskKind::SAV) {
      const auto* f = task.find_instance(report.bundle.factual.id);
      const auto* cf = task.find_instance(report.bundle.counterfactual.id);
      report.highlights = highlight_neighbors(
          inst->vector, task.segments.at(inst->left).text, f->vector, task.segments.at(f->left).text,
          cf->vector, task.segments.at(cf->left).text, task.feature_display_names(),
          task.spec.lowercase, k);
    }
    return report;
  }

  if (task.spec.kind == tasks::TaskKind::SAV) {
    throw Error(ErrorCode::InvalidArgument, "embedding space is not available for pair instances");
  }
  if (!embeddings) throw Error(ErrorCode::InvalidArgument, "embedding space needs an embedding set");
  const auto* q = embeddings->find(inst->left);
  if (!q) throw Error(ErrorCode::CoverageGap, "no embedding for " + inst->left);
  std::vector<DenseVector> reps;
  reps.reserve(task.train.size());
  for (const auto& t : task.train) {
    const auto* v = embeddings->find(t.left);
    if (!v) throw Error(ErrorCode::CoverageGap, "no embedding for " + t.left);
    reps.push_back(*v);
  }
  report.bundle = retrieve_neighbors(instance_id, *q, predicted, ids, reps, labels);
  return report;
}

}  // namespace stylos::explain
