#include <algorithm>
#include <map>

#include "stylos/error.hpp"
#include "stylos/metrics.hpp"
#include "stylos/optim.hpp"
#include "stylos/sampling.hpp"

namespace stylos::optim {

CvResult cross_validate(const MulticlassTrainer& trainer, const std::vector<SparseVector>& X,
                        const std::vector<int>& y, int n_classes, const HyperGrid& grid,
                        std::uint64_t seed) {
  if (X.size() != y.size()) throw Error(ErrorCode::LengthMismatch, "|X| != |y|");
  if (grid.C_values.empty()) throw Error(ErrorCode::InvalidArgument, "empty C grid");
  if (grid.folds < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 folds");
  for (double c : grid.C_values) {
    if (!(c > 0.0)) throw Error(ErrorCode::InvalidArgument, "C values must be positive");
  }
  std::map<int, int> class_counts;
  for (int label : y) ++class_counts[label];
  if (class_counts.size() < 2) throw Error(ErrorCode::SingleClass, "cross-validation needs 2 classes");
  for (const auto& [label, count] : class_counts) {
    if (count < grid.folds) {
      throw Error(ErrorCode::TooFewPerClass, "class " + std::to_string(label) + " has " +
                                                 std::to_string(count) + " samples for " +
                                                 std::to_string(grid.folds) + " folds");
    }
  }

  const auto fold_of = stratified_folds(y, grid.folds, seed);
  const auto scheme = grid.metric == SelectionMetric::F1 ? tasks::Averaging::Binary
                                                         : tasks::Averaging::Macro;

  CvResult result;
  result.C_values = grid.C_values;
  for (double C : grid.C_values) {
    std::vector<double> scores;
    for (int f = 0; f < grid.folds; ++f) {
      std::vector<SparseVector> X_train, X_val;
      std::vector<int> y_train, y_val;
      for (std::size_t i = 0; i < X.size(); ++i) {
        if (fold_of[i] == f) {
          X_val.push_back(X[i]);
          y_val.push_back(y[i]);
        } else {
          X_train.push_back(X[i]);
          y_train.push_back(y[i]);
        }
      }
      const auto model = trainer(X_train, y_train, C);
      // Validation vectors may touch columns the fold's training data never saw.
      std::vector<int> pred;
      pred.reserve(X_val.size());
      for (const auto& x : X_val) {
        std::vector<double> s(model.weights.size());
        for (std::size_t r = 0; r < model.weights.size(); ++r) {
          double acc = model.intercepts[r];
          for (std::size_t k = 0; k < x.indices.size(); ++k) {
            if (x.indices[k] < model.dim) acc += x.values[k] * model.weights[r][x.indices[k]];
          }
          s[r] = acc;
        }
        pred.push_back(model.is_binary()
                           ? (s[0] > 0.0 ? 1 : 0)
                           : static_cast<int>(std::max_element(s.begin(), s.end()) - s.begin()));
      }
      scores.push_back(tasks::evaluate(pred, y_val, scheme, n_classes).f1);
    }
    double mean = 0.0;
    for (double s : scores) mean += s;
    mean /= static_cast<double>(scores.size());
    result.mean_scores.push_back(mean);
    result.fold_scores.push_back(std::move(scores));
  }

  std::size_t best = 0;
  for (std::size_t g = 1; g < grid.C_values.size(); ++g) {
    const double a = result.mean_scores[g], b = result.mean_scores[best];
    if (a > b || (a == b && grid.C_values[g] < grid.C_values[best])) best = g;
  }
  result.best_C = grid.C_values[best];
  result.model = trainer(X, y, result.best_C);
  return result;
}

}  // namespace stylos::optim
