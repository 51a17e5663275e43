#include <algorithm>
#include <cmath>

#include "stylos/error.hpp"
#include "stylos/optim.hpp"

namespace stylos::optim {

int LinearModel::class_index(const std::string& label) const {
  auto it = std::find(classes.begin(), classes.end(), label);
  return it == classes.end() ? -1 : static_cast<int>(it - classes.begin());
}

namespace {

void check_dimension(const LinearModel& model, std::size_t needed) {
  if (needed > model.dim) {
    throw Error(ErrorCode::DimensionMismatch, "vector needs dimension " + std::to_string(needed) +
                                                  ", model has " + std::to_string(model.dim));
  }
}

void check_row(const LinearModel& model, std::size_t row) {
  if (row >= model.weights.size()) {
    throw Error(ErrorCode::InvalidArgument, "model has no weight row " + std::to_string(row));
  }
}

}  // namespace

double decision_score(const LinearModel& model, const SparseVector& x, std::size_t row) {
  check_row(model, row);
  check_dimension(model, x.min_dimension());
  return dot(x, model.weights[row]) + model.intercepts[row];
}

double decision_score(const LinearModel& model, const DenseVector& x, std::size_t row) {
  check_row(model, row);
  if (x.size() != model.dim) {
    throw Error(ErrorCode::DimensionMismatch, "dense vector has dimension " +
                                                  std::to_string(x.size()) + ", model has " +
                                                  std::to_string(model.dim));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * model.weights[row][i];
  return s + model.intercepts[row];
}

std::vector<double> decision_scores(const LinearModel& model, const SparseVector& x) {
  check_dimension(model, x.min_dimension());
  std::vector<double> scores;
  scores.reserve(model.weights.size());
  for (std::size_t r = 0; r < model.weights.size(); ++r) {
    scores.push_back(dot(x, model.weights[r]) + model.intercepts[r]);
  }
  return scores;
}

int predict(const LinearModel& model, const SparseVector& x) {
  const auto scores = decision_scores(model, x);
  if (model.is_binary()) return scores[0] > 0.0 ? 1 : 0;
  return static_cast<int>(std::max_element(scores.begin(), scores.end()) - scores.begin());
}

std::vector<int> predict(const LinearModel& model, const std::vector<SparseVector>& X) {
  std::vector<int> out;
  out.reserve(X.size());
  for (const auto& x : X) out.push_back(predict(model, x));
  return out;
}

double euclidean(const DenseVector& a, const DenseVector& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::DimensionMismatch, "euclidean: vectors of different length");
  }
  return std::sqrt(squared_distance(a, b));
}

double euclidean(const SparseVector& a, const SparseVector& b) {
  return std::sqrt(squared_distance(a, b));
}

LinearModel train_one_vs_rest(const std::vector<SparseVector>& X, const std::vector<int>& y,
                              const std::vector<std::string>& class_names, double C,
                              const BinaryTrainer& trainer) {
  if (class_names.size() < 2) throw Error(ErrorCode::SingleClass, "need at least two classes");
  if (X.size() != y.size()) throw Error(ErrorCode::LengthMismatch, "|X| != |y|");
  if (class_names.size() == 2) {
    auto m = trainer(X, y, C);
    m.classes = class_names;
    return m;
  }
  LinearModel model;
  model.classes = class_names;
  model.C = C;
  std::size_t dim = 0;
  for (const auto& x : X) dim = std::max<std::size_t>(dim, x.min_dimension());
  for (std::size_t c = 0; c < class_names.size(); ++c) {
    std::vector<int> binary(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) binary[i] = y[i] == static_cast<int>(c) ? 1 : 0;
    auto m = trainer(X, binary, C);
    model.loss = m.loss;
    dim = std::max(dim, m.dim);
    model.weights.push_back(std::move(m.weights[0]));
    model.intercepts.push_back(m.intercepts[0]);
  }
  for (auto& w : model.weights) w.resize(dim, 0.0);
  model.dim = dim;
  return model;
}

LinearModel train_multiclass(const std::vector<SparseVector>& X, const std::vector<int>& y,
                             const std::vector<std::string>& class_names, double C,
                             const TrainOptions& opts) {
  return train_one_vs_rest(X, y, class_names, C, svm_trainer(opts));
}

BinaryTrainer svm_trainer(const TrainOptions& opts) {
  return [opts](const std::vector<SparseVector>& X, const std::vector<int>& y, double C) {
    return train_linear_svm(X, y, C, opts);
  };
}

BinaryTrainer logreg_trainer(double gradient_tol) {
  return [gradient_tol](const std::vector<SparseVector>& X, const std::vector<int>& y, double C) {
    return train_logreg(X, y, C, gradient_tol);
  };
}

}  // namespace stylos::optim
