#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "stylos/sparse.hpp"

namespace stylos::optim {

enum class Loss { Hinge, Logistic };

// h(x) = x.w + b. A binary model holds one weight row that scores
// classes[1] against classes[0]; a one-vs-rest model holds one row per class.
struct LinearModel {
  std::vector<std::string> classes;
  std::vector<DenseVector> weights;
  std::vector<double> intercepts;
  double C = 1.0;
  Loss loss = Loss::Hinge;
  std::size_t dim = 0;

  bool is_binary() const { return weights.size() == 1; }
  std::size_t n_classes() const { return classes.size(); }
  int class_index(const std::string& label) const;  // -1 when absent
};

struct TrainOptions {
  double tol = 1e-4;
  int max_iter = 1000;
  std::uint64_t seed = 0;
};

struct SvmDiagnostics {
  int epochs = 0;
  bool converged = false;
  double primal = 0.0;
  double dual = 0.0;
  // Best primal objective after each epoch; never increases.
  std::vector<double> primal_trace;
  std::vector<double> alpha;
};

// Objective minimized by the SVM solver. The intercept is an extra weight on
// a constant unit feature, so it is regularized along with w:
//   0.5 * (|w|^2 + b^2) + C * sum_i max(0, 1 - y_i (w.x_i + b)),  y_i in {-1, +1}.
double svm_primal_objective(const DenseVector& w, double b, const std::vector<SparseVector>& X,
                            const std::vector<int>& y, double C);

// Dual coordinate descent on the hinge loss. y holds {0, 1}; 1 is the
// positive class. Stops once the duality gap falls under tol * primal.
LinearModel train_linear_svm(const std::vector<SparseVector>& X, const std::vector<int>& y,
                             double C, const TrainOptions& opts = {},
                             SvmDiagnostics* diagnostics = nullptr,
                             std::vector<std::string> class_names = {"0", "1"});

struct LogregDiagnostics {
  int iterations = 0;
  double gradient_norm = 0.0;
  double objective = 0.0;
};

// 0.5 * |w|^2 + C * sum_i log(1 + exp(-y_i (w.x_i + b))); b is not penalized.
double logreg_objective(const DenseVector& w, double b, const std::vector<SparseVector>& X,
                        const std::vector<int>& y, double C);

// Gradient with respect to (w, b), b last.
DenseVector logreg_gradient(const DenseVector& w, double b, const std::vector<SparseVector>& X,
                            const std::vector<int>& y, double C);

// Newton-CG with backtracking. Converges when |gradient| < gradient_tol.
LinearModel train_logreg(const std::vector<SparseVector>& X, const std::vector<int>& y, double C,
                         double gradient_tol = 1e-6, int max_iter = 500,
                         LogregDiagnostics* diagnostics = nullptr,
                         std::vector<std::string> class_names = {"0", "1"});

using BinaryTrainer = std::function<LinearModel(const std::vector<SparseVector>&,
                                                const std::vector<int>&, double C)>;

BinaryTrainer svm_trainer(const TrainOptions& opts = {});
BinaryTrainer logreg_trainer(double gradient_tol = 1e-6);

// y holds class indices into class_names. Two classes reduce to a single
// binary model; more classes train one model per class against the rest.
LinearModel train_one_vs_rest(const std::vector<SparseVector>& X, const std::vector<int>& y,
                              const std::vector<std::string>& class_names, double C,
                              const BinaryTrainer& trainer);

LinearModel train_multiclass(const std::vector<SparseVector>& X, const std::vector<int>& y,
                             const std::vector<std::string>& class_names, double C,
                             const TrainOptions& opts = {});

// Raw score of the binary model's positive class (or of row `row`).
double decision_score(const LinearModel& model, const SparseVector& x, std::size_t row = 0);
double decision_score(const LinearModel& model, const DenseVector& x, std::size_t row = 0);
std::vector<double> decision_scores(const LinearModel& model, const SparseVector& x);

// Binary: 1 iff score > 0. One-vs-rest: argmax, ties to the earlier class.
int predict(const LinearModel& model, const SparseVector& x);
std::vector<int> predict(const LinearModel& model, const std::vector<SparseVector>& X);

// ---------------------------------------------------------------------------
// Model selection

enum class SelectionMetric { F1, MacroF1 };

struct HyperGrid {
  std::vector<double> C_values{0.001, 0.01, 0.1, 1, 10, 100, 1000};
  int folds = 3;
  SelectionMetric metric = SelectionMetric::F1;
};

using MulticlassTrainer = std::function<LinearModel(const std::vector<SparseVector>&,
                                                    const std::vector<int>&, double C)>;

struct CvResult {
  double best_C = 0.0;
  std::vector<double> C_values;
  std::vector<double> mean_scores;
  std::vector<std::vector<double>> fold_scores;  // [grid point][fold]
  LinearModel model;                             // refit on all data with best_C
};

// Stratified folds shared by every grid point. Highest mean score wins; exact
// ties go to the smaller C.
CvResult cross_validate(const MulticlassTrainer& trainer, const std::vector<SparseVector>& X,
                        const std::vector<int>& y, int n_classes, const HyperGrid& grid,
                        std::uint64_t seed);

// ---------------------------------------------------------------------------
// Clustering and distances

struct Clustering {
  int k = 0;
  std::vector<DenseVector> centroids;
  std::vector<int> assignments;
  double inertia = 0.0;
  std::uint64_t seed = 0;
  int iterations = 0;
  // Inertia after every assignment step of the winning restart.
  std::vector<double> inertia_trace;
};

struct KMeansOptions {
  int restarts = 10;
  int max_iter = 300;
};

Clustering kmeans(const std::vector<DenseVector>& X, int k, std::uint64_t seed,
                  const KMeansOptions& opts = {});

int nearest_centroid(const Clustering& c, const DenseVector& x);

struct ElbowResult {
  int k = 0;
  std::vector<int> ks;
  std::vector<double> inertias;
  std::vector<double> distances;  // to the chord, in axis-normalized units
};

ElbowResult elbow_select(const std::vector<DenseVector>& X, int k_min, int k_max,
                         std::uint64_t seed, const KMeansOptions& opts = {});

double euclidean(const DenseVector& a, const DenseVector& b);
double euclidean(const SparseVector& a, const SparseVector& b);

}  // namespace stylos::optim
