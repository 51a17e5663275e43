#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "stylos/error.hpp"
#include "stylos/optim.hpp"
#include "stylos/sampling.hpp"
#include "optim_detail.hpp"

namespace stylos::optim {

namespace detail {

std::size_t validate_binary(const std::vector<SparseVector>& X, const std::vector<int>& y) {
  if (X.size() != y.size()) throw Error(ErrorCode::LengthMismatch, "|X| != |y|");
  bool has_pos = false, has_neg = false;
  for (int label : y) {
    if (label != 0 && label != 1) throw Error(ErrorCode::InvalidArgument, "binary labels are 0/1");
    (label == 1 ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) throw Error(ErrorCode::SingleClass, "both classes must be present");
  std::size_t dim = 0;
  for (const auto& x : X) {
    for (double v : x.values) {
      if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "feature value is NaN or inf");
    }
    dim = std::max<std::size_t>(dim, x.min_dimension());
  }
  return dim;
}

}  // namespace detail

double svm_primal_objective(const DenseVector& w, double b, const std::vector<SparseVector>& X,
                            const std::vector<int>& y, double C) {
  double reg = b * b;
  for (double v : w) reg += v * v;
  double loss = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double yi = y[i] == 1 ? 1.0 : -1.0;
    loss += std::max(0.0, 1.0 - yi * (dot(X[i], w) + b));
  }
  return 0.5 * reg + C * loss;
}

LinearModel train_linear_svm(const std::vector<SparseVector>& X, const std::vector<int>& y,
                             double C, const TrainOptions& opts, SvmDiagnostics* diagnostics,
                             std::vector<std::string> class_names) {
  if (!(C > 0.0)) throw Error(ErrorCode::InvalidArgument, "C must be positive");
  const std::size_t dim = detail::validate_binary(X, y);
  const std::size_t n = X.size();

  std::vector<double> ys(n), q(n);
  for (std::size_t i = 0; i < n; ++i) {
    ys[i] = y[i] == 1 ? 1.0 : -1.0;
    q[i] = X[i].squared_norm() + 1.0;  // constant bias feature
  }

  DenseVector w(dim, 0.0);
  double b = 0.0;
  std::vector<double> alpha(n, 0.0);

  // Best primal iterate so far; the returned model is always this one.
  DenseVector best_w = w;
  double best_b = b;
  std::vector<double> best_alpha = alpha;
  double best_primal = svm_primal_objective(w, b, X, y, C);
  double dual = 0.0;

  SvmDiagnostics diag;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto rng = make_rng(opts.seed, 0x5e7);

  // Shrinking: coordinates stuck at a bound are skipped until the projected
  // gradient range on the active set closes, then everything is revisited.
  std::size_t active = n;
  double pg_max_old = std::numeric_limits<double>::infinity();
  double pg_min_old = -std::numeric_limits<double>::infinity();
  double shrink_eps = 0.1;

  for (int epoch = 1; epoch <= opts.max_iter; ++epoch) {
    for (std::size_t s = active; s > 1; --s) {
      std::uniform_int_distribution<std::size_t> pick(0, s - 1);
      std::swap(order[s - 1], order[pick(rng)]);
    }
    double pg_max = -std::numeric_limits<double>::infinity();
    double pg_min = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < active;) {
      const auto i = order[s];
      const auto& x = X[i];
      const double g = ys[i] * (dot(x, w) + b) - 1.0;
      const double a = alpha[i];
      double pg = g;
      if (a == 0.0) {
        if (g > pg_max_old) {
          std::swap(order[s], order[--active]);
          continue;
        }
        pg = std::min(g, 0.0);
      } else if (a == C) {
        if (g < pg_min_old) {
          std::swap(order[s], order[--active]);
          continue;
        }
        pg = std::max(g, 0.0);
      }
      ++s;
      pg_max = std::max(pg_max, pg);
      pg_min = std::min(pg_min, pg);
      if (pg == 0.0) continue;
      const double next = std::clamp(a - g / q[i], 0.0, C);
      const double d = (next - a) * ys[i];
      alpha[i] = next;
      for (std::size_t k = 0; k < x.indices.size(); ++k) w[x.indices[k]] += d * x.values[k];
      b += d;
    }
    if (pg_max - pg_min <= shrink_eps) {
      active = n;
      pg_max_old = std::numeric_limits<double>::infinity();
      pg_min_old = -std::numeric_limits<double>::infinity();
      shrink_eps *= 0.5;
    } else {
      pg_max_old = pg_max <= 0.0 ? std::numeric_limits<double>::infinity() : pg_max;
      pg_min_old = pg_min >= 0.0 ? -std::numeric_limits<double>::infinity() : pg_min;
    }

    const double primal = svm_primal_objective(w, b, X, y, C);
    double norm2 = b * b;
    for (double v : w) norm2 += v * v;
    dual = std::accumulate(alpha.begin(), alpha.end(), 0.0) - 0.5 * norm2;
    if (primal < best_primal) {
      best_primal = primal;
      best_w = w;
      best_b = b;
      best_alpha = alpha;
    }
    diag.epochs = epoch;
    diag.primal_trace.push_back(best_primal);
    if (best_primal - dual <= opts.tol * std::max(std::abs(best_primal), 1e-12)) {
      diag.converged = true;
      break;
    }
  }

  diag.primal = best_primal;
  diag.dual = dual;
  diag.alpha = std::move(best_alpha);
  if (diagnostics) *diagnostics = std::move(diag);

  LinearModel model;
  model.classes = std::move(class_names);
  model.weights.push_back(std::move(best_w));
  model.intercepts.push_back(best_b);
  model.C = C;
  model.loss = Loss::Hinge;
  model.dim = dim;
  return model;
}

}  // namespace stylos::optim
