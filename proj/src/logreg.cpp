#include <cmath>

#include "optim_detail.hpp"
#include "stylos/error.hpp"
#include "stylos/optim.hpp"

namespace stylos::optim {

namespace {

// log(1 + exp(-z)) without overflow.
double log1p_exp_neg(double z) {
  return z > 0.0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double norm(const DenseVector& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double inner(const DenseVector& a, const DenseVector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Parameter vector layout: weights first, intercept last.
struct Problem {
  const std::vector<SparseVector>& X;
  const std::vector<int>& y;
  double C;
  std::size_t dim;

  double margin(const DenseVector& theta, std::size_t i) const {
    const double yi = y[i] == 1 ? 1.0 : -1.0;
    return yi * (dot(X[i], theta) + theta[dim]);
  }

  double objective(const DenseVector& theta) const {
    double reg = 0.0;
    for (std::size_t j = 0; j < dim; ++j) reg += theta[j] * theta[j];
    double loss = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) loss += log1p_exp_neg(margin(theta, i));
    return 0.5 * reg + C * loss;
  }

  // Gradient, plus the per-sample curvature weights sigma(z)(1 - sigma(z)).
  DenseVector gradient(const DenseVector& theta, std::vector<double>* curvature) const {
    DenseVector g(dim + 1, 0.0);
    for (std::size_t j = 0; j < dim; ++j) g[j] = theta[j];
    if (curvature) curvature->assign(X.size(), 0.0);
    for (std::size_t i = 0; i < X.size(); ++i) {
      const double yi = y[i] == 1 ? 1.0 : -1.0;
      const double s = sigmoid(margin(theta, i));
      const double coef = C * (s - 1.0) * yi;
      const auto& x = X[i];
      for (std::size_t k = 0; k < x.indices.size(); ++k) g[x.indices[k]] += coef * x.values[k];
      g[dim] += coef;
      if (curvature) (*curvature)[i] = s * (1.0 - s);
    }
    return g;
  }

  DenseVector hessian_vector(const std::vector<double>& curvature, const DenseVector& v) const {
    DenseVector out(dim + 1, 0.0);
    for (std::size_t j = 0; j < dim; ++j) out[j] = v[j];
    out[dim] = 1e-12 * v[dim];
    for (std::size_t i = 0; i < X.size(); ++i) {
      const auto& x = X[i];
      const double xv = dot(x, v) + v[dim];
      const double coef = C * curvature[i] * xv;
      for (std::size_t k = 0; k < x.indices.size(); ++k) out[x.indices[k]] += coef * x.values[k];
      out[dim] += coef;
    }
    return out;
  }
};

// Truncated conjugate gradient for H d = -g.
DenseVector newton_direction(const Problem& p, const std::vector<double>& curvature,
                             const DenseVector& g) {
  const std::size_t n = g.size();
  DenseVector d(n, 0.0), r(n), dir(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = -g[i];
  dir = r;
  double rr = inner(r, r);
  const double gnorm = std::sqrt(rr);
  const double stop = std::min(0.1, std::sqrt(gnorm)) * gnorm;
  for (std::size_t it = 0; it < 2 * n + 10 && std::sqrt(rr) > stop; ++it) {
    const auto hd = p.hessian_vector(curvature, dir);
    const double curv = inner(dir, hd);
    if (curv <= 0.0) break;
    const double step = rr / curv;
    for (std::size_t i = 0; i < n; ++i) {
      d[i] += step * dir[i];
      r[i] -= step * hd[i];
    }
    const double rr_next = inner(r, r);
    const double beta = rr_next / rr;
    rr = rr_next;
    for (std::size_t i = 0; i < n; ++i) dir[i] = r[i] + beta * dir[i];
  }
  if (inner(d, g) >= 0.0) {
    for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
  }
  return d;
}

}  // namespace

double logreg_objective(const DenseVector& w, double b, const std::vector<SparseVector>& X,
                        const std::vector<int>& y, double C) {
  DenseVector theta = w;
  theta.push_back(b);
  return Problem{X, y, C, w.size()}.objective(theta);
}

DenseVector logreg_gradient(const DenseVector& w, double b, const std::vector<SparseVector>& X,
                            const std::vector<int>& y, double C) {
  DenseVector theta = w;
  theta.push_back(b);
  return Problem{X, y, C, w.size()}.gradient(theta, nullptr);
}

LinearModel train_logreg(const std::vector<SparseVector>& X, const std::vector<int>& y, double C,
                         double gradient_tol, int max_iter, LogregDiagnostics* diagnostics,
                         std::vector<std::string> class_names) {
  if (!(C > 0.0)) throw Error(ErrorCode::InvalidArgument, "C must be positive");
  const std::size_t dim = detail::validate_binary(X, y);
  const Problem p{X, y, C, dim};

  DenseVector theta(dim + 1, 0.0);
  std::vector<double> curvature;
  double f = p.objective(theta);
  DenseVector g = p.gradient(theta, &curvature);
  const double g0 = norm(g);
  int it = 0;
  bool done = norm(g) < gradient_tol;
  for (; !done && it < max_iter; ++it) {
    const auto d = newton_direction(p, curvature, g);
    const double slope = inner(g, d);
    double t = 1.0;
    DenseVector trial(theta.size());
    double f_trial = f;
    bool accepted = false;
    DenseVector g_trial;
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      for (std::size_t i = 0; i < theta.size(); ++i) trial[i] = theta[i] + t * d[i];
      f_trial = p.objective(trial);
      if (f_trial <= f + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      // Near the optimum the predicted decrease drops below the rounding
      // error of f; fall back to requiring a smaller gradient.
      if (-t * slope <= 1e-12 * std::abs(f)) {
        g_trial = p.gradient(trial, nullptr);
        if (norm(g_trial) < norm(g)) {
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) {
      // No representable descent left: the remaining gradient is rounding
      // noise when it is tiny relative to where we started.
      if (norm(g) <= 1e-9 * std::max(1.0, g0)) break;
      throw Error(ErrorCode::NoConvergence,
                  "line search stalled at |g| = " + std::to_string(norm(g)));
    }
    theta.swap(trial);
    f = f_trial;
    g = p.gradient(theta, &curvature);
    done = norm(g) < gradient_tol;
  }
  if (!done && norm(g) > 1e-9 * std::max(1.0, g0)) {
    throw Error(ErrorCode::NoConvergence, "logistic regression hit the iteration cap (|g| = " +
                                              std::to_string(norm(g)) + ")");
  }
  if (diagnostics) {
    diagnostics->iterations = it;
    diagnostics->gradient_norm = norm(g);
    diagnostics->objective = f;
  }

  LinearModel model;
  model.classes = std::move(class_names);
  model.intercepts.push_back(theta[dim]);
  theta.pop_back();
  model.weights.push_back(std::move(theta));
  model.C = C;
  model.loss = Loss::Logistic;
  model.dim = dim;
  return model;
}

}  // namespace stylos::optim
