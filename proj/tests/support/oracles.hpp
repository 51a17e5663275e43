#pragma once

// Independent reference computations used to check the library. They share
// no code with src/ beyond plain data types.

#include <cstdint>
#include <string>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

// Pearson chi-square per column from class-conditional sums of non-negative
// feature values (observed) against class_prior * column total (expected).
std::vector<double> chi2(const Matrix& X, const std::vector<int>& y);

// Lowercased, whitespace-collapsed byte n-grams (ASCII fixtures only).
std::vector<std::string> ngrams(const std::string& text, const std::vector<int>& sizes);

// Smoothed-idf TfIdf, L2-normalized, keyed by n-gram.
std::vector<std::pair<std::string, double>> tfidf(const std::vector<std::string>& train,
                                                  const std::vector<int>& sizes,
                                                  const std::string& text);

// 0.5 (|w|^2 + b^2) + C sum hinge, y in {0, 1}.
double svm_objective(const std::vector<double>& w, double b, const Matrix& X,
                     const std::vector<int>& y, double C);

// Lattice search over (w, b): evaluates a (2m+1)^(d+1) grid around the best
// point, recentres while the best moves and shrinks the spacing otherwise.
// The final point fixes the margin set, which is then solved exactly and
// kept only if it satisfies the optimality conditions.
double svm_grid_minimum(const Matrix& X, const std::vector<int>& y, double C,
                        std::vector<double>* w_out = nullptr, double* b_out = nullptr);

// Macro F1 from an explicit confusion matrix.
double macro_f1(const std::vector<int>& pred, const std::vector<int>& gold, int n_classes);

struct Nearest {
  std::size_t index = 0;
  double distance = 0.0;
};

// All distances computed, then the minimum picked with (distance, id) order.
Nearest nearest(const std::vector<double>& q, const Matrix& reps, const std::vector<std::string>& ids,
                const std::vector<int>& labels, bool same_label, int label);

// Word lengths from a hand-rolled alphabetic tokenizer.
std::vector<double> word_length_density(const std::string& text, int max_len);

}  // namespace oracle
