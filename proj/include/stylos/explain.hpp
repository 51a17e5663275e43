#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stylos/metrics.hpp"
#include "stylos/optim.hpp"
#include "stylos/probe.hpp"
#include "stylos/tasks.hpp"

namespace stylos::explain {

// ---------------------------------------------------------------------------
// Coefficient rankings

enum class RankOrder { Signed, Absolute };

std::string_view to_string(RankOrder o);
RankOrder parse_rank_order(std::string_view s);

struct RankedFeature {
  std::string name;  // display form
  std::uint32_t column = 0;
  double coefficient = 0.0;
};

struct FeatureRanking {
  std::string class_label;
  RankOrder order = RankOrder::Signed;
  std::vector<RankedFeature> entries;  // highest first

  std::vector<RankedFeature> top(std::size_t n) const;
  // Last n entries, lowest first.
  std::vector<RankedFeature> bottom(std::size_t n) const;
};

// Coefficients scoring class_label. For a binary model the negative class is
// scored by the negated weights.
DenseVector class_coefficients(const optim::LinearModel& model, const std::string& class_label,
                               double* intercept = nullptr);

FeatureRanking global_ranking(const optim::LinearModel& model, const std::vector<std::string>& names,
                              const std::string& class_label, RankOrder order);

// ---------------------------------------------------------------------------
// Local explanations

struct Contribution {
  std::string name;
  std::uint32_t column = 0;
  double value = 0.0;         // x_i
  double contribution = 0.0;  // w_i * x_i
};

struct LocalExplanation {
  std::string instance_id;
  std::string class_label;
  std::vector<Contribution> contributions;  // by column
  double intercept = 0.0;
  double total_score = 0.0;
};

// Contributions of every non-zero feature plus the display_top highest and
// lowest signed coefficients, which appear even when their value is zero.
LocalExplanation local_explanation(const optim::LinearModel& model, const SparseVector& x,
                                   const std::vector<std::string>& names,
                                   const std::string& class_label, std::size_t display_top = 5,
                                   std::string instance_id = {});

// ---------------------------------------------------------------------------
// Iterative removal of features

struct IrofCurve {
  std::vector<std::string> removal_order;  // display names, sorted curve
  std::vector<double> sorted_f1;
  std::vector<std::vector<double>> random_f1;  // [trial][step]
  std::vector<double> random_mean;
  std::vector<double> random_std;  // population std across trials
  int trials = 0;
  std::uint64_t seed = 0;
  tasks::Averaging scheme = tasks::Averaging::Binary;
};

// Columns ordered by the largest |coefficient| over all model rows; ties by name.
std::vector<std::uint32_t> removal_ranking(const optim::LinearModel& model,
                                           const std::vector<std::string>& names);

// Zeroes one weight column per step (in every row) and rescores the fixed test
// set; the model argument is not modified. `ranking` must be a permutation of
// the model's columns.
IrofCurve irof(const optim::LinearModel& model, const std::vector<SparseVector>& X,
               const std::vector<int>& y, const std::vector<std::uint32_t>& ranking,
               const std::vector<std::string>& names, tasks::Averaging scheme, int trials,
               std::uint64_t seed);

// Area under a curve sampled at unit steps (trapezoid rule).
double curve_area(const std::vector<double>& curve);

// ---------------------------------------------------------------------------
// Factual / counterfactual retrieval

enum class Space { TfIdf, Embedding };

std::string_view to_string(Space s);
Space parse_space(std::string_view s);

struct Neighbor {
  std::string id;
  int label = 0;
  double distance = 0.0;
};

struct NeighborBundle {
  std::string query_id;
  int predicted_label = 0;
  Space space = Space::TfIdf;
  Neighbor factual;
  Neighbor counterfactual;
};

// Exhaustive scan. The factual has label == predicted, the counterfactual a
// different one; ties go to the lower id and the query id itself is skipped.
NeighborBundle retrieve_neighbors(const std::string& query_id, const SparseVector& query,
                                  int predicted, const std::vector<std::string>& ids,
                                  const std::vector<SparseVector>& reps, const std::vector<int>& labels);
NeighborBundle retrieve_neighbors(const std::string& query_id, const DenseVector& query,
                                  int predicted, const std::vector<std::string>& ids,
                                  const std::vector<DenseVector>& reps, const std::vector<int>& labels);

// ---------------------------------------------------------------------------
// Minimal-difference n-gram highlighting

enum class HighlightRole { FactualShared, CounterfactualShared, TripleShared };

std::string_view to_string(HighlightRole r);

struct MinDiffFeature {
  std::string name;  // display form
  std::uint32_t column = 0;
  double diff = 0.0;
};

// The k features with the smallest |a_i - b_i| among those non-zero in both
// vectors; ties by name.
std::vector<MinDiffFeature> highlight_min_diff(const SparseVector& a, const SparseVector& b,
                                               const std::vector<std::string>& names,
                                               std::size_t k = 10);

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Byte offsets of every (possibly overlapping) occurrence of an n-gram given
// in display form, searched in the normalized (collapsed, lowercased) text.
std::vector<Span> locate(const std::string& normalized_text, const std::string& display_ngram);

struct HighlightedNgram {
  std::string name;
  double factual_diff = 0.0;         // NaN-free; 0 when not in the factual set
  double counterfactual_diff = 0.0;  // likewise
  HighlightRole role = HighlightRole::FactualShared;
};

struct HighlightSet {
  std::vector<HighlightedNgram> ngrams;
  // Keyed by "query", "factual", "counterfactual"; spans refer to the text
  // after n-gram normalization.
  std::map<std::string, std::string> texts;
  std::map<std::string, std::map<std::string, std::vector<Span>>> spans;
};

HighlightSet highlight_neighbors(const SparseVector& query, const std::string& query_text,
                                 const SparseVector& factual, const std::string& factual_text,
                                 const SparseVector& counterfactual,
                                 const std::string& counterfactual_text,
                                 const std::vector<std::string>& names, bool lowercase = true,
                                 std::size_t k = 10);

// ---------------------------------------------------------------------------
// Task-level helpers

LocalExplanation explain_instance(const tasks::TrainedTask& task, const std::string& instance_id,
                                  std::optional<std::string> class_label = std::nullopt,
                                  std::size_t display_top = 5);

IrofCurve irof(const tasks::TrainedTask& task, int trials, std::uint64_t seed);

struct NeighborReport {
  NeighborBundle bundle;
  std::optional<HighlightSet> highlights;  // TfIdf space, AA and AV only
};

// Training instances are the candidates. The Embedding space needs an
// embedding for the query and for every training segment (not for SAV).
NeighborReport neighbors(const tasks::TrainedTask& task, const std::string& instance_id, Space space,
                         const probe::EmbeddingSet* embeddings = nullptr, std::size_t k = 10);

}  // namespace stylos::explain
