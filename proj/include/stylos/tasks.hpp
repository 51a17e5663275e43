#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stylos/corpus.hpp"
#include "stylos/featurize.hpp"
#include "stylos/metrics.hpp"
#include "stylos/optim.hpp"

namespace stylos::tasks {

enum class TaskKind { AA, AV, SAV };

std::string_view to_string(TaskKind k);
TaskKind parse_task_kind(std::string_view s);

struct PairConfig {
  int n_same_per_author = 5000;
  int m_diff_total = 25000;
  bool strict = false;
};

struct TaskSpec {
  TaskKind kind = TaskKind::AV;
  std::optional<std::string> target_author;  // AV only
  std::optional<PairConfig> pair_config;     // SAV only
  optim::HyperGrid hyper_grid;
  std::uint64_t seed = 0;
  std::size_t k_features = 1000;
  std::vector<int> ngram_sizes{2, 3};
  bool lowercase = true;
  optim::TrainOptions svm;
};

// Throws InvalidArgument / TargetAuthorMissing when the spec cannot run on
// this split.
void validate(const TaskSpec& spec, const corpus::SplitCorpus& split);

// One classification instance: a segment (AA, AV) or a segment pair (SAV).
struct Instance {
  std::string id;
  std::string left;   // segment id
  std::string right;  // second segment for SAV, empty otherwise
  int label = 0;
  SparseVector vector;  // in the selected-feature space
};

struct SegmentRecord {
  std::string author;
  corpus::Subcorpus subcorpus = corpus::Subcorpus::Epistolary;
  std::string text;
  SparseVector vector;  // selected-feature space
};

struct Provenance {
  std::uint64_t train_hash = 0;       // ids + texts of the training segments
  std::uint64_t vocabulary_input_hash = 0;  // texts the vocabulary was fitted on
  std::uint64_t vocabulary_hash = 0;
  std::size_t fitted_on = 0;
  std::size_t train_segments = 0;
};

struct TrainedTask {
  TaskSpec spec;
  std::vector<std::string> class_names;
  Averaging scheme = Averaging::Binary;
  optim::LinearModel model;
  featurize::Vocabulary vocabulary;
  featurize::FeatureMask mask;
  std::vector<std::string> feature_terms;  // selected features, internal form
  Metrics metrics;
  double best_C = 0.0;
  std::vector<double> cv_mean_scores;
  std::vector<std::vector<double>> cv_fold_scores;
  std::vector<Instance> train;
  std::vector<Instance> test;
  std::vector<int> test_predictions;
  std::map<std::string, SegmentRecord> segments;
  Provenance provenance;

  std::vector<SparseVector> train_vectors() const;
  std::vector<SparseVector> test_vectors() const;
  std::vector<int> train_labels() const;
  std::vector<int> test_labels() const;
  std::vector<std::string> feature_display_names() const;
  // Looks an instance up by id in test first, then train.
  const Instance* find_instance(const std::string& id) const;
};

std::uint64_t hash_segments(const std::vector<corpus::Segment>& segments);

TrainedTask run_task(const corpus::SplitCorpus& split, const TaskSpec& spec);

// Rebuilds SAV pair vectors from the stored segment vectors.
void rebuild_pair_vectors(TrainedTask& task);

}  // namespace stylos::tasks
