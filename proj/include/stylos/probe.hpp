#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stylos/corpus.hpp"
#include "stylos/featurize.hpp"
#include "stylos/metrics.hpp"
#include "stylos/optim.hpp"

namespace stylos::probe {

// ---------------------------------------------------------------------------
// Embedding files

struct EmbeddingSet {
  std::size_t dim = 0;
  std::string source;
  std::map<std::string, DenseVector> vectors;

  std::size_t size() const { return vectors.size(); }
  const DenseVector* find(const std::string& id) const;
};

// Line 1: {"dim": D, "source": "..."}; then {"id": "...", "vec": [...]} per line.
// Blank lines are skipped. Errors name the 1-based line number.
EmbeddingSet parse_embeddings(std::istream& in);
EmbeddingSet load_embeddings(const std::filesystem::path& path);
void write_embeddings(std::ostream& out, const EmbeddingSet& set);

// ---------------------------------------------------------------------------
// Labelers

enum class LabelerFamily { Genre, PosChainPresence, SqChainPresence, WordLenCluster, FuncWordCluster };
enum class Arity { Binary, Categorical };

std::string_view to_string(LabelerFamily f);
LabelerFamily parse_labeler_family(std::string_view s);

struct LabelerParams {
  LabelerFamily family = LabelerFamily::Genre;
  // Presence families: the chain to test for, or empty to use the rank-th
  // most discriminative chain of length n.
  std::string chain;
  int n = 5;
  std::size_t rank = 0;
  // Cluster families.
  int k_min = 2;
  int k_max = 10;
  int max_word_length = 20;
  std::vector<std::string> lexicon;  // empty: default Latin list
};

struct Labeler {
  LabelerFamily family = LabelerFamily::Genre;
  Arity arity = Arity::Binary;
  std::string chain;
  int n = 0;
  double chain_score = 0.0;
  int k = 0;
  std::vector<int> elbow_ks;
  std::vector<double> elbow_inertias;
  std::vector<std::string> class_names;
  std::map<std::string, int> labels;  // segment id -> class index
  std::uint64_t seed = 0;

  std::string describe() const;
};

// Labels every segment given. Presence labelers need the sidecar and reject
// chains that leave only one class; cluster labelers fit k-means with the
// elbow-selected k over Cumulative word-length or Density function-word
// histograms.
Labeler make_labeler(const LabelerParams& params, const std::vector<corpus::Segment>& segments,
                     const featurize::AnnotationSidecar* sidecar, std::uint64_t seed);

// One presence labeler per top chain of each size, best first.
std::vector<Labeler> make_chain_labelers(featurize::ChainKind kind, const std::vector<int>& sizes,
                                         const std::vector<corpus::Segment>& segments,
                                         const featurize::AnnotationSidecar& sidecar,
                                         std::size_t top = 5);

// ---------------------------------------------------------------------------
// Probes

struct ProbeOptions {
  double test_fraction = 0.1;
  optim::HyperGrid grid;
  double gradient_tol = 1e-6;
};

struct ProbeReport {
  std::string labeler;
  LabelerFamily family = LabelerFamily::Genre;
  Arity arity = Arity::Binary;
  std::vector<std::string> class_names;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  tasks::Metrics metrics;
  double chosen_C = 0.0;
  std::vector<double> C_values;
  std::vector<double> cv_mean_scores;
  std::uint64_t seed = 0;
  std::string embedding_source;
};

ProbeReport run_probe(const EmbeddingSet& embeddings, const Labeler& labeler, std::uint64_t seed,
                      const ProbeOptions& opts = {});

}  // namespace stylos::probe
