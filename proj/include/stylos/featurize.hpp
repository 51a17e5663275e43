#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "stylos/corpus.hpp"
#include "stylos/sparse.hpp"

namespace stylos::featurize {

// ---------------------------------------------------------------------------
// Character n-gram TfIdf

struct Vocabulary {
  std::vector<int> ngram_sizes;
  std::vector<std::string> terms;  // column -> n-gram (internal form, spaces kept)
  std::unordered_map<std::string, std::uint32_t> term_index;
  std::vector<double> idf;
  std::size_t fitted_on = 0;
  bool lowercase = true;

  std::size_t size() const { return terms.size(); }
  std::optional<std::uint32_t> find(std::string_view term) const;
  // Content hash over sizes, terms and idf; recorded in model provenance.
  std::uint64_t hash() const;

  // Rebuilds term_index from terms (after deserialization).
  void reindex();
};

// Whitespace collapsed to single spaces, optionally lowercased.
std::string normalize_for_ngrams(std::string_view text, bool lowercase = true);

// Every code-point n-gram occurrence of each requested size, in text order.
std::vector<std::string> char_ngrams(std::string_view normalized, const std::vector<int>& sizes);

// Terms are sorted so column order is independent of input order.
// idf_t = ln((1 + N) / (1 + df_t)) + 1.
Vocabulary fit_vocabulary(const std::vector<std::string>& train_texts,
                          const std::vector<int>& ngram_sizes = {2, 3}, bool lowercase = true);

// Raw counts times idf, L2-normalized. Unknown n-grams are dropped.
SparseVector tfidf_vector(std::string_view text, const Vocabulary& vocab);

// Feature names are shown with '_' in place of the space character.
std::string display_name(std::string_view term);

// ---------------------------------------------------------------------------
// Chi-square selection

// Accumulates class-conditional column sums so that chi-square can be
// computed over vectors that are never materialized together.
class Chi2Accumulator {
 public:
  explicit Chi2Accumulator(std::size_t n_features) : n_features_(n_features) {}

  void add(const SparseVector& x, int label);
  std::vector<double> scores() const;
  std::size_t n_samples() const { return n_samples_; }

 private:
  std::size_t n_features_;
  std::size_t n_samples_ = 0;
  std::map<int, std::size_t> class_counts_;
  std::map<int, std::vector<double>> observed_;
};

std::vector<double> chi2_scores(const std::vector<SparseVector>& X, const std::vector<int>& y,
                                std::size_t n_features);

// kept_columns are listed best-first; position maps an original column to its
// index in the reduced space (or -1).
struct FeatureMask {
  std::vector<std::uint32_t> kept_columns;
  std::vector<double> scores;
  std::size_t k = 0;
  std::size_t source_dim = 0;
  std::vector<std::int32_t> position;

  std::size_t size() const { return kept_columns.size(); }
  void reindex();
};

// Top-k columns by score; ties go to the lower column index.
FeatureMask select_top_k(const std::vector<double>& scores, std::size_t k);

FeatureMask chi2_select(const std::vector<SparseVector>& X, const std::vector<int>& y,
                        std::size_t n_features, std::size_t k = 1000);

SparseVector apply_mask(const SparseVector& v, const FeatureMask& mask);

// Elementwise |a - b|. When dim is given, indices at or above it are rejected.
SparseVector sav_diff_vector(const SparseVector& a, const SparseVector& b,
                             std::optional<std::size_t> dim = std::nullopt);

// ---------------------------------------------------------------------------
// Stylometric histograms

enum class HistogramMode { Density, Cumulative };

struct Histogram {
  std::vector<std::string> labels;
  DenseVector bins;
  HistogramMode mode = HistogramMode::Density;
};

// Words are maximal alphabetic runs; lengths above max_len land in the last bin.
Histogram word_length_histogram(std::string_view text, int max_len = 20,
                                HistogramMode mode = HistogramMode::Density);

Histogram function_word_histogram(std::string_view text, const std::vector<std::string>& lexicon,
                                  HistogramMode mode = HistogramMode::Density);

Histogram to_cumulative(Histogram h);

// The 80-word Latin function-word list.
const std::vector<std::string>& default_function_words();

std::vector<std::string> load_lexicon(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// POS / syllabic-quantity chains

enum class ChainKind { POS, SQ };

std::string_view to_string(ChainKind k);
ChainKind parse_chain_kind(std::string_view s);

enum class SqMark { Short, Long, Unknown };

struct Annotation {
  std::vector<std::string> pos;
  std::vector<SqMark> sq;
};

struct AnnotationSidecar {
  std::unordered_map<std::string, Annotation> records;

  const Annotation& at(const std::string& segment_id) const;
};

// JSON Lines: {"id": "...", "pos": [...], "sq": "uu-*"}.
AnnotationSidecar parse_sidecar(std::istream& in);
AnnotationSidecar load_sidecar(const std::filesystem::path& path);

// All contiguous windows of length n, joined with sep.
std::vector<std::string> chain_ngrams(const std::vector<std::string>& seq, int n,
                                      std::string_view sep = " ");

// Symbol sequence of the requested kind; SQ marks render as u, -, *.
std::vector<std::string> chain_symbols(const Annotation& a, ChainKind kind);
std::string_view chain_separator(ChainKind kind);

struct ScoredChain {
  std::string chain;
  int n = 0;
  double score = 0.0;
};

// Chi-square of chain presence against author labels, best first; ties by
// lexicographic chain order.
std::vector<ScoredChain> top_discriminative_chains(const std::vector<corpus::Segment>& segments,
                                                   const AnnotationSidecar& sidecar,
                                                   ChainKind kind, const std::vector<int>& sizes,
                                                   std::size_t top = 5);

bool segment_has_chain(const Annotation& a, ChainKind kind, const std::string& chain, int n);

}  // namespace stylos::featurize
