#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace stylos::corpus {

enum class Subcorpus { Epistolary, Literary };

std::string_view to_string(Subcorpus s);
Subcorpus parse_subcorpus(std::string_view s);

struct Document {
  std::string id;
  std::string author;
  Subcorpus subcorpus = Subcorpus::Epistolary;
  std::string raw_text;
  std::string clean_text;
};

// A group of consecutive sentences from one document; the unit of
// classification for AA and AV.
struct Segment {
  std::string id;
  std::string doc_id;
  std::string author;
  Subcorpus subcorpus = Subcorpus::Epistolary;
  std::vector<std::string> sentences;
  std::string text;
};

struct SplitCorpus {
  std::vector<Segment> train;
  std::vector<Segment> test;
  std::uint64_t seed = 0;
};

enum class PairLabel { SameAuthor, DifferentAuthor };

std::string_view to_string(PairLabel l);

struct SegmentPair {
  std::string left;
  std::string right;
  PairLabel label = PairLabel::SameAuthor;
};

struct PairSet {
  std::vector<SegmentPair> pairs;
  int n_same_per_author = 0;
  int m_diff_total = 0;
  std::uint64_t seed = 0;
  // Set when fewer distinct pairs existed than requested (non-strict mode).
  bool truncated = false;
};

// Quotations in braces and non-Latin passages in angle brackets.
std::vector<std::string> default_marker_patterns();

std::string clean_text(std::string_view raw, const std::vector<std::string>& marker_patterns);

// Reads a `file,author,subcorpus` manifest; file paths are relative to
// corpus_dir and double as document ids.
std::vector<Document> load_corpus(const std::filesystem::path& corpus_dir,
                                  const std::filesystem::path& manifest,
                                  const std::vector<std::string>& marker_patterns =
                                      default_marker_patterns());

// Sentences end at '.', '!' or '?' followed by whitespace or end of text.
std::vector<std::string> split_sentences(std::string_view text);

std::size_t distinct_word_count(std::string_view sentence);

struct SegmentOptions {
  int min_distinct = 5;
  int group_size = 10;
  // A trailing group shorter than this is folded into the previous segment.
  int min_remainder = 5;
};

std::vector<Segment> segment(const Document& doc, const SegmentOptions& opts = {});

std::vector<Segment> segment_all(const std::vector<Document>& docs,
                                 const SegmentOptions& opts = {});

SplitCorpus stratified_split(const std::vector<Segment>& segments, double test_fraction,
                             std::uint64_t seed);

struct PairOptions {
  int n_same_per_author = 5000;
  int m_diff_total = 25000;
  bool strict = false;
};

PairSet generate_sav_pairs(const std::vector<Segment>& segments, const PairOptions& opts,
                           std::uint64_t seed);

// Everything the ingest stage produces, serialized as one JSON document.
struct CorpusBundle {
  std::vector<Document> documents;
  std::vector<Segment> segments;
  SplitCorpus split;
  double test_fraction = 0.1;
  std::vector<std::string> marker_patterns;
  SegmentOptions segment_options;
};

CorpusBundle build_bundle(std::vector<Document> docs, double test_fraction, std::uint64_t seed,
                          const SegmentOptions& opts = {});

}  // namespace stylos::corpus
