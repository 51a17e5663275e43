#include "stylos/featurize.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include "json.hpp"
#include "stylos/error.hpp"
#include "stylos/text.hpp"

namespace stylos::featurize {

using nlohmann::json;

std::optional<std::uint32_t> Vocabulary::find(std::string_view term) const {
  auto it = term_index.find(std::string(term));
  if (it == term_index.end()) return std::nullopt;
  return it->second;
}

std::uint64_t Vocabulary::hash() const {
  std::uint64_t h = text::fnv1a(lowercase ? "lc" : "cs");
  for (int n : ngram_sizes) h = text::fnv1a(std::to_string(n) + ",", h);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    h = text::fnv1a(terms[i], h);
    h = text::fnv1a("\x1f", h);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", idf[i]);
    h = text::fnv1a(buf, h);
  }
  return h;
}

void Vocabulary::reindex() {
  term_index.clear();
  term_index.reserve(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    term_index.emplace(terms[i], static_cast<std::uint32_t>(i));
  }
}

std::string normalize_for_ngrams(std::string_view t, bool lowercase) {
  auto s = text::collapse_whitespace(t);
  return lowercase ? text::ascii_lower(s) : s;
}

std::vector<std::string> char_ngrams(std::string_view normalized, const std::vector<int>& sizes) {
  const auto offsets = text::codepoint_offsets(normalized);
  const std::size_t n_cp = offsets.size() - 1;
  std::vector<std::string> grams;
  for (int n : sizes) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "n-gram size must be >= 1");
    const auto un = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i + un <= n_cp; ++i) {
      grams.emplace_back(normalized.substr(offsets[i], offsets[i + un] - offsets[i]));
    }
  }
  return grams;
}

Vocabulary fit_vocabulary(const std::vector<std::string>& train_texts,
                          const std::vector<int>& ngram_sizes, bool lowercase) {
  if (train_texts.empty()) throw Error(ErrorCode::EmptyTrainingSet, "no training texts");
  std::unordered_map<std::string, std::size_t> df;
  for (const auto& t : train_texts) {
    auto grams = char_ngrams(normalize_for_ngrams(t, lowercase), ngram_sizes);
    std::sort(grams.begin(), grams.end());
    grams.erase(std::unique(grams.begin(), grams.end()), grams.end());
    for (auto& g : grams) ++df[g];
  }

  Vocabulary v;
  v.ngram_sizes = ngram_sizes;
  v.lowercase = lowercase;
  v.fitted_on = train_texts.size();
  v.terms.reserve(df.size());
  for (const auto& [term, count] : df) v.terms.push_back(term);
  std::sort(v.terms.begin(), v.terms.end());
  const double n = static_cast<double>(train_texts.size());
  v.idf.reserve(v.terms.size());
  for (const auto& term : v.terms) {
    v.idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(df[term]))) + 1.0);
  }
  v.reindex();
  return v;
}

SparseVector tfidf_vector(std::string_view t, const Vocabulary& vocab) {
  std::unordered_map<std::uint32_t, double> counts;
  for (const auto& g : char_ngrams(normalize_for_ngrams(t, vocab.lowercase), vocab.ngram_sizes)) {
    if (auto col = vocab.find(g)) counts[*col] += 1.0;
  }
  SparseVector v;
  v.indices.reserve(counts.size());
  for (const auto& [col, c] : counts) v.indices.push_back(col);
  std::sort(v.indices.begin(), v.indices.end());
  v.values.reserve(v.indices.size());
  for (auto col : v.indices) v.values.push_back(counts[col] * vocab.idf[col]);
  const double norm = v.norm();
  if (norm > 0.0) {
    for (auto& x : v.values) x /= norm;
  }
  return v;
}

std::string display_name(std::string_view term) {
  std::string s(term);
  std::replace(s.begin(), s.end(), ' ', '_');
  return s;
}

void Chi2Accumulator::add(const SparseVector& x, int label) {
  ++n_samples_;
  ++class_counts_[label];
  auto& obs = observed_[label];
  if (obs.empty()) obs.assign(n_features_, 0.0);
  for (std::size_t k = 0; k < x.indices.size(); ++k) {
    if (x.indices[k] >= n_features_) {
      throw Error(ErrorCode::DimensionMismatch, "feature index outside the selector's space");
    }
    obs[x.indices[k]] += x.values[k];
  }
}

std::vector<double> Chi2Accumulator::scores() const {
  if (class_counts_.size() < 2) throw Error(ErrorCode::SingleClass, "chi-square needs 2 classes");
  std::vector<double> feature_total(n_features_, 0.0);
  for (const auto& [label, obs] : observed_) {
    for (std::size_t j = 0; j < n_features_; ++j) feature_total[j] += obs[j];
  }
  std::vector<double> chi2(n_features_, 0.0);
  const double n = static_cast<double>(n_samples_);
  for (const auto& [label, obs] : observed_) {
    const double class_prob = static_cast<double>(class_counts_.at(label)) / n;
    for (std::size_t j = 0; j < n_features_; ++j) {
      const double expected = class_prob * feature_total[j];
      if (expected > 0.0) {
        const double d = obs[j] - expected;
        chi2[j] += d * d / expected;
      }
    }
  }
  return chi2;
}

std::vector<double> chi2_scores(const std::vector<SparseVector>& X, const std::vector<int>& y,
                                std::size_t n_features) {
  if (X.size() != y.size()) throw Error(ErrorCode::LengthMismatch, "|X| != |y|");
  if (X.size() < 2) throw Error(ErrorCode::SingleClass, "chi-square needs at least 2 samples");
  Chi2Accumulator acc(n_features);
  for (std::size_t i = 0; i < X.size(); ++i) acc.add(X[i], y[i]);
  return acc.scores();
}

void FeatureMask::reindex() {
  position.assign(source_dim, -1);
  for (std::size_t i = 0; i < kept_columns.size(); ++i) {
    position[kept_columns[i]] = static_cast<std::int32_t>(i);
  }
}

FeatureMask select_top_k(const std::vector<double>& scores, std::size_t k) {
  std::vector<std::uint32_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return scores[a] > scores[b]; });
  FeatureMask mask;
  mask.k = k;
  mask.source_dim = scores.size();
  const auto kept = std::min(k, scores.size());
  mask.kept_columns.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(kept));
  for (auto c : mask.kept_columns) mask.scores.push_back(scores[c]);
  mask.reindex();
  return mask;
}

FeatureMask chi2_select(const std::vector<SparseVector>& X, const std::vector<int>& y,
                        std::size_t n_features, std::size_t k) {
  return select_top_k(chi2_scores(X, y, n_features), k);
}

SparseVector apply_mask(const SparseVector& v, const FeatureMask& mask) {
  std::vector<std::pair<std::uint32_t, double>> kept;
  for (std::size_t k = 0; k < v.indices.size(); ++k) {
    const auto col = v.indices[k];
    if (col >= mask.position.size()) {
      throw Error(ErrorCode::DimensionMismatch, "vector index outside the mask's source space");
    }
    const auto pos = mask.position[col];
    if (pos >= 0) kept.emplace_back(static_cast<std::uint32_t>(pos), v.values[k]);
  }
  std::sort(kept.begin(), kept.end());
  SparseVector out;
  for (const auto& [i, x] : kept) {
    out.indices.push_back(i);
    out.values.push_back(x);
  }
  return out;
}

SparseVector sav_diff_vector(const SparseVector& a, const SparseVector& b,
                             std::optional<std::size_t> dim) {
  if (dim && (a.min_dimension() > *dim || b.min_dimension() > *dim)) {
    throw Error(ErrorCode::DimensionMismatch, "vectors exceed the declared feature space");
  }
  SparseVector out;
  std::size_t i = 0, j = 0;
  auto emit = [&](std::uint32_t idx, double v) {
    if (v != 0.0) {
      out.indices.push_back(idx);
      out.values.push_back(v);
    }
  };
  while (i < a.indices.size() || j < b.indices.size()) {
    if (j == b.indices.size() || (i < a.indices.size() && a.indices[i] < b.indices[j])) {
      emit(a.indices[i], std::abs(a.values[i]));
      ++i;
    } else if (i == a.indices.size() || b.indices[j] < a.indices[i]) {
      emit(b.indices[j], std::abs(b.values[j]));
      ++j;
    } else {
      emit(a.indices[i], std::abs(a.values[i] - b.values[j]));
      ++i;
      ++j;
    }
  }
  return out;
}

Histogram to_cumulative(Histogram h) {
  if (h.mode == HistogramMode::Cumulative) return h;
  double run = 0.0;
  for (auto& b : h.bins) {
    run += b;
    b = run;
  }
  h.mode = HistogramMode::Cumulative;
  return h;
}

namespace {

void normalize_counts(Histogram& h) {
  const double total = std::accumulate(h.bins.begin(), h.bins.end(), 0.0);
  if (total > 0.0) {
    for (auto& b : h.bins) b /= total;
  }
}

}  // namespace

Histogram word_length_histogram(std::string_view t, int max_len, HistogramMode mode) {
  if (max_len < 1) throw Error(ErrorCode::InvalidArgument, "max_len must be >= 1");
  Histogram h;
  for (int j = 1; j <= max_len; ++j) {
    h.labels.push_back(j == max_len ? std::to_string(j) + "+" : std::to_string(j));
  }
  h.bins.assign(static_cast<std::size_t>(max_len), 0.0);
  for (const auto& w : text::word_tokens(t)) {
    const auto len = std::min<std::size_t>(text::codepoint_length(w),
                                           static_cast<std::size_t>(max_len));
    h.bins[len - 1] += 1.0;
  }
  normalize_counts(h);
  return mode == HistogramMode::Cumulative ? to_cumulative(std::move(h)) : h;
}

Histogram function_word_histogram(std::string_view t, const std::vector<std::string>& lexicon,
                                  HistogramMode mode) {
  if (lexicon.empty()) throw Error(ErrorCode::InvalidArgument, "empty function-word lexicon");
  Histogram h;
  h.labels = lexicon;
  h.bins.assign(lexicon.size(), 0.0);
  std::unordered_map<std::string, std::size_t> slot;
  for (std::size_t j = 0; j < lexicon.size(); ++j) slot.emplace(text::ascii_lower(lexicon[j]), j);
  for (const auto& w : text::word_tokens(t)) {
    if (auto it = slot.find(w); it != slot.end()) h.bins[it->second] += 1.0;
  }
  normalize_counts(h);
  return mode == HistogramMode::Cumulative ? to_cumulative(std::move(h)) : h;
}

const std::vector<std::string>& default_function_words() {
  static const std::vector<std::string> words = {
      "a",       "ab",     "ac",      "ad",      "adhuc",  "ante",      "apud",   "atque",
      "aut",     "autem",  "circa",   "contra",  "cum",    "de",        "dum",    "e",
      "enim",    "ergo",   "et",      "etiam",   "ex",     "hec",       "iam",    "ibi",
      "ideo",    "idest",  "igitur",  "in",      "inde",   "inter",     "ita",    "licet",
      "nam",     "ne",     "nec",     "nisi",    "non",    "nunc",      "nunquam", "ob",
      "olim",    "per",    "post",    "postea",  "pro",    "propter",   "quando", "quasi",
      "que",     "quia",   "quidem",  "quomodo", "quoniam", "quoque",   "quot",   "satis",
      "scilicet", "sed",   "semper",  "seu",     "si",     "sic",       "sicut",  "sine",
      "siue",    "statim", "sub",     "super",   "supra",  "tam",       "tamen",  "tunc",
      "ubi",     "uel",    "uelut",   "uero",    "uidelicet", "unde",   "usque",  "ut"};
  return words;
}

std::vector<std::string> load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    auto w = text::ascii_lower(text::collapse_whitespace(line));
    if (!w.empty() && w[0] != '#') words.push_back(w);
  }
  if (words.empty()) throw Error(ErrorCode::InvalidArgument, "empty lexicon " + path.string());
  return words;
}

std::string_view to_string(ChainKind k) { return k == ChainKind::POS ? "pos" : "sq"; }

ChainKind parse_chain_kind(std::string_view s) {
  const auto lower = text::ascii_lower(s);
  if (lower == "pos") return ChainKind::POS;
  if (lower == "sq") return ChainKind::SQ;
  throw Error(ErrorCode::ParseError, "unknown chain kind '" + std::string(s) + "'");
}

const Annotation& AnnotationSidecar::at(const std::string& segment_id) const {
  auto it = records.find(segment_id);
  if (it == records.end()) throw Error(ErrorCode::MissingAnnotation, segment_id);
  return it->second;
}

AnnotationSidecar parse_sidecar(std::istream& in) {
  AnnotationSidecar sidecar;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::collapse_whitespace(line).empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ParseError, "sidecar line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!rec.contains("id") || !rec["id"].is_string()) {
      throw Error(ErrorCode::ParseError, "sidecar line " + std::to_string(line_no) + ": missing id");
    }
    Annotation a;
    if (rec.contains("pos")) a.pos = rec["pos"].get<std::vector<std::string>>();
    if (rec.contains("sq")) {
      for (char c : rec["sq"].get<std::string>()) {
        switch (c) {
          case 'u': a.sq.push_back(SqMark::Short); break;
          case '-': a.sq.push_back(SqMark::Long); break;
          case '*': a.sq.push_back(SqMark::Unknown); break;
          default:
            throw Error(ErrorCode::ParseError,
                        "sidecar line " + std::to_string(line_no) + ": bad SQ mark '" + c + "'");
        }
      }
    }
    const auto id = rec["id"].get<std::string>();
    if (!sidecar.records.emplace(id, std::move(a)).second) throw Error(ErrorCode::DuplicateId, id);
  }
  return sidecar;
}

AnnotationSidecar load_sidecar(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());
  return parse_sidecar(in);
}

std::vector<std::string> chain_ngrams(const std::vector<std::string>& seq, int n,
                                      std::string_view sep) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "chain length must be >= 1");
  std::vector<std::string> chains;
  const auto un = static_cast<std::size_t>(n);
  for (std::size_t i = 0; i + un <= seq.size(); ++i) {
    std::string c = seq[i];
    for (std::size_t j = i + 1; j < i + un; ++j) {
      c += sep;
      c += seq[j];
    }
    chains.push_back(std::move(c));
  }
  return chains;
}

std::vector<std::string> chain_symbols(const Annotation& a, ChainKind kind) {
  if (kind == ChainKind::POS) return a.pos;
  std::vector<std::string> out;
  out.reserve(a.sq.size());
  for (auto m : a.sq) out.emplace_back(m == SqMark::Short ? "u" : m == SqMark::Long ? "-" : "*");
  return out;
}

std::string_view chain_separator(ChainKind kind) { return kind == ChainKind::POS ? " " : ""; }

bool segment_has_chain(const Annotation& a, ChainKind kind, const std::string& chain, int n) {
  for (const auto& c : chain_ngrams(chain_symbols(a, kind), n, chain_separator(kind))) {
    if (c == chain) return true;
  }
  return false;
}

std::vector<ScoredChain> top_discriminative_chains(const std::vector<corpus::Segment>& segments,
                                                   const AnnotationSidecar& sidecar,
                                                   ChainKind kind, const std::vector<int>& sizes,
                                                   std::size_t top) {
  // Columns are (n, chain) keys; a segment contributes 1 per distinct chain.
  std::map<std::pair<int, std::string>, std::uint32_t> column;
  std::vector<std::pair<int, std::string>> keys;
  std::vector<SparseVector> X;
  std::vector<int> y;
  std::map<std::string, int> author_ids;
  for (const auto& seg : segments) {
    const auto& ann = sidecar.at(seg.id);
    const auto symbols = chain_symbols(ann, kind);
    std::set<std::uint32_t> present;
    for (int n : sizes) {
      for (auto& c : chain_ngrams(symbols, n, chain_separator(kind))) {
        auto key = std::make_pair(n, std::move(c));
        auto it = column.find(key);
        if (it == column.end()) {
          it = column.emplace(key, static_cast<std::uint32_t>(keys.size())).first;
          keys.push_back(key);
        }
        present.insert(it->second);
      }
    }
    SparseVector v;
    v.indices.assign(present.begin(), present.end());
    v.values.assign(v.indices.size(), 1.0);
    X.push_back(std::move(v));
    y.push_back(author_ids.emplace(seg.author, static_cast<int>(author_ids.size())).first->second);
  }
  const auto scores = chi2_scores(X, y, keys.size());

  std::vector<std::size_t> order(keys.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return keys[a].second != keys[b].second ? keys[a].second < keys[b].second
                                            : keys[a].first < keys[b].first;
  });
  std::vector<ScoredChain> out;
  for (std::size_t i = 0; i < std::min(top, order.size()); ++i) {
    const auto& key = keys[order[i]];
    out.push_back({key.second, key.first, scores[order[i]]});
  }
  return out;
}

}  // namespace stylos::featurize
