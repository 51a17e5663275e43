#include "stylos/probe.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "stylos/error.hpp"
#include "stylos/sampling.hpp"
#include "stylos/text.hpp"

namespace stylos::probe {

using nlohmann::json;

const DenseVector* EmbeddingSet::find(const std::string& id) const {
  auto it = vectors.find(id);
  return it == vectors.end() ? nullptr : &it->second;
}

namespace {

std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

}  // namespace

EmbeddingSet parse_embeddings(std::istream& in) {
  EmbeddingSet set;
  bool have_header = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ParseError, at_line(line_no) + e.what());
    }
    if (!rec.is_object()) throw Error(ErrorCode::ParseError, at_line(line_no) + "expected an object");
    if (!have_header) {
      if (!rec.contains("dim") || !rec["dim"].is_number_integer() || rec["dim"].get<long long>() <= 0) {
        throw Error(ErrorCode::ParseError, at_line(line_no) + "header needs a positive integer dim");
      }
      set.dim = rec["dim"].get<std::size_t>();
      if (rec.contains("source") && rec["source"].is_string()) set.source = rec["source"].get<std::string>();
      have_header = true;
      continue;
    }
    if (!rec.contains("id") || !rec["id"].is_string()) {
      throw Error(ErrorCode::ParseError, at_line(line_no) + "missing string id");
    }
    if (!rec.contains("vec") || !rec["vec"].is_array()) {
      throw Error(ErrorCode::ParseError, at_line(line_no) + "missing vec array");
    }
    const auto id = rec["id"].get<std::string>();
    const auto& arr = rec["vec"];
    if (arr.size() != set.dim) {
      throw Error(ErrorCode::DimensionMismatch, at_line(line_no) + "vector of length " +
                                                    std::to_string(arr.size()) + ", header dim " +
                                                    std::to_string(set.dim));
    }
    DenseVector v;
    v.reserve(arr.size());
    for (const auto& x : arr) {
      if (!x.is_number()) throw Error(ErrorCode::ParseError, at_line(line_no) + "non-numeric entry");
      const double d = x.get<double>();
      if (!std::isfinite(d)) throw Error(ErrorCode::NonFinite, at_line(line_no) + "non-finite entry");
      v.push_back(d);
    }
    if (!set.vectors.emplace(id, std::move(v)).second) {
      throw Error(ErrorCode::DuplicateId, at_line(line_no) + id);
    }
  }
  if (!have_header) throw Error(ErrorCode::ParseError, "embedding file has no header");
  return set;
}

EmbeddingSet load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());
  return parse_embeddings(in);
}

void write_embeddings(std::ostream& out, const EmbeddingSet& set) {
  out << json{{"dim", set.dim}, {"source", set.source}}.dump() << '\n';
  for (const auto& [id, v] : set.vectors) {
    out << json{{"id", id}, {"vec", v}}.dump() << '\n';
  }
}

std::string_view to_string(LabelerFamily f) {
  switch (f) {
    case LabelerFamily::Genre: return "genre";
    case LabelerFamily::PosChainPresence: return "pos-chain";
    case LabelerFamily::SqChainPresence: return "sq-chain";
    case LabelerFamily::WordLenCluster: return "word-length";
    case LabelerFamily::FuncWordCluster: return "function-words";
  }
  return "?";
}

LabelerFamily parse_labeler_family(std::string_view s) {
  const auto v = text::ascii_lower(s);
  if (v == "genre") return LabelerFamily::Genre;
  if (v == "pos-chain" || v == "pos") return LabelerFamily::PosChainPresence;
  if (v == "sq-chain" || v == "sq") return LabelerFamily::SqChainPresence;
  if (v == "word-length" || v == "wordlen") return LabelerFamily::WordLenCluster;
  if (v == "function-words" || v == "funcword") return LabelerFamily::FuncWordCluster;
  throw Error(ErrorCode::InvalidArgument, "unknown labeler family '" + std::string(s) + "'");
}

std::string Labeler::describe() const {
  std::ostringstream os;
  os << to_string(family);
  switch (family) {
    case LabelerFamily::PosChainPresence:
    case LabelerFamily::SqChainPresence:
      os << " n=" << n << " chain=\"" << chain << "\"";
      break;
    case LabelerFamily::WordLenCluster:
    case LabelerFamily::FuncWordCluster:
      os << " k=" << k;
      break;
    case LabelerFamily::Genre:
      break;
  }
  return os.str();
}

namespace {

featurize::ChainKind chain_kind(LabelerFamily f) {
  return f == LabelerFamily::PosChainPresence ? featurize::ChainKind::POS : featurize::ChainKind::SQ;
}

Labeler presence_labeler(LabelerFamily family, const std::string& chain, int n, double score,
                         const std::vector<corpus::Segment>& segments,
                         const featurize::AnnotationSidecar& sidecar) {
  Labeler l;
  l.family = family;
  l.arity = Arity::Binary;
  l.chain = chain;
  l.n = n;
  l.chain_score = score;
  l.class_names = {"absent", "present"};
  int positives = 0;
  for (const auto& s : segments) {
    const int label = featurize::segment_has_chain(sidecar.at(s.id), chain_kind(family), chain, n) ? 1 : 0;
    positives += label;
    l.labels[s.id] = label;
  }
  if (positives == 0 || positives == static_cast<int>(segments.size())) {
    throw Error(ErrorCode::DegenerateLabels, "chain \"" + chain + "\" gives a single class");
  }
  return l;
}

Labeler cluster_labeler(const LabelerParams& p, const std::vector<corpus::Segment>& segments,
                        std::uint64_t seed) {
  const auto& lexicon = p.lexicon.empty() ? featurize::default_function_words() : p.lexicon;
  std::vector<DenseVector> X;
  X.reserve(segments.size());
  for (const auto& s : segments) {
    if (p.family == LabelerFamily::WordLenCluster) {
      X.push_back(featurize::word_length_histogram(s.text, p.max_word_length,
                                                   featurize::HistogramMode::Cumulative).bins);
    } else {
      X.push_back(featurize::function_word_histogram(s.text, lexicon,
                                                     featurize::HistogramMode::Density).bins);
    }
  }
  const auto elbow = optim::elbow_select(X, p.k_min, p.k_max, seed);
  const auto clustering = optim::kmeans(X, elbow.k, seed);

  Labeler l;
  l.family = p.family;
  l.arity = Arity::Categorical;
  l.k = elbow.k;
  l.elbow_ks = elbow.ks;
  l.elbow_inertias = elbow.inertias;
  l.seed = seed;
  // Empty clusters are dropped so class indices stay dense.
  std::set<int> used(clustering.assignments.begin(), clustering.assignments.end());
  std::map<int, int> dense;
  for (int c : used) {
    dense[c] = static_cast<int>(dense.size());
    l.class_names.push_back("cluster" + std::to_string(c));
  }
  for (std::size_t i = 0; i < segments.size(); ++i) {
    l.labels[segments[i].id] = dense.at(clustering.assignments[i]);
  }
  return l;
}

}  // namespace

Labeler make_labeler(const LabelerParams& params, const std::vector<corpus::Segment>& segments,
                     const featurize::AnnotationSidecar* sidecar, std::uint64_t seed) {
  if (segments.empty()) throw Error(ErrorCode::EmptyTrainingSet, "no segments to label");
  switch (params.family) {
    case LabelerFamily::Genre: {
      Labeler l;
      l.family = LabelerFamily::Genre;
      l.arity = Arity::Binary;
      l.class_names = {"Literary", "Epistolary"};
      l.seed = seed;
      for (const auto& s : segments) {
        l.labels[s.id] = s.subcorpus == corpus::Subcorpus::Epistolary ? 1 : 0;
      }
      return l;
    }
    case LabelerFamily::PosChainPresence:
    case LabelerFamily::SqChainPresence: {
      if (!sidecar) throw Error(ErrorCode::MissingAnnotation, "chain labelers need an annotation sidecar");
      if (params.n < 1) throw Error(ErrorCode::InvalidArgument, "chain length must be >= 1");
      std::string chain = params.chain;
      double score = 0.0;
      if (chain.empty()) {
        const auto top = featurize::top_discriminative_chains(segments, *sidecar, chain_kind(params.family),
                                                              {params.n}, params.rank + 1);
        if (top.size() <= params.rank) {
          throw Error(ErrorCode::DegenerateLabels, "fewer than " + std::to_string(params.rank + 1) +
                                                       " chains of length " + std::to_string(params.n));
        }
        chain = top[params.rank].chain;
        score = top[params.rank].score;
      }
      auto l = presence_labeler(params.family, chain, params.n, score, segments, *sidecar);
      l.seed = seed;
      return l;
    }
    case LabelerFamily::WordLenCluster:
    case LabelerFamily::FuncWordCluster:
      return cluster_labeler(params, segments, seed);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown labeler family");
}

std::vector<Labeler> make_chain_labelers(featurize::ChainKind kind, const std::vector<int>& sizes,
                                         const std::vector<corpus::Segment>& segments,
                                         const featurize::AnnotationSidecar& sidecar,
                                         std::size_t top) {
  const auto family = kind == featurize::ChainKind::POS ? LabelerFamily::PosChainPresence
                                                        : LabelerFamily::SqChainPresence;
  std::vector<Labeler> out;
  for (int n : sizes) {
    for (const auto& c : featurize::top_discriminative_chains(segments, sidecar, kind, {n}, top)) {
      try {
        out.push_back(presence_labeler(family, c.chain, n, c.score, segments, sidecar));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateLabels) throw;
      }
    }
  }
  return out;
}

ProbeReport run_probe(const EmbeddingSet& embeddings, const Labeler& labeler, std::uint64_t seed,
                      const ProbeOptions& opts) {
  std::vector<SparseVector> X;
  std::vector<int> y;
  for (const auto& [id, label] : labeler.labels) {
    const auto* v = embeddings.find(id);
    if (!v) throw Error(ErrorCode::CoverageGap, "no embedding for segment " + id);
    X.push_back(SparseVector::from_dense(*v));
    y.push_back(label);
  }
  std::set<int> distinct(y.begin(), y.end());
  if (distinct.size() < 2) throw Error(ErrorCode::SingleClass, "probe labels take a single value");

  const auto split = stratified_holdout(y, opts.test_fraction, seed);
  std::vector<SparseVector> X_train, X_test;
  std::vector<int> y_train, y_test;
  for (auto i : split.train) {
    X_train.push_back(X[i]);
    y_train.push_back(y[i]);
  }
  for (auto i : split.test) {
    X_test.push_back(X[i]);
    y_test.push_back(y[i]);
  }
  if (X_test.empty()) throw Error(ErrorCode::EmptyTestSet, "probe test split is empty");

  const int n_classes = static_cast<int>(labeler.class_names.size());
  auto grid = opts.grid;
  grid.metric = labeler.arity == Arity::Binary ? optim::SelectionMetric::F1
                                               : optim::SelectionMetric::MacroF1;
  const auto binary = optim::logreg_trainer(opts.gradient_tol);
  const auto names = labeler.class_names;
  const std::size_t dim = embeddings.dim;
  optim::MulticlassTrainer trainer = [&](const std::vector<SparseVector>& Xf, const std::vector<int>& yf,
                                         double C) {
    auto m = optim::train_one_vs_rest(Xf, yf, names, C, binary);
    m.dim = dim;
    for (auto& w : m.weights) w.resize(dim, 0.0);
    return m;
  };
  auto cv = optim::cross_validate(trainer, X_train, y_train, n_classes, grid, seed);

  ProbeReport r;
  r.labeler = labeler.describe();
  r.family = labeler.family;
  r.arity = labeler.arity;
  r.class_names = labeler.class_names;
  r.n_train = X_train.size();
  r.n_test = X_test.size();
  r.metrics = tasks::evaluate(optim::predict(cv.model, X_test), y_test,
                              labeler.arity == Arity::Binary ? tasks::Averaging::Binary
                                                             : tasks::Averaging::Weighted,
                              n_classes);
  r.chosen_C = cv.best_C;
  r.C_values = cv.C_values;
  r.cv_mean_scores = cv.mean_scores;
  r.seed = seed;
  r.embedding_source = embeddings.source;
  return r;
}

}  // namespace stylos::probe
