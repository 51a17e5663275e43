#include "stylos/serialize.hpp"

#include <fstream>
#include <sstream>

#include "stylos/error.hpp"
#include "stylos/text.hpp"

namespace stylos::io {

std::string version() { return STYLOS_VERSION; }

json envelope(const std::string& kind, json params, json result) {
  json j;
  j["tool"] = "stylos";
  j["version"] = version();
  j["kind"] = kind;
  j["params"] = std::move(params);
  j["result"] = std::move(result);
  return j;
}

const json& unwrap(const json& artifact, const std::string& kind) {
  if (!artifact.is_object() || artifact.value("tool", "") != "stylos") {
    throw Error(ErrorCode::ParseError, "not a stylos artifact");
  }
  if (artifact.value("kind", "") != kind) {
    throw Error(ErrorCode::ParseError, "expected a '" + kind + "' artifact, got '" +
                                           artifact.value("kind", "") + "'");
  }
  if (!artifact.contains("result")) throw Error(ErrorCode::ParseError, "artifact has no result");
  return artifact["result"];
}

std::string render(const json& j) { return j.dump(2) + "\n"; }

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::MissingFile, "cannot write " + path.string());
  out << text;
}

namespace {

// Wraps nlohmann lookups so malformed artifacts surface as ParseError.
template <typename T>
T get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("field '") + key + "': " + e.what());
  }
}

const json& member(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorCode::ParseError, std::string("missing field '") + key + "'");
  }
  return j[key];
}

std::string selection_name(optim::SelectionMetric m) {
  return m == optim::SelectionMetric::F1 ? "F1" : "MacroF1";
}

optim::SelectionMetric parse_selection(const std::string& s) {
  if (s == "F1") return optim::SelectionMetric::F1;
  if (s == "MacroF1") return optim::SelectionMetric::MacroF1;
  throw Error(ErrorCode::ParseError, "unknown selection metric " + s);
}

std::string averaging_name(tasks::Averaging a) {
  switch (a) {
    case tasks::Averaging::Binary: return "Binary";
    case tasks::Averaging::Macro: return "Macro";
    case tasks::Averaging::Weighted: return "Weighted";
  }
  return "?";
}

tasks::Averaging parse_averaging(const std::string& s) {
  if (s == "Binary") return tasks::Averaging::Binary;
  if (s == "Macro") return tasks::Averaging::Macro;
  if (s == "Weighted") return tasks::Averaging::Weighted;
  throw Error(ErrorCode::ParseError, "unknown averaging " + s);
}

json hash_json(std::uint64_t h) { return text::hex64(h); }

std::uint64_t parse_hash(const json& j) {
  try {
    return std::stoull(j.get<std::string>(), nullptr, 16);
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, "bad hash value");
  }
}

}  // namespace

json to_json(const SparseVector& v) { return json{{"indices", v.indices}, {"values", v.values}}; }

SparseVector sparse_from_json(const json& j) {
  SparseVector v;
  v.indices = get<std::vector<std::uint32_t>>(j, "indices");
  v.values = get<std::vector<double>>(j, "values");
  if (v.indices.size() != v.values.size()) throw Error(ErrorCode::ParseError, "sparse vector length mismatch");
  for (std::size_t i = 1; i < v.indices.size(); ++i) {
    if (v.indices[i] <= v.indices[i - 1]) throw Error(ErrorCode::ParseError, "sparse indices not increasing");
  }
  return v;
}

json to_json(const corpus::Segment& s) {
  return json{{"id", s.id},
              {"doc_id", s.doc_id},
              {"author", s.author},
              {"subcorpus", corpus::to_string(s.subcorpus)},
              {"sentences", s.sentences},
              {"text", s.text}};
}

namespace {

corpus::Segment segment_from_json(const json& j) {
  corpus::Segment s;
  s.id = get<std::string>(j, "id");
  s.doc_id = get<std::string>(j, "doc_id");
  s.author = get<std::string>(j, "author");
  s.subcorpus = corpus::parse_subcorpus(get<std::string>(j, "subcorpus"));
  s.sentences = get<std::vector<std::string>>(j, "sentences");
  s.text = get<std::string>(j, "text");
  return s;
}

}  // namespace

json to_json(const corpus::PairSet& p) {
  json pairs = json::array();
  for (const auto& x : p.pairs) {
    pairs.push_back(json{{"left", x.left}, {"right", x.right}, {"label", corpus::to_string(x.label)}});
  }
  return json{{"n_same_per_author", p.n_same_per_author},
              {"m_diff_total", p.m_diff_total},
              {"seed", p.seed},
              {"truncated", p.truncated},
              {"pairs", pairs}};
}

corpus::PairSet pairs_from_json(const json& j) {
  corpus::PairSet p;
  p.n_same_per_author = get<int>(j, "n_same_per_author");
  p.m_diff_total = get<int>(j, "m_diff_total");
  p.seed = get<std::uint64_t>(j, "seed");
  p.truncated = get<bool>(j, "truncated");
  for (const auto& x : member(j, "pairs")) {
    const auto label = get<std::string>(x, "label");
    p.pairs.push_back({get<std::string>(x, "left"), get<std::string>(x, "right"),
                       label == "SameAuthor" ? corpus::PairLabel::SameAuthor
                                             : corpus::PairLabel::DifferentAuthor});
  }
  return p;
}

json corpus_artifact(const corpus::CorpusBundle& b, std::uint64_t seed) {
  json params{{"seed", seed},
              {"test_fraction", b.test_fraction},
              {"marker_patterns", b.marker_patterns},
              {"min_distinct", b.segment_options.min_distinct},
              {"group_size", b.segment_options.group_size},
              {"min_remainder", b.segment_options.min_remainder}};
  json docs = json::array();
  for (const auto& d : b.documents) {
    docs.push_back(json{{"id", d.id},
                        {"author", d.author},
                        {"subcorpus", corpus::to_string(d.subcorpus)},
                        {"raw_text", d.raw_text},
                        {"clean_text", d.clean_text}});
  }
  json segs = json::array();
  for (const auto& s : b.segments) segs.push_back(to_json(s));
  json train = json::array(), test = json::array();
  for (const auto& s : b.split.train) train.push_back(s.id);
  for (const auto& s : b.split.test) test.push_back(s.id);
  json result{{"documents", docs},
              {"segments", segs},
              {"split", json{{"seed", b.split.seed}, {"train", train}, {"test", test}}}};
  return envelope("corpus", params, result);
}

corpus::CorpusBundle corpus_from_artifact(const json& artifact) {
  const auto& r = unwrap(artifact, "corpus");
  const auto& p = member(artifact, "params");
  corpus::CorpusBundle b;
  b.test_fraction = get<double>(p, "test_fraction");
  b.marker_patterns = get<std::vector<std::string>>(p, "marker_patterns");
  b.segment_options.min_distinct = get<int>(p, "min_distinct");
  b.segment_options.group_size = get<int>(p, "group_size");
  b.segment_options.min_remainder = get<int>(p, "min_remainder");
  for (const auto& d : member(r, "documents")) {
    corpus::Document doc;
    doc.id = get<std::string>(d, "id");
    doc.author = get<std::string>(d, "author");
    doc.subcorpus = corpus::parse_subcorpus(get<std::string>(d, "subcorpus"));
    doc.raw_text = get<std::string>(d, "raw_text");
    doc.clean_text = get<std::string>(d, "clean_text");
    b.documents.push_back(std::move(doc));
  }
  std::map<std::string, std::size_t> by_id;
  for (const auto& s : member(r, "segments")) {
    b.segments.push_back(segment_from_json(s));
    by_id[b.segments.back().id] = b.segments.size() - 1;
  }
  const auto& split = member(r, "split");
  b.split.seed = get<std::uint64_t>(split, "seed");
  auto resolve = [&](const json& ids, std::vector<corpus::Segment>& out) {
    for (const auto& id : ids) {
      auto it = by_id.find(id.get<std::string>());
      if (it == by_id.end()) throw Error(ErrorCode::ParseError, "split names unknown segment " + id.dump());
      out.push_back(b.segments[it->second]);
    }
  };
  resolve(member(split, "train"), b.split.train);
  resolve(member(split, "test"), b.split.test);
  return b;
}

json to_json(const tasks::Metrics& m) {
  json per_class = json::array();
  for (const auto& c : m.per_class) {
    per_class.push_back(json{{"label", c.label},
                             {"precision", c.precision},
                             {"recall", c.recall},
                             {"f1", c.f1},
                             {"support", c.support},
                             {"predicted", c.predicted},
                             {"precision_undefined", c.precision_undefined},
                             {"recall_undefined", c.recall_undefined}});
  }
  return json{{"accuracy", m.accuracy},   {"precision", m.precision},
              {"recall", m.recall},       {"f1", m.f1},
              {"scheme", averaging_name(m.scheme)}, {"has_undefined", m.has_undefined},
              {"per_class", per_class}};
}

tasks::Metrics metrics_from_json(const json& j) {
  tasks::Metrics m;
  m.accuracy = get<double>(j, "accuracy");
  m.precision = get<double>(j, "precision");
  m.recall = get<double>(j, "recall");
  m.f1 = get<double>(j, "f1");
  m.scheme = parse_averaging(get<std::string>(j, "scheme"));
  m.has_undefined = get<bool>(j, "has_undefined");
  for (const auto& c : member(j, "per_class")) {
    tasks::ClassMetrics cm;
    cm.label = get<int>(c, "label");
    cm.precision = get<double>(c, "precision");
    cm.recall = get<double>(c, "recall");
    cm.f1 = get<double>(c, "f1");
    cm.support = get<int>(c, "support");
    cm.predicted = get<int>(c, "predicted");
    cm.precision_undefined = get<bool>(c, "precision_undefined");
    cm.recall_undefined = get<bool>(c, "recall_undefined");
    m.per_class.push_back(cm);
  }
  return m;
}

json to_json(const tasks::TaskSpec& s) {
  json j{{"kind", tasks::to_string(s.kind)},
         {"seed", s.seed},
         {"k", s.k_features},
         {"ngram_sizes", s.ngram_sizes},
         {"lowercase", s.lowercase},
         {"C_values", s.hyper_grid.C_values},
         {"folds", s.hyper_grid.folds},
         {"selection_metric", selection_name(s.hyper_grid.metric)},
         {"svm_tol", s.svm.tol},
         {"svm_max_iter", s.svm.max_iter},
         {"svm_seed", s.svm.seed}};
  j["target_author"] = s.target_author ? json(*s.target_author) : json(nullptr);
  if (s.pair_config) {
    j["pair_config"] = json{{"n_same_per_author", s.pair_config->n_same_per_author},
                            {"m_diff_total", s.pair_config->m_diff_total},
                            {"strict", s.pair_config->strict}};
  } else {
    j["pair_config"] = nullptr;
  }
  return j;
}

// Missing keys take TaskSpec defaults so request bodies can stay short.
tasks::TaskSpec spec_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "task spec must be an object");
  tasks::TaskSpec s;
  try {
    if (!j.contains("kind")) throw Error(ErrorCode::InvalidArgument, "task spec needs 'kind'");
    s.kind = tasks::parse_task_kind(j.at("kind").get<std::string>());
    s.seed = j.value("seed", s.seed);
    s.k_features = j.value("k", s.k_features);
    s.ngram_sizes = j.value("ngram_sizes", s.ngram_sizes);
    s.lowercase = j.value("lowercase", s.lowercase);
    s.hyper_grid.C_values = j.value("C_values", s.hyper_grid.C_values);
    s.hyper_grid.folds = j.value("folds", s.hyper_grid.folds);
    if (j.contains("selection_metric")) {
      s.hyper_grid.metric = parse_selection(j.at("selection_metric").get<std::string>());
    }
    s.svm.tol = j.value("svm_tol", s.svm.tol);
    s.svm.max_iter = j.value("svm_max_iter", s.svm.max_iter);
    s.svm.seed = j.value("svm_seed", s.svm.seed);
    if (j.contains("target_author") && !j["target_author"].is_null()) {
      s.target_author = j["target_author"].get<std::string>();
    }
    if (j.contains("pair_config") && !j["pair_config"].is_null()) {
      const auto& p = j["pair_config"];
      tasks::PairConfig pc;
      pc.n_same_per_author = p.value("n_same_per_author", pc.n_same_per_author);
      pc.m_diff_total = p.value("m_diff_total", pc.m_diff_total);
      pc.strict = p.value("strict", pc.strict);
      s.pair_config = pc;
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("task spec: ") + e.what());
  }
  for (int n : s.ngram_sizes) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "n-gram sizes must be positive");
  }
  return s;
}

json to_json(const optim::LinearModel& m) {
  json rows = json::array();
  for (const auto& w : m.weights) rows.push_back(to_json(SparseVector::from_dense(w)));
  return json{{"classes", m.classes},
              {"dim", m.dim},
              {"C", m.C},
              {"loss", m.loss == optim::Loss::Hinge ? "hinge" : "logistic"},
              {"intercepts", m.intercepts},
              {"weights", rows}};
}

optim::LinearModel model_from_json(const json& j) {
  optim::LinearModel m;
  m.classes = get<std::vector<std::string>>(j, "classes");
  m.dim = get<std::size_t>(j, "dim");
  m.C = get<double>(j, "C");
  m.loss = get<std::string>(j, "loss") == "hinge" ? optim::Loss::Hinge : optim::Loss::Logistic;
  m.intercepts = get<std::vector<double>>(j, "intercepts");
  for (const auto& row : member(j, "weights")) {
    const auto v = sparse_from_json(row);
    if (v.min_dimension() > m.dim) throw Error(ErrorCode::ParseError, "weight index beyond dim");
    m.weights.push_back(v.to_dense(m.dim));
  }
  if (m.weights.size() != m.intercepts.size() || m.weights.empty()) {
    throw Error(ErrorCode::ParseError, "weights and intercepts disagree");
  }
  return m;
}

json model_artifact(const tasks::TrainedTask& t) {
  json params = to_json(t.spec);
  json vocab{{"ngram_sizes", t.vocabulary.ngram_sizes},
             {"lowercase", t.vocabulary.lowercase},
             {"fitted_on", t.vocabulary.fitted_on},
             {"terms", t.vocabulary.terms},
             {"idf", t.vocabulary.idf}};
  json mask{{"k", t.mask.k},
            {"source_dim", t.mask.source_dim},
            {"kept_columns", t.mask.kept_columns},
            {"scores", t.mask.scores}};
  auto instances = [](const std::vector<tasks::Instance>& v) {
    json a = json::array();
    for (const auto& i : v) {
      a.push_back(json{{"id", i.id}, {"left", i.left}, {"right", i.right}, {"label", i.label}});
    }
    return a;
  };
  json segments = json::object();
  for (const auto& [id, s] : t.segments) {
    segments[id] = json{{"author", s.author},
                        {"subcorpus", corpus::to_string(s.subcorpus)},
                        {"text", s.text},
                        {"vector", to_json(s.vector)}};
  }
  json cv{{"best_C", t.best_C},
          {"C_values", t.spec.hyper_grid.C_values},
          {"mean_scores", t.cv_mean_scores},
          {"fold_scores", t.cv_fold_scores}};
  json prov{{"train_hash", hash_json(t.provenance.train_hash)},
            {"vocabulary_input_hash", hash_json(t.provenance.vocabulary_input_hash)},
            {"vocabulary_hash", hash_json(t.provenance.vocabulary_hash)},
            {"fitted_on", t.provenance.fitted_on},
            {"train_segments", t.provenance.train_segments}};
  json result{{"class_names", t.class_names},
              {"scheme", averaging_name(t.scheme)},
              {"model", to_json(t.model)},
              {"vocabulary", vocab},
              {"mask", mask},
              {"feature_terms", t.feature_terms},
              {"metrics", to_json(t.metrics)},
              {"cv", cv},
              {"train", instances(t.train)},
              {"test", instances(t.test)},
              {"test_predictions", t.test_predictions},
              {"segments", segments},
              {"provenance", prov}};
  return envelope("model", params, result);
}

tasks::TrainedTask task_from_artifact(const json& artifact) {
  const auto& r = unwrap(artifact, "model");
  tasks::TrainedTask t;
  t.spec = spec_from_json(member(artifact, "params"));
  t.class_names = get<std::vector<std::string>>(r, "class_names");
  t.scheme = parse_averaging(get<std::string>(r, "scheme"));
  t.model = model_from_json(member(r, "model"));

  const auto& v = member(r, "vocabulary");
  t.vocabulary.ngram_sizes = get<std::vector<int>>(v, "ngram_sizes");
  t.vocabulary.lowercase = get<bool>(v, "lowercase");
  t.vocabulary.fitted_on = get<std::size_t>(v, "fitted_on");
  t.vocabulary.terms = get<std::vector<std::string>>(v, "terms");
  t.vocabulary.idf = get<std::vector<double>>(v, "idf");
  t.vocabulary.reindex();

  const auto& m = member(r, "mask");
  t.mask.k = get<std::size_t>(m, "k");
  t.mask.source_dim = get<std::size_t>(m, "source_dim");
  t.mask.kept_columns = get<std::vector<std::uint32_t>>(m, "kept_columns");
  t.mask.scores = get<std::vector<double>>(m, "scores");
  t.mask.reindex();

  t.feature_terms = get<std::vector<std::string>>(r, "feature_terms");
  t.metrics = metrics_from_json(member(r, "metrics"));
  const auto& cv = member(r, "cv");
  t.best_C = get<double>(cv, "best_C");
  t.cv_mean_scores = get<std::vector<double>>(cv, "mean_scores");
  t.cv_fold_scores = get<std::vector<std::vector<double>>>(cv, "fold_scores");
  t.test_predictions = get<std::vector<int>>(r, "test_predictions");

  for (const auto& [id, s] : member(r, "segments").items()) {
    tasks::SegmentRecord rec;
    rec.author = get<std::string>(s, "author");
    rec.subcorpus = corpus::parse_subcorpus(get<std::string>(s, "subcorpus"));
    rec.text = get<std::string>(s, "text");
    rec.vector = sparse_from_json(member(s, "vector"));
    t.segments.emplace(id, std::move(rec));
  }
  auto instances = [&](const json& a, std::vector<tasks::Instance>& out) {
    for (const auto& i : a) {
      tasks::Instance inst;
      inst.id = get<std::string>(i, "id");
      inst.left = get<std::string>(i, "left");
      inst.right = get<std::string>(i, "right");
      inst.label = get<int>(i, "label");
      auto it = t.segments.find(inst.left);
      if (it == t.segments.end()) throw Error(ErrorCode::ParseError, "instance names unknown segment " + inst.left);
      inst.vector = it->second.vector;
      out.push_back(std::move(inst));
    }
  };
  instances(member(r, "train"), t.train);
  instances(member(r, "test"), t.test);
  tasks::rebuild_pair_vectors(t);

  const auto& p = member(r, "provenance");
  t.provenance.train_hash = parse_hash(member(p, "train_hash"));
  t.provenance.vocabulary_input_hash = parse_hash(member(p, "vocabulary_input_hash"));
  t.provenance.vocabulary_hash = parse_hash(member(p, "vocabulary_hash"));
  t.provenance.fitted_on = get<std::size_t>(p, "fitted_on");
  t.provenance.train_segments = get<std::size_t>(p, "train_segments");
  return t;
}

json metrics_artifact(const tasks::TrainedTask& t) {
  json result{{"task", tasks::to_string(t.spec.kind)},
              {"class_names", t.class_names},
              {"n_train", t.train.size()},
              {"n_test", t.test.size()},
              {"best_C", t.best_C},
              {"metrics", to_json(t.metrics)},
              {"vocabulary_hash", hash_json(t.provenance.vocabulary_hash)},
              {"train_hash", hash_json(t.provenance.train_hash)}};
  return envelope("metrics", to_json(t.spec), result);
}

namespace {

json model_ref(const tasks::TrainedTask& t) {
  return json{{"task", tasks::to_string(t.spec.kind)},
              {"seed", t.spec.seed},
              {"vocabulary_hash", hash_json(t.provenance.vocabulary_hash)},
              {"train_hash", hash_json(t.provenance.train_hash)}};
}

json spans_json(const std::vector<explain::Span>& spans) {
  json a = json::array();
  for (const auto& s : spans) a.push_back(json::array({s.begin, s.end}));
  return a;
}

}  // namespace

json ranking_artifact(const explain::FeatureRanking& r, const tasks::TrainedTask& t) {
  json entries = json::array();
  for (const auto& e : r.entries) {
    entries.push_back(json{{"feature", e.name}, {"column", e.column}, {"coefficient", e.coefficient}});
  }
  json params{{"model", model_ref(t)}, {"class", r.class_label}, {"order", explain::to_string(r.order)}};
  return envelope("ranking", params, json{{"class", r.class_label}, {"entries", entries}});
}

json local_artifact(const explain::LocalExplanation& e, const tasks::TrainedTask& t) {
  json contribs = json::array();
  for (const auto& c : e.contributions) {
    contribs.push_back(json{{"feature", c.name},
                            {"column", c.column},
                            {"value", c.value},
                            {"contribution", c.contribution}});
  }
  json params{{"model", model_ref(t)}, {"instance_id", e.instance_id}, {"class", e.class_label}};
  return envelope("local_explanation", params,
                  json{{"instance_id", e.instance_id},
                       {"class", e.class_label},
                       {"intercept", e.intercept},
                       {"total_score", e.total_score},
                       {"contributions", contribs}});
}

json irof_artifact(const explain::IrofCurve& c, const tasks::TrainedTask& t) {
  json params{{"model", model_ref(t)}, {"trials", c.trials}, {"seed", c.seed}};
  return envelope("irof", params,
                  json{{"scheme", averaging_name(c.scheme)},
                       {"trials", c.trials},
                       {"removal_order", c.removal_order},
                       {"sorted_f1", c.sorted_f1},
                       {"random_f1", c.random_f1},
                       {"random_mean", c.random_mean},
                       {"random_std", c.random_std},
                       {"area_sorted", explain::curve_area(c.sorted_f1)},
                       {"area_random_mean", explain::curve_area(c.random_mean)}});
}

json neighbors_artifact(const explain::NeighborReport& r, const tasks::TrainedTask& t) {
  const auto& b = r.bundle;
  auto neighbor = [&](const explain::Neighbor& n) {
    return json{{"id", n.id},
                {"label", t.class_names.at(static_cast<std::size_t>(n.label))},
                {"distance", n.distance}};
  };
  json result{{"query_id", b.query_id},
              {"predicted_label", t.class_names.at(static_cast<std::size_t>(b.predicted_label))},
              {"space", explain::to_string(b.space)},
              {"factual", neighbor(b.factual)},
              {"counterfactual", neighbor(b.counterfactual)}};
  if (r.highlights) {
    json ngrams = json::array();
    for (const auto& n : r.highlights->ngrams) {
      ngrams.push_back(json{{"ngram", n.name},
                            {"role", explain::to_string(n.role)},
                            {"factual_diff", n.factual_diff},
                            {"counterfactual_diff", n.counterfactual_diff}});
    }
    json spans = json::object();
    for (const auto& [text, by_ngram] : r.highlights->spans) {
      json m = json::object();
      for (const auto& [ng, s] : by_ngram) m[ng] = spans_json(s);
      spans[text] = m;
    }
    result["highlights"] = json{{"ngrams", ngrams}, {"texts", r.highlights->texts}, {"spans", spans}};
  } else {
    result["highlights"] = nullptr;
  }
  json params{{"model", model_ref(t)}, {"instance_id", b.query_id}, {"space", explain::to_string(b.space)}};
  return envelope("neighbors", params, result);
}

json to_json(const probe::LabelerParams& p) {
  return json{{"family", probe::to_string(p.family)},
              {"chain", p.chain},
              {"n", p.n},
              {"rank", p.rank},
              {"k_min", p.k_min},
              {"k_max", p.k_max},
              {"max_word_length", p.max_word_length},
              {"lexicon", p.lexicon}};
}

probe::LabelerParams labeler_params_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "labeler must be an object");
  probe::LabelerParams p;
  try {
    p.family = probe::parse_labeler_family(j.at("family").get<std::string>());
    p.chain = j.value("chain", p.chain);
    p.n = j.value("n", p.n);
    p.rank = j.value("rank", p.rank);
    p.k_min = j.value("k_min", p.k_min);
    p.k_max = j.value("k_max", p.k_max);
    p.max_word_length = j.value("max_word_length", p.max_word_length);
    p.lexicon = j.value("lexicon", p.lexicon);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("labeler: ") + e.what());
  }
  return p;
}

json probe_artifact(const probe::ProbeReport& r, const probe::LabelerParams& params,
                    const probe::Labeler& labeler) {
  json p{{"labeler", to_json(params)}, {"seed", r.seed}, {"embedding_source", r.embedding_source}};
  json result{{"labeler", r.labeler},
              {"arity", r.arity == probe::Arity::Binary ? "Binary" : "Categorical"},
              {"class_names", r.class_names},
              {"n_train", r.n_train},
              {"n_test", r.n_test},
              {"metrics", to_json(r.metrics)},
              {"chosen_C", r.chosen_C},
              {"C_values", r.C_values},
              {"cv_mean_scores", r.cv_mean_scores}};
  if (!labeler.elbow_ks.empty()) {
    result["elbow"] = json{{"k", labeler.k}, {"ks", labeler.elbow_ks}, {"inertias", labeler.elbow_inertias}};
  }
  if (!labeler.chain.empty()) result["chain"] = json{{"chain", labeler.chain}, {"n", labeler.n}, {"chi2", labeler.chain_score}};
  return envelope("probe", p, result);
}

}  // namespace stylos::io
