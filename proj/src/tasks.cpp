#include "stylos/tasks.hpp"

#include <algorithm>
#include <set>

#include "stylos/error.hpp"
#include "stylos/text.hpp"

namespace stylos::tasks {

std::string_view to_string(TaskKind k) {
  switch (k) {
    case TaskKind::AA: return "AA";
    case TaskKind::AV: return "AV";
    case TaskKind::SAV: return "SAV";
  }
  return "?";
}

TaskKind parse_task_kind(std::string_view s) {
  const auto lower = text::ascii_lower(s);
  if (lower == "aa") return TaskKind::AA;
  if (lower == "av") return TaskKind::AV;
  if (lower == "sav") return TaskKind::SAV;
  throw Error(ErrorCode::InvalidArgument, "unknown task kind '" + std::string(s) + "'");
}

void validate(const TaskSpec& spec, const corpus::SplitCorpus& split) {
  if (split.train.empty()) throw Error(ErrorCode::EmptyTrainingSet, "empty training split");
  if (split.test.empty()) throw Error(ErrorCode::EmptyTestSet, "empty test split");
  if (spec.k_features == 0) throw Error(ErrorCode::InvalidArgument, "k must be positive");
  if (spec.ngram_sizes.empty()) throw Error(ErrorCode::InvalidArgument, "no n-gram sizes");
  switch (spec.kind) {
    case TaskKind::AV: {
      if (!spec.target_author || spec.target_author->empty()) {
        throw Error(ErrorCode::InvalidArgument, "AV requires target_author");
      }
      const bool present = std::any_of(split.train.begin(), split.train.end(),
                                       [&](const auto& s) { return s.author == *spec.target_author; });
      if (!present) throw Error(ErrorCode::TargetAuthorMissing, *spec.target_author);
      break;
    }
    case TaskKind::SAV:
      if (!spec.pair_config) throw Error(ErrorCode::InvalidArgument, "SAV requires pair_config");
      if (spec.pair_config->n_same_per_author < 0 || spec.pair_config->m_diff_total < 0) {
        throw Error(ErrorCode::InvalidArgument, "pair counts must be non-negative");
      }
      break;
    case TaskKind::AA:
      break;
  }
}

std::uint64_t hash_segments(const std::vector<corpus::Segment>& segments) {
  std::uint64_t h = text::fnv1a("segments");
  for (const auto& s : segments) {
    h = text::fnv1a(s.id, h);
    h = text::fnv1a("\x1e", h);
    h = text::fnv1a(s.text, h);
    h = text::fnv1a("\x1d", h);
  }
  return h;
}

std::vector<SparseVector> TrainedTask::train_vectors() const {
  std::vector<SparseVector> out;
  out.reserve(train.size());
  for (const auto& i : train) out.push_back(i.vector);
  return out;
}

std::vector<SparseVector> TrainedTask::test_vectors() const {
  std::vector<SparseVector> out;
  out.reserve(test.size());
  for (const auto& i : test) out.push_back(i.vector);
  return out;
}

std::vector<int> TrainedTask::train_labels() const {
  std::vector<int> out;
  for (const auto& i : train) out.push_back(i.label);
  return out;
}

std::vector<int> TrainedTask::test_labels() const {
  std::vector<int> out;
  for (const auto& i : test) out.push_back(i.label);
  return out;
}

std::vector<std::string> TrainedTask::feature_display_names() const {
  std::vector<std::string> out;
  out.reserve(feature_terms.size());
  for (const auto& t : feature_terms) out.push_back(featurize::display_name(t));
  return out;
}

const Instance* TrainedTask::find_instance(const std::string& id) const {
  for (const auto* set : {&test, &train}) {
    for (const auto& inst : *set) {
      if (inst.id == id) return &inst;
    }
  }
  return nullptr;
}

void rebuild_pair_vectors(TrainedTask& task) {
  if (task.spec.kind != TaskKind::SAV) return;
  for (auto* set : {&task.train, &task.test}) {
    for (auto& inst : *set) {
      inst.vector = featurize::sav_diff_vector(task.segments.at(inst.left).vector,
                                               task.segments.at(inst.right).vector);
    }
  }
}

namespace {

std::string pair_id(const corpus::SegmentPair& p) { return p.left + "|" + p.right; }

}  // namespace

TrainedTask run_task(const corpus::SplitCorpus& split, const TaskSpec& spec) {
  validate(spec, split);

  TrainedTask task;
  task.spec = spec;

  std::vector<std::string> train_texts;
  train_texts.reserve(split.train.size());
  for (const auto& s : split.train) train_texts.push_back(s.text);
  task.vocabulary = featurize::fit_vocabulary(train_texts, spec.ngram_sizes, spec.lowercase);

  task.provenance.train_hash = hash_segments(split.train);
  task.provenance.vocabulary_input_hash = hash_segments(split.train);
  task.provenance.vocabulary_hash = task.vocabulary.hash();
  task.provenance.fitted_on = task.vocabulary.fitted_on;
  task.provenance.train_segments = split.train.size();

  // Full-vocabulary TfIdf per segment; only train-side data feeds selection.
  std::map<std::string, SparseVector> full;
  for (const auto* set : {&split.train, &split.test}) {
    for (const auto& s : *set) full[s.id] = featurize::tfidf_vector(s.text, task.vocabulary);
  }

  const std::size_t vocab_dim = task.vocabulary.size();

  if (spec.kind == TaskKind::SAV) {
    task.class_names = {"DifferentAuthor", "SameAuthor"};
    task.scheme = Averaging::Binary;
    task.spec.hyper_grid.metric = optim::SelectionMetric::F1;
    const corpus::PairOptions popts{spec.pair_config->n_same_per_author,
                                    spec.pair_config->m_diff_total, spec.pair_config->strict};
    const auto train_pairs = corpus::generate_sav_pairs(split.train, popts, spec.seed);
    const auto test_pairs = corpus::generate_sav_pairs(split.test, popts, spec.seed + 1);

    featurize::Chi2Accumulator acc(vocab_dim);
    for (const auto& p : train_pairs.pairs) {
      acc.add(featurize::sav_diff_vector(full.at(p.left), full.at(p.right)),
              p.label == corpus::PairLabel::SameAuthor ? 1 : 0);
    }
    task.mask = featurize::select_top_k(acc.scores(), spec.k_features);

    for (const auto* set : {&split.train, &split.test}) {
      for (const auto& s : *set) {
        task.segments[s.id] = {s.author, s.subcorpus, s.text,
                               featurize::apply_mask(full.at(s.id), task.mask)};
      }
    }
    auto add_pairs = [&](const corpus::PairSet& ps, std::vector<Instance>& out) {
      for (const auto& p : ps.pairs) {
        Instance inst;
        inst.id = pair_id(p);
        inst.left = p.left;
        inst.right = p.right;
        inst.label = p.label == corpus::PairLabel::SameAuthor ? 1 : 0;
        out.push_back(std::move(inst));
      }
    };
    add_pairs(train_pairs, task.train);
    add_pairs(test_pairs, task.test);
    rebuild_pair_vectors(task);
  } else {
    std::map<std::string, int> label_of;
    if (spec.kind == TaskKind::AV) {
      task.class_names = {"Other", *spec.target_author};
      task.scheme = Averaging::Binary;
      task.spec.hyper_grid.metric = optim::SelectionMetric::F1;
    } else {
      std::set<std::string> authors;
      for (const auto& s : split.train) authors.insert(s.author);
      for (const auto& s : split.test) authors.insert(s.author);
      task.class_names.assign(authors.begin(), authors.end());
      for (std::size_t c = 0; c < task.class_names.size(); ++c) {
        label_of[task.class_names[c]] = static_cast<int>(c);
      }
      task.scheme = Averaging::Macro;
      task.spec.hyper_grid.metric = optim::SelectionMetric::MacroF1;
    }
    auto label = [&](const corpus::Segment& s) {
      if (spec.kind == TaskKind::AV) return s.author == *spec.target_author ? 1 : 0;
      return label_of.at(s.author);
    };

    std::vector<SparseVector> X_full;
    std::vector<int> y;
    for (const auto& s : split.train) {
      X_full.push_back(full.at(s.id));
      y.push_back(label(s));
    }
    task.mask = featurize::chi2_select(X_full, y, vocab_dim, spec.k_features);

    for (const auto* set : {&split.train, &split.test}) {
      auto& out = set == &split.train ? task.train : task.test;
      for (const auto& s : *set) {
        auto masked = featurize::apply_mask(full.at(s.id), task.mask);
        task.segments[s.id] = {s.author, s.subcorpus, s.text, masked};
        out.push_back({s.id, s.id, "", label(s), std::move(masked)});
      }
    }
  }

  task.feature_terms.reserve(task.mask.size());
  for (auto col : task.mask.kept_columns) task.feature_terms.push_back(task.vocabulary.terms[col]);

  const auto X = task.train_vectors();
  const auto y = task.train_labels();
  const auto n_classes = static_cast<int>(task.class_names.size());
  const auto class_names = task.class_names;
  const auto svm_opts = spec.svm;
  const auto dim = task.mask.size();
  optim::MulticlassTrainer trainer = [&, svm_opts, dim](const std::vector<SparseVector>& Xf,
                                                        const std::vector<int>& yf, double C) {
    auto m = optim::train_multiclass(Xf, yf, class_names, C, svm_opts);
    m.dim = dim;
    for (auto& w : m.weights) w.resize(dim, 0.0);
    return m;
  };
  auto cv = optim::cross_validate(trainer, X, y, n_classes, task.spec.hyper_grid, spec.seed);
  task.model = std::move(cv.model);
  task.best_C = cv.best_C;
  task.cv_mean_scores = std::move(cv.mean_scores);
  task.cv_fold_scores = std::move(cv.fold_scores);

  task.test_predictions = optim::predict(task.model, task.test_vectors());
  task.metrics = evaluate(task.test_predictions, task.test_labels(), task.scheme, n_classes);
  return task;
}

}  // namespace stylos::tasks
