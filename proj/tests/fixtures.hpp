#pragma once

#include "stylos/corpus.hpp"
#include "stylos/tasks.hpp"
#include "synth.hpp"

namespace fixtures {

// Small planted corpus shared by the task-level suites; built once.
inline const stylos::corpus::CorpusBundle& small_bundle() {
  static const auto bundle = [] {
    synth::CorpusOptions o;
    o.authors = 3;
    o.docs_per_author = 2;
    o.sentences_per_doc = 100;
    o.own_rate = 0.7;
    return stylos::corpus::build_bundle(synth::planted_documents(o), 0.2, 1);
  }();
  return bundle;
}

inline stylos::tasks::TaskSpec quick_spec(stylos::tasks::TaskKind kind) {
  stylos::tasks::TaskSpec spec;
  spec.kind = kind;
  spec.k_features = 200;
  spec.hyper_grid.C_values = {0.1, 1.0};
  spec.hyper_grid.folds = 3;
  spec.seed = 2;
  if (kind == stylos::tasks::TaskKind::AV) spec.target_author = "AuthorA";
  if (kind == stylos::tasks::TaskKind::AA) spec.hyper_grid.metric = stylos::optim::SelectionMetric::MacroF1;
  if (kind == stylos::tasks::TaskKind::SAV) spec.pair_config = stylos::tasks::PairConfig{30, 90, false};
  return spec;
}

inline const stylos::tasks::TrainedTask& trained(stylos::tasks::TaskKind kind) {
  static std::map<stylos::tasks::TaskKind, stylos::tasks::TrainedTask> cache;
  auto it = cache.find(kind);
  if (it == cache.end()) it = cache.emplace(kind, stylos::tasks::run_task(small_bundle().split, quick_spec(kind))).first;
  return it->second;
}

}  // namespace fixtures
