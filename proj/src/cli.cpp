#include "stylos/cli.hpp"

#include <cstdio>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "stylos/error.hpp"
#include "stylos/explain.hpp"
#include "stylos/serialize.hpp"
#include "stylos/service.hpp"

namespace stylos::cli {

using nlohmann::json;

namespace {

struct Common {
  std::string out;
  bool json_output = false;
};

// Writes the artifact to --out and prints either the JSON or a short table.
void emit(const json& artifact, const Common& c, std::ostream& out,
          const std::function<void(std::ostream&)>& table) {
  const auto text = io::render(artifact);
  if (!c.out.empty()) io::write_text_file(c.out, text);
  if (c.json_output) {
    out << text;
  } else {
    table(out);
    if (!c.out.empty()) out << "wrote " << c.out << "\n";
  }
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

void metrics_table(std::ostream& os, const tasks::Metrics& m, const std::vector<std::string>& classes) {
  os << "accuracy  " << fmt(m.accuracy) << "\n"
     << "precision " << fmt(m.precision) << "\n"
     << "recall    " << fmt(m.recall) << "\n"
     << "f1        " << fmt(m.f1) << "\n";
  if (m.per_class.size() > 1) {
    os << "class                 P       R       F1      support\n";
    for (const auto& c : m.per_class) {
      std::string name = static_cast<std::size_t>(c.label) < classes.size()
                             ? classes[static_cast<std::size_t>(c.label)]
                             : std::to_string(c.label);
      name.resize(std::max<std::size_t>(name.size(), 20), ' ');
      os << name << "  " << fmt(c.precision) << "  " << fmt(c.recall) << "  " << fmt(c.f1) << "  "
         << c.support << (c.recall_undefined || c.precision_undefined ? "  (undefined -> 0)" : "")
         << "\n";
    }
  }
}

std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "bad C value '" + item + "'");
    }
  }
  return out;
}

tasks::TrainedTask load_model(const std::string& path) {
  return io::task_from_artifact(io::read_json_file(path));
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Explainable authorship identification toolkit", "stylos"};
  app.set_version_flag("--version", io::version());
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out,-o", common.out, "Artifact output path");
    sub->add_flag("--json", common.json_output, "Print the JSON artifact to standard output");
  };

  // ingest
  std::string corpus_dir, manifest;
  std::uint64_t seed = 0;
  double test_fraction = 0.1;
  std::vector<std::string> patterns;
  auto* ingest = app.add_subcommand("ingest", "Read, clean, segment and split a corpus directory");
  ingest->add_option("--corpus-dir", corpus_dir, "Directory of .txt files")->required();
  ingest->add_option("--manifest", manifest, "Manifest CSV (default: <corpus-dir>/manifest.csv)");
  ingest->add_option("--seed", seed, "Split seed");
  ingest->add_option("--test-fraction", test_fraction, "Held-out fraction per author");
  ingest->add_option("--pattern", patterns, "Marker regex to delete (repeatable)");
  add_common(ingest);

  // split
  std::string corpus_path;
  auto* split = app.add_subcommand("split", "Re-split an ingested corpus with a new seed or fraction");
  split->add_option("--corpus", corpus_path, "Corpus artifact")->required();
  split->add_option("--seed", seed, "Split seed");
  split->add_option("--test-fraction", test_fraction, "Held-out fraction per author");
  add_common(split);

  // pairs
  int n_same = 5000, m_diff = 25000;
  bool strict = false;
  std::string side = "train";
  auto* pairs = app.add_subcommand("pairs", "Sample same/different-author segment pairs");
  pairs->add_option("--corpus", corpus_path, "Corpus artifact")->required();
  pairs->add_option("--side", side, "train, test or all")->check(CLI::IsMember({"train", "test", "all"}));
  pairs->add_option("--n-same", n_same, "SameAuthor pairs per author");
  pairs->add_option("--m-diff", m_diff, "DifferentAuthor pairs in total");
  pairs->add_option("--seed", seed, "Sampling seed");
  pairs->add_flag("--strict", strict, "Fail instead of truncating when pairs run out");
  add_common(pairs);

  // train
  std::string task_kind, target;
  std::size_t k_features = 1000;
  int folds = 3;
  std::string grid;
  bool case_sensitive = false;
  double svm_tol = 1e-4;
  int svm_max_iter = 1000;
  std::string metrics_out;
  auto* train = app.add_subcommand("train", "Train an AA, AV or SAV model");
  train->add_option("--task", task_kind, "aa, av or sav")->required()->check(CLI::IsMember({"aa", "av", "sav", "AA", "AV", "SAV"}));
  train->add_option("--corpus", corpus_path, "Corpus artifact")->required();
  train->add_option("--target", target, "Author of interest (AV)");
  train->add_option("--n-same", n_same, "SameAuthor pairs per author (SAV)");
  train->add_option("--m-diff", m_diff, "DifferentAuthor pairs in total (SAV)");
  train->add_flag("--strict", strict, "Fail instead of truncating when pairs run out");
  train->add_option("--k", k_features, "Features kept by chi-square selection");
  train->add_option("--folds", folds, "Cross-validation folds");
  train->add_option("--C", grid, "Comma-separated C grid");
  train->add_flag("--case-sensitive", case_sensitive, "Keep letter case in n-grams");
  train->add_option("--svm-tol", svm_tol, "Relative duality-gap tolerance");
  train->add_option("--svm-max-iter", svm_max_iter, "Epoch cap for the SVM solver");
  train->add_option("--seed", seed, "Seed for pairs, folds and solver");
  train->add_option("--metrics-out", metrics_out, "Also write the metrics report here");
  add_common(train);

  // evaluate
  std::string model_path;
  auto* evaluate = app.add_subcommand("evaluate", "Report held-out metrics of a trained model");
  evaluate->add_option("--model", model_path, "Model artifact")->required();
  add_common(evaluate);

  // rank
  std::string class_label, order = "signed";
  std::size_t top = 5;
  auto* rank = app.add_subcommand("rank", "Global coefficient ranking for one class");
  rank->add_option("--model", model_path, "Model artifact")->required();
  rank->add_option("--class", class_label, "Class whose coefficients are ranked");
  rank->add_option("--order", order, "signed or absolute")->check(CLI::IsMember({"signed", "absolute"}));
  rank->add_option("--top", top, "Rows shown at each end of the table");
  add_common(rank);

  // explain-local
  std::string segment_id;
  auto* local = app.add_subcommand("explain-local", "Per-feature contributions for one instance");
  local->add_option("--model", model_path, "Model artifact")->required();
  local->add_option("--segment", segment_id, "Instance id (segment, or left|right pair)")->required();
  local->add_option("--class", class_label, "Class to explain (default: predicted)");
  local->add_option("--top", top, "Top and bottom coefficients always listed");
  add_common(local);

  // irof
  int trials = 10;
  auto* irof = app.add_subcommand("irof", "Iterative feature removal against random orders");
  irof->add_option("--model", model_path, "Model artifact")->required();
  irof->add_option("--trials", trials, "Random removal orders");
  irof->add_option("--seed", seed, "Seed for the random orders");
  add_common(irof);

  // neighbors
  std::string space = "tfidf", embeddings_path;
  std::size_t k_highlight = 10;
  auto* neighbors = app.add_subcommand("neighbors", "Nearest factual and counterfactual training instances");
  neighbors->add_option("--model", model_path, "Model artifact")->required();
  neighbors->add_option("--segment", segment_id, "Query instance id")->required();
  neighbors->add_option("--space", space, "tfidf or embedding")->check(CLI::IsMember({"tfidf", "embedding"}));
  neighbors->add_option("--embeddings", embeddings_path, "Embedding file for --space embedding");
  neighbors->add_option("--highlight", k_highlight, "Minimal-difference n-grams per neighbor");
  add_common(neighbors);

  // probe
  std::string family, sidecar_path, chain;
  int chain_n = 5, k_min = 2, k_max = 10;
  std::size_t chain_rank = 0;
  std::string lexicon_path;
  auto* probe = app.add_subcommand("probe", "Linear probe over an embedding file");
  probe->add_option("--corpus", corpus_path, "Corpus artifact")->required();
  probe->add_option("--embeddings", embeddings_path, "Embedding JSONL")->required();
  probe->add_option("--family", family, "genre, pos-chain, sq-chain, word-length, function-words")->required();
  probe->add_option("--sidecar", sidecar_path, "Annotation JSONL for chain families");
  probe->add_option("--chain", chain, "Chain to probe (default: the --rank-th most discriminative)");
  probe->add_option("--n", chain_n, "Chain length");
  probe->add_option("--rank", chain_rank, "Index into the discriminative chain list");
  probe->add_option("--k-min", k_min, "Smallest k for the elbow search");
  probe->add_option("--k-max", k_max, "Largest k for the elbow search");
  probe->add_option("--lexicon", lexicon_path, "Function-word list, one per line");
  probe->add_option("--seed", seed, "Seed for clustering, split and folds");
  add_common(probe);

  // serve
  std::string config_path, host;
  int port = -1, max_jobs = -1;
  std::string store;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--config", config_path, "JSON config file");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port");
  serve->add_option("--store", store, "Artifact store directory");
  serve->add_option("--max-jobs", max_jobs, "Concurrent background jobs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "stylos: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*ingest) {
      const std::filesystem::path dir = corpus_dir;
      const auto m = manifest.empty() ? dir / "manifest.csv" : std::filesystem::path(manifest);
      const auto pats = patterns.empty() ? corpus::default_marker_patterns() : patterns;
      auto bundle = corpus::build_bundle(corpus::load_corpus(dir, m, pats), test_fraction, seed);
      bundle.marker_patterns = pats;
      emit(io::corpus_artifact(bundle, seed), common, out, [&](std::ostream& os) {
        os << "documents " << bundle.documents.size() << "\nsegments  " << bundle.segments.size()
           << "\ntrain     " << bundle.split.train.size() << "\ntest      " << bundle.split.test.size()
           << "\nseed      " << seed << "\n";
      });
    } else if (*split) {
      auto bundle = io::corpus_from_artifact(io::read_json_file(corpus_path));
      bundle.split = corpus::stratified_split(bundle.segments, test_fraction, seed);
      bundle.test_fraction = test_fraction;
      emit(io::corpus_artifact(bundle, seed), common, out, [&](std::ostream& os) {
        os << "train " << bundle.split.train.size() << "\ntest  " << bundle.split.test.size()
           << "\nseed  " << seed << "\n";
      });
    } else if (*pairs) {
      const auto bundle = io::corpus_from_artifact(io::read_json_file(corpus_path));
      const auto& segs = side == "train" ? bundle.split.train : side == "test" ? bundle.split.test : bundle.segments;
      const auto ps = corpus::generate_sav_pairs(segs, {n_same, m_diff, strict}, seed);
      json params{{"corpus", corpus_path}, {"side", side}, {"n_same_per_author", n_same},
                  {"m_diff_total", m_diff}, {"strict", strict}, {"seed", seed}};
      emit(io::envelope("pairs", params, io::to_json(ps)), common, out, [&](std::ostream& os) {
        std::size_t same = 0;
        for (const auto& p : ps.pairs) same += p.label == corpus::PairLabel::SameAuthor;
        os << "same      " << same << "\ndifferent " << ps.pairs.size() - same << "\ntruncated "
           << (ps.truncated ? "yes" : "no") << "\n";
      });
    } else if (*train) {
      const auto bundle = io::corpus_from_artifact(io::read_json_file(corpus_path));
      tasks::TaskSpec spec;
      spec.kind = tasks::parse_task_kind(task_kind);
      if (!target.empty()) spec.target_author = target;
      if (spec.kind == tasks::TaskKind::SAV) spec.pair_config = tasks::PairConfig{n_same, m_diff, strict};
      spec.seed = seed;
      spec.k_features = k_features;
      spec.lowercase = !case_sensitive;
      spec.hyper_grid.folds = folds;
      if (!grid.empty()) spec.hyper_grid.C_values = parse_grid(grid);
      spec.svm.tol = svm_tol;
      spec.svm.max_iter = svm_max_iter;
      spec.svm.seed = seed;
      const auto task = tasks::run_task(bundle.split, spec);
      if (!metrics_out.empty()) io::write_text_file(metrics_out, io::render(io::metrics_artifact(task)));
      emit(io::model_artifact(task), common, out, [&](std::ostream& os) {
        os << "task " << tasks::to_string(spec.kind) << ", " << task.train.size() << " train / "
           << task.test.size() << " test instances, " << task.mask.size() << " features, best C "
           << task.best_C << "\n";
        metrics_table(os, task.metrics, task.class_names);
      });
    } else if (*evaluate) {
      const auto task = load_model(model_path);
      emit(io::metrics_artifact(task), common, out,
           [&](std::ostream& os) { metrics_table(os, task.metrics, task.class_names); });
    } else if (*rank) {
      const auto task = load_model(model_path);
      const auto cls = !class_label.empty() ? class_label
                       : task.model.is_binary() ? task.model.classes[1]
                                                : task.model.classes[0];
      const auto r = explain::global_ranking(task.model, task.feature_display_names(), cls,
                                             explain::parse_rank_order(order));
      emit(io::ranking_artifact(r, task), common, out, [&](std::ostream& os) {
        os << "class " << cls << " (" << order << ")\n";
        for (const auto& e : r.top(top)) os << "  top     " << std::setw(8) << e.name << "  " << fmt(e.coefficient) << "\n";
        for (const auto& e : r.bottom(top)) os << "  bottom  " << std::setw(8) << e.name << "  " << fmt(e.coefficient) << "\n";
      });
    } else if (*local) {
      const auto task = load_model(model_path);
      std::optional<std::string> cls;
      if (!class_label.empty()) cls = class_label;
      const auto e = explain::explain_instance(task, segment_id, cls, top);
      emit(io::local_artifact(e, task), common, out, [&](std::ostream& os) {
        os << "instance " << e.instance_id << ", class " << e.class_label << "\n";
        for (const auto& c : e.contributions) {
          if (c.contribution != 0.0 || c.value == 0.0) {
            os << "  " << std::setw(8) << c.name << "  x=" << fmt(c.value) << "  w*x=" << fmt(c.contribution) << "\n";
          }
        }
        os << "intercept " << fmt(e.intercept) << "\nscore     " << fmt(e.total_score) << "\n";
      });
    } else if (*irof) {
      const auto task = load_model(model_path);
      const auto c = explain::irof(task, trials, seed);
      emit(io::irof_artifact(c, task), common, out, [&](std::ostream& os) {
        os << "features removed  sorted   random mean  random std\n";
        const std::size_t steps = c.sorted_f1.size();
        const std::size_t stride = std::max<std::size_t>(1, (steps - 1) / 10);
        for (std::size_t s = 0; s < steps; s += stride) {
          os << std::setw(16) << s << "  " << fmt(c.sorted_f1[s]) << "   " << fmt(c.random_mean[s])
             << "       " << fmt(c.random_std[s]) << "\n";
        }
        os << "area sorted " << fmt(explain::curve_area(c.sorted_f1), 2) << ", random mean "
           << fmt(explain::curve_area(c.random_mean), 2) << "\n";
      });
    } else if (*neighbors) {
      const auto task = load_model(model_path);
      const auto sp = explain::parse_space(space);
      std::optional<probe::EmbeddingSet> emb;
      if (sp == explain::Space::Embedding) {
        if (embeddings_path.empty()) throw Error(ErrorCode::InvalidArgument, "--space embedding needs --embeddings");
        emb = probe::load_embeddings(embeddings_path);
      }
      const auto r = explain::neighbors(task, segment_id, sp, emb ? &*emb : nullptr, k_highlight);
      emit(io::neighbors_artifact(r, task), common, out, [&](std::ostream& os) {
        const auto& b = r.bundle;
        os << "query          " << b.query_id << " (predicted " << task.class_names[static_cast<std::size_t>(b.predicted_label)] << ")\n"
           << "factual        " << b.factual.id << "  d=" << fmt(b.factual.distance) << "\n"
           << "counterfactual " << b.counterfactual.id << "  d=" << fmt(b.counterfactual.distance) << "\n";
        if (r.highlights) {
          for (const auto& n : r.highlights->ngrams) os << "  " << std::setw(8) << n.name << "  " << explain::to_string(n.role) << "\n";
        }
      });
    } else if (*probe) {
      const auto bundle = io::corpus_from_artifact(io::read_json_file(corpus_path));
      const auto emb = probe::load_embeddings(embeddings_path);
      probe::LabelerParams params;
      params.family = probe::parse_labeler_family(family);
      params.chain = chain;
      params.n = chain_n;
      params.rank = chain_rank;
      params.k_min = k_min;
      params.k_max = k_max;
      if (!lexicon_path.empty()) params.lexicon = featurize::load_lexicon(lexicon_path);
      std::optional<featurize::AnnotationSidecar> sc;
      if (!sidecar_path.empty()) sc = featurize::load_sidecar(sidecar_path);
      const auto labeler = probe::make_labeler(params, bundle.split.train, sc ? &*sc : nullptr, seed);
      const auto report = probe::run_probe(emb, labeler, seed);
      emit(io::probe_artifact(report, params, labeler), common, out, [&](std::ostream& os) {
        os << report.labeler << ": " << report.n_train << " train / " << report.n_test << " test, C "
           << report.chosen_C << "\n";
        os << "Acc " << fmt(report.metrics.accuracy, 3) << "  P " << fmt(report.metrics.precision, 3)
           << "  R " << fmt(report.metrics.recall, 3) << "  F1 " << fmt(report.metrics.f1, 3) << "\n";
      });
    } else if (*serve) {
      service::ServiceConfig cfg;
      if (!config_path.empty()) cfg = service::load_config(config_path);
      service::apply_env(cfg);
      if (!host.empty()) cfg.host = host;
      if (port >= 0) cfg.port = port;
      if (!store.empty()) cfg.store = store;
      if (max_jobs > 0) cfg.max_jobs = max_jobs;
      return service::serve(cfg);
    }
  } catch (const Error& e) {
    err << "stylos: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "stylos: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace stylos::cli
