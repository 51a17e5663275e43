// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "stylos/corpus.hpp"
#include "stylos/error.hpp"
#include "stylos/explain.hpp"
#include "stylos/featurize.hpp"
#include "stylos/optim.hpp"
#include "stylos/probe.hpp"
#include "stylos/sampling.hpp"
#include "stylos/tasks.hpp"
#include "synth.hpp"

using namespace stylos;

namespace {

enum class Verdict { Pass, Fail, Skip };

struct Outcome {
  Verdict verdict = Verdict::Fail;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

Outcome verdict(bool ok, std::string detail) { return {ok ? Verdict::Pass : Verdict::Fail, std::move(detail)}; }

// ---------------------------------------------------------------------------

Outcome decision_identity() {
  auto rng = make_rng(2024, 0);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_int_distribution<int> dims(1, 300), classes(2, 6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto t0 = Clock::now();
  double worst = 0.0;
  const int n_pairs = 1000;
  for (int trial = 0; trial < n_pairs; ++trial) {
    optim::LinearModel m;
    m.dim = static_cast<std::size_t>(dims(rng));
    const int k = classes(rng);
    for (int c = 0; c < k; ++c) m.classes.push_back("c" + std::to_string(c));
    const int rows = k == 2 ? 1 : k;
    for (int r = 0; r < rows; ++r) {
      DenseVector w(m.dim);
      for (auto& v : w) v = g(rng) * 3.0;
      m.weights.push_back(w);
      m.intercepts.push_back(g(rng));
    }
    DenseVector x(m.dim, 0.0);
    for (auto& v : x) {
      if (unit(rng) < 0.3) v = std::abs(g(rng));
    }
    const auto sx = SparseVector::from_dense(x);
    std::vector<std::string> names;
    for (std::size_t j = 0; j < m.dim; ++j) names.push_back("f" + std::to_string(j));
    std::uniform_int_distribution<int> pick(0, k - 1);
    const int cls = pick(rng);
    const auto e = explain::local_explanation(m, sx, names, m.classes[static_cast<std::size_t>(cls)], 5);
    double sum = e.intercept;
    for (const auto& c : e.contributions) sum += c.contribution;
    double want;
    if (m.is_binary()) {
      want = cls == 1 ? optim::decision_score(m, sx) : -optim::decision_score(m, sx);
    } else {
      want = optim::decision_score(m, sx, static_cast<std::size_t>(cls));
    }
    worst = std::max({worst, std::abs(sum - want), std::abs(e.total_score - want)});
  }
  const double secs = seconds_since(t0);
  return verdict(worst < 1e-9 && secs < 1.0,
                 fmt("%.0f pairs, max |delta| %.2e, %.3f s", n_pairs, worst, secs));
}

Outcome svm_oracle() {
  const auto t0 = Clock::now();
  struct Spec {
    std::uint64_t seed;
    int n, d;
    double C, noise;
  };
  const std::vector<Spec> specs{{1, 12, 1, 1.0, 0.5}, {2, 20, 2, 0.5, 0.8}, {3, 30, 2, 2.0, 0.3},
                                {4, 25, 3, 1.0, 1.0}, {5, 30, 3, 0.1, 0.6}};
  double worst = 0.0;
  for (const auto& s : specs) {
    auto rng = make_rng(s.seed, 7);
    std::normal_distribution<double> g(0.0, 1.0);
    oracle::Matrix dense;
    std::vector<SparseVector> X;
    std::vector<int> y;
    for (int i = 0; i < s.n; ++i) {
      std::vector<double> x(static_cast<std::size_t>(s.d));
      double score = 0.4;
      for (int j = 0; j < s.d; ++j) {
        x[j] = g(rng);
        score += (j + 1) * x[j];
      }
      y.push_back(score + s.noise * g(rng) > 0 ? 1 : 0);
      dense.push_back(x);
      X.push_back(SparseVector::from_dense(x));
    }
    optim::TrainOptions opts;
    opts.tol = 1e-12;
    opts.max_iter = 1000000;
    const auto m = optim::train_linear_svm(X, y, s.C, opts);
    const double got = oracle::svm_objective(m.weights[0], m.intercepts[0], dense, y, s.C);
    const double want = oracle::svm_grid_minimum(dense, y, s.C);
    worst = std::max(worst, std::abs(got - want) / std::abs(want));
  }
  const double secs = seconds_since(t0);
  return verdict(worst <= 1e-6 && secs < 30.0, fmt("5 datasets, max relative gap %.2e, %.2f s", worst, secs));
}

Outcome chi2_oracle() {
  const std::vector<std::string> texts{
      "Gallia est omnis divisa in partes tres.", "Quarum unam incolunt Belgae, aliam Aquitani.",
      "Tertiam qui ipsorum lingua Celtae appellantur.", "Hi omnes lingua institutis legibus inter se differunt.",
      "Gallos ab Aquitanis Garumna flumen dividit.", "A Belgis Matrona et Sequana dividit.",
      "Horum omnium fortissimi sunt Belgae.", "Propterea quod a cultu atque humanitate provinciae longissime absunt.",
      "Minimeque ad eos mercatores saepe commeant.", "Proximique sunt Germanis qui trans Rhenum incolunt.",
      "Qua de causa Helvetii quoque reliquos Gallos virtute praecedunt.", "Cum aut suis finibus eos prohibent.",
      "Eorum una pars quam Gallos obtinere dictum est.", "Initium capit a flumine Rhodano.",
      "Continetur Garumna flumine Oceano finibus Belgarum.", "Attingit etiam ab Sequanis et Helvetiis flumen Rhenum.",
      "Vergit ad septentriones.", "Belgae ab extremis Galliae finibus oriuntur."};
  double worst = 0.0;
  int fixtures = 0;
  for (int n_classes : {2, 3, 4}) {
    for (std::size_t n_docs : {8u, 13u, 18u}) {
      std::vector<std::string> docs(texts.begin(), texts.begin() + static_cast<std::ptrdiff_t>(n_docs));
      const auto vocab = featurize::fit_vocabulary(docs, {2, 3});
      std::vector<SparseVector> X;
      oracle::Matrix dense;
      std::vector<int> y;
      for (std::size_t i = 0; i < docs.size(); ++i) {
        X.push_back(featurize::tfidf_vector(docs[i], vocab));
        dense.push_back(X.back().to_dense(vocab.size()));
        y.push_back(static_cast<int>(i % static_cast<std::size_t>(n_classes)));
      }
      const auto got = featurize::chi2_scores(X, y, vocab.size());
      const auto want = oracle::chi2(dense, y);
      for (std::size_t j = 0; j < got.size(); ++j) {
        worst = std::max(worst, std::abs(got[j] - want[j]) / std::max(1.0, std::abs(want[j])));
      }
      ++fixtures;
    }
  }
  return verdict(worst <= 1e-9, fmt("%.0f fixtures, max scaled |delta| %.2e", fixtures, worst));
}

// Two authors with disjoint consonant inventories, default pipeline settings.
const corpus::CorpusBundle& planted_bundle() {
  static const auto b = [] {
    synth::CorpusOptions o;
    o.authors = 2;
    o.docs_per_author = 4;
    o.sentences_per_doc = 200;
    o.seed = 17;
    return corpus::build_bundle(synth::planted_documents(o), 0.1, 17);
  }();
  return b;
}

tasks::TrainedTask planted_av() {
  tasks::TaskSpec spec;
  spec.kind = tasks::TaskKind::AV;
  spec.target_author = synth::author_name(0);
  spec.seed = 17;
  return tasks::run_task(planted_bundle().split, spec);
}

Outcome planted_signal() {
  const auto t0 = Clock::now();
  const auto av = planted_av();
  tasks::TaskSpec spec;
  spec.kind = tasks::TaskKind::SAV;
  spec.pair_config = tasks::PairConfig{};
  spec.seed = 17;
  const auto sav = tasks::run_task(planted_bundle().split, spec);
  const double secs = seconds_since(t0);
  return verdict(av.metrics.f1 >= 0.95 && sav.metrics.accuracy >= 0.90 && secs < 120.0,
                 fmt("AV F1 %.4f, SAV accuracy %.4f (%.0f test pairs), %.1f s", av.metrics.f1,
                     sav.metrics.accuracy, static_cast<double>(sav.test.size()), secs));
}

Outcome irof_faithfulness() {
  const auto av = planted_av();
  const int trials = 10;
  const auto c = explain::irof(av, trials, 99);
  const double sorted_area = explain::curve_area(c.sorted_f1);
  std::vector<double> areas;
  for (const auto& r : c.random_f1) areas.push_back(explain::curve_area(r));
  double mean = 0.0, var = 0.0;
  for (double a : areas) mean += a;
  mean /= trials;
  for (double a : areas) var += (a - mean) * (a - mean);
  const double sd = std::sqrt(var / trials);

  bool index0 = c.sorted_f1.front() == av.metrics.f1;
  for (const auto& r : c.random_f1) index0 = index0 && r.front() == av.metrics.f1;

  // With every weight removed the model predicts the positive class iff b > 0.
  const auto gold = av.test_labels();
  const double pos = static_cast<double>(std::count(gold.begin(), gold.end(), 1));
  double constant_f1 = 0.0;
  if (av.model.intercepts[0] > 0.0) {
    const double precision = pos / static_cast<double>(gold.size());
    constant_f1 = pos > 0 ? 2.0 * precision / (precision + 1.0) : 0.0;
  }
  bool endpoint = c.sorted_f1.back() == constant_f1;
  for (const auto& r : c.random_f1) endpoint = endpoint && r.back() == constant_f1;

  return verdict(sorted_area < mean - sd && index0 && endpoint,
                 fmt("sorted area %.2f vs random %.2f +- %.2f; endpoint F1 %.4f", sorted_area, mean, sd,
                     constant_f1) +
                     (index0 ? "" : "; index-0 mismatch") + (endpoint ? "" : "; endpoint mismatch"));
}

Outcome neighbor_minimality() {
  int checked = 0, ok = 0;
  std::size_t max_segments = 0;
  const int per_corpus[] = {67, 67, 66};
  const int authors[] = {3, 4, 5};
  for (int ci = 0; ci < 3; ++ci) {
    synth::CorpusOptions o;
    o.authors = authors[ci];
    o.docs_per_author = 3;
    o.sentences_per_doc = 150;
    o.own_rate = 0.6;
    o.seed = 100 + static_cast<std::uint64_t>(ci);
    const auto bundle = corpus::build_bundle(synth::planted_documents(o), 0.1, o.seed);
    max_segments = std::max(max_segments, bundle.segments.size());
    tasks::TaskSpec spec;
    spec.kind = tasks::TaskKind::AA;
    spec.hyper_grid.C_values = {1.0};
    spec.hyper_grid.metric = optim::SelectionMetric::MacroF1;
    spec.k_features = 300;
    spec.seed = o.seed;
    const auto task = tasks::run_task(bundle.split, spec);
    const std::size_t dim = task.mask.size();

    oracle::Matrix reps;
    std::vector<std::string> ids;
    std::vector<int> labels;
    for (const auto& inst : task.train) {
      reps.push_back(inst.vector.to_dense(dim));
      ids.push_back(inst.id);
      labels.push_back(inst.label);
    }
    std::vector<const tasks::Instance*> pool;
    for (const auto& i : task.test) pool.push_back(&i);
    for (const auto& i : task.train) pool.push_back(&i);
    auto rng = make_rng(o.seed, 3);
    seeded_shuffle(pool, rng);
    for (int q = 0; q < per_corpus[ci]; ++q) {
      const auto* inst = pool[static_cast<std::size_t>(q)];
      const auto report = explain::neighbors(task, inst->id, explain::Space::TfIdf);
      const int pred = optim::predict(task.model, inst->vector);
      // Exclude the query from the oracle's candidates the same way.
      oracle::Matrix r2;
      std::vector<std::string> i2;
      std::vector<int> l2;
      for (std::size_t k = 0; k < ids.size(); ++k) {
        if (ids[k] == inst->id) continue;
        r2.push_back(reps[k]);
        i2.push_back(ids[k]);
        l2.push_back(labels[k]);
      }
      const auto qv = inst->vector.to_dense(dim);
      const auto f = oracle::nearest(qv, r2, i2, l2, true, pred);
      const auto cf = oracle::nearest(qv, r2, i2, l2, false, pred);
      const bool good = std::abs(report.bundle.factual.distance - f.distance) <= 1e-12 &&
                        std::abs(report.bundle.counterfactual.distance - cf.distance) <= 1e-12 &&
                        report.bundle.factual.id == i2[f.index] && report.bundle.counterfactual.id == i2[cf.index];
      ++checked;
      ok += good;
    }
  }
  return verdict(ok == checked && checked == 200 && max_segments <= 1000,
                 fmt("%.0f/%.0f queries minimal, largest corpus %.0f segments", ok, checked,
                     static_cast<double>(max_segments)));
}

std::vector<corpus::Segment> probe_segments(int n, std::uint64_t seed, double positive_rate) {
  auto rng = make_rng(seed, 11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<corpus::Segment> segs;
  for (int i = 0; i < n; ++i) {
    corpus::Segment s;
    char buf[32];
    std::snprintf(buf, sizeof buf, "doc.txt#%05d", i);
    s.id = buf;
    s.author = "A";
    s.subcorpus = unit(rng) < positive_rate ? corpus::Subcorpus::Epistolary : corpus::Subcorpus::Literary;
    segs.push_back(s);
  }
  return segs;
}

Outcome probe_sanity() {
  const int n = 3000, dim = 8;
  const auto segs = probe_segments(n, 5, 0.6);
  const auto labeler = probe::make_labeler({}, segs, nullptr, 0);

  // Label encoded along a fixed random direction, plus isotropic noise.
  auto rng = make_rng(6, 0);
  std::normal_distribution<double> g(0.0, 1.0);
  DenseVector direction(dim);
  for (auto& v : direction) v = g(rng);
  probe::EmbeddingSet emb;
  emb.dim = dim;
  emb.source = "planted";
  for (const auto& s : segs) {
    const double sign = labeler.labels.at(s.id) == 1 ? 1.5 : -1.5;
    DenseVector v(dim);
    for (int j = 0; j < dim; ++j) v[j] = sign * direction[j] + 0.3 * g(rng);
    emb.vectors[s.id] = v;
  }
  const auto encoded = probe::run_probe(emb, labeler, 1);

  // Shuffling the labels destroys the relation to the embeddings.
  int within = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    probe::Labeler shuffled = labeler;
    std::vector<int> values;
    for (const auto& [id, c] : labeler.labels) values.push_back(c);
    auto srng = make_rng(seed, 77);
    seeded_shuffle(values, srng);
    std::size_t k = 0;
    for (auto& [id, c] : shuffled.labels) c = values[k++];
    const auto r = probe::run_probe(emb, shuffled, seed);
    int positives = 0;
    for (const auto& pc : r.metrics.per_class) {
      if (pc.label == 1) positives = pc.support;
    }
    const double majority = std::max(positives, static_cast<int>(r.n_test) - positives) / static_cast<double>(r.n_test);
    const double gap = std::abs(r.metrics.accuracy - majority);
    worst = std::max(worst, gap);
    within += gap <= 0.1;
  }
  return verdict(encoded.metrics.f1 >= 0.99 && within == 20,
                 fmt("encoded F1 %.4f; shuffled: %.0f/20 seeds within 0.1 of majority, max gap %.3f",
                     encoded.metrics.f1, within, worst));
}

Outcome kmeans_elbow() {
  bool monotone = true;
  int traces = 0, hits = 0;
  std::string ks;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto rng = make_rng(seed, 21);
    std::normal_distribution<double> g(0.0, 0.7);
    const std::vector<DenseVector> centres{{0, 0, 0}, {8, 0, 1}, {3, 9, -2}};
    std::vector<DenseVector> X;
    for (const auto& c : centres) {
      for (int i = 0; i < 50; ++i) {
        DenseVector p = c;
        for (auto& v : p) v += g(rng);
        X.push_back(p);
      }
    }
    for (int k = 1; k <= 10; ++k) {
      const auto c = optim::kmeans(X, k, seed);
      for (std::size_t i = 1; i < c.inertia_trace.size(); ++i) {
        monotone = monotone && c.inertia_trace[i] <= c.inertia_trace[i - 1];
      }
      ++traces;
    }
    const auto e = optim::elbow_select(X, 1, 10, seed);
    hits += e.k == 3;
    ks += (ks.empty() ? "" : ",") + std::to_string(e.k);
  }
  return verdict(monotone && hits == 10,
                 fmt("%.0f traces ", traces) + (monotone ? "non-increasing" : "with an increase") +
                     fmt("; elbow k=3 in %.0f/10 seeds", hits) + " [k: " + ks + "]");
}

Outcome pair_generation() {
  const auto segs = synth::labelled_segments({150, 148, 152, 150, 151});
  std::map<std::string, std::string> author;
  for (const auto& s : segs) author[s.id] = s.author;
  const auto t0 = Clock::now();
  const auto ps = corpus::generate_sav_pairs(segs, {5000, 25000, true}, 42);
  const double secs = seconds_since(t0);
  std::set<std::pair<std::string, std::string>> seen;
  int same = 0, diff = 0, bad = 0;
  for (const auto& p : ps.pairs) {
    const auto key = std::minmax(p.left, p.right);
    if (p.left == p.right || !seen.insert({key.first, key.second}).second) ++bad;
    const bool same_author = author.at(p.left) == author.at(p.right);
    if (same_author != (p.label == corpus::PairLabel::SameAuthor)) ++bad;
    (p.label == corpus::PairLabel::SameAuthor ? same : diff)++;
  }
  return verdict(same == 25000 && diff == 25000 && bad == 0 && !ps.truncated,
                 fmt("%.0f SameAuthor + %.0f DifferentAuthor, %.0f defects, %.2f s", same, diff, bad, secs));
}

Outcome medlatin() {
  const char* dir = std::getenv("STYLOS_MEDLATIN_DIR");
  if (!dir || !*dir) return {Verdict::Skip, "set STYLOS_MEDLATIN_DIR to a corpus directory with manifest.csv"};
  const auto t0 = Clock::now();
  const std::filesystem::path root(dir);
  const auto bundle = corpus::build_bundle(corpus::load_corpus(root, root / "manifest.csv"), 0.1, 0);
  std::string target;
  for (const auto& s : bundle.segments) {
    std::string lower = s.author;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower.find("dante") != std::string::npos) target = s.author;
  }
  if (const char* t = std::getenv("STYLOS_MEDLATIN_TARGET")) target = t;
  if (target.empty()) return {Verdict::Fail, "no AV target author found (set STYLOS_MEDLATIN_TARGET)"};

  tasks::TaskSpec sav;
  sav.kind = tasks::TaskKind::SAV;
  sav.pair_config = tasks::PairConfig{};
  tasks::TaskSpec av;
  av.kind = tasks::TaskKind::AV;
  av.target_author = target;
  tasks::TaskSpec aa;
  aa.kind = tasks::TaskKind::AA;
  aa.hyper_grid.metric = optim::SelectionMetric::MacroF1;
  const double sav_acc = tasks::run_task(bundle.split, sav).metrics.accuracy;
  const double av_f1 = tasks::run_task(bundle.split, av).metrics.f1;
  const double aa_f1 = tasks::run_task(bundle.split, aa).metrics.f1;
  const double secs = seconds_since(t0);
  const bool ok = std::abs(sav_acc - 0.836) <= 0.05 && std::abs(av_f1 - 0.894) <= 0.05 &&
                  std::abs(aa_f1 - 0.981) <= 0.03 && secs < 900;
  return verdict(ok, fmt("SAV acc %.3f, AV F1 %.3f, AA macro-F1 %.3f, %.0f s", sav_acc, av_f1, aa_f1, secs));
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"decision-function identity", decision_identity},
      {"svm oracle equivalence", svm_oracle},
      {"chi-square oracle equivalence", chi2_oracle},
      {"planted-signal authorship", planted_signal},
      {"irof faithfulness", irof_faithfulness},
      {"neighbor minimality", neighbor_minimality},
      {"probe sanity pair", probe_sanity},
      {"k-means and elbow", kmeans_elbow},
      {"pair generation", pair_generation},
      {"dataset reproduction", medlatin},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {Verdict::Fail, std::string("exception: ") + e.what()};
    }
    const char* tag = o.verdict == Verdict::Pass ? "PASS" : o.verdict == Verdict::Skip ? "SKIP" : "FAIL";
    failed += o.verdict == Verdict::Fail;
    std::cout << tag << "  " << name << "  (" << o.detail << "; " << fmt("%.2f s", seconds_since(t0)) << ")"
              << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
