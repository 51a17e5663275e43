#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "stylos/cli.hpp"
#include "stylos/serialize.hpp"
#include "stylos/service.hpp"
#include "synth.hpp"

using namespace stylos;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "stylos");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// One corpus directory plus ingested and trained artifacts, built once.
struct Workspace {
  std::filesystem::path root;
  std::string corpus, model;

  Workspace() {
    root = std::filesystem::temp_directory_path() / "stylos_cli";
    std::filesystem::remove_all(root);
    synth::CorpusOptions o;
    o.authors = 3;
    o.docs_per_author = 2;
    o.sentences_per_doc = 80;
    synth::write_corpus_dir(root / "corpus", synth::planted_documents(o));
    corpus = (root / "corpus.json").string();
    model = (root / "model.json").string();
    REQUIRE(run({"ingest", "--corpus-dir", (root / "corpus").string(), "--seed", "3", "--test-fraction", "0.2",
                 "--out", corpus})
                .code == 0);
    REQUIRE(run({"train", "--task", "aa", "--corpus", corpus, "--k", "150", "--C", "0.1,1", "--seed", "1", "--out",
                 model})
                .code == 0);
  }
};

const Workspace& ws() {
  static const Workspace w;
  return w;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit with 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  const auto r = run({"train", "--task", "xx", "--corpus", "c.json"});
  CHECK(r.code == 2);
  CHECK(!r.err.empty());
  CHECK(run({"ingest"}).code == 2);
}

TEST_CASE("help and version exit with 0") {
  CHECK(run({"--help"}).code == 0);
  const auto v = run({"--version"});
  CHECK(v.code == 0);
  CHECK(v.out.find(io::version()) != std::string::npos);
}

TEST_CASE("runtime errors exit with 1") {
  const auto r = run({"evaluate", "--model", "/nonexistent/model.json"});
  CHECK(r.code == 1);
  CHECK(!r.err.empty());
  CHECK(run({"train", "--task", "av", "--corpus", ws().corpus, "--target", "Nobody"}).code == 1);
}

TEST_CASE("subcommands produce their artifacts") {
  const auto& w = ws();
  auto r = run({"evaluate", "--model", w.model, "--json"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["kind"] == "metrics");

  r = run({"rank", "--model", w.model, "--class", "AuthorB", "--top", "3"});
  CHECK(r.code == 0);
  CHECK(r.out.find("class AuthorB") != std::string::npos);

  const auto model = io::task_from_artifact(io::read_json_file(w.model));
  const auto id = model.test.front().id;
  r = run({"explain-local", "--model", w.model, "--segment", id, "--json"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["result"]["instance_id"] == id);

  r = run({"neighbors", "--model", w.model, "--segment", id, "--json"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["kind"] == "neighbors");

  r = run({"pairs", "--corpus", w.corpus, "--n-same", "5", "--m-diff", "10", "--json"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["result"]["pairs"].size() == 25);

  r = run({"split", "--corpus", w.corpus, "--seed", "8", "--test-fraction", "0.3", "--json"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["params"]["seed"] == 8);
}

TEST_CASE("probe subcommand") {
  const auto& w = ws();
  const auto bundle = io::corpus_from_artifact(io::read_json_file(w.corpus));
  probe::EmbeddingSet emb;
  emb.dim = 1;
  for (const auto& s : bundle.segments) {
    emb.vectors[s.id] = {s.subcorpus == corpus::Subcorpus::Epistolary ? 1.0 : -1.0};
  }
  const auto path = (w.root / "emb.jsonl").string();
  {
    std::ofstream out(path);
    probe::write_embeddings(out, emb);
  }
  const auto r = run({"probe", "--corpus", w.corpus, "--embeddings", path, "--family", "genre", "--json"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["result"]["metrics"]["f1"].get<double>() >= 0.99);
}

TEST_CASE("CLI and service artifacts are byte-identical") {
  const auto& w = ws();
  service::Service s({});
  json req{{"id", "c"}, {"corpus_dir", (w.root / "corpus").string()}, {"seed", 3}, {"test_fraction", 0.2}};
  REQUIRE(s.handle("POST", "/corpora", {}, req.dump()).status == 201);
  CHECK(s.handle("GET", "/corpora/c", {}, "").body == slurp(w.corpus));

  const auto params = io::read_json_file(w.model)["params"];
  const auto task = s.handle("POST", "/tasks", {}, json{{"corpus_id", "c"}, {"spec", params}}.dump());
  REQUIRE(task.status == 202);
  const std::string model_id = json::parse(task.body)["model_id"];
  s.wait_idle();
  CHECK(s.handle("GET", "/models/" + model_id, {}, "").body == slurp(w.model));
  CHECK(s.handle("GET", "/models/" + model_id + "/metrics", {}, "").body ==
        run({"evaluate", "--model", w.model, "--json"}).out);
  CHECK(s.handle("GET", "/models/" + model_id + "/ranking", {{"order", "absolute"}}, "").body ==
        run({"rank", "--model", w.model, "--order", "absolute", "--json"}).out);

  const auto irof = s.handle("POST", "/models/" + model_id + "/irof", {}, R"({"trials": 2, "seed": 5})");
  const std::string result_id = json::parse(irof.body)["result_id"];
  s.wait_idle();
  CHECK(s.handle("GET", "/results/" + result_id, {}, "").body ==
        run({"irof", "--model", w.model, "--trials", "2", "--seed", "5", "--json"}).out);
}

}
