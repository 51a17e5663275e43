#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "stylos/serialize.hpp"
#include "stylos/service.hpp"
#include "synth.hpp"

using namespace stylos;
using namespace stylos::service;
using nlohmann::json;

namespace {

json small_corpus_request(const std::string& id) {
  synth::CorpusOptions o;
  o.authors = 3;
  o.docs_per_author = 2;
  o.sentences_per_doc = 80;
  json docs = json::array();
  for (const auto& d : synth::planted_documents(o)) {
    docs.push_back(json{{"id", d.id}, {"author", d.author}, {"subcorpus", corpus::to_string(d.subcorpus)},
                        {"text", d.raw_text}});
  }
  return json{{"id", id}, {"documents", docs}, {"seed", 3}, {"test_fraction", 0.2}};
}

json av_task(const std::string& corpus_id) {
  return json{{"corpus_id", corpus_id},
              {"spec", json{{"kind", "AV"},
                            {"target_author", "AuthorB"},
                            {"k_features", 150},
                            {"seed", 1},
                            {"hyper_grid", json{{"C_values", {0.1, 1.0}}, {"folds", 3}}}}}};
}

struct Call {
  int status;
  json body;
};

Call call(Service& s, const std::string& method, const std::string& path, const json& body = json::object(),
          const std::map<std::string, std::string>& query = {}) {
  const auto r = s.handle(method, path, query, body.dump());
  return {r.status, json::parse(r.body)};
}

std::filesystem::path fresh_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("stylos_service_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_SUITE("service") {

TEST_CASE("error codes map to HTTP status") {
  CHECK(http_status(ErrorCode::NotFound) == 404);
  CHECK(http_status(ErrorCode::DuplicateId) == 409);
  CHECK(http_status(ErrorCode::InvalidArgument) == 422);
  CHECK(http_status(ErrorCode::TargetAuthorMissing) == 422);
  CHECK(http_status(ErrorCode::NoConvergence) == 500);
}

TEST_CASE("config from file and environment") {
  const auto dir = fresh_dir("config");
  std::filesystem::create_directories(dir);
  io::write_text_file(dir / "c.json", R"({"host": "0.0.0.0", "port": 9000, "max_jobs": 4})");
  auto c = load_config(dir / "c.json");
  CHECK(c.host == "0.0.0.0");
  CHECK(c.port == 9000);
  CHECK(c.max_jobs == 4);
  setenv("STYLOS_PORT", "9100", 1);
  apply_env(c);
  unsetenv("STYLOS_PORT");
  CHECK(c.port == 9100);
}

TEST_CASE("end-to-end workflow in process") {
  Service s({});
  CHECK(call(s, "GET", "/health").status == 200);

  auto r = call(s, "POST", "/corpora", small_corpus_request("c1"));
  REQUIRE(r.status == 201);
  CHECK(r.body["corpus_id"] == "c1");
  const int n_segments = r.body["segments"];
  CHECK(call(s, "POST", "/corpora", small_corpus_request("c1")).status == 409);
  CHECK(call(s, "GET", "/corpora/c1/segments").body["segments"].size() == static_cast<std::size_t>(n_segments));
  CHECK(call(s, "GET", "/corpora/zz").status == 404);

  r = call(s, "POST", "/tasks", av_task("c1"));
  REQUIRE(r.status == 202);
  const std::string job = r.body["job_id"], model = r.body["model_id"];
  s.wait_idle();
  r = call(s, "GET", "/jobs/" + job);
  CHECK(r.body["status"] == "Done");
  CHECK(r.body["result_ref"] == model);

  r = call(s, "GET", "/models/" + model);
  REQUIRE(r.status == 200);
  CHECK(r.body["kind"] == "model");
  r = call(s, "GET", "/models/" + model + "/metrics");
  CHECK(r.body["result"]["metrics"]["f1"].get<double>() > 0.8);
  r = call(s, "GET", "/models/" + model + "/ranking", {}, {{"class", "Other"}, {"order", "absolute"}});
  CHECK(r.body["result"]["class"] == "Other");
  CHECK(r.body["params"]["order"] == "absolute");

  const auto test_seg = call(s, "GET", "/corpora/c1/segments").body["segments"];
  std::string query_id;
  for (const auto& seg : test_seg) {
    if (seg["split"] == "test") {
      query_id = seg["id"];
      break;
    }
  }
  REQUIRE(!query_id.empty());
  r = call(s, "POST", "/models/" + model + "/explain/local", json{{"segment_id", query_id}});
  CHECK(r.status == 200);
  CHECK(r.body["kind"] == "local_explanation");
  r = call(s, "POST", "/models/" + model + "/neighbors", json{{"segment_id", query_id}, {"space", "tfidf"}});
  CHECK(r.status == 200);
  CHECK(r.body["result"].contains("highlights"));
  CHECK(call(s, "POST", "/models/" + model + "/explain/local", json{{"segment_id", "nope"}}).status == 404);

  r = call(s, "POST", "/models/" + model + "/irof", json{{"trials", 3}, {"seed", 4}});
  REQUIRE(r.status == 202);
  const std::string result = r.body["result_id"];
  s.wait_idle();
  r = call(s, "GET", "/results/" + result);
  CHECK(r.body["kind"] == "irof");
  CHECK(r.body["result"]["random_f1"].size() == 3);
}

TEST_CASE("embeddings, probes and their errors") {
  Service s({});
  REQUIRE(call(s, "POST", "/corpora", small_corpus_request("c")).status == 201);
  const auto segs = call(s, "GET", "/corpora/c/segments").body["segments"];
  probe::EmbeddingSet emb;
  emb.dim = 2;
  emb.source = "toy";
  for (const auto& seg : segs) {
    const double g = seg["subcorpus"] == "Epistolary" ? 1.0 : -1.0;
    emb.vectors[seg["id"].get<std::string>()] = {g, 0.01 * static_cast<double>(emb.vectors.size() % 7)};
  }
  std::ostringstream jsonl;
  probe::write_embeddings(jsonl, emb);
  auto raw = s.handle("POST", "/embeddings", {{"id", "e1"}}, jsonl.str());
  REQUIRE(raw.status == 201);
  CHECK(s.handle("POST", "/embeddings", {{"id", "e1"}}, jsonl.str()).status == 409);
  CHECK(s.handle("POST", "/embeddings", {}, "{\"dim\": 2}\n{\"id\": \"x\", \"vec\": [1]}\n").status == 422);

  auto r = call(s, "POST", "/probes",
                json{{"corpus_id", "c"}, {"embedding_id", "e1"}, {"labeler", json{{"family", "genre"}}}, {"seed", 2}});
  REQUIRE(r.status == 202);
  const std::string job = r.body["job_id"], result = r.body["result_id"];
  s.wait_idle();
  CHECK(call(s, "GET", "/jobs/" + job).body["status"] == "Done");
  r = call(s, "GET", "/results/" + result);
  CHECK(r.body["result"]["metrics"]["f1"].get<double>() >= 0.99);

  r = call(s, "POST", "/probes",
           json{{"corpus_id", "c"}, {"embedding_id", "e1"}, {"labeler", json{{"family", "pos-chain"}}}});
  CHECK(r.status == 422);
  CHECK(r.body["error"]["code"].is_string());

  // A probe that fails inside the job is reported through the job record.
  probe::EmbeddingSet partial = emb;
  partial.vectors.erase(partial.vectors.begin());
  std::ostringstream p;
  probe::write_embeddings(p, partial);
  REQUIRE(s.handle("POST", "/embeddings", {{"id", "e2"}}, p.str()).status == 201);
  r = call(s, "POST", "/probes", json{{"corpus_id", "c"}, {"embedding_id", "e2"}, {"labeler", json{{"family", "genre"}}}});
  const std::string failing = r.body["job_id"];
  s.wait_idle();
  r = call(s, "GET", "/jobs/" + failing);
  CHECK(r.body["status"] == "Failed");
  CHECK(r.body["error"]["code"] == "CoverageGap");
}

TEST_CASE("task validation is synchronous") {
  Service s({});
  REQUIRE(call(s, "POST", "/corpora", small_corpus_request("c")).status == 201);
  auto bad = av_task("c");
  bad["spec"]["target_author"] = "Nobody";
  auto r = call(s, "POST", "/tasks", bad);
  CHECK(r.status == 422);
  CHECK(r.body["error"]["code"] == "TargetAuthorMissing");
  CHECK(call(s, "POST", "/tasks", av_task("missing")).status == 404);
  CHECK(s.handle("POST", "/tasks", {}, "{not json").status == 422);
  CHECK(call(s, "GET", "/unknown").status == 404);
}

TEST_CASE("store persists artifacts across restarts") {
  const auto store = fresh_dir("store");
  ServiceConfig cfg;
  cfg.store = store;
  std::string model, body;
  {
    Service s(cfg);
    REQUIRE(call(s, "POST", "/corpora", small_corpus_request("c")).status == 201);
    model = call(s, "POST", "/tasks", av_task("c")).body["model_id"];
    s.wait_idle();
    body = s.handle("GET", "/models/" + model, {}, "").body;
  }
  Service again(cfg);
  const auto r = again.handle("GET", "/models/" + model, {}, "");
  CHECK(r.status == 200);
  CHECK(r.body == body);
  CHECK(call(again, "GET", "/corpora/c").status == 200);
  const auto next = call(again, "POST", "/tasks", av_task("c")).body["model_id"].get<std::string>();
  CHECK(next != model);
  again.wait_idle();
}

TEST_CASE("HTTP transport") {
  Service s({});
  HttpServer http(s);
  const int port = http.bind("127.0.0.1", 0);
  REQUIRE(port > 0);
  std::thread t([&] { http.listen(); });
  http.wait_until_ready();
  httplib::Client client("127.0.0.1", port);
  auto res = client.Get("/health");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(json::parse(res->body)["status"] == "ok");
  res = client.Post("/corpora", small_corpus_request("h").dump(), "application/json");
  REQUIRE(res);
  CHECK(res->status == 201);
  res = client.Get("/models/m-9/ranking?class=x");
  REQUIRE(res);
  CHECK(res->status == 404);
  http.stop();
  t.join();
}

}
