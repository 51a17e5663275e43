#include "stylos/service.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <fstream>
#include <sstream>

#include "httplib.h"
#include "stylos/explain.hpp"
#include "stylos/serialize.hpp"
#include "stylos/text.hpp"

namespace stylos::service {

using nlohmann::json;

ServiceConfig load_config(const std::filesystem::path& path) {
  const auto j = io::read_json_file(path);
  ServiceConfig c;
  try {
    c.host = j.value("host", c.host);
    c.port = j.value("port", c.port);
    c.store = j.value("store", c.store.string());
    c.max_jobs = j.value("max_jobs", c.max_jobs);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  return c;
}

void apply_env(ServiceConfig& config) {
  auto to_int = [](const char* name, const char* v) {
    try {
      return std::stoi(v);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, std::string(name) + " is not an integer");
    }
  };
  if (const char* v = std::getenv("STYLOS_HOST")) config.host = v;
  if (const char* v = std::getenv("STYLOS_PORT")) config.port = to_int("STYLOS_PORT", v);
  if (const char* v = std::getenv("STYLOS_STORE")) config.store = v;
  if (const char* v = std::getenv("STYLOS_MAX_JOBS")) config.max_jobs = to_int("STYLOS_MAX_JOBS", v);
  if (config.max_jobs < 1) throw Error(ErrorCode::InvalidArgument, "max_jobs must be >= 1");
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound: return 404;
    case ErrorCode::DuplicateId: return 409;
    case ErrorCode::NoConvergence:
    case ErrorCode::NonFinite: return 500;
    default: return 422;
  }
}

std::string_view to_string(JobStatus s) {
  switch (s) {
    case JobStatus::Queued: return "Queued";
    case JobStatus::Running: return "Running";
    case JobStatus::Done: return "Done";
    case JobStatus::Failed: return "Failed";
  }
  return "?";
}

json to_json(const JobRecord& job) {
  json j{{"job_id", job.id}, {"kind", job.kind}, {"status", to_string(job.status)}};
  j["result_ref"] = job.status == JobStatus::Done ? json(job.result_ref) : json(nullptr);
  if (job.status == JobStatus::Failed) {
    j["error"] = json{{"code", job.error_code}, {"message", job.error_message}};
  }
  return j;
}

// ---------------------------------------------------------------------------
// JobQueue

JobQueue::JobQueue(int workers) {
  for (int i = 0; i < std::max(1, workers); ++i) workers_.emplace_back([this] { loop(); });
}

JobQueue::~JobQueue() {
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
  }
  cv_.notify_all();
  for (auto& t : workers_) t.join();
}

void JobQueue::submit(std::function<void()> work) {
  {
    std::lock_guard lock(mu_);
    queue_.push_back(std::move(work));
  }
  cv_.notify_one();
}

void JobQueue::drain() {
  std::unique_lock lock(mu_);
  idle_cv_.wait(lock, [this] { return queue_.empty() && running_ == 0; });
}

void JobQueue::loop() {
  for (;;) {
    std::function<void()> work;
    {
      std::unique_lock lock(mu_);
      cv_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
      if (queue_.empty()) return;
      work = std::move(queue_.front());
      queue_.pop_front();
      ++running_;
    }
    work();
    {
      std::lock_guard lock(mu_);
      --running_;
    }
    idle_cv_.notify_all();
  }
}

// ---------------------------------------------------------------------------
// Service

namespace {

Response json_response(int status, const json& j) { return {status, io::render(j)}; }

Response error_response(int status, const std::string& code, const std::string& message) {
  return json_response(status, json{{"error", json{{"code", code}, {"message", message}}}});
}

json parse_body(const std::string& body) {
  try {
    return body.empty() ? json::object() : json::parse(body);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("request body: ") + e.what());
  }
}

std::string require_string(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j[key].is_string()) {
    throw Error(ErrorCode::InvalidArgument, std::string("missing string field '") + key + "'");
  }
  return j[key].get<std::string>();
}

template <typename T>
T optional_field(const json& j, const char* key, T fallback) {
  try {
    return j.value(key, fallback);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("field '") + key + "': " + e.what());
  }
}

std::uint64_t id_suffix(const std::string& id) {
  const auto dash = id.rfind('-');
  if (dash == std::string::npos) return 0;
  try {
    return std::stoull(id.substr(dash + 1));
  } catch (const std::exception&) {
    return 0;
  }
}

}  // namespace

Service::Service(ServiceConfig config) : config_(std::move(config)), jobs_(config_.max_jobs) {
  load_store();
}

Service::~Service() { jobs_.drain(); }

void Service::persist(const std::string& dir, const std::string& id, const std::string& text) const {
  if (config_.store.empty()) return;
  const auto d = config_.store / dir;
  std::filesystem::create_directories(d);
  io::write_text_file(d / (id + ".json"), text);
}

void Service::load_store() {
  if (config_.store.empty() || !std::filesystem::exists(config_.store)) return;
  auto each = [&](const std::string& dir, const std::function<void(const std::string&, const std::string&)>& f) {
    const auto d = config_.store / dir;
    if (!std::filesystem::is_directory(d)) return;
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(d)) {
      if (e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& p : files) {
      std::ifstream in(p, std::ios::binary);
      std::stringstream ss;
      ss << in.rdbuf();
      const auto id = p.stem().string();
      f(id, ss.str());
      counter_ = std::max(counter_, id_suffix(id));
    }
  };
  each("corpora", [&](const std::string& id, const std::string& text) {
    corpora_[id] = std::make_shared<corpus::CorpusBundle>(io::corpus_from_artifact(json::parse(text)));
  });
  each("models", [&](const std::string& id, const std::string& text) {
    models_[id] = std::make_shared<tasks::TrainedTask>(io::task_from_artifact(json::parse(text)));
    model_bodies_[id] = text;
  });
  each("results", [&](const std::string& id, const std::string& text) { results_[id] = text; });
}

std::shared_ptr<const corpus::CorpusBundle> Service::corpus(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = corpora_.find(id);
  if (it == corpora_.end()) throw Error(ErrorCode::NotFound, "corpus " + id);
  return it->second;
}

std::shared_ptr<const tasks::TrainedTask> Service::model(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = models_.find(id);
  if (it == models_.end()) throw Error(ErrorCode::NotFound, "model " + id);
  return it->second;
}

std::shared_ptr<const probe::EmbeddingSet> Service::embeddings(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = embeddings_.find(id);
  if (it == embeddings_.end()) throw Error(ErrorCode::NotFound, "embedding set " + id);
  return it->second;
}

std::shared_ptr<const featurize::AnnotationSidecar> Service::sidecar(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = sidecars_.find(id);
  if (it == sidecars_.end()) throw Error(ErrorCode::NotFound, "sidecar " + id);
  return it->second;
}

std::string Service::new_job(const std::string& kind, std::string result_ref) {
  std::lock_guard lock(mu_);
  JobRecord r;
  r.id = "j-" + std::to_string(++counter_);
  r.kind = kind;
  r.result_ref = std::move(result_ref);
  jobs_records_[r.id] = r;
  return r.id;
}

void Service::set_status(const std::string& job_id, JobStatus status, const std::string& code,
                         const std::string& message) {
  std::lock_guard lock(mu_);
  auto& r = jobs_records_.at(job_id);
  // Terminal states are final and transitions only move forward.
  if (r.status == JobStatus::Done || r.status == JobStatus::Failed) return;
  if (static_cast<int>(status) < static_cast<int>(r.status)) return;
  r.status = status;
  r.error_code = code;
  r.error_message = message;
}

void Service::run_job(const std::string& job_id, const std::function<void()>& work) {
  jobs_.submit([this, job_id, work] {
    set_status(job_id, JobStatus::Running);
    try {
      work();
      set_status(job_id, JobStatus::Done);
    } catch (const Error& e) {
      set_status(job_id, JobStatus::Failed, std::string(stylos::to_string(e.code())), e.what());
    } catch (const std::exception& e) {
      set_status(job_id, JobStatus::Failed, "Internal", e.what());
    }
  });
}

Response Service::handle(const std::string& method, const std::string& path,
                         const std::map<std::string, std::string>& query, const std::string& body) {
  std::vector<std::string> parts;
  std::stringstream ss(path);
  for (std::string p; std::getline(ss, p, '/');) {
    if (!p.empty()) parts.push_back(p);
  }
  try {
    return dispatch(method, parts, query, body);
  } catch (const Error& e) {
    return error_response(http_status(e.code()), std::string(stylos::to_string(e.code())), e.what());
  } catch (const std::exception& e) {
    return error_response(500, "Internal", e.what());
  }
}

Response Service::dispatch(const std::string& method, const std::vector<std::string>& p,
                           const std::map<std::string, std::string>& query, const std::string& body) {
  const auto n = p.size();
  if (method == "GET") {
    if (n == 1 && p[0] == "health") return json_response(200, json{{"status", "ok"}, {"version", io::version()}});
    if (n == 3 && p[0] == "corpora" && p[2] == "segments") return get_segments(p[1]);
    if (n == 2 && p[0] == "corpora") {
      const auto c = corpus(p[1]);
      return json_response(200, io::corpus_artifact(*c, c->split.seed));
    }
    if (n == 2 && p[0] == "jobs") return get_job(p[1]);
    if (n == 2 && p[0] == "models") return get_model(p[1], "", query);
    if (n == 3 && p[0] == "models") return get_model(p[1], p[2], query);
    if (n == 2 && p[0] == "results") return get_result(p[1]);
  } else if (method == "POST") {
    if (n == 1 && p[0] == "corpora") return post_corpus(body);
    if (n == 1 && p[0] == "tasks") return post_task(body);
    if (n == 1 && p[0] == "embeddings") return post_embeddings(body, query);
    if (n == 1 && p[0] == "sidecars") return post_sidecar(body, query);
    if (n == 1 && p[0] == "probes") return post_probe(body);
    if (n == 3 && p[0] == "models") return post_model(p[1], p[2], body);
    if (n == 4 && p[0] == "models" && p[2] == "explain" && p[3] == "local") {
      return post_model(p[1], "explain/local", body);
    }
  }
  return error_response(404, "NotFound", "no route for " + method + " /" + [&] {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) s += (i ? "/" : "") + p[i];
    return s;
  }());
}

Response Service::post_corpus(const std::string& body) {
  const auto req = parse_body(body);
  if (!req.is_object()) throw Error(ErrorCode::InvalidArgument, "corpus request must be an object");
  const auto seed = optional_field<std::uint64_t>(req, "seed", 0);
  const auto fraction = optional_field<double>(req, "test_fraction", 0.1);
  const auto patterns = optional_field<std::vector<std::string>>(req, "marker_patterns",
                                                                 corpus::default_marker_patterns());
  std::vector<corpus::Document> docs;
  if (req.contains("documents")) {
    std::set<std::string> seen;
    for (const auto& d : req["documents"]) {
      corpus::Document doc;
      doc.id = require_string(d, "id");
      doc.author = require_string(d, "author");
      if (doc.author.empty()) throw Error(ErrorCode::InvalidArgument, "document " + doc.id + " has no author");
      doc.subcorpus = corpus::parse_subcorpus(optional_field<std::string>(d, "subcorpus", "Epistolary"));
      doc.raw_text = require_string(d, "text");
      doc.clean_text = corpus::clean_text(doc.raw_text, patterns);
      if (!seen.insert(doc.id).second) throw Error(ErrorCode::InvalidArgument, "duplicate document id " + doc.id);
      docs.push_back(std::move(doc));
    }
    if (docs.empty()) throw Error(ErrorCode::EmptyManifest, "no documents");
  } else if (req.contains("corpus_dir")) {
    const std::filesystem::path dir = require_string(req, "corpus_dir");
    const std::filesystem::path manifest = req.contains("manifest")
                                               ? std::filesystem::path(require_string(req, "manifest"))
                                               : dir / "manifest.csv";
    try {
      docs = corpus::load_corpus(dir, manifest, patterns);
    } catch (const Error& e) {
      // A duplicate row is a malformed manifest, not a duplicate ingest.
      if (e.code() == ErrorCode::DuplicateId) throw Error(ErrorCode::InvalidArgument, e.what());
      throw;
    }
  } else {
    throw Error(ErrorCode::InvalidArgument, "corpus request needs 'documents' or 'corpus_dir'");
  }
  auto bundle = corpus::build_bundle(std::move(docs), fraction, seed);
  bundle.marker_patterns = patterns;
  const auto artifact = io::corpus_artifact(bundle, seed);
  const auto text = io::render(artifact);
  const std::string id = req.contains("id") ? require_string(req, "id")
                                            : "c" + text::hex64(text::fnv1a(text)).substr(0, 12);
  {
    std::lock_guard lock(mu_);
    if (corpora_.count(id)) throw Error(ErrorCode::DuplicateId, "corpus " + id + " already exists");
    corpora_[id] = std::make_shared<corpus::CorpusBundle>(std::move(bundle));
  }
  persist("corpora", id, text);
  const auto c = corpus(id);
  return json_response(201, json{{"corpus_id", id},
                                 {"documents", c->documents.size()},
                                 {"segments", c->segments.size()},
                                 {"train", c->split.train.size()},
                                 {"test", c->split.test.size()},
                                 {"seed", seed}});
}

Response Service::get_segments(const std::string& id) {
  const auto c = corpus(id);
  std::set<std::string> test_ids;
  for (const auto& s : c->split.test) test_ids.insert(s.id);
  json segs = json::array();
  for (const auto& s : c->segments) {
    auto j = io::to_json(s);
    j["split"] = test_ids.count(s.id) ? "test" : "train";
    segs.push_back(std::move(j));
  }
  return json_response(200, json{{"corpus_id", id}, {"segments", segs}});
}

Response Service::post_task(const std::string& body) {
  const auto req = parse_body(body);
  const auto corpus_id = require_string(req, "corpus_id");
  const auto spec = io::spec_from_json(req.contains("spec") ? req["spec"] : req);
  const auto c = corpus(corpus_id);
  tasks::validate(spec, c->split);

  std::string model_id;
  {
    std::lock_guard lock(mu_);
    model_id = "m-" + std::to_string(++counter_);
  }
  const auto job_id = new_job("train", model_id);
  run_job(job_id, [this, c, spec, model_id] {
    auto task = std::make_shared<tasks::TrainedTask>(tasks::run_task(c->split, spec));
    auto text = io::render(io::model_artifact(*task));
    persist("models", model_id, text);
    std::lock_guard lock(mu_);
    models_[model_id] = std::move(task);
    model_bodies_[model_id] = std::move(text);
  });
  return json_response(202, json{{"job_id", job_id}, {"model_id", model_id}, {"status", "Queued"}});
}

Response Service::get_job(const std::string& id) {
  std::lock_guard lock(mu_);
  auto it = jobs_records_.find(id);
  if (it == jobs_records_.end()) throw Error(ErrorCode::NotFound, "job " + id);
  return json_response(200, to_json(it->second));
}

Response Service::get_model(const std::string& id, const std::string& view,
                            const std::map<std::string, std::string>& query) {
  const auto m = model(id);
  if (view.empty()) {
    std::lock_guard lock(mu_);
    return {200, model_bodies_.at(id)};
  }
  if (view == "metrics") return json_response(200, io::metrics_artifact(*m));
  if (view == "ranking") {
    std::string cls;
    if (auto it = query.find("class"); it != query.end() && !it->second.empty()) {
      cls = it->second;
    } else {
      cls = m->model.is_binary() ? m->model.classes[1] : m->model.classes[0];
    }
    auto order = explain::RankOrder::Signed;
    if (auto it = query.find("order"); it != query.end() && !it->second.empty()) {
      order = explain::parse_rank_order(it->second);
    }
    const auto r = explain::global_ranking(m->model, m->feature_display_names(), cls, order);
    return json_response(200, io::ranking_artifact(r, *m));
  }
  throw Error(ErrorCode::NotFound, "model view " + view);
}

Response Service::post_model(const std::string& id, const std::string& action, const std::string& body) {
  const auto m = model(id);
  const auto req = parse_body(body);
  if (action == "explain/local") {
    const auto seg = require_string(req, "segment_id");
    std::optional<std::string> cls;
    if (req.contains("class") && req["class"].is_string()) cls = req["class"].get<std::string>();
    const auto e = explain::explain_instance(*m, seg, cls, optional_field<std::size_t>(req, "display_top", 5));
    return json_response(200, io::local_artifact(e, *m));
  }
  if (action == "neighbors") {
    const auto seg = require_string(req, "segment_id");
    const auto space = explain::parse_space(optional_field<std::string>(req, "space", "tfidf"));
    std::shared_ptr<const probe::EmbeddingSet> emb;
    if (space == explain::Space::Embedding) emb = embeddings(require_string(req, "embedding_id"));
    const auto r = explain::neighbors(*m, seg, space, emb.get(), optional_field<std::size_t>(req, "k", 10));
    return json_response(200, io::neighbors_artifact(r, *m));
  }
  if (action == "irof") {
    const int trials = optional_field<int>(req, "trials", 10);
    const auto seed = optional_field<std::uint64_t>(req, "seed", 0);
    if (trials < 0) throw Error(ErrorCode::InvalidArgument, "trials must be >= 0");
    std::string result_id;
    {
      std::lock_guard lock(mu_);
      result_id = "r-" + std::to_string(++counter_);
    }
    const auto job_id = new_job("irof", result_id);
    run_job(job_id, [this, m, trials, seed, result_id] {
      auto text = io::render(io::irof_artifact(explain::irof(*m, trials, seed), *m));
      persist("results", result_id, text);
      std::lock_guard lock(mu_);
      results_[result_id] = std::move(text);
    });
    return json_response(202, json{{"job_id", job_id}, {"result_id", result_id}, {"status", "Queued"}});
  }
  throw Error(ErrorCode::NotFound, "model action " + action);
}

Response Service::post_embeddings(const std::string& body, const std::map<std::string, std::string>& query) {
  std::istringstream in(body);
  auto set = std::make_shared<probe::EmbeddingSet>(probe::parse_embeddings(in));
  std::string id;
  if (auto it = query.find("id"); it != query.end() && !it->second.empty()) {
    id = it->second;
  } else {
    id = "e" + text::hex64(text::fnv1a(body)).substr(0, 12);
  }
  const auto dim = set->dim, count = set->size();
  {
    std::lock_guard lock(mu_);
    if (embeddings_.count(id)) throw Error(ErrorCode::DuplicateId, "embedding set " + id + " already exists");
    embeddings_[id] = std::move(set);
  }
  return json_response(201, json{{"embedding_id", id}, {"dim", dim}, {"count", count}});
}

Response Service::post_sidecar(const std::string& body, const std::map<std::string, std::string>& query) {
  std::istringstream in(body);
  auto sc = std::make_shared<featurize::AnnotationSidecar>(featurize::parse_sidecar(in));
  std::string id;
  if (auto it = query.find("id"); it != query.end() && !it->second.empty()) {
    id = it->second;
  } else {
    id = "s" + text::hex64(text::fnv1a(body)).substr(0, 12);
  }
  const auto count = sc->records.size();
  {
    std::lock_guard lock(mu_);
    if (sidecars_.count(id)) throw Error(ErrorCode::DuplicateId, "sidecar " + id + " already exists");
    sidecars_[id] = std::move(sc);
  }
  return json_response(201, json{{"sidecar_id", id}, {"count", count}});
}

Response Service::post_probe(const std::string& body) {
  const auto req = parse_body(body);
  const auto corpus_id = require_string(req, "corpus_id");
  const auto emb_id = require_string(req, "embedding_id");
  if (!req.contains("labeler")) throw Error(ErrorCode::InvalidArgument, "probe request needs 'labeler'");
  const auto params = io::labeler_params_from_json(req["labeler"]);
  const auto seed = optional_field<std::uint64_t>(req, "seed", 0);
  const auto c = corpus(corpus_id);
  const auto emb = embeddings(emb_id);
  std::shared_ptr<const featurize::AnnotationSidecar> sc;
  if (req.contains("sidecar_id")) sc = sidecar(require_string(req, "sidecar_id"));
  const bool chain = params.family == probe::LabelerFamily::PosChainPresence ||
                     params.family == probe::LabelerFamily::SqChainPresence;
  if (chain && !sc) throw Error(ErrorCode::MissingAnnotation, "chain labelers need sidecar_id");

  std::string result_id;
  {
    std::lock_guard lock(mu_);
    result_id = "r-" + std::to_string(++counter_);
  }
  const auto job_id = new_job("probe", result_id);
  run_job(job_id, [this, c, emb, sc, params, seed, result_id] {
    const auto labeler = probe::make_labeler(params, c->split.train, sc.get(), seed);
    const auto report = probe::run_probe(*emb, labeler, seed);
    auto text = io::render(io::probe_artifact(report, params, labeler));
    persist("results", result_id, text);
    std::lock_guard lock(mu_);
    results_[result_id] = std::move(text);
  });
  return json_response(202, json{{"job_id", job_id}, {"result_id", result_id}, {"status", "Queued"}});
}

Response Service::get_result(const std::string& id) {
  std::lock_guard lock(mu_);
  auto it = results_.find(id);
  if (it == results_.end()) throw Error(ErrorCode::NotFound, "result " + id);
  return {200, it->second};
}

// ---------------------------------------------------------------------------
// HTTP transport

HttpServer::HttpServer(Service& service) : service_(service), server_(std::make_unique<httplib::Server>()) {
  auto route = [this](const std::string& method) {
    return [this, method](const httplib::Request& req, httplib::Response& res) {
      std::map<std::string, std::string> query;
      for (const auto& [k, v] : req.params) query.emplace(k, v);
      const auto r = service_.handle(method, req.path, query, req.body);
      res.status = r.status;
      res.set_content(r.body, "application/json");
    };
  };
  server_->Get(".*", route("GET"));
  server_->Post(".*", route("POST"));
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return server_->bind_to_any_port(host);
  return server_->bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen() { return server_->listen_after_bind(); }

void HttpServer::stop() {
  if (server_->is_running()) server_->stop();
}

void HttpServer::wait_until_ready() const { server_->wait_until_ready(); }

int serve(const ServiceConfig& config) {
  Service service(config);
  HttpServer http(service);
  const int port = http.bind(config.host, config.port);
  if (port < 0) {
    std::fprintf(stderr, "stylos: cannot bind %s:%d\n", config.host.c_str(), config.port);
    return 1;
  }
  std::fprintf(stderr, "stylos: listening on %s:%d\n", config.host.c_str(), port);
  return http.listen() ? 0 : 1;
}

}  // namespace stylos::service
