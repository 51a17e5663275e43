#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "stylos/corpus.hpp"
#include "stylos/error.hpp"
#include "stylos/featurize.hpp"
#include "stylos/probe.hpp"
#include "stylos/tasks.hpp"

namespace httplib {
class Server;
}

namespace stylos::service {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path store;  // empty: keep artifacts in memory only
  int max_jobs = 2;
};

// JSON config file with optional keys host, port, store, max_jobs.
ServiceConfig load_config(const std::filesystem::path& path);
// STYLOS_HOST, STYLOS_PORT, STYLOS_STORE, STYLOS_MAX_JOBS override the file.
void apply_env(ServiceConfig& config);

// HTTP status for a library error code.
int http_status(ErrorCode code);

enum class JobStatus { Queued, Running, Done, Failed };
std::string_view to_string(JobStatus s);

struct JobRecord {
  std::string id;
  std::string kind;  // train, irof, probe
  JobStatus status = JobStatus::Queued;
  std::string result_ref;  // model id for train jobs, result id otherwise
  std::string error_code;
  std::string error_message;
};

nlohmann::json to_json(const JobRecord& job);

// Fixed pool of workers draining a FIFO queue.
class JobQueue {
 public:
  explicit JobQueue(int workers);
  ~JobQueue();
  JobQueue(const JobQueue&) = delete;
  JobQueue& operator=(const JobQueue&) = delete;

  void submit(std::function<void()> work);
  // Blocks until the queue is empty and no job is running.
  void drain();

 private:
  void loop();

  std::mutex mu_;
  std::condition_variable cv_;
  std::condition_variable idle_cv_;
  std::deque<std::function<void()>> queue_;
  std::vector<std::thread> workers_;
  int running_ = 0;
  bool stopping_ = false;
};

struct Response {
  int status = 200;
  std::string body;
};

// Request handling independent of the transport, so the HTTP server and the
// tests share one code path.
class Service {
 public:
  explicit Service(ServiceConfig config);
  ~Service();

  // method is GET or POST; path excludes the query string.
  Response handle(const std::string& method, const std::string& path,
                  const std::map<std::string, std::string>& query, const std::string& body);

  void wait_idle() { jobs_.drain(); }
  const ServiceConfig& config() const { return config_; }

 private:
  Response dispatch(const std::string& method, const std::vector<std::string>& parts,
                    const std::map<std::string, std::string>& query, const std::string& body);

  Response post_corpus(const std::string& body);
  Response get_segments(const std::string& id);
  Response post_task(const std::string& body);
  Response get_job(const std::string& id);
  Response get_model(const std::string& id, const std::string& view,
                     const std::map<std::string, std::string>& query);
  Response post_model(const std::string& id, const std::string& action, const std::string& body);
  Response post_embeddings(const std::string& body, const std::map<std::string, std::string>& query);
  Response post_sidecar(const std::string& body, const std::map<std::string, std::string>& query);
  Response post_probe(const std::string& body);
  Response get_result(const std::string& id);

  std::shared_ptr<const corpus::CorpusBundle> corpus(const std::string& id) const;
  std::shared_ptr<const tasks::TrainedTask> model(const std::string& id) const;
  std::shared_ptr<const probe::EmbeddingSet> embeddings(const std::string& id) const;
  std::shared_ptr<const featurize::AnnotationSidecar> sidecar(const std::string& id) const;

  std::string new_job(const std::string& kind, std::string result_ref);
  void set_status(const std::string& job_id, JobStatus status, const std::string& code = {},
                  const std::string& message = {});
  void run_job(const std::string& job_id, const std::function<void()>& work);
  void persist(const std::string& dir, const std::string& id, const std::string& text) const;
  void load_store();

  ServiceConfig config_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<const corpus::CorpusBundle>> corpora_;
  std::map<std::string, std::shared_ptr<const tasks::TrainedTask>> models_;
  std::map<std::string, std::string> model_bodies_;
  std::map<std::string, std::shared_ptr<const probe::EmbeddingSet>> embeddings_;
  std::map<std::string, std::shared_ptr<const featurize::AnnotationSidecar>> sidecars_;
  std::map<std::string, std::string> results_;
  std::map<std::string, JobRecord> jobs_records_;
  std::uint64_t counter_ = 0;
  JobQueue jobs_;
};

// Binds the service to an httplib server.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();

  // Port 0 picks a free port. Returns the bound port or -1.
  int bind(const std::string& host, int port);
  // Blocks until stop() is called.
  bool listen();
  void stop();
  void wait_until_ready() const;

 private:
  Service& service_;
  std::unique_ptr<httplib::Server> server_;
};

// Runs the service in the foreground; used by `stylos serve`.
int serve(const ServiceConfig& config);

}  // namespace stylos::service
