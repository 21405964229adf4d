#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "fp3d/squeeze.hpp"

namespace fp3d {

enum class TaskState { queued, leased, done };

struct Lease {
    std::string worker_id;
    std::chrono::steady_clock::time_point last_hello;
};

struct TaskEnvelope {
    std::string task_id;
    nlohmann::json payload;
    TaskState state = TaskState::queued;
    std::optional<Lease> lease;  // present iff state == leased
};

struct WorkerRecord {
    std::string worker_id;
    std::chrono::steady_clock::time_point last_hello;
    std::optional<std::string> current_task;
};

struct RunResult {
    std::string task_id;
    double total_wirelength = 0;
    BoundingVolume volume;
    nlohmann::json placement;
    nlohmann::json raw;  // full result payload as submitted

    bool failed() const { return raw.contains("error"); }
};

// Task payloads dispatch on their "kind" field; only "pipeline" ships, the
// registry is the extension point.
class TaskRegistry {
public:
    using Handler = std::function<nlohmann::json(const nlohmann::json&)>;

    void add(const std::string& kind, Handler handler);
    nlohmann::json execute(const nlohmann::json& payload) const;  // ConfigInvalid on unknown kind

    static const TaskRegistry& defaults();  // registers "pipeline"

private:
    std::map<std::string, Handler> handlers_;
};

struct ServerEvent {
    enum class Kind { worker_joined, leased, hello, requeued, completed, duplicate_discarded };
    Kind kind;
    std::string task_id;
    std::string worker_id;
};

// Serialized lease/requeue/complete transitions for the task queue.
class TaskStore {
public:
    explicit TaskStore(const std::vector<nlohmann::json>& payloads);

    using Clock = std::chrono::steady_clock;

    std::optional<TaskEnvelope> lease(const std::string& worker, Clock::time_point now);
    // refreshes the lease when the task is still leased to this worker
    void hello(const std::string& worker, const std::string& task_id, Clock::time_point now);

    enum class Submit { accepted, duplicate, unknown };
    struct SubmitOutcome {
        Submit status = Submit::unknown;
        std::string worker;  // leaseholder at submission time; the wire result
                             // message itself carries no worker id
    };
    SubmitOutcome submit(const std::string& task_id, const nlohmann::json& result);

    // queued again every leased task whose last hello is older than timeout
    std::vector<std::string> requeue_expired(Clock::time_point now, double timeout_sec);

    void note_worker(const std::string& worker, Clock::time_point now);

    bool all_done() const;
    void wait_all_done();
    std::size_t task_count() const;
    std::vector<RunResult> results() const;             // task order
    std::map<std::string, int> requeue_counts() const;  // only requeued tasks
    std::vector<WorkerRecord> workers() const;

private:
    RunResult parse_result(const TaskEnvelope& t) const;

    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::vector<TaskEnvelope> tasks_;
    std::map<std::string, nlohmann::json> result_payloads_;
    std::deque<std::size_t> pending_;
    std::map<std::string, std::size_t> index_;
    std::map<std::string, WorkerRecord> workers_;
    std::map<std::string, int> requeues_;
    std::size_t done_count_ = 0;
};

struct ServeConfig {
    std::uint16_t port = 0;  // 0: ephemeral
    double hello_period = 5.0;
    double timeout = 15.0;  // must exceed hello_period
    std::vector<nlohmann::json> payloads;
    std::function<void(const ServerEvent&)> observer;
    std::function<void(std::uint16_t)> on_listening;
    bool embed_worker = false;
    double drain_window = 0.6;  // keeps answering fetches with shutdown
};

struct ServeReport {
    std::vector<RunResult> results;
    std::size_t best_index = static_cast<std::size_t>(-1);
    std::map<std::string, int> requeues;

    bool has_best() const { return best_index < results.size(); }
    const RunResult& best() const { return results.at(best_index); }
    nlohmann::json to_json() const;
};

// Spools tasks over newline-delimited JSON on TCP, tracks worker heartbeats,
// requeues timed-out leases, returns once every task is done.
// Throws ConfigInvalid, BindFailure.
ServeReport serve(const ServeConfig& config);

struct WorkConfig {
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;
    std::string worker_id;
    double hello_period = 5.0;
    int connect_retries = 20;
    const TaskRegistry* registry = nullptr;  // defaults() when null
};

// Fetch/execute/submit loop; heartbeats while executing; returns on the
// server's shutdown notice or on connection loss. Throws ConnectFailure when
// the server is never reachable. Returns the number of tasks completed.
long work(const WorkConfig& config);

// Same task semantics inside one process: shared queue, worker_count threads.
ServeReport run_parallel(const std::vector<nlohmann::json>& payloads, int worker_count,
                         const TaskRegistry* registry = nullptr);

// (total_wirelength asc, volume asc, task_id asc) over successful results
std::size_t best_result_index(const std::vector<RunResult>& results);

}  // namespace fp3d
