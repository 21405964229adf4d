#include "fp3d/runner.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "fp3d/errors.hpp"
#include "fp3d/net.hpp"
#include "fp3d/pipeline.hpp"

namespace fp3d {

using nlohmann::json;

void TaskRegistry::add(const std::string& kind, Handler handler) {
    handlers_[kind] = std::move(handler);
}

json TaskRegistry::execute(const json& payload) const {
    const std::string kind = payload.value("kind", std::string{});
    const auto it = handlers_.find(kind);
    if (it == handlers_.end()) throw ConfigInvalid("no plugin registered for task kind '" + kind + "'");
    return it->second(payload);
}

const TaskRegistry& TaskRegistry::defaults() {
    static const TaskRegistry registry = [] {
        TaskRegistry r;
        r.add("pipeline", [](const json& payload) { return execute_pipeline_payload(payload); });
        return r;
    }();
    return registry;
}

namespace {

std::string make_task_id(std::size_t i) {
    std::string n = std::to_string(i);
    return "t" + std::string(n.size() < 4 ? 4 - n.size() : 0, '0') + n;
}

}  // namespace

TaskStore::TaskStore(const std::vector<json>& payloads) {
    for (std::size_t i = 0; i < payloads.size(); ++i) {
        TaskEnvelope t;
        t.task_id = make_task_id(i);
        t.payload = payloads[i];
        index_[t.task_id] = i;
        tasks_.push_back(std::move(t));
        pending_.push_back(i);
    }
}

std::optional<TaskEnvelope> TaskStore::lease(const std::string& worker, Clock::time_point now) {
    std::lock_guard lock(mu_);
    while (!pending_.empty()) {
        const std::size_t i = pending_.front();
        pending_.pop_front();
        TaskEnvelope& t = tasks_[i];
        if (t.state != TaskState::queued) continue;  // completed while waiting in the queue
        t.state = TaskState::leased;
        t.lease = Lease{worker, now};
        auto& rec = workers_[worker];
        rec.worker_id = worker;
        rec.last_hello = now;
        rec.current_task = t.task_id;
        return t;
    }
    return std::nullopt;
}

void TaskStore::hello(const std::string& worker, const std::string& task_id,
                      Clock::time_point now) {
    std::lock_guard lock(mu_);
    auto& rec = workers_[worker];
    rec.worker_id = worker;
    rec.last_hello = now;
    const auto it = index_.find(task_id);
    if (it == index_.end()) return;
    TaskEnvelope& t = tasks_[it->second];
    if (t.state == TaskState::leased && t.lease && t.lease->worker_id == worker) {
        t.lease->last_hello = now;
    }
}

TaskStore::SubmitOutcome TaskStore::submit(const std::string& task_id, const json& result) {
    std::lock_guard lock(mu_);
    const auto it = index_.find(task_id);
    if (it == index_.end()) return {Submit::unknown, ""};
    TaskEnvelope& t = tasks_[it->second];
    if (t.state == TaskState::done) return {Submit::duplicate, ""};
    std::string worker;
    if (t.lease) {
        worker = t.lease->worker_id;
        const auto rec = workers_.find(t.lease->worker_id);
        if (rec != workers_.end() && rec->second.current_task == task_id) {
            rec->second.current_task.reset();
        }
    }
    t.state = TaskState::done;
    t.lease.reset();
    result_payloads_[task_id] = result;
    ++done_count_;
    if (done_count_ == tasks_.size()) cv_.notify_all();
    return {Submit::accepted, worker};
}

std::vector<std::string> TaskStore::requeue_expired(Clock::time_point now, double timeout_sec) {
    std::lock_guard lock(mu_);
    std::vector<std::string> requeued;
    for (std::size_t i = 0; i < tasks_.size(); ++i) {
        TaskEnvelope& t = tasks_[i];
        if (t.state != TaskState::leased || !t.lease) continue;
        const double silent =
            std::chrono::duration<double>(now - t.lease->last_hello).count();
        if (silent <= timeout_sec) continue;
        const auto rec = workers_.find(t.lease->worker_id);
        if (rec != workers_.end() && rec->second.current_task == t.task_id) {
            rec->second.current_task.reset();
        }
        t.state = TaskState::queued;
        t.lease.reset();
        pending_.push_back(i);
        ++requeues_[t.task_id];
        requeued.push_back(t.task_id);
    }
    return requeued;
}

void TaskStore::note_worker(const std::string& worker, Clock::time_point now) {
    std::lock_guard lock(mu_);
    auto& rec = workers_[worker];
    rec.worker_id = worker;
    rec.last_hello = now;
}

bool TaskStore::all_done() const {
    std::lock_guard lock(mu_);
    return done_count_ == tasks_.size();
}

void TaskStore::wait_all_done() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return done_count_ == tasks_.size(); });
}

std::size_t TaskStore::task_count() const {
    std::lock_guard lock(mu_);
    return tasks_.size();
}

RunResult TaskStore::parse_result(const TaskEnvelope& t) const {
    RunResult r;
    r.task_id = t.task_id;
    const auto it = result_payloads_.find(t.task_id);
    if (it == result_payloads_.end()) return r;
    r.raw = it->second;
    r.total_wirelength = r.raw.value("total_wirelength", 0.0);
    if (r.raw.contains("volume") && r.raw["volume"].is_array() && r.raw["volume"].size() == 3) {
        r.volume = {r.raw["volume"][0].get<double>(), r.raw["volume"][1].get<double>(),
                    r.raw["volume"][2].get<int>()};
    }
    if (r.raw.contains("placement")) r.placement = r.raw["placement"];
    return r;
}

std::vector<RunResult> TaskStore::results() const {
    std::lock_guard lock(mu_);
    std::vector<RunResult> out;
    out.reserve(tasks_.size());
    for (const auto& t : tasks_) {
        if (t.state == TaskState::done) out.push_back(parse_result(t));
    }
    return out;
}

std::map<std::string, int> TaskStore::requeue_counts() const {
    std::lock_guard lock(mu_);
    return requeues_;
}

std::vector<WorkerRecord> TaskStore::workers() const {
    std::lock_guard lock(mu_);
    std::vector<WorkerRecord> out;
    for (const auto& [_, rec] : workers_) out.push_back(rec);
    return out;
}

std::size_t best_result_index(const std::vector<RunResult>& results) {
    std::size_t best = static_cast<std::size_t>(-1);
    for (std::size_t i = 0; i < results.size(); ++i) {
        const RunResult& r = results[i];
        if (r.failed() || !r.raw.contains("total_wirelength")) continue;
        if (best == static_cast<std::size_t>(-1)) {
            best = i;
            continue;
        }
        const RunResult& b = results[best];
        const auto key = [](const RunResult& x) {
            return std::make_tuple(x.total_wirelength, x.volume.product(), x.task_id);
        };
        if (key(r) < key(b)) best = i;
    }
    return best;
}

nlohmann::json ServeReport::to_json() const {
    json rows = json::array();
    for (const auto& r : results) {
        json row{{"task_id", r.task_id}};
        if (r.failed()) {
            row["error"] = r.raw["error"];
        } else {
            row["total_wirelength"] = r.total_wirelength;
            row["volume"] = {r.volume.vx, r.volume.vy, r.volume.layers};
        }
        rows.push_back(row);
    }
    json out{{"results", rows}, {"requeues", requeues}};
    if (has_best()) {
        out["best"] = best().raw;
        out["best_task"] = best().task_id;
    }
    return out;
}

namespace {

struct HandlerPool {
    std::mutex mu;
    std::vector<std::thread> threads;

    void add(std::thread t) {
        std::lock_guard lock(mu);
        threads.push_back(std::move(t));
    }
    void join_all() {
        std::lock_guard lock(mu);
        for (auto& t : threads) {
            if (t.joinable()) t.join();
        }
        threads.clear();
    }
};

}  // namespace

ServeReport serve(const ServeConfig& config) {
    if (!(config.timeout > config.hello_period)) {
        throw ConfigInvalid("timeout must exceed the hello period");
    }
    if (config.payloads.empty()) throw ConfigInvalid("no tasks to serve");

    TaskStore store(config.payloads);
    net::Listener listener(config.port);
    if (config.on_listening) config.on_listening(listener.port());

    std::mutex observer_mu;
    const auto emit = [&](ServerEvent::Kind kind, const std::string& task,
                          const std::string& worker) {
        if (!config.observer) return;
        std::lock_guard lock(observer_mu);
        config.observer({kind, task, worker});
    };

    std::atomic<bool> stopping{false};

    std::thread monitor([&] {
        const auto tick = std::chrono::duration<double>(
            std::clamp(config.timeout / 4.0, 0.005, 0.5));
        while (!stopping.load()) {
            std::this_thread::sleep_for(tick);
            for (const auto& id : store.requeue_expired(TaskStore::Clock::now(), config.timeout)) {
                emit(ServerEvent::Kind::requeued, id, "");
            }
        }
    });

    HandlerPool handlers;
    std::thread acceptor([&] {
        while (auto conn = listener.accept()) {
            handlers.add(std::thread(
                [&store, &emit, &stopping](net::Conn c) {
                    while (c.ok()) {
                        auto line = c.recv_line(0.5);
                        if (!line) {
                            if (!c.ok() || stopping.load()) break;
                            continue;
                        }
                        json msg;
                        try {
                            msg = json::parse(*line);
                        } catch (const json::exception&) {
                            c.send_line(R"({"type":"error","reason":"bad json"})");
                            continue;
                        }
                        const std::string type = msg.value("type", "");
                        const std::string worker = msg.value("worker_id", "");
                        const auto now = TaskStore::Clock::now();
                        if (type == "register") {
                            store.note_worker(worker, now);
                            emit(ServerEvent::Kind::worker_joined, "", worker);
                            c.send_line(R"({"type":"ack"})");
                        } else if (type == "fetch") {
                            if (store.all_done()) {
                                c.send_line(R"({"type":"shutdown"})");
                            } else if (auto task = store.lease(worker, now)) {
                                emit(ServerEvent::Kind::leased, task->task_id, worker);
                                c.send_line(json{{"type", "task"},
                                                 {"task_id", task->task_id},
                                                 {"payload", task->payload}}
                                                .dump());
                            } else {
                                c.send_line(R"({"type":"no_task"})");
                            }
                        } else if (type == "hello") {
                            store.hello(worker, msg.value("task_id", ""), now);
                            emit(ServerEvent::Kind::hello, msg.value("task_id", ""), worker);
                            c.send_line(R"({"type":"ack"})");
                        } else if (type == "result") {
                            const std::string task_id = msg.value("task_id", "");
                            const auto outcome = store.submit(task_id, msg.value("payload", json::object()));
                            if (outcome.status == TaskStore::Submit::accepted) {
                                emit(ServerEvent::Kind::completed, task_id, outcome.worker);
                            } else if (outcome.status == TaskStore::Submit::duplicate) {
                                emit(ServerEvent::Kind::duplicate_discarded, task_id, worker);
                            }
                            c.send_line(R"({"type":"ack"})");
                        } else {
                            c.send_line(R"({"type":"error","reason":"unknown message type"})");
                        }
                    }
                },
                std::move(*conn)));
        }
    });

    std::thread embedded;
    if (config.embed_worker) {
        embedded = std::thread([&] {
            WorkConfig wc;
            wc.port = listener.port();
            wc.worker_id = "server-embedded";
            wc.hello_period = config.hello_period;
            work(wc);
        });
    }

    store.wait_all_done();

    // drain: answer remaining fetches with shutdown before closing the port
    std::this_thread::sleep_for(std::chrono::duration<double>(config.drain_window));
    stopping.store(true);
    listener.close();
    acceptor.join();
    handlers.join_all();
    monitor.join();
    if (embedded.joinable()) embedded.join();

    ServeReport report;
    report.results = store.results();
    report.requeues = store.requeue_counts();
    report.best_index = best_result_index(report.results);
    return report;
}

namespace {

std::optional<json> request(const WorkConfig& config, const json& msg, double timeout) {
    try {
        net::Conn conn = net::dial(config.host, config.port, timeout);
        if (!conn.send_line(msg.dump())) return std::nullopt;
        const auto line = conn.recv_line(timeout);
        if (!line) return std::nullopt;
        return json::parse(*line, nullptr, false);
    } catch (const ConnectFailure&) {
        return std::nullopt;
    }
}

}  // namespace

long work(const WorkConfig& config) {
    const TaskRegistry& registry = config.registry ? *config.registry : TaskRegistry::defaults();
    const std::string worker_id =
        config.worker_id.empty() ? "worker" : config.worker_id;
    long tasks_done = 0;

    // register, with bounded retries while the server comes up
    bool registered = false;
    double backoff = 0.1;
    for (int attempt = 0; attempt < config.connect_retries; ++attempt) {
        if (request(config, json{{"type", "register"}, {"worker_id", worker_id}}, 2.0)) {
            registered = true;
            break;
        }
        std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
        backoff = std::min(backoff * 1.7, 2.0);
    }
    if (!registered) {
        throw ConnectFailure("server " + config.host + ":" + std::to_string(config.port) +
                             " unreachable");
    }

    int consecutive_failures = 0;
    double idle = 0.05;
    for (;;) {
        const auto resp = request(config, json{{"type", "fetch"}, {"worker_id", worker_id}}, 5.0);
        if (!resp || resp->is_discarded()) {
            if (++consecutive_failures >= 5) return tasks_done;  // server gone; exit cleanly
            std::this_thread::sleep_for(std::chrono::duration<double>(0.2));
            continue;
        }
        consecutive_failures = 0;
        const std::string type = resp->value("type", "");
        if (type == "shutdown") return tasks_done;
        if (type == "no_task") {
            std::this_thread::sleep_for(std::chrono::duration<double>(idle));
            idle = std::min(idle * 1.6, std::max(config.hello_period, 0.2));
            continue;
        }
        if (type != "task") continue;
        idle = 0.05;

        const std::string task_id = resp->value("task_id", "");
        const json payload = resp->value("payload", json::object());

        std::atomic<bool> finished{false};
        std::thread heartbeat([&] {
            while (!finished.load()) {
                const auto slice = std::chrono::duration<double>(
                    std::min(config.hello_period / 4.0, 0.05));
                const auto until = std::chrono::steady_clock::now() +
                                   std::chrono::duration<double>(config.hello_period);
                while (!finished.load() && std::chrono::steady_clock::now() < until) {
                    std::this_thread::sleep_for(slice);
                }
                if (finished.load()) break;
                request(config,
                        json{{"type", "hello"}, {"worker_id", worker_id}, {"task_id", task_id}},
                        2.0);
            }
        });

        json result;
        try {
            result = registry.execute(payload);
        } catch (const std::exception& e) {
            result = json{{"error", e.what()}};
        }
        finished.store(true);
        heartbeat.join();

        // a few delivery attempts; on failure the local work is discarded and
        // the server requeues after its timeout
        for (int attempt = 0; attempt < 3; ++attempt) {
            if (request(config,
                        json{{"type", "result"}, {"task_id", task_id}, {"payload", result}}, 5.0)) {
                ++tasks_done;
                break;
            }
            std::this_thread::sleep_for(std::chrono::duration<double>(0.2));
        }
    }
}

ServeReport run_parallel(const std::vector<json>& payloads, int worker_count,
                         const TaskRegistry* registry) {
    if (worker_count < 1) throw ConfigInvalid("worker_count must be >= 1");
    const TaskRegistry& reg = registry ? *registry : TaskRegistry::defaults();

    std::vector<json> results(payloads.size());
    std::atomic<std::size_t> next{0};
    const int threads = static_cast<int>(
        std::min<std::size_t>(static_cast<std::size_t>(worker_count), payloads.size()));
    std::vector<std::thread> pool;
    for (int w = 0; w < std::max(threads, 1); ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= payloads.size()) return;
                try {
                    results[i] = reg.execute(payloads[i]);
                } catch (const std::exception& e) {
                    results[i] = json{{"error", e.what()}};
                }
            }
        });
    }
    for (auto& t : pool) t.join();

    ServeReport report;
    for (std::size_t i = 0; i < payloads.size(); ++i) {
        RunResult r;
        r.task_id = make_task_id(i);
        r.raw = results[i];
        r.total_wirelength = r.raw.value("total_wirelength", 0.0);
        if (r.raw.contains("volume") && r.raw["volume"].is_array() && r.raw["volume"].size() == 3) {
            r.volume = {r.raw["volume"][0].get<double>(), r.raw["volume"][1].get<double>(),
                        r.raw["volume"][2].get<int>()};
        }
        if (r.raw.contains("placement")) r.placement = r.raw["placement"];
        report.results.push_back(std::move(r));
    }
    report.best_index = best_result_index(report.results);
    return report;
}

}  // namespace fp3d
