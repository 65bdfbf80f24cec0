// Copyright 2026 The tofec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Discrete-event model of a storage proxy: a FIFO request queue feeding a
// FIFO task queue served by L threads.
//
// A request of class i coded with (n, k) leaves the request queue only when
// some thread is idle and the task queue is empty; it then fans out into n
// tasks of size J_i / k. Idle threads take tasks in FIFO order and the
// task's delay is drawn when it starts. The k-th finished task completes
// the request; under LeftoverPolicy::cancel the running siblings are
// preempted at that instant and queued ones are dropped.
//
// Events at the same timestamp are ordered completions, cancellations,
// dispatches, then arrivals; ties within a category go by sequence number.

#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "tofec/model.h"
#include "tofec/random.h"
#include "tofec/strategies.h"

namespace tofec {

struct ArrivalProcess {
  enum class Kind { poisson, phased, trace };

  Kind kind = Kind::poisson;
  double rate_per_ms = 0;
  std::vector<RatePhase> phases;
  std::vector<double> timestamps_ms;      // trace kind, non-decreasing
  std::vector<std::size_t> trace_classes;  // optional, parallel to timestamps

  static ArrivalProcess poisson(double rate_per_ms);
  static ArrivalProcess phased(std::vector<RatePhase> phases);
  static ArrivalProcess trace(std::vector<double> timestamps_ms,
                              std::vector<std::size_t> classes = {});

  void validate() const;
};

// Draws task delays. Implementations other than ScriptedSampler are
// stateless and may be shared between concurrent runs.
class DelaySampler {
 public:
  virtual ~DelaySampler() = default;
  virtual double sample(std::size_t class_id, const ClassSpec& cls,
                        double chunk_mb, Rng& rng) = 0;
  virtual std::unique_ptr<DelaySampler> clone() const = 0;
};

// floor(B) + Exp(tail(B)) from the class's own delay parameters.
class ParametricSampler final : public DelaySampler {
 public:
  double sample(std::size_t class_id, const ClassSpec& cls, double chunk_mb,
                Rng& rng) override;
  std::unique_ptr<DelaySampler> clone() const override;
};

// Resamples measured task delays. Pools are keyed by chunk size; a chunk
// size with no pool is served from the nearest pool B', rescaled through the
// fitted law as (x - floor(B')) * tail(B) / tail(B') + floor(B).
class EmpiricalSampler final : public DelaySampler {
 public:
  EmpiricalSampler(std::map<double, std::vector<double>> pools,
                   std::optional<DelayParams> fitted = std::nullopt);

  double sample(std::size_t class_id, const ClassSpec& cls, double chunk_mb,
                Rng& rng) override;
  std::unique_ptr<DelaySampler> clone() const override;

  const std::map<double, std::vector<double>>& pools() const { return pools_; }
  const std::optional<DelayParams>& fitted() const { return fitted_; }

 private:
  std::map<double, std::vector<double>> pools_;
  std::optional<DelayParams> fitted_;
};

// Replays a fixed list of delays in task-start order.
class ScriptedSampler final : public DelaySampler {
 public:
  explicit ScriptedSampler(std::vector<double> delays);
  double sample(std::size_t class_id, const ClassSpec& cls, double chunk_mb,
                Rng& rng) override;
  std::unique_ptr<DelaySampler> clone() const override;

 private:
  std::vector<double> delays_;
  std::size_t next_ = 0;
};

enum class LeftoverPolicy { cancel, complete };

std::string to_string(LeftoverPolicy p);
LeftoverPolicy leftover_policy_from_string(const std::string& s);

enum class TaskStatus { queued, running, done, canceled, preempted };

struct EngineSnapshot {
  double now_ms = 0;
  int idle_threads = 0;
  int queued_tasks = 0;
  int running_tasks = 0;
  int waiting_requests = 0;
};

struct RunOptions {
  double horizon_ms = 0;
  // Negative selects the default of 10% of the horizon.
  double warmup_ms = -1;
  std::uint64_t seed = 1;
  LeftoverPolicy leftover = LeftoverPolicy::cancel;
  std::size_t overload_bound = 100000;
  // Called after every processed event.
  std::function<void(const EngineSnapshot&)> observer;

  double effective_warmup() const { return warmup_ms < 0 ? 0.1 * horizon_ms : warmup_ms; }
};

struct RequestRecord {
  std::uint64_t id = 0;
  std::size_t class_id = 0;
  double arrival_ms = 0;
  double dispatch_ms = -1;    // first task start; -1 while waiting
  double completion_ms = -1;  // k-th task completion; -1 while unfinished
  CodeChoice code;
  double usage = 0;  // thread-ms
  int backlog_at_arrival = 0;
  int idle_at_arrival = 0;
  int tasks_done = 0;
  bool post_warmup = false;

  bool completed() const { return completion_ms >= 0; }
  double queueing_delay() const { return dispatch_ms - arrival_ms; }
  double service_delay() const { return completion_ms - dispatch_ms; }
  double total_delay() const { return completion_ms - arrival_ms; }
};

struct SimResult {
  std::string strategy;
  std::vector<RequestRecord> requests;  // in arrival order
  bool overloaded = false;
  double horizon_ms = 0;
  double warmup_ms = 0;
  double end_ms = 0;  // horizon, or the instant the overload bound tripped
  std::size_t arrivals = 0;
  std::size_t completed = 0;
  std::size_t in_flight = 0;  // dispatched, not yet complete
  std::size_t waiting = 0;    // still in the request queue
};

// Single-run event loop. Not thread-safe; independent runs may proceed on
// separate threads as long as each owns its sampler and selector.
class Simulator {
 public:
  Simulator(SystemSpec system, ArrivalProcess arrivals, DelaySampler& sampler,
            CodeSelector& selector, RunOptions options);

  // Processes the next event; returns false once the run is over.
  bool step();
  SimResult run_to_end();

  // Waiting requests, in-service ones excluded.
  int queue_length() const { return static_cast<int>(request_queue_.size()); }
  int idle_threads() const { return static_cast<int>(idle_.size()); }
  EngineSnapshot snapshot() const;
  double now() const { return now_; }
  bool finished() const { return finished_; }

  // Statuses of a request's tasks; empty before dispatch.
  std::vector<TaskStatus> task_statuses(std::uint64_t request_id) const;

  SimResult result() const;

 private:
  struct Task {
    std::uint64_t request = 0;
    double start_ms = -1;
    double delay_ms = 0;
    int thread = -1;
    TaskStatus status = TaskStatus::queued;
  };
  enum class EventKind : int { completion = 0, arrival = 1 };
  struct Event {
    double time;
    EventKind kind;
    std::uint64_t seq;
    std::size_t task;
    bool operator>(const Event& o) const {
      if (time != o.time) return time > o.time;
      if (kind != o.kind) return kind > o.kind;
      return seq > o.seq;
    }
  };

  void schedule_next_arrival();
  void on_arrival(double t);
  void on_completion(double t, std::size_t task_id);
  void complete_request(double t, std::uint64_t req);
  void dispatch(double t);
  void start_task(double t, std::size_t task_id);
  void finish();
  std::optional<double> next_arrival_time();
  std::size_t draw_class();

  SystemSpec system_;
  ArrivalProcess arrivals_;
  DelaySampler& sampler_;
  CodeSelector& selector_;
  RunOptions options_;
  double warmup_ms_;

  Rng arrival_rng_;
  Rng class_rng_;
  std::vector<Rng> thread_rngs_;
  std::vector<double> cumulative_popularity_;

  // Arrival stream cursor.
  double arrival_clock_ = 0;
  std::size_t phase_index_ = 0;
  double phase_end_ = 0;
  std::size_t trace_index_ = 0;
  std::size_t pending_class_ = 0;

  std::priority_queue<Event, std::vector<Event>, std::greater<Event>> events_;
  std::uint64_t seq_ = 0;
  std::vector<RequestRecord> records_;
  static constexpr std::size_t kNoTask = static_cast<std::size_t>(-1);
  std::vector<std::size_t> first_task_;  // per request, tasks are contiguous
  std::vector<Task> tasks_;
  std::deque<std::size_t> task_queue_;
  int queued_tasks_ = 0;
  int running_tasks_ = 0;
  std::deque<std::uint64_t> request_queue_;
  std::vector<int> idle_;
  double now_ = 0;
  bool finished_ = false;
  bool overloaded_ = false;
};

SimResult run(const SystemSpec& system, const ArrivalProcess& arrivals,
              DelaySampler& sampler, CodeSelector& selector,
              const RunOptions& options);

}  // namespace tofec
