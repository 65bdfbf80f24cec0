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

#include "tofec/engine.h"

#include <algorithm>
#include <cmath>

#include "tofec/errors.h"

namespace tofec {

ArrivalProcess ArrivalProcess::poisson(double rate_per_ms) {
  ArrivalProcess a;
  a.kind = Kind::poisson;
  a.rate_per_ms = rate_per_ms;
  return a;
}

ArrivalProcess ArrivalProcess::phased(std::vector<RatePhase> phases) {
  ArrivalProcess a;
  a.kind = Kind::phased;
  a.phases = std::move(phases);
  return a;
}

ArrivalProcess ArrivalProcess::trace(std::vector<double> timestamps_ms,
                                     std::vector<std::size_t> classes) {
  ArrivalProcess a;
  a.kind = Kind::trace;
  a.timestamps_ms = std::move(timestamps_ms);
  a.trace_classes = std::move(classes);
  return a;
}

void ArrivalProcess::validate() const {
  switch (kind) {
    case Kind::poisson:
      if (!(rate_per_ms >= 0) || !std::isfinite(rate_per_ms)) {
        throw InputError("arrival rate must be finite and non-negative");
      }
      break;
    case Kind::phased:
      if (phases.empty()) throw InputError("phased arrivals need at least one phase");
      for (const auto& p : phases) {
        if (!(p.duration_ms > 0)) throw InputError("phase duration must be positive");
        if (!(p.rate_per_ms >= 0) || !std::isfinite(p.rate_per_ms)) {
          throw InputError("phase rate must be finite and non-negative");
        }
      }
      break;
    case Kind::trace:
      for (std::size_t i = 0; i < timestamps_ms.size(); ++i) {
        if (!(timestamps_ms[i] >= 0)) throw InputError("trace timestamps must be >= 0");
        if (i > 0 && timestamps_ms[i] < timestamps_ms[i - 1]) {
          throw InputError("trace timestamps must be non-decreasing");
        }
      }
      if (!trace_classes.empty() && trace_classes.size() != timestamps_ms.size()) {
        throw InputError("trace class list must match the timestamps");
      }
      break;
  }
}

double ParametricSampler::sample(std::size_t, const ClassSpec& cls,
                                 double chunk_mb, Rng& rng) {
  return delay_floor(cls.params, chunk_mb) +
         rng.exponential(tail_mean(cls.params, chunk_mb));
}

std::unique_ptr<DelaySampler> ParametricSampler::clone() const {
  return std::make_unique<ParametricSampler>();
}

EmpiricalSampler::EmpiricalSampler(std::map<double, std::vector<double>> pools,
                                   std::optional<DelayParams> fitted)
    : pools_(std::move(pools)), fitted_(std::move(fitted)) {
  if (pools_.empty()) throw InputError("empirical sampler needs at least one pool");
  for (const auto& [size, pool] : pools_) {
    if (!(size > 0)) throw InputError("pool chunk size must be positive");
    if (pool.empty()) throw InputError("empty delay pool for chunk size " + std::to_string(size));
  }
}

double EmpiricalSampler::sample(std::size_t, const ClassSpec&, double chunk_mb,
                                Rng& rng) {
  // Nearest pool, with exact matches up to rounding in J / k.
  auto hi = pools_.lower_bound(chunk_mb);
  auto nearest = hi;
  if (hi == pools_.end()) {
    nearest = std::prev(hi);
  } else if (hi != pools_.begin()) {
    auto lo = std::prev(hi);
    if (chunk_mb - lo->first < hi->first - chunk_mb) nearest = lo;
  }
  const double pool_size = nearest->first;
  const auto& pool = nearest->second;
  const double x = pool[rng.below(pool.size())];
  if (std::abs(pool_size - chunk_mb) <= 1e-9 * std::max(1.0, chunk_mb)) return x;
  if (!fitted_) {
    throw InputError("no delay pool for chunk size " + std::to_string(chunk_mb) +
                     " MB and no fitted parameters to rescale with");
  }
  const double from_tail = tail_mean(*fitted_, pool_size);
  const double to_tail = tail_mean(*fitted_, chunk_mb);
  const double scale = from_tail > 0 ? to_tail / from_tail : 1.0;
  return (x - delay_floor(*fitted_, pool_size)) * scale +
         delay_floor(*fitted_, chunk_mb);
}

std::unique_ptr<DelaySampler> EmpiricalSampler::clone() const {
  return std::make_unique<EmpiricalSampler>(pools_, fitted_);
}

ScriptedSampler::ScriptedSampler(std::vector<double> delays)
    : delays_(std::move(delays)) {
  for (double d : delays_) {
    if (!(d >= 0)) throw InputError("scripted delays must be non-negative");
  }
}

double ScriptedSampler::sample(std::size_t, const ClassSpec&, double, Rng&) {
  if (next_ >= delays_.size()) throw InputError("scripted delay list exhausted");
  return delays_[next_++];
}

std::unique_ptr<DelaySampler> ScriptedSampler::clone() const {
  return std::make_unique<ScriptedSampler>(delays_);
}

std::string to_string(LeftoverPolicy p) {
  return p == LeftoverPolicy::cancel ? "cancel" : "complete";
}

LeftoverPolicy leftover_policy_from_string(const std::string& s) {
  if (s == "cancel") return LeftoverPolicy::cancel;
  if (s == "complete") return LeftoverPolicy::complete;
  throw InputError("unknown leftover policy '" + s + "'");
}

Simulator::Simulator(SystemSpec system, ArrivalProcess arrivals,
                     DelaySampler& sampler, CodeSelector& selector,
                     RunOptions options)
    : system_(std::move(system)),
      arrivals_(std::move(arrivals)),
      sampler_(sampler),
      selector_(selector),
      options_(std::move(options)),
      warmup_ms_(options_.effective_warmup()),
      arrival_rng_(Rng::substream(options_.seed, "arrivals")),
      class_rng_(Rng::substream(options_.seed, "classes")) {
  system_.validate();
  arrivals_.validate();
  if (!(options_.horizon_ms > 0) || !(warmup_ms_ >= 0) ||
      !(options_.horizon_ms > warmup_ms_)) {
    throw InputError("run requires horizon > warmup >= 0");
  }
  if (options_.overload_bound < 1) throw InputError("overload bound must be >= 1");
  for (int i = 0; i < system_.threads; ++i) {
    thread_rngs_.push_back(Rng::substream(options_.seed, "task_delay", i));
  }
  // Lowest thread id is handed out first.
  for (int i = system_.threads - 1; i >= 0; --i) idle_.push_back(i);
  double acc = 0;
  for (const auto& c : system_.classes) {
    acc += c.popularity;
    cumulative_popularity_.push_back(acc);
  }
  if (arrivals_.kind == ArrivalProcess::Kind::phased) {
    phase_end_ = arrivals_.phases.front().duration_ms;
  }
  schedule_next_arrival();
}

std::size_t Simulator::draw_class() {
  if (system_.classes.size() == 1) return 0;
  const double u = class_rng_.uniform() * cumulative_popularity_.back();
  auto it = std::upper_bound(cumulative_popularity_.begin(),
                             cumulative_popularity_.end(), u);
  return std::min<std::size_t>(it - cumulative_popularity_.begin(),
                               system_.classes.size() - 1);
}

std::optional<double> Simulator::next_arrival_time() {
  switch (arrivals_.kind) {
    case ArrivalProcess::Kind::poisson:
      if (arrivals_.rate_per_ms == 0) return std::nullopt;
      arrival_clock_ += arrival_rng_.exponential(1.0 / arrivals_.rate_per_ms);
      pending_class_ = draw_class();
      return arrival_clock_;
    case ArrivalProcess::Kind::phased:
      // Memoryless: a draw that overshoots the phase end restarts there.
      while (phase_index_ < arrivals_.phases.size()) {
        const double rate = arrivals_.phases[phase_index_].rate_per_ms;
        if (rate > 0) {
          const double t = arrival_clock_ + arrival_rng_.exponential(1.0 / rate);
          if (t < phase_end_) {
            arrival_clock_ = t;
            pending_class_ = draw_class();
            return t;
          }
        }
        arrival_clock_ = phase_end_;
        ++phase_index_;
        if (phase_index_ < arrivals_.phases.size()) {
          phase_end_ += arrivals_.phases[phase_index_].duration_ms;
        }
      }
      return std::nullopt;
    case ArrivalProcess::Kind::trace:
      if (trace_index_ >= arrivals_.timestamps_ms.size()) return std::nullopt;
      pending_class_ = arrivals_.trace_classes.empty()
                           ? draw_class()
                           : arrivals_.trace_classes[trace_index_];
      if (pending_class_ >= system_.classes.size()) {
        throw InputError("trace refers to an unknown class");
      }
      return arrivals_.timestamps_ms[trace_index_++];
  }
  return std::nullopt;
}

void Simulator::schedule_next_arrival() {
  if (auto t = next_arrival_time(); t && *t < options_.horizon_ms) {
    events_.push({*t, EventKind::arrival, seq_++, 0});
  }
}

bool Simulator::step() {
  if (finished_) return false;
  if (events_.empty() || events_.top().time >= options_.horizon_ms) {
    now_ = options_.horizon_ms;
    finish();
    return false;
  }
  const Event ev = events_.top();
  events_.pop();
  now_ = ev.time;
  if (ev.kind == EventKind::arrival) {
    on_arrival(ev.time);
  } else {
    on_completion(ev.time, ev.task);
  }
  if (options_.observer) options_.observer(snapshot());
  if (overloaded_) {
    finish();
    return false;
  }
  return true;
}

SimResult Simulator::run_to_end() {
  while (step()) {
  }
  return result();
}

void Simulator::on_arrival(double t) {
  const std::size_t cls = pending_class_;
  ArrivalContext ctx{cls, t, queue_length(), idle_threads()};
  const CodeChoice code = selector_.select(ctx);
  code.validate();

  RequestRecord rec;
  rec.id = records_.size();
  rec.class_id = cls;
  rec.arrival_ms = t;
  rec.code = code;
  rec.backlog_at_arrival = ctx.queue_length;
  rec.idle_at_arrival = ctx.idle_threads;
  rec.post_warmup = t >= warmup_ms_;
  records_.push_back(rec);
  first_task_.push_back(kNoTask);
  request_queue_.push_back(rec.id);

  dispatch(t);
  if (request_queue_.size() > options_.overload_bound) {
    overloaded_ = true;
    return;
  }
  schedule_next_arrival();
}

void Simulator::on_completion(double t, std::size_t task_id) {
  Task& task = tasks_[task_id];
  // Completion events of preempted tasks are left in the heap.
  if (task.status != TaskStatus::running) return;
  task.status = TaskStatus::done;
  --running_tasks_;
  idle_.push_back(task.thread);

  RequestRecord& rec = records_[task.request];
  rec.usage += task.delay_ms;
  ++rec.tasks_done;
  if (rec.tasks_done == rec.code.k) complete_request(t, task.request);
  dispatch(t);
}

void Simulator::complete_request(double t, std::uint64_t req) {
  RequestRecord& rec = records_[req];
  rec.completion_ms = t;
  if (options_.leftover == LeftoverPolicy::complete) return;
  const std::size_t first = first_task_[req];
  for (int j = 0; j < rec.code.n; ++j) {
    Task& sib = tasks_[first + j];
    if (sib.status == TaskStatus::running) {
      sib.status = TaskStatus::preempted;
      rec.usage += t - sib.start_ms;
      --running_tasks_;
      idle_.push_back(sib.thread);
    } else if (sib.status == TaskStatus::queued) {
      sib.status = TaskStatus::canceled;
      --queued_tasks_;
    }
  }
}

void Simulator::dispatch(double t) {
  while (!idle_.empty()) {
    if (queued_tasks_ > 0) {
      const std::size_t id = task_queue_.front();
      task_queue_.pop_front();
      if (tasks_[id].status != TaskStatus::queued) continue;  // canceled
      --queued_tasks_;
      start_task(t, id);
      continue;
    }
    task_queue_.clear();  // only canceled leftovers remain
    if (request_queue_.empty()) break;
    const std::uint64_t req = request_queue_.front();
    request_queue_.pop_front();
    RequestRecord& rec = records_[req];
    rec.dispatch_ms = t;
    first_task_[req] = tasks_.size();
    for (int j = 0; j < rec.code.n; ++j) {
      tasks_.push_back(Task{req});
      task_queue_.push_back(tasks_.size() - 1);
    }
    queued_tasks_ += rec.code.n;
  }
}

void Simulator::start_task(double t, std::size_t task_id) {
  const int thread = idle_.back();
  idle_.pop_back();
  Task& task = tasks_[task_id];
  const RequestRecord& rec = records_[task.request];
  const ClassSpec& cls = system_.classes[rec.class_id];
  const double chunk = cls.file_size_mb / rec.code.k;
  task.delay_ms = sampler_.sample(rec.class_id, cls, chunk, thread_rngs_[thread]);
  task.start_ms = t;
  task.thread = thread;
  task.status = TaskStatus::running;
  ++running_tasks_;
  events_.push({t + task.delay_ms, EventKind::completion, seq_++, task_id});
}

void Simulator::finish() { finished_ = true; }

EngineSnapshot Simulator::snapshot() const {
  return {now_, idle_threads(), queued_tasks_, running_tasks_, queue_length()};
}

std::vector<TaskStatus> Simulator::task_statuses(std::uint64_t request_id) const {
  std::vector<TaskStatus> out;
  if (request_id >= records_.size() || first_task_[request_id] == kNoTask) return out;
  const std::size_t first = first_task_[request_id];
  for (int j = 0; j < records_[request_id].code.n; ++j) {
    out.push_back(tasks_[first + j].status);
  }
  return out;
}

SimResult Simulator::result() const {
  SimResult r;
  r.strategy = selector_.name();
  r.requests = records_;
  r.overloaded = overloaded_;
  r.horizon_ms = options_.horizon_ms;
  r.warmup_ms = warmup_ms_;
  r.end_ms = overloaded_ ? now_ : options_.horizon_ms;
  r.arrivals = records_.size();
  for (const auto& rec : records_) {
    if (rec.completed()) {
      ++r.completed;
    } else if (rec.dispatch_ms >= 0) {
      ++r.in_flight;
    } else {
      ++r.waiting;
    }
  }
  return r;
}

SimResult run(const SystemSpec& system, const ArrivalProcess& arrivals,
              DelaySampler& sampler, CodeSelector& selector,
              const RunOptions& options) {
  Simulator sim(system, arrivals, sampler, selector, options);
  return sim.run_to_end();
}

}  // namespace tofec
