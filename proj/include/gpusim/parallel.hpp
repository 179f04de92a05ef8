#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace gpusim {

struct SchedulePolicy {
  enum class Kind { Sequential, Static, Dynamic };

  Kind kind = Kind::Sequential;
  std::uint32_t workers = 1;  // ignored for Sequential
  std::uint32_t chunk = 1;

  static SchedulePolicy sequential() { return {}; }
  static SchedulePolicy make_static(std::uint32_t workers, std::uint32_t chunk = 1) {
    return {Kind::Static, workers, chunk};
  }
  static SchedulePolicy dynamic(std::uint32_t workers, std::uint32_t chunk = 1) {
    return {Kind::Dynamic, workers, chunk};
  }

  std::uint32_t effective_workers() const { return kind == Kind::Sequential ? 1 : workers; }
  std::string label() const;
};

std::string_view to_string(SchedulePolicy::Kind kind);
SchedulePolicy::Kind parse_schedule_kind(std::string_view name);

// Static schedule: iteration i belongs to worker (i / chunk) mod workers and
// each worker walks its iterations in ascending order.
inline std::uint32_t static_owner(std::size_t i, std::uint32_t chunk, std::uint32_t workers) {
  return static_cast<std::uint32_t>((i / chunk) % workers);
}

// Persistent pool that runs parallel-for loops under a SchedulePolicy. The
// calling thread participates as worker 0 and every call returns only after
// all iterations finished.
//
// Unless `oversubscribe` is set, the number of OS threads is capped at the
// hardware concurrency; logical workers beyond that are multiplexed onto the
// available threads (static assignments are preserved).
class WorkerPool {
 public:
  explicit WorkerPool(SchedulePolicy policy, bool oversubscribe = false);
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  // body(index, worker): `worker` is the logical static worker, or the
  // claiming thread for dynamic schedules.
  template <typename Body>
  void parallel_for(std::size_t n, Body&& body) {
    auto thunk = [](void* ctx, std::size_t i, std::uint32_t w) {
      (*static_cast<std::remove_reference_t<Body>*>(ctx))(i, w);
    };
    run(n, thunk, const_cast<void*>(static_cast<const void*>(&body)));
  }

  const SchedulePolicy& policy() const { return policy_; }
  std::uint32_t threads() const { return threads_; }

 private:
  using Thunk = void (*)(void*, std::size_t, std::uint32_t);

  void run(std::size_t n, Thunk fn, void* ctx);
  void run_share(std::uint32_t thread_index);
  void worker_loop(std::uint32_t thread_index);

  SchedulePolicy policy_;
  std::uint32_t threads_ = 1;
  std::uint32_t spin_limit_ = 0;
  std::vector<std::thread> pool_;

  // Current job; written before `epoch_` is bumped.
  Thunk fn_ = nullptr;
  void* ctx_ = nullptr;
  std::size_t n_ = 0;
  alignas(64) std::atomic<std::size_t> next_{0};
  alignas(64) std::atomic<std::uint64_t> epoch_{0};
  alignas(64) std::atomic<std::uint32_t> pending_{0};
  std::atomic<bool> stop_{false};

  std::mutex error_mu_;
  std::exception_ptr error_;
};

}  // namespace gpusim
