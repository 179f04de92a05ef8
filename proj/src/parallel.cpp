#include "gpusim/parallel.hpp"

#include <algorithm>
#include <stdexcept>

namespace gpusim {

std::string_view to_string(SchedulePolicy::Kind kind) {
  switch (kind) {
    case SchedulePolicy::Kind::Sequential: return "seq";
    case SchedulePolicy::Kind::Static: return "static";
    case SchedulePolicy::Kind::Dynamic: return "dynamic";
  }
  return "?";
}

SchedulePolicy::Kind parse_schedule_kind(std::string_view name) {
  if (name == "seq" || name == "sequential") return SchedulePolicy::Kind::Sequential;
  if (name == "static") return SchedulePolicy::Kind::Static;
  if (name == "dynamic") return SchedulePolicy::Kind::Dynamic;
  throw std::invalid_argument("unknown schedule: " + std::string(name));
}

std::string SchedulePolicy::label() const {
  if (kind == Kind::Sequential) return "seq";
  return std::string(to_string(kind)) + "-" + std::to_string(workers) +
         (chunk != 1 ? "/" + std::to_string(chunk) : "");
}

namespace {

inline void cpu_relax() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_ia32_pause();
#else
  std::this_thread::yield();
#endif
}

}  // namespace

WorkerPool::WorkerPool(SchedulePolicy policy, bool oversubscribe) : policy_(policy) {
  if (policy_.workers == 0) throw std::invalid_argument("workers must be positive");
  if (policy_.chunk == 0) throw std::invalid_argument("chunk must be positive");
  const std::uint32_t logical = policy_.effective_workers();
  const std::uint32_t hw = std::max(1u, std::thread::hardware_concurrency());
  threads_ = oversubscribe ? logical : std::min(logical, hw);
  // Spinning only pays off when every thread has a core of its own.
  spin_limit_ = threads_ <= hw ? 4096 : 0;
  pool_.reserve(threads_ - 1);
  for (std::uint32_t t = 1; t < threads_; ++t) pool_.emplace_back([this, t] { worker_loop(t); });
}

WorkerPool::~WorkerPool() {
  stop_.store(true, std::memory_order_relaxed);
  epoch_.fetch_add(1, std::memory_order_release);
  epoch_.notify_all();
  for (auto& t : pool_) t.join();
}

void WorkerPool::run(std::size_t n, Thunk fn, void* ctx) {
  if (n == 0) return;
  fn_ = fn;
  ctx_ = ctx;
  n_ = n;
  next_.store(0, std::memory_order_relaxed);

  if (threads_ == 1) {
    run_share(0);
  } else {
    pending_.store(threads_ - 1, std::memory_order_relaxed);
    epoch_.fetch_add(1, std::memory_order_release);
    epoch_.notify_all();
    run_share(0);
    std::uint32_t spins = 0;
    for (std::uint32_t p; (p = pending_.load(std::memory_order_acquire)) != 0;) {
      if (spins < spin_limit_) {
        ++spins;
        cpu_relax();
      } else {
        pending_.wait(p, std::memory_order_acquire);
      }
    }
  }

  if (error_) {
    auto e = std::exchange(error_, nullptr);
    std::rethrow_exception(e);
  }
}

void WorkerPool::run_share(std::uint32_t thread_index) {
  try {
    switch (policy_.kind) {
      case SchedulePolicy::Kind::Sequential:
        for (std::size_t i = 0; i < n_; ++i) fn_(ctx_, i, 0);
        break;

      case SchedulePolicy::Kind::Static: {
        const std::uint32_t workers = policy_.workers;
        const std::size_t chunk = policy_.chunk;
        // Logical workers w with w mod threads == thread_index run here.
        for (std::uint32_t w = thread_index; w < workers; w += threads_) {
          for (std::size_t start = std::size_t{w} * chunk; start < n_;
               start += std::size_t{workers} * chunk) {
            const std::size_t end = std::min(n_, start + chunk);
            for (std::size_t i = start; i < end; ++i) fn_(ctx_, i, w);
          }
        }
        break;
      }

      case SchedulePolicy::Kind::Dynamic: {
        // A lone claimer would take every chunk in order anyway.
        if (threads_ == 1) {
          for (std::size_t i = 0; i < n_; ++i) fn_(ctx_, i, 0);
          break;
        }
        const std::size_t chunk = policy_.chunk;
        for (;;) {
          const std::size_t start = next_.fetch_add(chunk, std::memory_order_relaxed);
          if (start >= n_) break;
          const std::size_t end = std::min(n_, start + chunk);
          for (std::size_t i = start; i < end; ++i) fn_(ctx_, i, thread_index);
        }
        break;
      }
    }
  } catch (...) {
    std::lock_guard lock(error_mu_);
    if (!error_) error_ = std::current_exception();
  }
}

void WorkerPool::worker_loop(std::uint32_t thread_index) {
  std::uint64_t seen = 0;
  for (;;) {
    std::uint32_t spins = 0;
    std::uint64_t e;
    while ((e = epoch_.load(std::memory_order_acquire)) == seen) {
      if (spins < spin_limit_) {
        ++spins;
        cpu_relax();
      } else {
        epoch_.wait(seen, std::memory_order_acquire);
      }
    }
    seen = e;
    if (stop_.load(std::memory_order_relaxed)) return;
    run_share(thread_index);
    if (pending_.fetch_sub(1, std::memory_order_acq_rel) == 1) pending_.notify_one();
  }
}

}  // namespace gpusim
