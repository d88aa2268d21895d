#pragma once

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace fluxanneal {

inline int default_workers() {
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(i) for i in [0, count) on up to `workers` threads.
/// Tasks are claimed through a shared atomic counter, so long and short jobs
/// mix freely; each task must write only to its own output slot.
inline void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  if (workers <= 0) workers = default_workers();
  std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// Persistent thread team for step-synchronous work (the MD inner loop).
/// run() hands every member a [begin, end) row range and blocks until all
/// are done; the partition is fixed, so results do not depend on timing.
class WorkerTeam {
 public:
  using RangeFn = std::function<void(std::size_t, std::size_t)>;

  explicit WorkerTeam(int threads) : threads_(threads < 1 ? 1 : threads) {
    for (int t = 1; t < threads_; ++t) {
      members_.emplace_back([this, t] { member_loop(t); });
    }
  }

  WorkerTeam(const WorkerTeam&) = delete;
  WorkerTeam& operator=(const WorkerTeam&) = delete;

  ~WorkerTeam() {
    {
      std::lock_guard<std::mutex> lock(mutex_);
      stop_ = true;
      ++generation_;
    }
    start_cv_.notify_all();
    for (auto& m : members_) m.join();
  }

  int size() const { return threads_; }

  void run(std::size_t total, const RangeFn& fn) {
    if (threads_ == 1 || total == 0) {
      if (total > 0) fn(0, total);
      return;
    }
    {
      std::lock_guard<std::mutex> lock(mutex_);
      fn_ = &fn;
      total_ = total;
      pending_ = threads_ - 1;
      ++generation_;
    }
    start_cv_.notify_all();
    fn(chunk_begin(0), chunk_end(0));
    std::unique_lock<std::mutex> lock(mutex_);
    done_cv_.wait(lock, [this] { return pending_ == 0; });
    fn_ = nullptr;
  }

 private:
  std::size_t chunk_begin(int t) const {
    return total_ * static_cast<std::size_t>(t) / static_cast<std::size_t>(threads_);
  }
  std::size_t chunk_end(int t) const { return chunk_begin(t + 1); }

  void member_loop(int t) {
    std::uint64_t seen = 0;
    for (;;) {
      const RangeFn* fn = nullptr;
      {
        std::unique_lock<std::mutex> lock(mutex_);
        start_cv_.wait(lock, [&] { return generation_ != seen; });
        seen = generation_;
        if (stop_) return;
        fn = fn_;
      }
      (*fn)(chunk_begin(t), chunk_end(t));
      {
        std::lock_guard<std::mutex> lock(mutex_);
        if (--pending_ == 0) done_cv_.notify_one();
      }
    }
  }

  int threads_;
  std::vector<std::thread> members_;
  std::mutex mutex_;
  std::condition_variable start_cv_;
  std::condition_variable done_cv_;
  const RangeFn* fn_ = nullptr;
  std::size_t total_ = 0;
  int pending_ = 0;
  std::uint64_t generation_ = 0;
  bool stop_ = false;
};

}  // namespace fluxanneal
