#pragma once

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <queue>
#include <thread>
#include <vector>

namespace lamp {

// Fixed-size worker pool for fanning out independent chunks of work.
class ThreadPool {
 public:
  explicit ThreadPool(unsigned workers);
  ~ThreadPool();

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  unsigned size() const { return static_cast<unsigned>(threads_.size()); }

  // Runs fn(0) .. fn(jobs-1) across the pool and blocks until all finish.
  // Exceptions from jobs are rethrown (first one wins).
  void run_jobs(std::size_t jobs, const std::function<void(std::size_t)>& fn);

  // max(2, hardware_concurrency): keeps the parallel path genuinely
  // multi-threaded even on single-core hosts.
  static unsigned default_workers();

 private:
  void worker_loop();

  std::vector<std::thread> threads_;
  std::mutex mu_;
  std::condition_variable cv_work_;
  std::condition_variable cv_done_;
  std::queue<std::function<void()>> queue_;
  std::size_t in_flight_ = 0;
  bool stop_ = false;
};

}  // namespace lamp
