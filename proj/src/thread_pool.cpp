#include "lamp/thread_pool.hpp"

#include <algorithm>
#include <exception>

namespace lamp {

ThreadPool::ThreadPool(unsigned workers) {
  workers = std::max(1u, workers);
  threads_.reserve(workers);
  for (unsigned i = 0; i < workers; ++i) {
    threads_.emplace_back([this] { worker_loop(); });
  }
}

ThreadPool::~ThreadPool() {
  {
    std::lock_guard lock(mu_);
    stop_ = true;
  }
  cv_work_.notify_all();
  for (auto& t : threads_) t.join();
}

void ThreadPool::worker_loop() {
  while (true) {
    std::function<void()> task;
    {
      std::unique_lock lock(mu_);
      cv_work_.wait(lock, [this] { return stop_ || !queue_.empty(); });
      if (stop_ && queue_.empty()) return;
      task = std::move(queue_.front());
      queue_.pop();
    }
    task();
    {
      std::lock_guard lock(mu_);
      --in_flight_;
    }
    cv_done_.notify_all();
  }
}

void ThreadPool::run_jobs(std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs == 0) return;
  std::exception_ptr first_error;
  std::mutex error_mu;
  {
    std::lock_guard lock(mu_);
    in_flight_ += jobs;
    for (std::size_t i = 0; i < jobs; ++i) {
      queue_.push([&fn, i, &first_error, &error_mu] {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard elock(error_mu);
          if (!first_error) first_error = std::current_exception();
        }
      });
    }
  }
  cv_work_.notify_all();
  {
    std::unique_lock lock(mu_);
    cv_done_.wait(lock, [this] { return in_flight_ == 0; });
  }
  if (first_error) std::rethrow_exception(first_error);
}

unsigned ThreadPool::default_workers() {
  return std::max(2u, std::thread::hardware_concurrency());
}

}  // namespace lamp
