#pragma once

#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace phishscan::app {

/// Fixed worker set running one indexed loop at a time. With one thread everything runs inline.
class ThreadPool {
public:
  explicit ThreadPool(unsigned threads);
  ~ThreadPool();
  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  [[nodiscard]] unsigned size() const noexcept { return size_; }

  /// Calls fn(i) for i in [0, n); rethrows the first exception after all workers finish.
  void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

private:
  void worker_loop();
  void drain();

  unsigned size_;
  std::vector<std::thread> workers_;
  std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable done_;
  const std::function<void(std::size_t)>* job_ = nullptr;
  std::size_t job_size_ = 0;
  std::size_t next_ = 0;
  std::size_t finished_ = 0;
  std::size_t generation_ = 0;
  unsigned busy_ = 0;
  bool stop_ = false;
  std::exception_ptr error_;
};

/// 0 means one thread per hardware core.
unsigned resolve_threads(unsigned requested);

}  // namespace phishscan::app
