#pragma once

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace spk {

inline unsigned hardware_workers() {
  return std::max(1u, std::thread::hardware_concurrency());
}

// Fixed-size fork/join team. Member 0 is the calling thread; run() hands the
// same callable to every member and returns once all of them have finished,
// so it doubles as a barrier between phases.
class WorkerTeam {
 public:
  explicit WorkerTeam(unsigned size) : size_(std::max(1u, size)) {
    threads_.reserve(size_ - 1);
    for (unsigned m = 1; m < size_; ++m) {
      threads_.emplace_back([this, m] { loop(m); });
    }
  }

  WorkerTeam(const WorkerTeam&) = delete;
  WorkerTeam& operator=(const WorkerTeam&) = delete;

  ~WorkerTeam() {
    {
      std::lock_guard lock(mutex_);
      stopping_ = true;
      ++generation_;
    }
    wake_.notify_all();
  }

  unsigned size() const noexcept { return size_; }

  void run(const std::function<void(unsigned)>& job) {
    if (size_ == 1) {
      job(0);
      return;
    }
    {
      std::lock_guard lock(mutex_);
      job_ = &job;
      pending_ = size_ - 1;
      error_ = nullptr;
      ++generation_;
    }
    wake_.notify_all();
    std::exception_ptr local;
    try {
      job(0);
    } catch (...) {
      local = std::current_exception();
    }
    std::unique_lock lock(mutex_);
    done_.wait(lock, [this] { return pending_ == 0; });
    job_ = nullptr;
    if (!local) local = error_;
    if (local) std::rethrow_exception(local);
  }

 private:
  void loop(unsigned member) {
    std::uint64_t seen = 0;
    for (;;) {
      const std::function<void(unsigned)>* job = nullptr;
      {
        std::unique_lock lock(mutex_);
        wake_.wait(lock, [&] { return generation_ != seen; });
        seen = generation_;
        if (stopping_) return;
        job = job_;
      }
      std::exception_ptr err;
      try {
        (*job)(member);
      } catch (...) {
        err = std::current_exception();
      }
      {
        std::lock_guard lock(mutex_);
        if (err && !error_) error_ = err;
        if (--pending_ == 0) done_.notify_one();
      }
    }
  }

  unsigned size_;
  std::vector<std::jthread> threads_;
  std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable done_;
  const std::function<void(unsigned)>* job_ = nullptr;
  std::uint64_t generation_ = 0;
  unsigned pending_ = 0;
  bool stopping_ = false;
  std::exception_ptr error_;
};

// Dynamic chunked loop over [0, count). fn(member, i).
template <class Fn>
void parallel_for(WorkerTeam& team, std::size_t count, Fn&& fn, std::size_t chunk = 64) {
  if (count == 0) return;
  if (team.size() == 1 || count <= chunk) {
    for (std::size_t i = 0; i < count; ++i) fn(0u, i);
    return;
  }
  std::atomic<std::size_t> next{0};
  team.run([&](unsigned member) {
    for (;;) {
      const std::size_t begin = next.fetch_add(chunk, std::memory_order_relaxed);
      if (begin >= count) break;
      const std::size_t end = std::min(count, begin + chunk);
      for (std::size_t i = begin; i < end; ++i) fn(member, i);
    }
  });
}

}  // namespace spk
