#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <deque>
#include <mutex>

namespace ginger {

struct QueueStats {
  std::size_t capacity = 0;
  std::size_t pushes = 0;
  std::size_t blocked_pushes = 0;  // pushes that found the queue full
  std::size_t max_occupancy = 0;
  double mean_occupancy = 0.0;     // time-weighted
  double blocked_seconds = 0.0;    // summed over producers
};

/// Blocking FIFO with a fixed capacity: push waits while full, pop waits
/// while empty. Occupancy is tracked over time for reporting.
template <typename T>
class BoundedQueue {
 public:
  explicit BoundedQueue(std::size_t capacity)
      : capacity_(capacity ? capacity : 1), last_change_(Clock::now()), created_(last_change_) {}

  BoundedQueue(const BoundedQueue&) = delete;
  BoundedQueue& operator=(const BoundedQueue&) = delete;

  void push(T value) {
    std::unique_lock lock(mutex_);
    if (items_.size() >= capacity_) {
      ++blocked_pushes_;
      const auto start = Clock::now();
      not_full_.wait(lock, [&] { return items_.size() < capacity_; });
      blocked_ += Clock::now() - start;
    }
    account();
    items_.push_back(std::move(value));
    ++pushes_;
    if (items_.size() > max_occupancy_) max_occupancy_ = items_.size();
    not_empty_.notify_one();
  }

  T pop() {
    std::unique_lock lock(mutex_);
    not_empty_.wait(lock, [&] { return !items_.empty(); });
    account();
    T value = std::move(items_.front());
    items_.pop_front();
    not_full_.notify_one();
    return value;
  }

  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return items_.size();
  }

  std::size_t capacity() const noexcept { return capacity_; }

  QueueStats stats() const {
    std::lock_guard lock(mutex_);
    const auto now = Clock::now();
    const double total = std::chrono::duration<double>(now - created_).count();
    const double area =
        weighted_ + static_cast<double>(items_.size()) *
                        std::chrono::duration<double>(now - last_change_).count();
    QueueStats s;
    s.capacity = capacity_;
    s.pushes = pushes_;
    s.blocked_pushes = blocked_pushes_;
    s.max_occupancy = max_occupancy_;
    s.mean_occupancy = total > 0 ? area / total : 0.0;
    s.blocked_seconds = std::chrono::duration<double>(blocked_).count();
    return s;
  }

 private:
  using Clock = std::chrono::steady_clock;

  // Integrates occupancy up to now; called with the lock held before every
  // size change.
  void account() {
    const auto now = Clock::now();
    weighted_ += static_cast<double>(items_.size()) *
                 std::chrono::duration<double>(now - last_change_).count();
    last_change_ = now;
  }

  const std::size_t capacity_;
  mutable std::mutex mutex_;
  std::condition_variable not_full_;
  std::condition_variable not_empty_;
  std::deque<T> items_;

  std::size_t pushes_ = 0;
  std::size_t blocked_pushes_ = 0;
  std::size_t max_occupancy_ = 0;
  double weighted_ = 0.0;
  Clock::duration blocked_{};
  Clock::time_point last_change_;
  const Clock::time_point created_;
};

}  // namespace ginger
