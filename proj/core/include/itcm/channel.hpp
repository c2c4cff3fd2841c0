// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <condition_variable>
#include <cstddef>
#include <deque>
#include <mutex>
#include <optional>

namespace itcm {

/// Bounded FIFO between one producer and one consumer.
///
/// close() ends the stream: pending items are still delivered, then pop()
/// returns nothing. cancel() drops everything and wakes both sides.
template <class T>
class Channel {
public:
  explicit Channel(std::size_t capacity) : capacity_{capacity ? capacity : 1} {
  }

  /// Blocks while full. False when the channel was cancelled.
  auto push(T item) -> bool {
    auto lock = std::unique_lock{mutex_};
    not_full_.wait(lock,
                   [&] { return cancelled_ || items_.size() < capacity_; });
    if (cancelled_)
      return false;
    items_.push_back(std::move(item));
    not_empty_.notify_one();
    return true;
  }

  /// Blocks until an item arrives or the stream ends.
  auto pop() -> std::optional<T> {
    auto lock = std::unique_lock{mutex_};
    not_empty_.wait(lock,
                    [&] { return cancelled_ || closed_ || !items_.empty(); });
    if (cancelled_ || items_.empty())
      return std::nullopt;
    auto item = std::move(items_.front());
    items_.pop_front();
    not_full_.notify_one();
    return item;
  }

  void close() {
    auto lock = std::lock_guard{mutex_};
    closed_ = true;
    not_empty_.notify_all();
  }

  void cancel() {
    auto lock = std::lock_guard{mutex_};
    cancelled_ = true;
    items_.clear();
    not_empty_.notify_all();
    not_full_.notify_all();
  }

private:
  std::size_t capacity_;
  std::mutex mutex_;
  std::condition_variable not_empty_;
  std::condition_variable not_full_;
  std::deque<T> items_;
  bool closed_ = false;
  bool cancelled_ = false;
};

} // namespace itcm
