// Copyright 2026 The tri-lab Authors
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

#pragma once

#include <barrier>
#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace trilab {

class ThreadPool;

/// View of one participant inside ThreadPool::run.
class Team {
 public:
  std::size_t rank() const noexcept { return rank_; }
  std::size_t size() const noexcept { return size_; }

  /// Full barrier across the team. Every member must call it the same number
  /// of times. Each completed barrier bumps the pool's sync counter once.
  void sync();

  /// Contiguous static share [begin, end) of `count` items for this rank.
  std::pair<std::size_t, std::size_t> share(std::size_t count) const noexcept;

 private:
  friend class ThreadPool;
  Team(ThreadPool* pool, std::size_t rank, std::size_t size)
      : pool_(pool), rank_(rank), size_(size) {}
  ThreadPool* pool_;
  std::size_t rank_;
  std::size_t size_;
};

/// Persistent fork-join pool. The calling thread takes rank 0, so a pool of
/// size 1 never spawns a thread. Workers are reused across run() calls.
class ThreadPool {
 public:
  explicit ThreadPool(std::size_t threads = 1);
  ~ThreadPool();

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  std::size_t size() const noexcept { return size_; }

  /// Runs fn on every team member and returns once all have finished.
  /// The first exception thrown by any member is rethrown here. A member
  /// must not throw once another member may be waiting in Team::sync().
  void run(const std::function<void(Team&)>& fn);

  /// Total barriers completed since construction.
  std::size_t sync_count() const noexcept { return sync_count_; }

 private:
  friend class Team;
  struct OnPhase {
    std::size_t* counter;
    void operator()() noexcept { ++*counter; }
  };

  void worker_loop(std::size_t rank);
  void run_member(std::size_t rank);

  std::size_t size_;
  std::size_t sync_count_ = 0;
  std::barrier<OnPhase> barrier_;
  std::vector<std::thread> workers_;

  std::mutex mutex_;
  std::condition_variable start_cv_;
  std::condition_variable done_cv_;
  const std::function<void(Team&)>* job_ = nullptr;
  std::size_t generation_ = 0;
  std::size_t pending_ = 0;
  bool stopping_ = false;
  std::exception_ptr error_;
};

/// Logical core count, or the TRILAB_THREADS environment variable if set.
std::size_t default_thread_count();

}  // namespace trilab
