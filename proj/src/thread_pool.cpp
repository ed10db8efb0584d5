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

#include "trilab/thread_pool.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace trilab {

void Team::sync() { pool_->barrier_.arrive_and_wait(); }

std::pair<std::size_t, std::size_t> Team::share(std::size_t count) const noexcept {
  const std::size_t chunk = (count + size_ - 1) / size_;
  const std::size_t begin = std::min(count, rank_ * chunk);
  const std::size_t end = std::min(count, begin + chunk);
  return {begin, end};
}

ThreadPool::ThreadPool(std::size_t threads)
    : size_(std::max<std::size_t>(threads, 1)),
      barrier_(static_cast<std::ptrdiff_t>(size_), OnPhase{&sync_count_}) {
  workers_.reserve(size_ - 1);
  for (std::size_t rank = 1; rank < size_; ++rank) {
    workers_.emplace_back([this, rank] { worker_loop(rank); });
  }
}

ThreadPool::~ThreadPool() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  start_cv_.notify_all();
  for (auto& t : workers_) t.join();
}

void ThreadPool::run_member(std::size_t rank) {
  Team team(this, rank, size_);
  try {
    (*job_)(team);
  } catch (...) {
    std::lock_guard lock(mutex_);
    if (!error_) error_ = std::current_exception();
  }
}

void ThreadPool::worker_loop(std::size_t rank) {
  std::size_t seen = 0;
  for (;;) {
    {
      std::unique_lock lock(mutex_);
      start_cv_.wait(lock, [&] { return stopping_ || generation_ != seen; });
      if (stopping_) return;
      seen = generation_;
    }
    run_member(rank);
    {
      std::lock_guard lock(mutex_);
      if (--pending_ == 0) done_cv_.notify_one();
    }
  }
}

void ThreadPool::run(const std::function<void(Team&)>& fn) {
  {
    std::lock_guard lock(mutex_);
    job_ = &fn;
    error_ = nullptr;
    pending_ = size_ - 1;
    ++generation_;
  }
  start_cv_.notify_all();
  run_member(0);
  std::exception_ptr error;
  {
    std::unique_lock lock(mutex_);
    done_cv_.wait(lock, [&] { return pending_ == 0; });
    job_ = nullptr;
    error = std::exchange(error_, nullptr);
  }
  if (error) std::rethrow_exception(error);
}

std::size_t default_thread_count() {
  if (const char* env = std::getenv("TRILAB_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace trilab
