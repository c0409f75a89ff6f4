// Copyright 2026 The AMTC Authors
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

// HTTP service driving the interactive constraint loop: upload a signal or
// spectrogram, fetch display tiles, run tracking with constraint regions.

#pragma once

#include <cstddef>
#include <condition_variable>
#include <filesystem>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "amtc/carve.hpp"
#include "amtc/io.hpp"
#include "amtc/spectrogram.hpp"

namespace httplib {
class Server;
}

namespace amtc::tool {

// Block max over floor(i * size / out) boundaries, to at most out_bins x
// out_frames. Dimensions already within bounds are kept.
Spectrogram MaxPool(const Spectrogram& z, std::size_t out_bins,
                    std::size_t out_frames);

enum class JobStatus { kIdle, kRunning, kDone, kFailed };

struct Job {
  std::string id;
  Spectrogram spectrogram;
  RunConfig config;

  // Guarded by mutex.
  mutable std::mutex mutex;
  JobStatus status = JobStatus::kIdle;
  std::optional<MultiTraceResult> result;
  std::string result_json;
  std::string error_code;
  std::string error_message;
  bool error_unsatisfied = false;
  std::vector<std::vector<IterationConstraint>> history;
};

// Thread-safe in-memory store, least recently used jobs evicted first.
// Jobs with a run in progress are never evicted.
class JobStore {
 public:
  explicit JobStore(std::size_t capacity) : capacity_(capacity) {}

  std::shared_ptr<Job> Add(Spectrogram z, RunConfig cfg);
  std::shared_ptr<Job> Find(const std::string& id);
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::size_t capacity_;
  std::size_t counter_ = 0;
  std::list<std::shared_ptr<Job>> order_;  // most recent first
  std::unordered_map<std::string, std::list<std::shared_ptr<Job>>::iterator> index_;
};

struct ServiceOptions {
  RunConfig defaults;
  std::size_t max_jobs = 32;
  std::size_t max_payload = std::size_t{64} << 20;
  std::filesystem::path static_dir;
};

class Service {
 public:
  explicit Service(ServiceOptions options);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds; port 0 picks a free port. Returns the port or -1.
  int Bind(const std::string& host, int port);
  // Blocks until Stop().
  void Serve();
  void Stop();
  void WaitUntilReady() const;

  JobStore& jobs() { return jobs_; }

 private:
  void Routes();
  void Launch(std::shared_ptr<Job> job, std::size_t traces,
              std::vector<IterationConstraint> constraints);

  ServiceOptions options_;
  JobStore jobs_;
  std::unique_ptr<httplib::Server> server_;
  std::mutex workers_mutex_;
  std::condition_variable workers_done_;
  std::size_t workers_ = 0;
};

// Runs one tracking request on a job and stores the outcome. Returns false
// when the job already has a run in progress.
bool BeginRun(Job& job, const std::vector<IterationConstraint>& constraints);
void FinishRun(Job& job, std::size_t traces,
               const std::vector<IterationConstraint>& constraints);

}  // namespace amtc::tool
