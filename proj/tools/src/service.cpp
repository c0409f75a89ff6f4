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

#include "service.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <thread>
#include <utility>

#include <httplib.h>
#include <json.hpp>

#include "amtc/error.hpp"
#include "tool.hpp"

namespace amtc::tool {

namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kJson = "application/json";

void SendError(httplib::Response& res, int status, std::string_view code,
               std::string_view message) {
  res.status = status;
  res.set_content(ErrorToJson(code, message), kJson);
}

const char* StatusName(JobStatus s) {
  switch (s) {
    case JobStatus::kIdle: return "idle";
    case JobStatus::kRunning: return "running";
    case JobStatus::kDone: return "done";
    case JobStatus::kFailed: return "failed";
  }
  return "idle";
}

Json AxisJson(const AxisMap& a, const char* origin, const char* step) {
  return Json{{origin, a.origin}, {step, a.step}};
}

std::size_t ParseCount(const std::string& text, const char* what) {
  std::size_t used = 0;
  long long v = -1;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || v < 1) {
    throw InputError("bad_request", std::string(what) + " must be a positive integer");
  }
  return static_cast<std::size_t>(v);
}

std::string NewId(std::size_t counter) {
  static std::mt19937_64 rng{std::random_device{}()};
  static std::mutex m;
  std::lock_guard lock(m);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%06zx%010llx", counter,
                static_cast<unsigned long long>(rng() & 0xffffffffffULL));
  return buf;
}

}  // namespace

Spectrogram MaxPool(const Spectrogram& z, std::size_t out_bins,
                    std::size_t out_frames) {
  const std::size_t ob = std::clamp<std::size_t>(out_bins, 1, z.bins());
  const std::size_t of = std::clamp<std::size_t>(out_frames, 1, z.frames());
  Spectrogram out(ob, of,
                  AxisMap{z.freq_axis().origin,
                          z.freq_axis().step * static_cast<double>(z.bins()) /
                              static_cast<double>(ob)},
                  AxisMap{z.time_axis().origin,
                          z.time_axis().step * static_cast<double>(z.frames()) /
                              static_cast<double>(of)});
  for (std::size_t j = 0; j < of; ++j) {
    const std::size_t n0 = j * z.frames() / of, n1 = (j + 1) * z.frames() / of;
    for (std::size_t i = 0; i < ob; ++i) {
      const std::size_t m0 = i * z.bins() / ob, m1 = (i + 1) * z.bins() / ob;
      double best = z(m0, n0);
      for (std::size_t n = n0; n < n1; ++n) {
        for (std::size_t m = m0; m < m1; ++m) best = std::max(best, z(m, n));
      }
      out(i, j) = best;
    }
  }
  return out;
}

std::shared_ptr<Job> JobStore::Add(Spectrogram z, RunConfig cfg) {
  auto job = std::make_shared<Job>();
  job->spectrogram = std::move(z);
  job->config = std::move(cfg);
  std::lock_guard lock(mutex_);
  job->id = NewId(++counter_);
  order_.push_front(job);
  index_[job->id] = order_.begin();
  // Evict from the least recent end, skipping running jobs.
  for (auto it = order_.end(); order_.size() > capacity_ && it != order_.begin();) {
    --it;
    if (*it == job) continue;
    bool running;
    {
      std::lock_guard job_lock((*it)->mutex);
      running = (*it)->status == JobStatus::kRunning;
    }
    if (running) continue;
    index_.erase((*it)->id);
    it = order_.erase(it);
  }
  return job;
}

std::shared_ptr<Job> JobStore::Find(const std::string& id) {
  std::lock_guard lock(mutex_);
  const auto it = index_.find(id);
  if (it == index_.end()) return nullptr;
  order_.splice(order_.begin(), order_, it->second);
  return *it->second;
}

std::size_t JobStore::size() const {
  std::lock_guard lock(mutex_);
  return order_.size();
}

bool BeginRun(Job& job, const std::vector<IterationConstraint>& constraints) {
  std::lock_guard lock(job.mutex);
  if (job.status == JobStatus::kRunning) return false;
  job.status = JobStatus::kRunning;
  job.history.push_back(constraints);
  return true;
}

void FinishRun(Job& job, std::size_t traces,
               const std::vector<IterationConstraint>& constraints) {
  std::optional<MultiTraceResult> result;
  std::string code, message;
  bool unsatisfied = false;
  try {
    result = Track(job.spectrogram, job.config, traces, constraints);
  } catch (const ConstraintUnsatisfiedError& e) {
    code = e.code();
    message = e.what();
    unsatisfied = true;
  } catch (const Error& e) {
    code = e.code();
    message = e.what();
  } catch (const std::exception& e) {
    code = "internal";
    message = e.what();
  }
  std::string json = result ? ResultToJson(*result) : std::string();
  std::lock_guard lock(job.mutex);
  job.result = std::move(result);
  job.result_json = std::move(json);
  job.error_code = std::move(code);
  job.error_message = std::move(message);
  job.error_unsatisfied = unsatisfied;
  job.status = job.result ? JobStatus::kDone : JobStatus::kFailed;
}

Service::Service(ServiceOptions options)
    : options_(std::move(options)),
      jobs_(options_.max_jobs),
      server_(std::make_unique<httplib::Server>()) {
  if (options_.max_jobs == 0) throw InputError("bad_config", "max jobs must be >= 1");
  server_->set_payload_max_length(options_.max_payload);
  if (!options_.static_dir.empty() &&
      !server_->set_mount_point("/", options_.static_dir.string())) {
    throw InputError("not_found", "static directory not found: " +
                                      options_.static_dir.string());
  }
  Routes();
}

Service::~Service() {
  Stop();
  std::unique_lock lock(workers_mutex_);
  workers_done_.wait(lock, [this] { return workers_ == 0; });
}

int Service::Bind(const std::string& host, int port) {
  if (port == 0) return server_->bind_to_any_port(host);
  return server_->bind_to_port(host, port) ? port : -1;
}

void Service::Serve() { server_->listen_after_bind(); }

void Service::Stop() { server_->stop(); }

void Service::WaitUntilReady() const { server_->wait_until_ready(); }

void Service::Launch(std::shared_ptr<Job> job, std::size_t traces,
                     std::vector<IterationConstraint> constraints) {
  {
    std::lock_guard lock(workers_mutex_);
    ++workers_;
  }
  std::thread([this, job = std::move(job), traces,
               constraints = std::move(constraints)] {
    FinishRun(*job, traces, constraints);
    std::lock_guard lock(workers_mutex_);
    --workers_;
    workers_done_.notify_all();
  }).detach();
}

void Service::Routes() {
  using httplib::Request;
  using httplib::Response;

  server_->set_exception_handler(
      [](const Request&, Response& res, std::exception_ptr ep) {
        try {
          std::rethrow_exception(ep);
        } catch (const Error& e) {
          SendError(res, e.kind() == ErrorKind::kInput ? 400 : 500, e.code(), e.what());
        } catch (const std::exception& e) {
          SendError(res, 500, "internal", e.what());
        }
      });

  server_->Post("/jobs", [this](const Request& req, Response& res) {
    std::string payload = req.body;
    RunConfig cfg = options_.defaults;
    if (req.is_multipart_form_data()) {
      if (!req.has_file("payload")) {
        return SendError(res, 400, "bad_request", "multipart field 'payload' missing");
      }
      payload = req.get_file_value("payload").content;
      if (req.has_file("config")) cfg = ParseRunConfig(req.get_file_value("config").content);
    }
    const PayloadKind kind = ParsePayloadKind(req.get_param_value("kind"));
    const double rate =
        req.has_param("rate") ? std::stod(req.get_param_value("rate")) : 0.0;
    Spectrogram z;
    try {
      z = SpectrogramFromBytes(payload, kind, cfg, rate);
    } catch (const Error& e) {
      return SendError(res, 400, e.code(), e.what());
    }
    const auto job = jobs_.Add(std::move(z), std::move(cfg));
    const Json body{{"id", job->id},
                    {"bins", job->spectrogram.bins()},
                    {"frames", job->spectrogram.frames()},
                    {"freq_axis", AxisJson(job->spectrogram.freq_axis(), "f0", "df")},
                    {"time_axis", AxisJson(job->spectrogram.time_axis(), "t0", "dt")}};
    res.status = 201;
    res.set_content(body.dump(), kJson);
  });

  server_->Get(R"(/jobs/([^/]+))", [this](const Request& req, Response& res) {
    const auto job = jobs_.Find(req.matches[1]);
    if (!job) return SendError(res, 404, "unknown_job", "no such job");
    std::lock_guard lock(job->mutex);
    Json body{{"id", job->id},
              {"status", StatusName(job->status)},
              {"bins", job->spectrogram.bins()},
              {"frames", job->spectrogram.frames()},
              {"runs", job->history.size()},
              {"constraints", job->history.empty()
                                  ? Json::array()
                                  : Json::parse(SerializeConstraints(job->history.back()))},
              {"error", nullptr}};
    if (job->status == JobStatus::kFailed) {
      body["error"] = Json{{"code", job->error_code}, {"message", job->error_message}};
    }
    res.set_content(body.dump(), kJson);
  });

  server_->Get(R"(/jobs/([^/]+)/spectrogram)", [this](const Request& req, Response& res) {
    const auto job = jobs_.Find(req.matches[1]);
    if (!job) return SendError(res, 404, "unknown_job", "no such job");
    const Spectrogram& z = job->spectrogram;
    std::size_t maxw = z.frames(), maxh = z.bins();
    try {
      if (req.has_param("maxw")) maxw = ParseCount(req.get_param_value("maxw"), "maxw");
      if (req.has_param("maxh")) maxh = ParseCount(req.get_param_value("maxh"), "maxh");
    } catch (const Error& e) {
      return SendError(res, 400, e.code(), e.what());
    }
    const Spectrogram tile = MaxPool(z, maxh, maxw);
    Json values = Json::array();
    for (std::size_t n = 0; n < tile.frames(); ++n) {
      const auto col = tile.column(n);
      values.push_back(Json(std::vector<double>(col.begin(), col.end())));
    }
    const Json body{{"bins", tile.bins()},
                    {"frames", tile.frames()},
                    {"source_bins", z.bins()},
                    {"source_frames", z.frames()},
                    {"freq_axis", AxisJson(tile.freq_axis(), "f0", "df")},
                    {"time_axis", AxisJson(tile.time_axis(), "t0", "dt")},
                    {"values", std::move(values)}};
    res.set_content(body.dump(), kJson);
  });

  server_->Post(R"(/jobs/([^/]+)/track)", [this](const Request& req, Response& res) {
    const auto job = jobs_.Find(req.matches[1]);
    if (!job) return SendError(res, 404, "unknown_job", "no such job");
    std::size_t traces = job->config.num_traces;
    std::vector<IterationConstraint> constraints;
    bool wait = req.get_param_value("wait") == "1" || req.get_param_value("wait") == "true";
    try {
      const Json body = req.body.empty() ? Json::object() : Json::parse(req.body);
      if (!body.is_object()) throw InputError("bad_request", "body must be an object");
      for (const auto& [key, value] : body.items()) {
        if (key == "L") {
          if (!value.is_number_integer() || value.get<long long>() < 1) {
            throw InputError("bad_request", "L must be a positive integer");
          }
          traces = value.get<std::size_t>();
        } else if (key == "constraints") {
          constraints = ParseConstraints(value.dump());
        } else if (key == "wait") {
          if (!value.is_boolean()) throw InputError("bad_request", "wait must be a boolean");
          wait = wait || value.get<bool>();
        } else {
          throw InputError("bad_request", "unknown key '" + key + "'");
        }
      }
      for (const auto& c : constraints) {
        if (c.iteration >= traces) {
          throw InputError("bad_constraint", "constraint targets iteration " +
                                                 std::to_string(c.iteration + 1) +
                                                 " of " + std::to_string(traces));
        }
        c.region.Validate(job->spectrogram.bins(), job->spectrogram.frames());
      }
    } catch (const Json::exception& e) {
      return SendError(res, 400, "bad_request", e.what());
    } catch (const Error& e) {
      return SendError(res, 400, e.code(), e.what());
    }
    if (!BeginRun(*job, constraints)) {
      return SendError(res, 409, "run_in_progress", "a run is already in progress");
    }
    if (!wait) {
      Launch(job, traces, std::move(constraints));
      res.status = 202;
      res.set_content(Json{{"id", job->id}, {"status", "running"}}.dump(), kJson);
      return;
    }
    FinishRun(*job, traces, constraints);
    std::lock_guard lock(job->mutex);
    if (job->status == JobStatus::kDone) {
      res.set_content(job->result_json, kJson);
    } else {
      SendError(res, job->error_unsatisfied ? 422 : 500, job->error_code,
                job->error_message);
    }
  });

  server_->Get(R"(/jobs/([^/]+)/result)", [this](const Request& req, Response& res) {
    const auto job = jobs_.Find(req.matches[1]);
    if (!job) return SendError(res, 404, "unknown_job", "no such job");
    std::lock_guard lock(job->mutex);
    switch (job->status) {
      case JobStatus::kIdle:
        return SendError(res, 404, "no_result", "no tracking run yet");
      case JobStatus::kRunning:
        res.status = 202;
        res.set_content(Json{{"id", job->id}, {"status", "running"}}.dump(), kJson);
        return;
      case JobStatus::kFailed:
        return SendError(res, job->error_unsatisfied ? 422 : 500, job->error_code,
                         job->error_message);
      case JobStatus::kDone:
        res.set_content(job->result_json, kJson);
        return;
    }
  });
}

}  // namespace amtc::tool
