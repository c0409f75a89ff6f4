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

#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "amtc/io.hpp"
#include "oracles.hpp"
#include "tool.hpp"

namespace amtc::tool {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

const fs::path kFixture = fs::path(AMTC_FIXTURE_DIR) / "track_fixture.csv";

std::string Slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::string ToCsv(const Spectrogram& z) {
  std::ostringstream s;
  WriteSpectrogramCsv(s, z);
  return s.str();
}

// Strong ridge on bin 10, weak ridge on bin 30.
Spectrogram TwoRidges() {
  Spectrogram z(40, 50, AxisMap{60, 1}, AxisMap{0, 0.1});
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<> noise(0.0, 0.2);
  for (std::size_t n = 0; n < z.frames(); ++n) {
    for (std::size_t m = 0; m < z.bins(); ++m) z(m, n) = noise(rng);
    z(10, n) += 5.0;
    z(30, n) += 2.0;
  }
  return z;
}

class ServiceTest : public ::testing::Test {
 protected:
  void Start(ServiceOptions opts = {}) {
    service_ = std::make_unique<Service>(std::move(opts));
    port_ = service_->Bind("127.0.0.1", 0);
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { service_->Serve(); });
    service_->WaitUntilReady();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
  }
  void TearDown() override {
    if (service_) service_->Stop();
    if (thread_.joinable()) thread_.join();
    service_.reset();
  }

  std::string Create(const std::string& payload) {
    auto res = client_->Post("/jobs", payload, "text/csv");
    EXPECT_TRUE(res);
    EXPECT_EQ(res->status, 201) << res->body;
    return Json::parse(res->body).at("id").get<std::string>();
  }

  httplib::Result Track(const std::string& id, const std::string& body, bool wait) {
    return client_->Post("/jobs/" + id + "/track" + (wait ? "?wait=1" : ""), body,
                         "application/json");
  }

  std::unique_ptr<Service> service_;
  std::thread thread_;
  std::unique_ptr<httplib::Client> client_;
  int port_ = 0;
};

TEST_F(ServiceTest, CreateJob) {
  Start();
  const std::string payload = Slurp(kFixture);
  const std::string a = Create(payload);
  const std::string b = Create(payload);
  EXPECT_NE(a, b);
  auto res = client_->Get("/jobs/" + a);
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  const Json j = Json::parse(res->body);
  EXPECT_EQ(j["status"], "idle");
  EXPECT_EQ(j["bins"], 40);
  EXPECT_EQ(j["frames"], 60);
}

TEST_F(ServiceTest, GarbagePayload) {
  Start();
  auto res = client_->Post("/jobs", "M,N,f0,df,t0,dt\nx,y,z,1,2,3\n", "text/csv");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  EXPECT_TRUE(Json::parse(res->body).contains("error"));
  res = client_->Post("/jobs", "", "text/csv");
  EXPECT_EQ(res->status, 400);
}

TEST_F(ServiceTest, PayloadCap) {
  ServiceOptions opts;
  opts.max_payload = 1000;
  Start(opts);
  auto res = client_->Post("/jobs", std::string(2000, '1'), "text/csv");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 413);
}

TEST_F(ServiceTest, MultipartWithConfig) {
  Start();
  httplib::MultipartFormDataItems items = {
      {"payload", Slurp(kFixture), "z.csv", "text/csv"},
      {"config", R"({"tracking":{"num_traces":2}})", "", "application/json"}};
  auto res = client_->Post("/jobs", items);
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 201) << res->body;
  const std::string id = Json::parse(res->body)["id"];
  res = Track(id, "{}", true);
  ASSERT_EQ(res->status, 200);
  EXPECT_EQ(Json::parse(res->body)["count"], 2);
}

TEST_F(ServiceTest, UnknownJob) {
  Start();
  EXPECT_EQ(client_->Get("/jobs/zzz")->status, 404);
  EXPECT_EQ(client_->Get("/jobs/zzz/spectrogram")->status, 404);
  EXPECT_EQ(client_->Get("/jobs/zzz/result")->status, 404);
  EXPECT_EQ(Track("zzz", "{}", true)->status, 404);
}

TEST_F(ServiceTest, SpectrogramExact) {
  Start();
  const std::string id = Create(Slurp(kFixture));
  auto res = client_->Get("/jobs/" + id + "/spectrogram");
  ASSERT_EQ(res->status, 200);
  const Json j = Json::parse(res->body);
  const Spectrogram z = LoadSpectrogramCsv(kFixture);
  ASSERT_EQ(j["frames"], z.frames());
  ASSERT_EQ(j["bins"], z.bins());
  for (std::size_t n = 0; n < z.frames(); ++n) {
    for (std::size_t m = 0; m < z.bins(); ++m) {
      ASSERT_EQ(j["values"][n][m].get<double>(), z(m, n));
    }
  }
  EXPECT_EQ(j["freq_axis"]["f0"], 60.0);
  EXPECT_EQ(j["time_axis"]["dt"], 0.2);
}

TEST_F(ServiceTest, SpectrogramMaxPooled) {
  Start();
  std::mt19937_64 rng(3);
  const Spectrogram z = testing::RandomSpectrogram(rng, 200, 400);
  const std::string id = Create(ToCsv(z));
  auto res = client_->Get("/jobs/" + id + "/spectrogram?maxw=100&maxh=100");
  ASSERT_EQ(res->status, 200);
  const Json j = Json::parse(res->body);
  ASSERT_EQ(j["bins"], 100);
  ASSERT_EQ(j["frames"], 100);
  const std::vector<double> want = testing::MaxPoolOracle(z, 100, 100);
  for (std::size_t n = 0; n < 100; ++n) {
    for (std::size_t m = 0; m < 100; ++m) {
      ASSERT_EQ(j["values"][n][m].get<double>(), want[n * 100 + m]);
    }
  }
  EXPECT_EQ(client_->Get("/jobs/" + id + "/spectrogram?maxw=0")->status, 400);
  EXPECT_EQ(client_->Get("/jobs/" + id + "/spectrogram?maxh=abc")->status, 400);
}

TEST_F(ServiceTest, ResultMatchesCli) {
  Start();
  const std::string id = Create(Slurp(kFixture));
  EXPECT_EQ(client_->Get("/jobs/" + id + "/result")->status, 404);
  auto res = Track(id, R"({"L":2})", true);
  ASSERT_EQ(res->status, 200) << res->body;

  std::vector<const char*> argv = {"amtc", "track", "-L", "2"};
  const std::string path = kFixture.string();
  argv.push_back(path.c_str());
  std::istringstream in;
  std::ostringstream out, err;
  ASSERT_EQ(tool::Run(static_cast<int>(argv.size()), argv.data(), in, out, err), 0);
  EXPECT_EQ(res->body + "\n", out.str());
  EXPECT_EQ(client_->Get("/jobs/" + id + "/result")->body, res->body);
}

TEST_F(ServiceTest, AsyncRunAndPoll) {
  Start();
  const std::string id = Create(Slurp(kFixture));
  auto res = Track(id, "{}", false);
  ASSERT_EQ(res->status, 202);
  httplib::Result result;
  for (int i = 0; i < 500; ++i) {
    result = client_->Get("/jobs/" + id + "/result");
    if (result->status != 202) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  ASSERT_EQ(result->status, 200);
  EXPECT_EQ(Json::parse(result->body)["count"], 1);
  EXPECT_EQ(Json::parse(client_->Get("/jobs/" + id)->body)["status"], "done");
}

TEST_F(ServiceTest, ConstraintOnWeakRidge) {
  Start();
  const std::string id = Create(ToCsv(TwoRidges()));
  auto res = Track(id, R"({"L":1,"constraints":[{"frames":[20,25],"bins":[28,32],"iteration":1}]})",
                   true);
  ASSERT_EQ(res->status, 200) << res->body;
  const Json j = Json::parse(res->body);
  for (int n = 20; n <= 25; ++n) {
    const int bin = j["traces"][0][n];
    EXPECT_GE(bin, 28);
    EXPECT_LE(bin, 32);
  }
  const Json status = Json::parse(client_->Get("/jobs/" + id)->body);
  EXPECT_EQ(status["runs"], 1);
  EXPECT_EQ(status["constraints"][0]["iteration"], 1);
}

TEST_F(ServiceTest, UnsatisfiableConstraint) {
  Start();
  Spectrogram z = TwoRidges();
  for (std::size_t n = 20; n <= 25; ++n) {
    for (std::size_t m = 0; m <= 5; ++m) z(m, n) = 0.0;
  }
  const std::string id = Create(ToCsv(z));
  auto res = Track(id, R"({"constraints":[{"frames":[20,25],"bins":[0,5]}]})", true);
  ASSERT_EQ(res->status, 422) << res->body;
  EXPECT_EQ(client_->Get("/jobs/" + id + "/result")->status, 422);
  EXPECT_EQ(Json::parse(client_->Get("/jobs/" + id)->body)["status"], "failed");
}

TEST_F(ServiceTest, BadTrackRequests) {
  Start();
  const std::string id = Create(ToCsv(TwoRidges()));
  EXPECT_EQ(Track(id, "not json", true)->status, 400);
  EXPECT_EQ(Track(id, R"({"L":0})", true)->status, 400);
  EXPECT_EQ(Track(id, R"({"bogus":1})", true)->status, 400);
  EXPECT_EQ(Track(id, R"({"constraints":[{"frames":[0,500],"bins":[0,1]}]})", true)->status, 400);
  EXPECT_EQ(Track(id, R"({"L":1,"constraints":[{"frames":[0,1],"bins":[0,1],"iteration":2}]})", true)
                ->status,
            400);
}

TEST_F(ServiceTest, ConflictWhileRunning) {
  Start();
  const std::string id = Create(ToCsv(TwoRidges()));
  const auto job = service_->jobs().Find(id);
  ASSERT_TRUE(BeginRun(*job, {}));
  EXPECT_EQ(Track(id, "{}", true)->status, 409);
  EXPECT_EQ(Track(id, "{}", false)->status, 409);
  EXPECT_EQ(client_->Get("/jobs/" + id + "/result")->status, 202);
  FinishRun(*job, 1, {});
  EXPECT_EQ(Track(id, "{}", true)->status, 200);
}

TEST_F(ServiceTest, JobsAreIsolated) {
  Start();
  const std::string payload = ToCsv(TwoRidges());
  const std::string a = Create(payload), b = Create(payload);
  const auto before = Track(b, "{}", true)->body;
  ASSERT_EQ(Track(a, R"({"constraints":[{"frames":[20,25],"bins":[28,32]}]})", true)->status,
            200);
  EXPECT_EQ(Track(b, "{}", true)->body, before);
  EXPECT_NE(client_->Get("/jobs/" + a + "/result")->body, before);
}

TEST_F(ServiceTest, LeastRecentlyUsedEviction) {
  ServiceOptions opts;
  opts.max_jobs = 2;
  Start(opts);
  const std::string payload = ToCsv(TwoRidges());
  const std::string a = Create(payload), b = Create(payload);
  EXPECT_EQ(client_->Get("/jobs/" + a)->status, 200);  // a is now most recent
  const std::string c = Create(payload);
  EXPECT_EQ(client_->Get("/jobs/" + b)->status, 404);
  EXPECT_EQ(client_->Get("/jobs/" + a)->status, 200);
  EXPECT_EQ(client_->Get("/jobs/" + c)->status, 200);
  EXPECT_EQ(service_->jobs().size(), 2u);
}

TEST_F(ServiceTest, StaticFiles) {
  const fs::path dir = fs::temp_directory_path() / "amtc_static_test";
  fs::create_directories(dir);
  std::ofstream(dir / "index.html") << "<html>ui</html>";
  ServiceOptions opts;
  opts.static_dir = dir;
  Start(opts);
  auto res = client_->Get("/index.html");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->body, "<html>ui</html>");
  EXPECT_EQ(client_->Get("/")->body, "<html>ui</html>");
  fs::remove_all(dir);
}

TEST(MaxPool, KeepsSmallInputs) {
  std::mt19937_64 rng(9);
  const Spectrogram z = testing::RandomSpectrogram(rng, 7, 5);
  EXPECT_EQ(MaxPool(z, 100, 100).values(), z.values());
  const Spectrogram p = MaxPool(z, 3, 2);
  EXPECT_EQ(p.values(), testing::MaxPoolOracle(z, 3, 2));
}

TEST(JobStore, ConcurrentAdds) {
  JobStore store(1000);
  std::vector<std::thread> threads;
  std::mutex m;
  std::set<std::string> ids;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 50; ++i) {
        const auto job = store.Add(Spectrogram(1, 1), RunConfig{});
        std::lock_guard lock(m);
        ids.insert(job->id);
      }
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(ids.size(), 400u);
  EXPECT_EQ(store.size(), 400u);
}

}  // namespace
}  // namespace amtc::tool
