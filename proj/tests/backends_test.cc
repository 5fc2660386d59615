// Copyright 2026 The ragcal Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "ragcal/backends.h"

#include <atomic>
#include <cmath>
#include <string>
#include <thread>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "httplib.h"
#include "nlohmann/json.hpp"
#include "ragcal/metrics.h"
#include "ragcal/prompt.h"
#include "test_util.h"

namespace ragcal {
namespace {

using ::testing::ElementsAre;
using ::testing::HasSubstr;

QaItem FourOptionItem(int gold) {
  QaItem item;
  item.id = "item";
  item.question = "q";
  item.options = {"a", "b", "c", "d"};
  item.gold_index = gold;
  item.rationale = "r";
  return item;
}

TEST(SynthScoreTest, NoDocsNoBoostIsFlat) {
  const SyntheticConfig config{0.0, 1.0, 0.0, 0};
  const std::vector<double> v =
      SynthScore(config, FourOptionItem(2), ScenarioSpec{}, false);
  EXPECT_THAT(v, ElementsAre(0, 0, 0, 0));
}

TEST(SynthScoreTest, AnswerDocumentBoost) {
  const SyntheticConfig config{0.0, std::log(9.0), 0.0, 0};
  const std::vector<double> v = SynthScore(
      config, FourOptionItem(2), ScenarioSpec{Mixture::kAns1}, true);
  EXPECT_THAT(v, ElementsAre(0, 0, std::log(9.0), 0));
  auto p = Normalize(v);
  ASSERT_TRUE(p.ok());
  EXPECT_NEAR((*p)[2], 0.75, 1e-15);
}

TEST(SynthScoreTest, ZeroSensitivityIgnoresMixture) {
  const SyntheticConfig config{0.7, 0.0, 0.5, 9};
  const QaItem item = FourOptionItem(1);
  for (Position position : kAllPositions) {
    const auto reference = SynthScore(
        config, item, ScenarioSpec{Mixture::kOth3, position}, false);
    for (Mixture mixture : {Mixture::kAns1, Mixture::kAns1Oth2}) {
      EXPECT_EQ(SynthScore(config, item, ScenarioSpec{mixture, position},
                           HasAnswerDocument(mixture)),
                reference);
    }
  }
}

TEST(SyntheticBackendTest, DeterministicAcrossInstances) {
  const std::vector<QaItem> items = testing::MakeItems(5);
  const SyntheticConfig config{0.3, 2.0, 0.5, 17};
  const SyntheticBackend first(config, items);
  const SyntheticBackend second(config, items);
  EXPECT_EQ(first.id(), second.id());
  auto docs = BuildContext(items[1], Mixture::kAns1, items, 17);
  ASSERT_TRUE(docs.ok());
  auto prompt = RenderPrompt(items[1], *docs,
                             ScenarioSpec{Mixture::kAns1, Position::kAftQ, 17});
  ASSERT_TRUE(prompt.ok());
  auto a = ScoreOptions(first, *prompt);
  auto b = ScoreOptions(second, *prompt);
  ASSERT_TRUE(a.ok() && b.ok());
  EXPECT_EQ(*a, *b);

  const SyntheticBackend other(SyntheticConfig{0.3, 2.0, 0.5, 18}, items);
  EXPECT_NE(other.id().name, first.id().name);
}

TEST(SyntheticBackendTest, UnknownItemIsAnError) {
  const SyntheticBackend backend(SyntheticConfig{}, testing::MakeItems(2));
  PromptInstance prompt;
  prompt.item_id = "missing";
  prompt.labels = {"A", "B"};
  EXPECT_EQ(backend.ScoreOptions(prompt).status().code(),
            absl::StatusCode::kNotFound);
}

TEST(SyntheticConfigTest, Validation) {
  EXPECT_TRUE(ValidateSyntheticConfig({}).ok());
  EXPECT_FALSE(ValidateSyntheticConfig({0, 0, -1, 0}).ok());
  EXPECT_FALSE(ValidateSyntheticConfig({std::nan(""), 0, 0, 0}).ok());
}

// A local server speaking the label-logprob protocol.
class LabelLogprobServer {
 public:
  LabelLogprobServer() {
    server_.Post("/v1/label_logprobs", [this](const httplib::Request& request,
                                              httplib::Response& response) {
      ++requests_;
      last_authorization_ = request.get_header_value("Authorization");
      const auto body = nlohmann::json::parse(request.body, nullptr, false);
      if (!body.is_object() || !body.contains("labels")) {
        response.status = 400;
        response.set_content(R"({"error":"bad request body"})",
                             "application/json");
        return;
      }
      if (failures_before_success_ > 0) {
        --failures_before_success_;
        response.status = 503;
        response.set_content(R"({"error":"warming up"})", "application/json");
        return;
      }
      const std::string prompt = body["prompt"].get<std::string>();
      if (prompt == "reject me") {
        response.status = 422;
        response.set_content(R"({"error":"prompt too long"})",
                             "application/json");
        return;
      }
      nlohmann::json logprobs = nlohmann::json::array();
      const std::vector<double> canned = {-0.1, -3.2, -4.0, -5.0};
      size_t count = body["labels"].size();
      if (prompt == "drop last") --count;
      for (size_t i = 0; i < count; ++i) logprobs.push_back(canned[i % 4]);
      response.set_content(
          nlohmann::json{{"model", "fake-model"}, {"logprobs", logprobs}}
              .dump(),
          "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~LabelLogprobServer() {
    server_.stop();
    thread_.join();
  }

  std::string endpoint() const {
    return "http://127.0.0.1:" + std::to_string(port_);
  }
  int requests() const { return requests_; }
  std::string last_authorization() const { return last_authorization_; }
  void FailNext(int count) { failures_before_success_ = count; }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> requests_{0};
  std::atomic<int> failures_before_success_{0};
  std::string last_authorization_;
};

HttpOptions FastOptions() {
  HttpOptions options;
  options.timeout_seconds = 5;
  options.max_retries = 3;
  options.initial_backoff_ms = 1;
  return options;
}

TEST(HttpScoreTest, MapsLogprobsInLabelOrder) {
  LabelLogprobServer server;
  auto v = HttpScore(server.endpoint(), "...Answer:", {"A", "B", "C"},
                     FastOptions());
  ASSERT_TRUE(v.ok()) << v.status();
  EXPECT_THAT(*v, ElementsAre(-0.1, -3.2, -4.0));
  // The adapter is deterministic, so a repeat must agree.
  auto again = HttpScore(server.endpoint(), "...Answer:", {"A", "B", "C"},
                         FastOptions());
  ASSERT_TRUE(again.ok());
  EXPECT_EQ(*again, *v);
}

TEST(HttpScoreTest, MissingLabelNamesIt) {
  LabelLogprobServer server;
  auto v = HttpScore(server.endpoint(), "drop last", {"A", "B", "C"},
                     FastOptions());
  ASSERT_FALSE(v.ok());
  EXPECT_THAT(std::string(v.status().message()),
              HasSubstr("no logprob for label \"C\""));
}

TEST(HttpScoreTest, ClientErrorIsNotRetried) {
  LabelLogprobServer server;
  auto v = HttpScore(server.endpoint(), "reject me", {"A", "B"}, FastOptions());
  ASSERT_FALSE(v.ok());
  EXPECT_EQ(v.status().code(), absl::StatusCode::kInvalidArgument);
  EXPECT_THAT(std::string(v.status().message()), HasSubstr("prompt too long"));
  EXPECT_EQ(server.requests(), 1);
}

TEST(HttpScoreTest, ServerErrorsAreRetried) {
  LabelLogprobServer server;
  server.FailNext(2);
  auto v = HttpScore(server.endpoint(), "p", {"A", "B"}, FastOptions());
  ASSERT_TRUE(v.ok()) << v.status();
  EXPECT_EQ(server.requests(), 3);

  server.FailNext(10);
  v = HttpScore(server.endpoint(), "p", {"A", "B"}, FastOptions());
  ASSERT_FALSE(v.ok());
  EXPECT_EQ(v.status().code(), absl::StatusCode::kUnavailable);
  EXPECT_THAT(std::string(v.status().message()), HasSubstr("4 attempts"));
}

TEST(HttpScoreTest, DeadEndpointNamesEndpoint) {
  HttpOptions options = FastOptions();
  options.max_retries = 1;
  options.timeout_seconds = 2;
  const std::string endpoint = "http://127.0.0.1:1";
  auto v = HttpScore(endpoint, "p", {"A", "B"}, options);
  ASSERT_FALSE(v.ok());
  EXPECT_EQ(v.status().code(), absl::StatusCode::kUnavailable);
  EXPECT_THAT(std::string(v.status().message()), HasSubstr(endpoint));
}

TEST(HttpScoreTest, SendsBearerToken) {
  LabelLogprobServer server;
  HttpOptions options = FastOptions();
  options.auth_token = "s3cret";
  ASSERT_TRUE(HttpScore(server.endpoint(), "p", {"A", "B"}, options).ok());
  EXPECT_EQ(server.last_authorization(), "Bearer s3cret");
}

TEST(HttpScoreTest, RejectsBadEndpoints) {
  EXPECT_FALSE(HttpScore("https://example.com", "p", {"A"}).ok());
  EXPECT_FALSE(HttpScore("http://", "p", {"A"}).ok());
}

TEST(ParseLabelLogprobsResponseTest, SchemaErrors) {
  EXPECT_FALSE(ParseLabelLogprobsResponse("[]", {"A"}).ok());
  EXPECT_FALSE(ParseLabelLogprobsResponse(R"({"logprobs":[0]})", {"A"}).ok());
  EXPECT_FALSE(
      ParseLabelLogprobsResponse(R"({"model":"m","logprobs":[0,1]})", {"A"})
          .ok());
  auto v =
      ParseLabelLogprobsResponse(R"({"model":"m","logprobs":[-1,-2]})", {"A", "B"});
  ASSERT_TRUE(v.ok());
  EXPECT_THAT(*v, ElementsAre(-1, -2));
}

TEST(RemoteBackendTest, ScoresThroughServer) {
  LabelLogprobServer server;
  RemoteConfig config;
  config.endpoint = server.endpoint();
  config.http = FastOptions();
  const RemoteBackend backend(config);
  EXPECT_EQ(backend.id().kind, BackendKind::kRemote);
  EXPECT_EQ(backend.id().name, "remote:" + server.endpoint());

  const std::vector<QaItem> items = testing::MakeItems(4);
  auto prompt = RenderPrompt(items[0], {}, ScenarioSpec{});
  ASSERT_TRUE(prompt.ok());
  auto v = ScoreOptions(backend, *prompt);
  ASSERT_TRUE(v.ok()) << v.status();
  EXPECT_THAT(*v, ElementsAre(-0.1, -3.2, -4.0, -5.0));

  config.model_name = "named";
  EXPECT_EQ(RemoteBackend(config).id().name, "named");
}

}  // namespace
}  // namespace ragcal
