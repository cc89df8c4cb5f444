#include <doctest.h>

#include <thread>

#include "ginger/bounded_queue.hpp"
#include "ginger/error.hpp"
#include "ginger/io.hpp"
#include "ginger/pipeline.hpp"
#include "ginger/text.hpp"

using namespace ginger;
using namespace ginger::llm;
namespace fs = std::filesystem;

namespace {

const fs::path kData = GINGER_TEST_DATA;

ProviderPolicy fast() {
  ProviderPolicy p;
  p.max_retries = 0;
  p.backoff_base = std::chrono::milliseconds(0);
  p.rate_limit = 1e6;
  return p;
}

Providers providers(std::shared_ptr<Provider> provider = std::make_shared<MockProvider>()) {
  Providers p;
  p.gateway = std::make_shared<Gateway>(std::move(provider), fast());
  p.embedder = std::make_shared<HashingEmbedder>(128);
  p.pointwise = std::make_shared<LexicalOverlapScorer>();
  p.pairwise = std::make_shared<OverlapLogisticScorer>();
  return p;
}

RunOptions toy_options() {
  RunOptions o;
  o.config.n = 20;
  o.config.k = 8;
  o.config.m = 4;
  o.config.word_budget = 120;
  o.total_workers = 6;
  o.queue_capacity = 2;
  return o;
}

std::shared_ptr<const Corpus> toy_corpus() {
  return std::make_shared<const Corpus>(io::load_corpus(kData / "toy_corpus.jsonl"));
}

std::vector<Query> toy_queries() { return io::load_queries(kData / "toy_queries.jsonl"); }

// Fails permanently for one query text.
MockProvider::FailureHook fail_for(std::string text) {
  return [text](const CompletionRequest& r) -> std::optional<ProviderError> {
    auto it = r.bindings.find("query");
    if (it != r.bindings.end() && it->second == text) return ProviderError(false, "rejected", 400);
    return std::nullopt;
  };
}

}  // namespace

TEST_CASE("plan_workers largest remainder") {
  using M = std::map<Stage, int>;
  CHECK(plan_workers(12, {{Stage::rerank_pair, 0.75}, {Stage::rerank_point, 0.125}, {Stage::generate, 0.125}}) ==
        M{{Stage::rerank_point, 2}, {Stage::rerank_pair, 9}, {Stage::generate, 1}});
  CHECK(plan_workers(4, {{Stage::curate, 0.5}, {Stage::generate, 0.5}}) == M{{Stage::curate, 2}, {Stage::generate, 2}});
  CHECK(plan_workers(3, {{Stage::rewrite, 0.98}, {Stage::retrieve, 0.01}, {Stage::curate, 0.01}}) ==
        M{{Stage::rewrite, 1}, {Stage::retrieve, 1}, {Stage::curate, 1}});
  M even;
  std::map<Stage, double> equal;
  for (Stage s : kAllStages) {
    equal[s] = 1.0;
    even[s] = 2;
  }
  CHECK(plan_workers(12, equal) == even);
  try {
    plan_workers(2, equal);
    FAIL("expected InsufficientWorkers");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InsufficientWorkers);
  }
  CHECK_THROWS_AS(plan_workers(4, {{Stage::curate, 0.0}}), Error);
}

TEST_CASE("plan_workers always sums to the total") {
  for (int total = 6; total < 40; ++total) {
    const auto w = plan_workers(total, {{Stage::rewrite, 0.1}, {Stage::retrieve, 0.2}, {Stage::rerank_point, 0.05},
                                        {Stage::rerank_pair, 0.5}, {Stage::curate, 0.1}, {Stage::generate, 0.05}});
    int sum = 0;
    for (const auto& [s, c] : w) {
      CHECK(c >= 1);
      sum += c;
    }
    CHECK(sum == total);
  }
}

TEST_CASE("unlisted stages get one worker") {
  auto opts = toy_options();
  opts.total_workers = 12;
  opts.config.worker_shares = {{Stage::rerank_pair, 0.75}, {Stage::rerank_point, 0.125}, {Stage::generate, 0.125}};
  Pipeline p(toy_corpus(), providers(), opts);
  CHECK(p.workers().at(Stage::rerank_pair) == 9);
  CHECK(p.workers().at(Stage::rewrite) == 1);
  CHECK(p.workers().size() == 6);
}

TEST_CASE("pipeline construction checks") {
  auto opts = toy_options();
  opts.config.m = 9;
  CHECK_THROWS_AS(Pipeline(toy_corpus(), providers(), opts), Error);
  CHECK_THROWS_AS(Pipeline(toy_corpus(), Providers{}, toy_options()), Error);
  std::vector<Passage> other = {Passage("x", "y")};
  CHECK_THROWS_AS(Pipeline(toy_corpus(), index_corpus(other), providers(), toy_options()), Error);
}

TEST_CASE("sequential run of one query") {
  Pipeline p(toy_corpus(), providers(), toy_options());
  const auto s = p.run_sequential(Query("q1", "how much do solar panels cost"));
  REQUIRE(s.status == QueryStatus::done);
  CHECK(s.last_completed == Stage::generate);
  CHECK(s.rewrite.rewrites.size() == 3);
  CHECK(s.fused.size() <= 20);
  CHECK(s.pointwise.size() == 8);
  CHECK(s.pairwise.size() == 4);
  REQUIRE(s.response.has_value());
  CHECK(text::word_count(s.response->text) <= 120);
  CHECK_FALSE(s.response->citations.empty());
  for (const auto& id : s.response->citations) CHECK(id[0] == 's');
}

TEST_CASE("batch run matches sequential runs") {
  Pipeline p(toy_corpus(), providers(), toy_options());
  const auto queries = toy_queries();
  std::map<std::string, std::string> batch;
  const auto report = p.run_batch(queries, [&](const QueryState& s) {
    REQUIRE(s.response.has_value());
    batch[s.query.id] = io::response_to_json(*s.response).dump();
  });
  CHECK(report.processed == 5);
  CHECK(report.failed == 0);
  REQUIRE(report.stages.size() == 6);
  for (const auto& st : report.stages) CHECK(st.processed == 5);
  for (const auto& q : queries) {
    const auto s = p.run_sequential(q);
    CHECK(io::response_to_json(*s.response).dump() == batch.at(q.id));
  }
  const auto j = report.to_json();
  CHECK(j["processed"] == 5);
  CHECK(j["stages"].size() == 6);
}

TEST_CASE("a failing query does not affect the others") {
  const auto queries = toy_queries();
  Pipeline p(toy_corpus(), providers(std::make_shared<MockProvider>(std::chrono::microseconds(0), fail_for(queries[1].text))),
             toy_options());
  std::vector<std::string> done;
  const auto report = p.run_batch(queries, [&](const QueryState& s) {
    if (s.status == QueryStatus::done) done.push_back(s.query.id);
  });
  CHECK(report.processed == 4);
  CHECK(report.failed == 1);
  REQUIRE(report.failures.size() == 1);
  CHECK(report.failures[0].first == "q2");
  CHECK(report.failures[0].second.stage == Stage::curate);
  CHECK(done.size() == 4);
}

TEST_CASE("rewrite failures degrade to the original query") {
  auto hook = [](const CompletionRequest& r) -> std::optional<ProviderError> {
    if (r.template_id == TemplateId::intermediate_answer) return ProviderError(false, "no", 400);
    return std::nullopt;
  };
  Pipeline p(toy_corpus(), providers(std::make_shared<MockProvider>(std::chrono::microseconds(0), hook)),
             toy_options());
  const auto s = p.run_sequential(Query("q1", "how much do solar panels cost"));
  CHECK(s.status == QueryStatus::done);
  CHECK(s.rewrite_degraded);
  CHECK(s.composed.text == "how much do solar panels cost");
}

TEST_CASE("an empty batch finishes") {
  Pipeline p(toy_corpus(), providers(), toy_options());
  const auto report = p.run_batch({}, {});
  CHECK(report.processed == 0);
}

TEST_CASE("no deadlock across queue capacities and worker counts") {
  const auto queries = toy_queries();
  for (std::size_t cap : {1, 4, 64}) {
    for (int workers : {6, 12, 20}) {
      auto opts = toy_options();
      opts.queue_capacity = cap;
      opts.total_workers = workers;
      Pipeline p(toy_corpus(), providers(), opts);
      std::vector<Query> many;
      for (int rep = 0; rep < 4; ++rep)
        for (const auto& q : queries) many.emplace_back(q.id + "_" + std::to_string(rep), q.text);
      std::size_t seen = 0;
      const auto report = p.run_batch(many, [&](const QueryState&) { ++seen; });
      CHECK(seen == many.size());
      CHECK(report.processed == many.size());
      for (const auto& st : report.stages) CHECK(st.input_queue.max_occupancy <= cap);
    }
  }
}

TEST_CASE("bounded queue blocks producers when full") {
  BoundedQueue<int> q(2);
  q.push(1);
  q.push(2);
  std::atomic<bool> pushed{false};
  std::thread producer([&] {
    q.push(3);
    pushed = true;
  });
  std::this_thread::sleep_for(std::chrono::milliseconds(50));
  CHECK_FALSE(pushed.load());
  CHECK(q.pop() == 1);
  producer.join();
  CHECK(pushed.load());
  CHECK(q.pop() == 2);
  CHECK(q.pop() == 3);
  const auto st = q.stats();
  CHECK(st.capacity == 2);
  CHECK(st.pushes == 3);
  CHECK(st.blocked_pushes == 1);
  CHECK(st.max_occupancy == 2);
  CHECK(st.blocked_seconds > 0.02);
}

TEST_CASE("small queues keep occupancy low under a slow consumer") {
  auto run = [](std::size_t capacity) {
    BoundedQueue<int> q(capacity);
    std::thread consumer([&] {
      for (int i = 0; i < 40; ++i) {
        q.pop();
        std::this_thread::sleep_for(std::chrono::milliseconds(1));
      }
    });
    for (int i = 0; i < 40; ++i) q.push(i);
    consumer.join();
    return q.stats();
  };
  const auto tight = run(2);
  const auto loose = run(1000);
  CHECK(tight.max_occupancy <= 2);
  CHECK(tight.blocked_pushes > 0);
  CHECK(loose.max_occupancy > 10);
  CHECK(tight.mean_occupancy < loose.mean_occupancy);
}
