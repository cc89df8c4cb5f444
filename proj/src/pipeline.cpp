#include "ginger/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "ginger/error.hpp"

namespace ginger {

std::map<Stage, int> plan_workers(int total_workers, const std::map<Stage, double>& shares) {
  if (shares.empty()) throw Error(ErrorKind::InvalidArgument, "no worker shares");
  const int stages = static_cast<int>(shares.size());
  if (total_workers < stages) {
    throw Error(ErrorKind::InsufficientWorkers, std::to_string(total_workers) + " workers for " +
                                                    std::to_string(stages) + " stages");
  }
  double sum = 0;
  for (const auto& [stage, share] : shares) {
    if (!(share > 0)) throw Error(ErrorKind::ConfigInvalid, "worker share must be > 0");
    sum += share;
  }

  struct Slot {
    Stage stage;
    int count;
    double fraction;
  };
  std::vector<Slot> slots;
  int assigned = 0;
  for (const auto& [stage, share] : shares) {
    const double quota = total_workers * share / sum;
    const int whole = static_cast<int>(std::floor(quota));
    slots.push_back({stage, whole, quota - whole});
    assigned += whole;
  }
  std::vector<std::size_t> order(slots.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return slots[a].fraction > slots[b].fraction; });
  for (std::size_t i = 0; assigned < total_workers; i = (i + 1) % order.size(), ++assigned) {
    ++slots[order[i]].count;
  }
  // Every stage needs a worker; take them from the largest pools.
  for (auto& slot : slots) {
    if (slot.count > 0) continue;
    auto donor = std::max_element(slots.begin(), slots.end(),
                                  [](const Slot& a, const Slot& b) { return a.count < b.count; });
    --donor->count;
    slot.count = 1;
  }

  std::map<Stage, int> out;
  for (const auto& s : slots) out[s.stage] = s.count;
  return out;
}

nlohmann::json BatchReport::to_json() const {
  nlohmann::json failures_json = nlohmann::json::array();
  for (const auto& [qid, err] : failures) {
    failures_json.push_back(
        {{"query_id", qid}, {"stage", std::string(to_string(err.stage))}, {"error", err.message}});
  }
  nlohmann::json stages_json = nlohmann::json::array();
  for (const auto& s : stages) {
    stages_json.push_back({{"stage", std::string(to_string(s.stage))},
                           {"workers", s.workers},
                           {"processed", s.processed},
                           {"busy_seconds", s.busy_seconds},
                           {"throughput", s.throughput},
                           {"queue_capacity", s.input_queue.capacity},
                           {"mean_queue_occupancy", s.input_queue.mean_occupancy},
                           {"max_queue_occupancy", s.input_queue.max_occupancy},
                           {"blocked_pushes", s.input_queue.blocked_pushes},
                           {"blocked_seconds", s.input_queue.blocked_seconds}});
  }
  return {{"processed", processed}, {"failed", failed},          {"skipped", skipped},
          {"wall_seconds", wall_seconds}, {"failures", failures_json}, {"stages", stages_json}};
}

Pipeline::Pipeline(std::shared_ptr<const Corpus> corpus, Providers providers, RunOptions options)
    : Pipeline(corpus, corpus ? index_corpus(corpus->passages()) : SparseIndex{},
               std::move(providers), std::move(options)) {}

Pipeline::Pipeline(std::shared_ptr<const Corpus> corpus, SparseIndex index, Providers providers,
                   RunOptions options)
    : corpus_(std::move(corpus)),
      index_(std::move(index)),
      providers_(std::move(providers)),
      options_(std::move(options)) {
  validate_config(options_.config);
  validate(options_.clustering);
  if (!corpus_) throw Error(ErrorKind::InvalidArgument, "pipeline needs a corpus");
  if (!providers_.gateway || !providers_.embedder || !providers_.pointwise || !providers_.pairwise) {
    throw Error(ErrorKind::InvalidArgument, "pipeline needs every provider");
  }
  if (index_.doc_count() != corpus_->size()) {
    throw Error(ErrorKind::ConfigInvalid, "sparse index does not match the corpus");
  }
  for (const auto& id : index_.doc_ids()) corpus_->at(id);
  vectors_ = embed_corpus(*providers_.embedder, corpus_->passages());

  std::map<Stage, double> shares = options_.config.worker_shares;
  if (shares.empty()) {
    for (Stage s : kAllStages) shares[s] = 1.0;
  }
  workers_ = plan_workers(options_.total_workers, shares);
  for (Stage s : kAllStages) workers_.try_emplace(s, 1);
}

void Pipeline::stage_rewrite(QueryState& s) const {
  try {
    s.rewrite = rewrite_query(*providers_.gateway, s.query, options_.config.l);
    s.composed = compose_search_string(s.query, s.rewrite.rewrites);
  } catch (const std::exception& e) {
    s.rewrite = RewriteSet{s.query, {}, {}, false};
    s.composed = compose_search_string(s.query, {});
    s.rewrite_degraded = true;
    s.error = StageError{Stage::rewrite, e.what()};
  }
}

void Pipeline::stage_retrieve(QueryState& s) const {
  const auto n = static_cast<std::size_t>(options_.config.n);
  FusionInput input;
  input.rrf_k = options_.config.rrf_k;
  input.lists.push_back(sparse_search(index_, s.composed.text, n, s.query.id));
  input.lists.push_back(dense_search(*providers_.embedder, vectors_, s.composed.text, n, s.query.id));
  s.fused = rrf_fuse(input, n);
}

void Pipeline::stage_rerank_point(QueryState& s) const {
  s.pointwise = pointwise_rerank(*providers_.pointwise, s.query, s.fused, *corpus_,
                                 static_cast<std::size_t>(options_.config.k));
}

void Pipeline::stage_rerank_pair(QueryState& s) const {
  s.pairwise = pairwise_rerank(*providers_.pairwise, s.query, s.pointwise, *corpus_)
                   .top(static_cast<std::size_t>(options_.config.m));
}

void Pipeline::stage_curate(QueryState& s) const {
  std::vector<Passage> passages;
  for (const auto& e : s.pairwise.entries()) passages.push_back(corpus_->at(e.passage_id));
  auto result = curate_context(*providers_.gateway, *providers_.embedder, *providers_.pairwise,
                               s.query, passages, options_.clustering);
  s.clusters = std::move(result.clusters);
  s.skipped_passages = std::move(result.skipped);
}

void Pipeline::stage_generate(QueryState& s) const {
  const auto limit = static_cast<std::size_t>(options_.config.effective_top_clusters());
  std::vector<ClusterSummary> summaries;
  for (std::size_t i = 0; i < s.clusters.size() && i < limit; ++i) {
    summaries.push_back(summarize_cluster(*providers_.gateway, s.clusters[i]));
  }
  const auto draft = assemble_response(s.query.id, summaries,
                                       static_cast<std::size_t>(options_.config.word_budget));
  s.response = improve_fluency(*providers_.gateway, s.query, draft);
}

void Pipeline::run_stage(Stage stage, QueryState& s) const {
  if (s.status != QueryStatus::pending) return;
  try {
    switch (stage) {
      case Stage::rewrite: stage_rewrite(s); break;
      case Stage::retrieve: stage_retrieve(s); break;
      case Stage::rerank_point: stage_rerank_point(s); break;
      case Stage::rerank_pair: stage_rerank_pair(s); break;
      case Stage::curate: stage_curate(s); break;
      case Stage::generate: stage_generate(s); break;
    }
  } catch (const std::exception& e) {
    s.status = QueryStatus::failed;
    s.error = StageError{stage, e.what()};
    return;
  }
  s.last_completed = stage;
  if (stage == Stage::generate) s.status = QueryStatus::done;
}

QueryState Pipeline::run_sequential(const Query& query) const {
  QueryState s(query);
  for (Stage stage : kAllStages) run_stage(stage, s);
  return s;
}

BatchReport Pipeline::run_batch(std::span<const Query> queries, const Sink& sink) const {
  using Item = std::shared_ptr<QueryState>;  // nullptr is the shutdown pill
  const auto start = std::chrono::steady_clock::now();

  std::vector<std::unique_ptr<BoundedQueue<Item>>> queues;
  std::vector<int> counts;
  for (Stage s : kAllStages) {
    auto it = options_.queue_capacities.find(s);
    const auto cap = it != options_.queue_capacities.end() ? it->second : options_.queue_capacity;
    queues.push_back(std::make_unique<BoundedQueue<Item>>(cap));
    counts.push_back(workers_.at(s));
  }

  BatchReport report;
  std::mutex report_mutex;
  std::exception_ptr sink_error;
  std::vector<StageReport> stage_reports(kStageCount);
  std::vector<std::atomic<int>> active(kStageCount);
  for (std::size_t i = 0; i < kStageCount; ++i) {
    stage_reports[i].stage = kAllStages[i];
    stage_reports[i].workers = counts[i];
    active[i] = counts[i];
  }

  auto finish = [&](const QueryState& s) {
    std::lock_guard lock(report_mutex);
    if (s.status == QueryStatus::done) {
      ++report.processed;
    } else {
      ++report.failed;
      report.failures.emplace_back(s.query.id, *s.error);
    }
    if (sink && !sink_error) {
      try {
        sink(s);
      } catch (...) {
        sink_error = std::current_exception();
      }
    }
  };

  auto worker = [&](std::size_t i) {
    const Stage stage = kAllStages[i];
    std::size_t processed = 0;
    std::chrono::steady_clock::duration busy{};
    for (;;) {
      Item item = queues[i]->pop();
      if (!item) break;
      const auto t0 = std::chrono::steady_clock::now();
      run_stage(stage, *item);
      busy += std::chrono::steady_clock::now() - t0;
      ++processed;
      if (item->status != QueryStatus::pending || i + 1 == kStageCount) {
        finish(*item);
      } else {
        queues[i + 1]->push(std::move(item));
      }
    }
    {
      std::lock_guard lock(report_mutex);
      stage_reports[i].processed += processed;
      stage_reports[i].busy_seconds += std::chrono::duration<double>(busy).count();
    }
    if (--active[i] == 0 && i + 1 < kStageCount) {
      for (int w = 0; w < counts[i + 1]; ++w) queues[i + 1]->push(nullptr);
    }
  };

  std::vector<std::thread> threads;
  for (std::size_t i = 0; i < kStageCount; ++i) {
    for (int w = 0; w < counts[i]; ++w) threads.emplace_back(worker, i);
  }
  for (const auto& q : queries) queues[0]->push(std::make_shared<QueryState>(q));
  for (int w = 0; w < counts[0]; ++w) queues[0]->push(nullptr);
  for (auto& t : threads) t.join();

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (std::size_t i = 0; i < kStageCount; ++i) {
    stage_reports[i].input_queue = queues[i]->stats();
    stage_reports[i].throughput =
        report.wall_seconds > 0 ? static_cast<double>(stage_reports[i].processed) / report.wall_seconds
                                : 0.0;
  }
  report.stages = std::move(stage_reports);
  if (sink_error) std::rethrow_exception(sink_error);
  return report;
}

}  // namespace ginger
