#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ginger/bounded_queue.hpp"
#include "ginger/core.hpp"
#include "ginger/curation.hpp"
#include "ginger/llm.hpp"
#include "ginger/query_rewriter.hpp"
#include "ginger/reranker.hpp"
#include "ginger/response.hpp"
#include "ginger/retrieval.hpp"

namespace ginger {

/// Largest-remainder split of `total_workers` over the stages named in
/// `shares`, each stage getting at least one. Throws InsufficientWorkers
/// when there are fewer workers than stages.
std::map<Stage, int> plan_workers(int total_workers, const std::map<Stage, double>& shares);

struct Providers {
  std::shared_ptr<llm::Gateway> gateway;
  std::shared_ptr<const EmbeddingProvider> embedder;
  std::shared_ptr<const PointwiseScorer> pointwise;
  std::shared_ptr<const PairwiseScorer> pairwise;
};

struct RunOptions {
  PipelineConfig config;
  ClusteringParams clustering;
  /// Split by config.worker_shares; stages without a share get one worker.
  /// With no shares at all the split is even over the six stages.
  int total_workers = 6;
  std::size_t queue_capacity = 16;
  std::map<Stage, std::size_t> queue_capacities;  // per-stage input queue
};

enum class QueryStatus { pending, done, failed };

struct StageError {
  Stage stage;
  std::string message;
};

/// Everything one query accumulates on its way down the line.
struct QueryState {
  explicit QueryState(Query q) : query(std::move(q)) {}

  Query query;
  QueryStatus status = QueryStatus::pending;
  std::optional<Stage> last_completed;
  std::optional<StageError> error;

  RewriteSet rewrite{query, {}, {}, false};
  bool rewrite_degraded = false;
  ComposedQuery composed;
  RankedList fused;
  RankedList pointwise;
  RankedList pairwise;
  std::vector<FacetCluster> clusters;
  std::vector<std::pair<std::string, std::string>> skipped_passages;
  std::optional<GeneratedResponse> response;
};

struct StageReport {
  Stage stage;
  int workers = 0;
  std::size_t processed = 0;
  double busy_seconds = 0.0;
  double throughput = 0.0;  // queries per wall second
  QueueStats input_queue;
};

struct BatchReport {
  std::size_t processed = 0;  // reached done
  std::size_t failed = 0;
  std::size_t skipped = 0;    // already present when resuming
  std::vector<std::pair<std::string, StageError>> failures;
  double wall_seconds = 0.0;
  std::vector<StageReport> stages;

  nlohmann::json to_json() const;
};

/// Staged batch pipeline: rewrite, retrieve, rerank_point, rerank_pair,
/// curate, generate. Each stage owns a worker pool reading a bounded input
/// queue. Rewrite failures fall back to the original query and fluency
/// failures to the draft; any other stage failure fails only its query.
class Pipeline {
 public:
  using Sink = std::function<void(const QueryState&)>;

  /// Builds the sparse index and the corpus vectors. Throws ConfigInvalid.
  Pipeline(std::shared_ptr<const Corpus> corpus, Providers providers, RunOptions options);
  Pipeline(std::shared_ptr<const Corpus> corpus, SparseIndex index, Providers providers,
           RunOptions options);

  /// Runs one stage in place; never throws for per-query failures.
  void run_stage(Stage stage, QueryState& state) const;

  /// The six stages back to back on the calling thread.
  QueryState run_sequential(const Query& query) const;

  /// Every query ends done or failed. `sink` sees each finished state once,
  /// serialized, in completion order.
  BatchReport run_batch(std::span<const Query> queries, const Sink& sink) const;

  const std::map<Stage, int>& workers() const noexcept { return workers_; }
  const RunOptions& options() const noexcept { return options_; }
  const SparseIndex& index() const noexcept { return index_; }

 private:
  void stage_rewrite(QueryState& s) const;
  void stage_retrieve(QueryState& s) const;
  void stage_rerank_point(QueryState& s) const;
  void stage_rerank_pair(QueryState& s) const;
  void stage_curate(QueryState& s) const;
  void stage_generate(QueryState& s) const;

  std::shared_ptr<const Corpus> corpus_;
  SparseIndex index_;
  CorpusVectors vectors_;
  Providers providers_;
  RunOptions options_;
  std::map<Stage, int> workers_;
};

}  // namespace ginger
