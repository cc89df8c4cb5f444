#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ginger {

struct Query {
  std::string id;
  std::string text;

  /// Throws InvalidArgument when the text is blank.
  Query(std::string id, std::string text);
};

struct Passage {
  std::string id;
  std::string text;

  Passage(std::string id, std::string text);
};

/// Id-addressable passage collection; ids are unique.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<Passage> passages);

  const std::vector<Passage>& passages() const noexcept { return passages_; }
  std::size_t size() const noexcept { return passages_.size(); }
  bool empty() const noexcept { return passages_.empty(); }

  const Passage* find(std::string_view id) const;
  /// Throws UnknownPassage.
  const Passage& at(std::string_view id) const;

 private:
  std::vector<Passage> passages_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

struct RankedEntry {
  std::string passage_id;
  double score = 0.0;

  friend bool operator==(const RankedEntry&, const RankedEntry&) = default;
};

/// Scores descending, ties by passage id ascending. Duplicate ids are
/// rejected at construction.
class RankedList {
 public:
  RankedList() = default;
  RankedList(std::string query_id, std::vector<RankedEntry> entries);

  const std::string& query_id() const noexcept { return query_id_; }
  const std::vector<RankedEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const RankedEntry& operator[](std::size_t i) const { return entries_[i]; }

  RankedList top(std::size_t n) const;
  std::vector<std::string> ids() const;

  friend bool operator==(const RankedList&, const RankedList&) = default;

 private:
  std::string query_id_;
  std::vector<RankedEntry> entries_;
};

bool ranks_before(const RankedEntry& a, const RankedEntry& b) noexcept;

/// Verbatim span of a passage. `start`/`end` are Unicode scalar offsets.
struct InformationNugget {
  std::string passage_id;
  std::size_t start = 0;
  std::size_t end = 0;
  std::string text;

  /// Slices the passage; throws InvalidArgument on an empty or out of range
  /// span.
  static InformationNugget slice(const Passage& passage, std::size_t start, std::size_t end);

  /// Throws InvalidArgument unless `text` equals the passage slice.
  InformationNugget(const Passage& passage, std::size_t start, std::size_t end, std::string text);

  friend bool operator==(const InformationNugget&, const InformationNugget&) = default;

 private:
  InformationNugget() = default;
};

/// Canonical nugget order: passage id, then offsets, then text.
bool nugget_before(const InformationNugget& a, const InformationNugget& b) noexcept;

struct FacetCluster {
  std::string cluster_id;
  std::vector<InformationNugget> nuggets;
  std::string representative_text;
  int rank = 0;  // 0 until ranked

  FacetCluster(std::string cluster_id, std::vector<InformationNugget> nuggets);

  /// Distinct member passage ids in first-appearance order.
  std::vector<std::string> source_passage_ids() const;
};

struct TraceEntry {
  std::string cluster_id;
  std::string sentence;
  std::vector<std::string> sources;

  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

struct GeneratedResponse {
  std::string query_id;
  std::string text;
  std::vector<std::string> citations;
  std::vector<TraceEntry> cluster_trace;
  bool fluency_skipped = false;   // provider failed, draft kept
  bool fluency_fallback = false;  // rephrase broke the length guard

  /// Derives citations from the trace.
  static GeneratedResponse from_trace(std::string query_id, std::string text,
                                      std::vector<TraceEntry> trace);
};

std::vector<std::string> citations_of(std::span<const TraceEntry> trace);

enum class Stage { rewrite, retrieve, rerank_point, rerank_pair, curate, generate };

inline constexpr std::size_t kStageCount = 6;
inline constexpr Stage kAllStages[kStageCount] = {Stage::rewrite,     Stage::retrieve,
                                                  Stage::rerank_point, Stage::rerank_pair,
                                                  Stage::curate,      Stage::generate};

std::string_view to_string(Stage stage) noexcept;
std::optional<Stage> parse_stage(std::string_view name) noexcept;

struct PipelineConfig {
  int l = 3;               // query rewrites
  int n = 500;             // first-pass depth and pointwise candidates
  int k = 40;              // pairwise candidates
  int m = 10;              // passages used for generation
  double rrf_k = 60.0;
  int word_budget = 300;
  std::optional<int> top_clusters;  // defaults to m
  std::map<Stage, double> worker_shares;

  int effective_top_clusters() const { return top_clusters.value_or(m); }
};

/// Returns the config unchanged, or throws ConfigInvalid naming the first
/// violated constraint.
const PipelineConfig& validate_config(const PipelineConfig& config);

}  // namespace ginger
