#pragma once

#include <string>
#include <vector>

#include "ginger/core.hpp"
#include "ginger/llm.hpp"

namespace ginger {

inline constexpr std::size_t kSummaryWordLimit = 70;

struct ClusterSummary {
  std::string cluster_id;
  std::string sentence;
  std::size_t word_count = 0;
  std::vector<std::string> source_passage_ids;
  bool truncated = false;
};

struct DraftResponse {
  std::string query_id;
  std::vector<ClusterSummary> summaries;  // included ones, in rank order
  std::size_t total_words = 0;
  std::size_t word_budget = 0;

  std::string text() const;
  std::vector<TraceEntry> trace() const;
};

/// Keeps complete sentences while they fit in `limit` words; with no
/// sentence boundary inside the limit, cuts at `limit` words.
std::string truncate_to_sentences(std::string_view s, std::size_t limit, bool* truncated);

/// One-sentence summary of a cluster. Completions over 70 words are cut
/// back to sentence boundaries and flagged. Throws EmptyCompletion.
ClusterSummary summarize_cluster(llm::Gateway& gateway, const FacetCluster& cluster);

/// Greedy packing in rank order: a summary that would overflow the budget
/// is skipped and packing continues. The first summary is always kept, cut
/// to the budget if needed. Throws NoSummaries.
DraftResponse assemble_response(std::string query_id, const std::vector<ClusterSummary>& summaries,
                                std::size_t word_budget);

/// Fluency rewrite of the draft. The draft text is kept when the provider
/// fails (fluency_skipped) or the rewrite exceeds 1.1 x the budget
/// (fluency_fallback). Citations and trace always come from the draft.
GeneratedResponse improve_fluency(llm::Gateway& gateway, const Query& query,
                                  const DraftResponse& draft);

}  // namespace ginger
