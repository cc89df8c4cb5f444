#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ginger/core.hpp"
#include "ginger/llm.hpp"
#include "ginger/reranker.hpp"
#include "ginger/retrieval.hpp"

namespace ginger {

inline constexpr std::string_view kNuggetOpenTag = "<START>";
inline constexpr std::string_view kNuggetCloseTag = "</END>";

struct AnnotatedPassage {
  std::string passage_id;
  std::string annotated_text;
};

/// Raw provider annotation; no validation here.
AnnotatedPassage detect_nuggets(llm::Gateway& gateway, const Query& query, const Passage& passage);

/// One nugget per non-empty tag pair, with offsets into the original text.
/// Stripping the tags must reproduce the passage exactly; failing that, a
/// second comparison collapses whitespace runs and trims both ends, and
/// spans are mapped back onto the original text.
/// Throws MalformedTags for unpaired or nested tags and AnnotationMismatch
/// when the text was altered.
std::vector<InformationNugget> parse_annotations(const Passage& original,
                                                 const AnnotatedPassage& annotated);

struct ClusteringParams {
  double similarity_threshold = 0.6;
  std::size_t min_cluster_size = 1;
};

void validate(const ClusteringParams& params);

using SimilarityMatrix = std::vector<std::vector<double>>;

/// Average-linkage agglomeration. Repeatedly merges the pair of clusters
/// with the highest mean pairwise similarity while it is at least the
/// threshold; ties go to the pair with the lowest member indices. Clusters
/// below min_cluster_size are then folded into their most similar
/// neighbour. Groups hold sorted indices and are ordered by first member.
std::vector<std::vector<std::size_t>> agglomerate(const SimilarityMatrix& similarity,
                                                  const ClusteringParams& params);

/// Nuggets are put in canonical order before clustering, so the result does
/// not depend on the input order. Cluster ids are "c001", "c002", ...
std::vector<FacetCluster> cluster_nuggets(std::vector<InformationNugget> nuggets,
                                          const EmbeddingProvider& embedder,
                                          const ClusteringParams& params);

/// Ranks clusters by pairwise preference over their representative texts.
/// Returns them sorted with rank 1 first.
std::vector<FacetCluster> rank_clusters(const PairwiseScorer& scorer, const Query& query,
                                        std::vector<FacetCluster> clusters);

struct CurationResult {
  std::vector<FacetCluster> clusters;  // ranked
  std::vector<std::pair<std::string, std::string>> skipped;  // passage id, reason
};

/// Detection over `passages`; a passage whose annotation fails or does not
/// verify is skipped. Throws NoNuggets when nothing survives.
CurationResult curate_context(llm::Gateway& gateway, const EmbeddingProvider& embedder,
                              const PairwiseScorer& scorer, const Query& query,
                              std::span<const Passage> passages, const ClusteringParams& params);

}  // namespace ginger
