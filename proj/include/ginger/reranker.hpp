#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ginger/core.hpp"

namespace ginger {

/// Independent (query, passage) relevance. Must be deterministic and
/// thread-safe.
class PointwiseScorer {
 public:
  virtual ~PointwiseScorer() = default;
  virtual double score(std::string_view query, std::string_view passage) const = 0;
};

/// Probability in [0, 1] that `a` is more relevant than `b`; 0.5 when
/// a == b. Must be deterministic and thread-safe.
class PairwiseScorer {
 public:
  virtual ~PairwiseScorer() = default;
  virtual double prefer(std::string_view query, std::string_view a, std::string_view b) const = 0;
};

/// Number of distinct query tokens present in the passage.
class LexicalOverlapScorer : public PointwiseScorer {
 public:
  double score(std::string_view query, std::string_view passage) const override;
};

/// logistic(overlap(a) - overlap(b)) with the lexical overlap above.
class OverlapLogisticScorer : public PairwiseScorer {
 public:
  double prefer(std::string_view query, std::string_view a, std::string_view b) const override;
};

std::size_t lexical_overlap(std::string_view query, std::string_view passage);

/// Rescores every candidate against the query and keeps the best `keep`
/// (clamped to the list size). Throws UnknownPassage for ids missing from
/// the corpus.
RankedList pointwise_rerank(const PointwiseScorer& scorer, const Query& query,
                            const RankedList& candidates, const Corpus& corpus, std::size_t keep);

struct PairwiseMatrix {
  std::vector<std::string> candidates;
  std::vector<std::vector<double>> p;  // p[i][j]: candidate i beats j

  std::size_t size() const noexcept { return candidates.size(); }
};

/// Evaluates every ordered pair (k * (k - 1) scorer calls); the diagonal is
/// 0.5. Throws ScorerFailure naming the pair on an out-of-range preference
/// or a scorer exception.
PairwiseMatrix build_pairwise_matrix(const PairwiseScorer& scorer, std::string_view query,
                                     std::span<const Passage> candidates);

/// score(i) = sum over j != i of p[i][j].
RankedList aggregate_pairwise(const PairwiseMatrix& matrix, std::string query_id = {});

/// Pairwise stage over the corpus passages of `candidates`.
RankedList pairwise_rerank(const PairwiseScorer& scorer, const Query& query,
                           const RankedList& candidates, const Corpus& corpus);

}  // namespace ginger
