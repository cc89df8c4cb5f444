#include "ginger/reranker.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "ginger/error.hpp"
#include "ginger/text.hpp"

namespace ginger {

std::size_t lexical_overlap(std::string_view query, std::string_view passage) {
  const auto q = text::tokenize(query);
  const std::unordered_set<std::string> query_terms(q.begin(), q.end());
  const auto p = text::tokenize(passage);
  const std::unordered_set<std::string> passage_terms(p.begin(), p.end());
  std::size_t n = 0;
  for (const auto& t : query_terms) n += passage_terms.contains(t);
  return n;
}

double LexicalOverlapScorer::score(std::string_view query, std::string_view passage) const {
  return static_cast<double>(lexical_overlap(query, passage));
}

double OverlapLogisticScorer::prefer(std::string_view query, std::string_view a,
                                     std::string_view b) const {
  const double diff = static_cast<double>(lexical_overlap(query, a)) -
                      static_cast<double>(lexical_overlap(query, b));
  return 1.0 / (1.0 + std::exp(-diff));
}

RankedList pointwise_rerank(const PointwiseScorer& scorer, const Query& query,
                            const RankedList& candidates, const Corpus& corpus, std::size_t keep) {
  std::vector<RankedEntry> rescored;
  rescored.reserve(candidates.size());
  for (const auto& e : candidates.entries()) {
    rescored.push_back({e.passage_id, scorer.score(query.text, corpus.at(e.passage_id).text)});
  }
  return RankedList(candidates.query_id(), std::move(rescored)).top(keep);
}

PairwiseMatrix build_pairwise_matrix(const PairwiseScorer& scorer, std::string_view query,
                                     std::span<const Passage> candidates) {
  if (candidates.empty()) throw Error(ErrorKind::InvalidArgument, "no pairwise candidates");
  const std::size_t k = candidates.size();
  PairwiseMatrix m;
  m.candidates.reserve(k);
  for (const auto& c : candidates) m.candidates.push_back(c.id);
  m.p.assign(k, std::vector<double>(k, 0.5));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      const auto pair = "(" + candidates[i].id + ", " + candidates[j].id + ")";
      double v = 0;
      try {
        v = scorer.prefer(query, candidates[i].text, candidates[j].text);
      } catch (const std::exception& e) {
        throw Error(ErrorKind::ScorerFailure, "pair " + pair + ": " + e.what());
      }
      if (!(v >= 0.0 && v <= 1.0)) {
        throw Error(ErrorKind::ScorerFailure, "pair " + pair + ": preference " +
                                                  std::to_string(v) + " outside [0, 1]");
      }
      m.p[i][j] = v;
    }
  }
  return m;
}

RankedList aggregate_pairwise(const PairwiseMatrix& matrix, std::string query_id) {
  std::vector<RankedEntry> entries;
  entries.reserve(matrix.size());
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    // Summed in ascending value order so the score does not depend on the
    // candidate order.
    std::vector<double> row;
    row.reserve(matrix.size());
    for (std::size_t j = 0; j < matrix.size(); ++j) {
      if (j != i) row.push_back(matrix.p[i][j]);
    }
    std::sort(row.begin(), row.end());
    double s = 0;
    for (double v : row) s += v;
    entries.push_back({matrix.candidates[i], s});
  }
  return RankedList(std::move(query_id), std::move(entries));
}

RankedList pairwise_rerank(const PairwiseScorer& scorer, const Query& query,
                           const RankedList& candidates, const Corpus& corpus) {
  if (candidates.empty()) return RankedList(candidates.query_id(), {});
  std::vector<Passage> passages;
  passages.reserve(candidates.size());
  for (const auto& e : candidates.entries()) passages.push_back(corpus.at(e.passage_id));
  return aggregate_pairwise(build_pairwise_matrix(scorer, query.text, passages),
                            candidates.query_id());
}

}  // namespace ginger
