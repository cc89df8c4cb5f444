#include "ginger/response.hpp"

#include "ginger/error.hpp"
#include "ginger/text.hpp"

namespace ginger {

std::string DraftResponse::text() const {
  std::string out;
  for (const auto& s : summaries) {
    if (!out.empty()) out.push_back(' ');
    out += s.sentence;
  }
  return out;
}

std::vector<TraceEntry> DraftResponse::trace() const {
  std::vector<TraceEntry> out;
  out.reserve(summaries.size());
  for (const auto& s : summaries) out.push_back({s.cluster_id, s.sentence, s.source_passage_ids});
  return out;
}

std::string truncate_to_sentences(std::string_view s, std::size_t limit, bool* truncated) {
  const std::string flat = text::collapse_whitespace(s);
  if (truncated) *truncated = false;
  if (text::word_count(flat) <= limit) return flat;
  if (truncated) *truncated = true;

  std::string kept;
  std::size_t words = 0;
  for (const auto& span : text::sentence_spans(flat)) {
    const auto sentence = std::string_view(flat).substr(span.begin, span.end - span.begin);
    const auto c = text::word_count(sentence);
    if (words + c > limit) break;
    if (!kept.empty()) kept.push_back(' ');
    kept += sentence;
    words += c;
  }
  if (kept.empty()) kept = text::first_words(flat, limit);
  return kept;
}

ClusterSummary summarize_cluster(llm::Gateway& gateway, const FacetCluster& cluster) {
  llm::CompletionRequest req;
  req.template_id = llm::TemplateId::cluster_summary;
  req.bindings = {{"information_cluster", cluster.representative_text}};
  req.max_tokens = 128;

  ClusterSummary s;
  s.cluster_id = cluster.cluster_id;
  s.sentence = truncate_to_sentences(gateway.complete(req), kSummaryWordLimit, &s.truncated);
  if (s.sentence.empty()) {
    throw Error(ErrorKind::EmptyCompletion, "summary of cluster '" + cluster.cluster_id + "'");
  }
  s.word_count = text::word_count(s.sentence);
  s.source_passage_ids = cluster.source_passage_ids();
  return s;
}

DraftResponse assemble_response(std::string query_id, const std::vector<ClusterSummary>& summaries,
                                std::size_t word_budget) {
  if (summaries.empty()) throw Error(ErrorKind::NoSummaries, "query '" + query_id + "'");
  if (word_budget == 0) throw Error(ErrorKind::InvalidArgument, "word_budget must be > 0");
  DraftResponse draft;
  draft.query_id = std::move(query_id);
  draft.word_budget = word_budget;
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    ClusterSummary s = summaries[i];
    if (i == 0 && s.word_count > word_budget) {
      s.sentence = text::first_words(s.sentence, word_budget);
      s.word_count = word_budget;
      s.truncated = true;
    }
    if (draft.total_words + s.word_count > word_budget) continue;
    draft.total_words += s.word_count;
    draft.summaries.push_back(std::move(s));
  }
  return draft;
}

GeneratedResponse improve_fluency(llm::Gateway& gateway, const Query& query,
                                  const DraftResponse& draft) {
  const std::string draft_text = draft.text();
  auto response = GeneratedResponse::from_trace(draft.query_id, draft_text, draft.trace());

  llm::CompletionRequest req;
  req.template_id = llm::TemplateId::fluency;
  req.bindings = {{"query", query.text}, {"response", draft_text}};
  req.max_tokens = static_cast<int>(draft.word_budget * 2);
  std::string rewritten;
  try {
    rewritten = text::collapse_whitespace(gateway.complete(req));
  } catch (const Error&) {
    response.fluency_skipped = true;
    return response;
  }
  const double limit = static_cast<double>(draft.word_budget) * 1.1;
  if (rewritten.empty() || static_cast<double>(text::word_count(rewritten)) > limit) {
    response.fluency_fallback = true;
    return response;
  }
  response.text = std::move(rewritten);
  return response;
}

}  // namespace ginger
