#include "ginger/core.hpp"

#include <algorithm>
#include <unordered_set>

#include "ginger/error.hpp"
#include "ginger/text.hpp"

namespace ginger {

Query::Query(std::string id_, std::string text_) : id(std::move(id_)), text(std::move(text_)) {
  if (text::trim(text).empty()) {
    throw Error(ErrorKind::InvalidArgument, "query '" + id + "' has empty text");
  }
}

Passage::Passage(std::string id_, std::string text_) : id(std::move(id_)), text(std::move(text_)) {
  if (text.empty()) {
    throw Error(ErrorKind::InvalidArgument, "passage '" + id + "' has empty text");
  }
}

Corpus::Corpus(std::vector<Passage> passages) : passages_(std::move(passages)) {
  by_id_.reserve(passages_.size());
  for (std::size_t i = 0; i < passages_.size(); ++i) {
    if (!by_id_.emplace(passages_[i].id, i).second) {
      throw Error(ErrorKind::DuplicatePassageId, passages_[i].id);
    }
  }
}

const Passage* Corpus::find(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  return it == by_id_.end() ? nullptr : &passages_[it->second];
}

const Passage& Corpus::at(std::string_view id) const {
  if (const Passage* p = find(id)) return *p;
  throw Error(ErrorKind::UnknownPassage, std::string(id));
}

bool ranks_before(const RankedEntry& a, const RankedEntry& b) noexcept {
  if (a.score != b.score) return a.score > b.score;
  return a.passage_id < b.passage_id;
}

RankedList::RankedList(std::string query_id, std::vector<RankedEntry> entries)
    : query_id_(std::move(query_id)), entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(), ranks_before);
  std::unordered_set<std::string_view> seen;
  seen.reserve(entries_.size());
  for (const auto& e : entries_) {
    if (!seen.insert(e.passage_id).second) {
      throw Error(ErrorKind::InvalidArgument,
                  "duplicate passage '" + e.passage_id + "' in ranking for query '" + query_id_ + "'");
    }
  }
}

RankedList RankedList::top(std::size_t n) const {
  RankedList out;
  out.query_id_ = query_id_;
  out.entries_.assign(entries_.begin(), entries_.begin() + std::min(n, entries_.size()));
  return out;
}

std::vector<std::string> RankedList::ids() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.passage_id);
  return out;
}

InformationNugget InformationNugget::slice(const Passage& passage, std::size_t start,
                                           std::size_t end) {
  if (end <= start) {
    throw Error(ErrorKind::InvalidArgument, "empty nugget span in passage '" + passage.id + "'");
  }
  if (end > text::scalar_count(passage.text)) {
    throw Error(ErrorKind::InvalidArgument, "nugget span out of range in passage '" + passage.id + "'");
  }
  const std::size_t b = text::scalar_to_byte(passage.text, start);
  const std::size_t e = text::scalar_to_byte(passage.text, end);
  InformationNugget n;
  n.passage_id = passage.id;
  n.start = start;
  n.end = end;
  n.text = passage.text.substr(b, e - b);
  return n;
}

InformationNugget::InformationNugget(const Passage& passage, std::size_t start_,
                                     std::size_t end_, std::string text_) {
  *this = slice(passage, start_, end_);
  if (text != text_) {
    throw Error(ErrorKind::InvalidArgument,
                "nugget text does not match passage '" + passage.id + "' at [" +
                    std::to_string(start_) + ", " + std::to_string(end_) + ")");
  }
}

bool nugget_before(const InformationNugget& a, const InformationNugget& b) noexcept {
  if (a.passage_id != b.passage_id) return a.passage_id < b.passage_id;
  if (a.start != b.start) return a.start < b.start;
  if (a.end != b.end) return a.end < b.end;
  return a.text < b.text;
}

FacetCluster::FacetCluster(std::string cluster_id_, std::vector<InformationNugget> nuggets_)
    : cluster_id(std::move(cluster_id_)), nuggets(std::move(nuggets_)) {
  if (nuggets.empty()) {
    throw Error(ErrorKind::InvalidArgument, "cluster '" + cluster_id + "' has no nuggets");
  }
  for (const auto& n : nuggets) {
    if (!representative_text.empty()) representative_text.push_back(' ');
    representative_text += n.text;
  }
}

std::vector<std::string> FacetCluster::source_passage_ids() const {
  std::vector<std::string> out;
  for (const auto& n : nuggets) {
    if (std::find(out.begin(), out.end(), n.passage_id) == out.end()) out.push_back(n.passage_id);
  }
  return out;
}

std::vector<std::string> citations_of(std::span<const TraceEntry> trace) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& t : trace) {
    for (const auto& s : t.sources) {
      if (seen.insert(s).second) out.push_back(s);
    }
  }
  return out;
}

GeneratedResponse GeneratedResponse::from_trace(std::string query_id, std::string text,
                                                std::vector<TraceEntry> trace) {
  GeneratedResponse r;
  r.query_id = std::move(query_id);
  r.text = std::move(text);
  r.citations = citations_of(trace);
  r.cluster_trace = std::move(trace);
  return r;
}

std::string_view to_string(Stage stage) noexcept {
  switch (stage) {
    case Stage::rewrite: return "rewrite";
    case Stage::retrieve: return "retrieve";
    case Stage::rerank_point: return "rerank_point";
    case Stage::rerank_pair: return "rerank_pair";
    case Stage::curate: return "curate";
    case Stage::generate: return "generate";
  }
  return "unknown";
}

std::optional<Stage> parse_stage(std::string_view name) noexcept {
  for (Stage s : kAllStages) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

const PipelineConfig& validate_config(const PipelineConfig& c) {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::ConfigInvalid, what); };
  if (c.l < 0) fail("l ≥ 0");
  if (c.m < 1) fail("1 ≤ m");
  if (c.k < c.m) fail("m ≤ k");
  if (c.n < c.k) fail("k ≤ n");
  if (!(c.rrf_k > 0)) fail("rrf_k > 0");
  if (c.word_budget <= 0) fail("word_budget > 0");
  if (c.top_clusters && *c.top_clusters < 1) fail("top_clusters ≥ 1");
  for (const auto& [stage, share] : c.worker_shares) {
    if (!(share > 0)) fail("worker share for " + std::string(to_string(stage)) + " > 0");
  }
  return c;
}

}  // namespace ginger
