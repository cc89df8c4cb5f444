#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "ginger/core.hpp"
#include "ginger/evaluation.hpp"

// Flat-file formats. Every loader throws Error(Io) when the file cannot be
// read and Error(Parse) with the line number for malformed content.
namespace ginger::io {

/// JSONL {"id", "text"}; blank lines ignored.
std::vector<Passage> load_passages(const std::filesystem::path& path);
Corpus load_corpus(const std::filesystem::path& path);
/// JSONL {"id", "text"}; ids must be unique.
std::vector<Query> load_queries(const std::filesystem::path& path);

nlohmann::json response_to_json(const GeneratedResponse& r);
GeneratedResponse response_from_json(const nlohmann::json& j);
/// Response JSONL. A truncated final line (interrupted write) is ignored.
std::vector<GeneratedResponse> load_responses(const std::filesystem::path& path);
/// Query ids already present in a response file; empty if it does not exist.
std::set<std::string> completed_query_ids(const std::filesystem::path& path);

/// `qid Q0 docid rank score tag`, rank from 1.
void write_trec_run(std::ostream& out, const RankedList& list, const std::string& tag);
/// One RankedList per query, in order of first appearance.
std::vector<RankedList> load_trec_run(const std::filesystem::path& path);

/// `qid 0 docid grade`.
eval::Qrels load_qrels(const std::filesystem::path& path);

/// JSONL {"query_id", "nugget_id", "text", "vitality": "vital" | "okay"}.
std::vector<eval::GoldNugget> load_gold_nuggets(const std::filesystem::path& path);

/// [{passage_id, start, end, text, cluster_id, cluster_rank}, ...]
nlohmann::json nugget_dump(const std::vector<FacetCluster>& clusters);

nlohmann::json load_json(const std::filesystem::path& path);

}  // namespace ginger::io
