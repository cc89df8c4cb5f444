#include "ginger/io.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "ginger/error.hpp"
#include "ginger/text.hpp"

namespace ginger::io {

namespace {

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return in;
}

std::string where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

template <typename F>
void for_each_json_line(const std::filesystem::path& path, F&& f) {
  auto in = open(path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Parse, where(path, lineno) + ": " + e.what());
    }
    try {
      f(j, lineno);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Parse, where(path, lineno) + ": " + e.what());
    }
  }
}

std::string id_field(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  return v.get<std::string>();
}

}  // namespace

std::vector<Passage> load_passages(const std::filesystem::path& path) {
  std::vector<Passage> out;
  for_each_json_line(path, [&](const nlohmann::json& j, std::size_t lineno) {
    try {
      out.emplace_back(id_field(j, "id"), j.at("text").get<std::string>());
    } catch (const Error& e) {
      throw Error(ErrorKind::Parse, where(path, lineno) + ": " + e.detail());
    }
  });
  return out;
}

Corpus load_corpus(const std::filesystem::path& path) { return Corpus(load_passages(path)); }

std::vector<Query> load_queries(const std::filesystem::path& path) {
  std::vector<Query> out;
  std::unordered_set<std::string> seen;
  for_each_json_line(path, [&](const nlohmann::json& j, std::size_t lineno) {
    try {
      Query q(id_field(j, "id"), j.at("text").get<std::string>());
      if (!seen.insert(q.id).second) {
        throw Error(ErrorKind::InvalidArgument, "duplicate query id '" + q.id + "'");
      }
      out.push_back(std::move(q));
    } catch (const Error& e) {
      throw Error(ErrorKind::Parse, where(path, lineno) + ": " + e.detail());
    }
  });
  return out;
}

nlohmann::json response_to_json(const GeneratedResponse& r) {
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& t : r.cluster_trace) {
    trace.push_back({{"cluster_id", t.cluster_id}, {"sentence", t.sentence}, {"sources", t.sources}});
  }
  return {{"query_id", r.query_id},
          {"response", r.text},
          {"citations", r.citations},
          {"trace", std::move(trace)}};
}

GeneratedResponse response_from_json(const nlohmann::json& j) {
  std::vector<TraceEntry> trace;
  for (const auto& t : j.at("trace")) {
    trace.push_back({t.at("cluster_id").get<std::string>(), t.at("sentence").get<std::string>(),
                     t.at("sources").get<std::vector<std::string>>()});
  }
  auto r = GeneratedResponse::from_trace(j.at("query_id").get<std::string>(),
                                         j.at("response").get<std::string>(), std::move(trace));
  r.citations = j.at("citations").get<std::vector<std::string>>();
  return r;
}

std::vector<GeneratedResponse> load_responses(const std::filesystem::path& path) {
  auto in = open(path);
  std::vector<GeneratedResponse> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    const bool last = in.peek() == std::char_traits<char>::eof();
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      if (last) break;
      throw Error(ErrorKind::Parse, where(path, lineno) + ": invalid JSON");
    }
    try {
      out.push_back(response_from_json(j));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Parse, where(path, lineno) + ": " + e.what());
    }
  }
  return out;
}

std::set<std::string> completed_query_ids(const std::filesystem::path& path) {
  std::set<std::string> out;
  if (!std::filesystem::exists(path)) return out;
  for (const auto& r : load_responses(path)) out.insert(r.query_id);
  return out;
}

void write_trec_run(std::ostream& out, const RankedList& list, const std::string& tag) {
  std::ostringstream line;
  line.precision(10);
  for (std::size_t i = 0; i < list.size(); ++i) {
    line.str({});
    line << list.query_id() << " Q0 " << list[i].passage_id << ' ' << (i + 1) << ' '
         << list[i].score << ' ' << tag << '\n';
    out << line.str();
  }
}

std::vector<RankedList> load_trec_run(const std::filesystem::path& path) {
  auto in = open(path);
  std::vector<std::string> order;
  std::map<std::string, std::vector<RankedEntry>> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    std::istringstream fields(line);
    std::string qid, q0, docid, tag;
    long rank = 0;
    double score = 0;
    if (!(fields >> qid >> q0 >> docid >> rank >> score >> tag)) {
      throw Error(ErrorKind::Parse, where(path, lineno) + ": expected 6 columns");
    }
    auto [it, inserted] = entries.try_emplace(qid);
    if (inserted) order.push_back(qid);
    it->second.push_back({docid, score});
  }
  std::vector<RankedList> out;
  for (const auto& qid : order) {
    try {
      out.emplace_back(qid, std::move(entries[qid]));
    } catch (const Error& e) {
      throw Error(ErrorKind::Parse, path.string() + ": " + e.detail());
    }
  }
  return out;
}

eval::Qrels load_qrels(const std::filesystem::path& path) {
  auto in = open(path);
  eval::Qrels qrels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    std::istringstream fields(line);
    std::string qid, iter, docid;
    int grade = 0;
    if (!(fields >> qid >> iter >> docid >> grade)) {
      throw Error(ErrorKind::Parse, where(path, lineno) + ": expected `qid 0 docid grade`");
    }
    try {
      qrels.add(qid, docid, grade);
    } catch (const Error& e) {
      throw Error(ErrorKind::Parse, where(path, lineno) + ": " + e.detail());
    }
  }
  return qrels;
}

std::vector<eval::GoldNugget> load_gold_nuggets(const std::filesystem::path& path) {
  std::vector<eval::GoldNugget> out;
  for_each_json_line(path, [&](const nlohmann::json& j, std::size_t lineno) {
    eval::GoldNugget g;
    g.query_id = id_field(j, "query_id");
    g.nugget_id = id_field(j, "nugget_id");
    g.text = j.at("text").get<std::string>();
    const auto v = j.at("vitality").get<std::string>();
    if (v == "vital") {
      g.vitality = eval::Vitality::vital;
    } else if (v == "okay") {
      g.vitality = eval::Vitality::okay;
    } else {
      throw Error(ErrorKind::Parse, where(path, lineno) + ": vitality must be vital or okay");
    }
    if (text::trim(g.text).empty()) throw Error(ErrorKind::Parse, where(path, lineno) + ": empty nugget text");
    out.push_back(std::move(g));
  });
  return out;
}

nlohmann::json nugget_dump(const std::vector<FacetCluster>& clusters) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : clusters) {
    for (const auto& n : c.nuggets) {
      out.push_back({{"passage_id", n.passage_id},
                     {"start", n.start},
                     {"end", n.end},
                     {"text", n.text},
                     {"cluster_id", c.cluster_id},
                     {"cluster_rank", c.rank}});
    }
  }
  return out;
}

nlohmann::json load_json(const std::filesystem::path& path) {
  auto in = open(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
  }
}

}  // namespace ginger::io
