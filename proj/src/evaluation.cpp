#include "ginger/evaluation.hpp"

#include "ginger/error.hpp"
#include "ginger/text.hpp"

namespace ginger::eval {

void Qrels::add(const std::string& query_id, const std::string& passage_id, int grade) {
  if (grade < 0) throw Error(ErrorKind::InvalidArgument, "negative grade for " + query_id + "/" + passage_id);
  grades_[query_id][passage_id] = grade;
}

std::set<std::string> Qrels::relevant(std::string_view query_id) const {
  std::set<std::string> out;
  auto it = grades_.find(query_id);
  if (it == grades_.end()) return out;
  for (const auto& [pid, grade] : it->second) {
    if (grade >= 1) out.insert(pid);
  }
  return out;
}

std::vector<std::string> Qrels::query_ids() const {
  std::vector<std::string> out;
  for (const auto& [qid, _] : grades_) out.push_back(qid);
  return out;
}

std::optional<double> recall_at_k(const RankedList& run, const Qrels& qrels, std::size_t k) {
  if (k == 0) throw Error(ErrorKind::InvalidArgument, "k must be ≥ 1");
  const auto relevant = qrels.relevant(run.query_id());
  if (relevant.empty()) return std::nullopt;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < run.size() && i < k; ++i) hits += relevant.contains(run[i].passage_id);
  return static_cast<double>(hits) / static_cast<double>(relevant.size());
}

double v_strict(const NuggetAssignment& assignment, const std::vector<GoldNugget>& gold) {
  if (assignment.supported.size() != gold.size()) {
    throw Error(ErrorKind::InvalidArgument, "assignment for '" + assignment.query_id +
                                                "' does not cover the gold nuggets exactly");
  }
  std::size_t vital = 0;
  std::size_t hits = 0;
  for (const auto& g : gold) {
    auto it = assignment.supported.find(g.nugget_id);
    if (it == assignment.supported.end()) {
      throw Error(ErrorKind::InvalidArgument, "nugget '" + g.nugget_id + "' not assigned");
    }
    if (g.vitality != Vitality::vital) continue;
    ++vital;
    hits += it->second;
  }
  if (vital == 0) throw Error(ErrorKind::NoVitalNuggets, "query '" + assignment.query_id + "'");
  return static_cast<double>(hits) / static_cast<double>(vital);
}

bool SubstringJudge::supports(std::string_view response, const GoldNugget& nugget) const {
  const auto needle = text::fold_case(nugget.text);
  if (needle.empty()) return false;
  return text::fold_case(response).find(needle) != std::string::npos;
}

NuggetAssignment assign_nuggets(const NuggetJudge& judge, const std::string& query_id,
                                std::string_view response_text, const std::vector<GoldNugget>& gold) {
  if (gold.empty()) throw Error(ErrorKind::InvalidArgument, "no gold nuggets for '" + query_id + "'");
  NuggetAssignment a;
  a.query_id = query_id;
  for (const auto& g : gold) {
    if (!a.supported.emplace(g.nugget_id, judge.supports(response_text, g)).second) {
      throw Error(ErrorKind::InvalidArgument, "duplicate nugget id '" + g.nugget_id + "'");
    }
  }
  return a;
}

nlohmann::json MetricReport::to_json() const {
  nlohmann::json per = nlohmann::json::object();
  for (const auto& q : per_query) per[q.query_id] = q.value;
  return {{"metric", metric},
          {"per_query", std::move(per)},
          {"excluded", excluded},
          {"included", per_query.size()},
          {"macro", macro}};
}

namespace {

void finish(MetricReport& report) {
  double sum = 0;
  for (const auto& q : report.per_query) sum += q.value;
  report.macro = sum / static_cast<double>(report.per_query.size());
}

}  // namespace

MetricReport evaluate_recall(const std::vector<RankedList>& runs, const Qrels& qrels, std::size_t k) {
  MetricReport report;
  report.metric = "recall@" + std::to_string(k);
  for (const auto& run : runs) {
    if (auto r = recall_at_k(run, qrels, k)) {
      report.per_query.push_back({run.query_id(), *r});
    } else {
      report.excluded.push_back(run.query_id());
    }
  }
  if (report.per_query.empty()) throw Error(ErrorKind::NoJudgedQueries, "no query has a relevant passage");
  finish(report);
  return report;
}

MetricReport evaluate_v_strict(const std::map<std::string, std::string>& responses,
                               const std::vector<GoldNugget>& gold, const NuggetJudge& judge) {
  std::map<std::string, std::vector<GoldNugget>> by_query;
  for (const auto& g : gold) by_query[g.query_id].push_back(g);

  MetricReport report;
  report.metric = "v_strict";
  for (const auto& [qid, nuggets] : by_query) {
    auto it = responses.find(qid);
    const std::string_view response = it == responses.end() ? std::string_view{} : it->second;
    try {
      report.per_query.push_back({qid, v_strict(assign_nuggets(judge, qid, response, nuggets), nuggets)});
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoVitalNuggets) throw;
      report.excluded.push_back(qid);
    }
  }
  if (report.per_query.empty()) throw Error(ErrorKind::NoVitalNuggets, "no query has a vital nugget");
  finish(report);
  return report;
}

}  // namespace ginger::eval
