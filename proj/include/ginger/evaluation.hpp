#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ginger/core.hpp"

namespace ginger::eval {

/// Graded judgments; grade ≥ 1 counts as relevant.
class Qrels {
 public:
  void add(const std::string& query_id, const std::string& passage_id, int grade);
  std::set<std::string> relevant(std::string_view query_id) const;
  std::vector<std::string> query_ids() const;

 private:
  std::map<std::string, std::map<std::string, int>, std::less<>> grades_;
};

/// |relevant ∩ top-k| / |relevant|, or nullopt when the query has no
/// relevant passage.
std::optional<double> recall_at_k(const RankedList& run, const Qrels& qrels, std::size_t k);

enum class Vitality { vital, okay };

struct GoldNugget {
  std::string query_id;
  std::string nugget_id;
  std::string text;
  Vitality vitality = Vitality::okay;
};

struct NuggetAssignment {
  std::string query_id;
  std::map<std::string, bool> supported;  // nugget id -> supported
};

/// Supported vital nuggets over all vital nuggets. Throws NoVitalNuggets,
/// or InvalidArgument when the assignment does not cover `gold` exactly.
double v_strict(const NuggetAssignment& assignment, const std::vector<GoldNugget>& gold);

class NuggetJudge {
 public:
  virtual ~NuggetJudge() = default;
  virtual bool supports(std::string_view response, const GoldNugget& nugget) const = 0;
};

/// Supported iff the case-folded nugget text occurs in the case-folded
/// response. Paraphrases are missed.
class SubstringJudge : public NuggetJudge {
 public:
  bool supports(std::string_view response, const GoldNugget& nugget) const override;
};

NuggetAssignment assign_nuggets(const NuggetJudge& judge, const std::string& query_id,
                                std::string_view response_text, const std::vector<GoldNugget>& gold);

struct QueryScore {
  std::string query_id;
  double value = 0.0;
};

struct MetricReport {
  std::string metric;
  std::vector<QueryScore> per_query;
  std::vector<std::string> excluded;  // undefined for these queries
  double macro = 0.0;

  nlohmann::json to_json() const;
};

/// Arithmetic mean over included queries. Throws NoJudgedQueries when no
/// run has a relevant passage.
MetricReport evaluate_recall(const std::vector<RankedList>& runs, const Qrels& qrels, std::size_t k);

/// Gold queries without a response are scored against an empty response.
/// Queries without vital nuggets are excluded. Throws NoVitalNuggets when
/// every query is excluded.
MetricReport evaluate_v_strict(const std::map<std::string, std::string>& responses,
                               const std::vector<GoldNugget>& gold, const NuggetJudge& judge);

}  // namespace ginger::eval
