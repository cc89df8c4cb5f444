#include "ginger/cli.hpp"

#include <fstream>
#include <iterator>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "ginger/app_config.hpp"
#include "ginger/error.hpp"
#include "ginger/evaluation.hpp"
#include "ginger/io.hpp"
#include "ginger/pipeline.hpp"
#include "ginger/query_rewriter.hpp"

namespace ginger {

namespace {

struct RunArgs {
  std::string config;
  std::string queries;
  std::string output;
  std::string report;
  std::string nuggets;
  bool fresh = false;
  std::vector<std::string> overrides;
  std::optional<int> l, n, k, m, word_budget, top_clusters, total_workers;
  std::optional<double> rrf_k;
  std::optional<std::size_t> queue_capacity;
  std::optional<std::string> corpus, provider;
};

nlohmann::json build_config_json(const RunArgs& a) {
  nlohmann::json j = io::load_json(a.config);
  auto set = [&](const char* key, const auto& opt) {
    if (opt) j[key] = *opt;
  };
  set("l", a.l);
  set("n", a.n);
  set("k", a.k);
  set("m", a.m);
  set("word_budget", a.word_budget);
  set("top_clusters", a.top_clusters);
  set("total_workers", a.total_workers);
  set("rrf_k", a.rrf_k);
  set("queue_capacity", a.queue_capacity);
  set("provider", a.provider);
  if (a.corpus) j["corpus"] = std::filesystem::absolute(*a.corpus).string();
  for (const auto& o : a.overrides) apply_override(j, o);
  return j;
}

int cmd_index(const std::string& corpus_path, const std::string& out_path, std::ostream& out) {
  const auto passages = io::load_passages(corpus_path);
  const auto index = index_corpus(passages);
  std::ofstream file(out_path);
  if (!file) throw Error(ErrorKind::Io, "cannot write " + out_path);
  file << index.to_json().dump() << '\n';
  if (!file) throw Error(ErrorKind::Io, "write failed: " + out_path);
  out << "indexed " << index.doc_count() << " passages, " << index.term_count() << " terms\n";
  return kExitOk;
}

// An interrupted run can leave a half-written last line; cut it off so new
// lines start on a fresh line.
void drop_partial_line(const std::filesystem::path& path) {
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec || size == 0) return;
  std::ifstream in(path, std::ios::binary);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  if (content.back() == '\n') return;
  const auto last = content.rfind('\n');
  std::filesystem::resize_file(path, last == std::string::npos ? 0 : last + 1);
}

int cmd_run(const RunArgs& a, std::ostream& out, std::ostream& err) {
  const AppConfig config =
      parse_app_config(build_config_json(a), std::filesystem::path(a.config).parent_path());
  if (config.corpus.empty()) throw Error(ErrorKind::ConfigInvalid, "config has no corpus path");
  auto corpus = std::make_shared<const Corpus>(io::load_corpus(config.corpus));
  const auto queries = io::load_queries(a.queries);

  SparseIndex index = config.index ? SparseIndex::from_json(io::load_json(*config.index))
                                   : index_corpus(corpus->passages());
  Pipeline pipeline(corpus, std::move(index), make_providers(config), config.run);

  if (a.fresh) std::filesystem::remove(a.output);
  drop_partial_line(a.output);
  const auto done = io::completed_query_ids(a.output);
  std::vector<Query> pending;
  for (const auto& q : queries) {
    if (!done.contains(q.id)) pending.push_back(q);
  }

  std::ofstream responses(a.output, std::ios::app);
  if (!responses) throw Error(ErrorKind::Io, "cannot write " + a.output);
  nlohmann::json nuggets = nlohmann::json::object();
  auto report = pipeline.run_batch(pending, [&](const QueryState& s) {
    if (s.status == QueryStatus::done) {
      responses << io::response_to_json(*s.response).dump() << '\n';
      responses.flush();
      if (!a.nuggets.empty()) nuggets[s.query.id] = io::nugget_dump(s.clusters);
    } else {
      err << "query " << s.query.id << " failed in " << to_string(s.error->stage) << ": "
          << s.error->message << '\n';
    }
  });
  report.skipped = queries.size() - pending.size();
  if (!responses) throw Error(ErrorKind::Io, "write failed: " + a.output);

  if (!a.nuggets.empty()) {
    std::ofstream f(a.nuggets);
    if (!f) throw Error(ErrorKind::Io, "cannot write " + a.nuggets);
    f << nuggets.dump(2) << '\n';
  }
  const auto report_json = report.to_json();
  if (!a.report.empty()) {
    std::ofstream f(a.report);
    if (!f) throw Error(ErrorKind::Io, "cannot write " + a.report);
    f << report_json.dump(2) << '\n';
  }
  out << report_json.dump(2) << '\n';
  return report.failed > 0 ? kExitQueryFailure : kExitOk;
}

int cmd_eval_recall(const std::string& run, const std::string& qrels, std::size_t k,
                    std::ostream& out) {
  const auto report = eval::evaluate_recall(io::load_trec_run(run), io::load_qrels(qrels), k);
  out << report.to_json().dump(2) << '\n';
  return kExitOk;
}

int cmd_eval_nuggets(const std::string& responses_path, const std::string& gold_path,
                     std::ostream& out) {
  std::map<std::string, std::string> responses;
  for (const auto& r : io::load_responses(responses_path)) responses[r.query_id] = r.text;
  const auto report =
      eval::evaluate_v_strict(responses, io::load_gold_nuggets(gold_path), eval::SubstringJudge{});
  out << report.to_json().dump(2) << '\n';
  return kExitOk;
}

int cmd_rewrite(const std::string& queries_path, const std::string& config_path,
                std::optional<int> l, std::ostream& out, std::ostream& err) {
  nlohmann::json j = config_path.empty() ? nlohmann::json::object() : io::load_json(config_path);
  if (l) j["l"] = *l;
  const AppConfig config =
      parse_app_config(j, std::filesystem::path(config_path).parent_path());
  auto gateway = make_providers(config).gateway;
  int code = kExitOk;
  for (const auto& q : io::load_queries(queries_path)) {
    nlohmann::json line = {{"query_id", q.id}};
    try {
      const auto set = rewrite_query(*gateway, q, config.run.config.l);
      line["intermediate_answer"] = set.intermediate_answer;
      line["rewrites"] = set.rewrites;
      line["repaired"] = set.repaired;
      line["composed"] = compose_search_string(q, set.rewrites).text;
    } catch (const Error& e) {
      err << "query " << q.id << ": " << e.what() << '\n';
      line["error"] = e.what();
      line["composed"] = q.text;
      code = kExitQueryFailure;
    }
    out << line.dump() << '\n';
  }
  return code;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nugget-based retrieval-augmented response generation", "ginger"};
  app.require_subcommand(1);

  std::string corpus_path, index_path;
  auto* index_cmd = app.add_subcommand("index", "Build a BM25 postings snapshot");
  index_cmd->add_option("corpus", corpus_path, "Corpus JSONL")->required();
  index_cmd->add_option("index", index_path, "Output snapshot (JSON)")->required();

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Generate responses for a batch of queries");
  run_cmd->add_option("config", run.config, "Config JSON")->required();
  run_cmd->add_option("queries", run.queries, "Queries JSONL")->required();
  run_cmd->add_option("output", run.output, "Responses JSONL (appended, resumable)")->required();
  run_cmd->add_option("--report", run.report, "Also write the batch report here");
  run_cmd->add_option("--nuggets", run.nuggets, "Write per-query nugget dumps here");
  run_cmd->add_flag("--fresh", run.fresh, "Truncate the output instead of resuming");
  run_cmd->add_option("--set", run.overrides, "Override a config key (key=value)");
  run_cmd->add_option("--l", run.l, "Query rewrites");
  run_cmd->add_option("--n", run.n, "First-pass depth / pointwise candidates");
  run_cmd->add_option("--k", run.k, "Pairwise candidates");
  run_cmd->add_option("--m", run.m, "Passages used for generation");
  run_cmd->add_option("--rrf-k", run.rrf_k, "RRF constant");
  run_cmd->add_option("--word-budget", run.word_budget, "Response word budget");
  run_cmd->add_option("--top-clusters", run.top_clusters, "Clusters summarized");
  run_cmd->add_option("--total-workers", run.total_workers, "Workers split by shares");
  run_cmd->add_option("--queue-capacity", run.queue_capacity, "Stage input queue capacity");
  run_cmd->add_option("--corpus", run.corpus, "Corpus JSONL");
  run_cmd->add_option("--provider", run.provider, "mock or http");

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate runs or responses");
  eval_cmd->require_subcommand(1);
  std::string run_file, qrels_file;
  std::size_t recall_k = 500;
  auto* recall_cmd = eval_cmd->add_subcommand("recall", "Recall@k of a TREC run");
  recall_cmd->add_option("run", run_file, "TREC run file")->required();
  recall_cmd->add_option("qrels", qrels_file, "Qrels file")->required();
  recall_cmd->add_option("--k", recall_k, "Cutoff")->check(CLI::PositiveNumber);
  std::string responses_file, gold_file;
  auto* nuggets_cmd = eval_cmd->add_subcommand("nuggets", "V_strict of responses against gold nuggets");
  nuggets_cmd->add_option("responses", responses_file, "Responses JSONL")->required();
  nuggets_cmd->add_option("gold", gold_file, "Gold nuggets JSONL")->required();

  std::string rewrite_queries, rewrite_config;
  std::optional<int> rewrite_l;
  auto* rewrite_cmd = app.add_subcommand("rewrite", "Print composed search strings");
  rewrite_cmd->add_option("queries", rewrite_queries, "Queries JSONL")->required();
  rewrite_cmd->add_option("--config", rewrite_config, "Config JSON");
  rewrite_cmd->add_option("--l", rewrite_l, "Query rewrites");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*index_cmd) return cmd_index(corpus_path, index_path, out);
    if (*run_cmd) return cmd_run(run, out, err);
    if (*recall_cmd) return cmd_eval_recall(run_file, qrels_file, recall_k, out);
    if (*nuggets_cmd) return cmd_eval_nuggets(responses_file, gold_file, out);
    if (*rewrite_cmd) return cmd_rewrite(rewrite_queries, rewrite_config, rewrite_l, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace ginger
