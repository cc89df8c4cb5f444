#include "ginger/app_config.hpp"

#include <set>

#include "ginger/error.hpp"
#include "ginger/http_provider.hpp"

namespace ginger {

namespace {

const std::set<std::string> kKeys = {
    "l", "n", "k", "m", "rrf_k", "word_budget", "top_clusters", "worker_shares", "total_workers",
    "queue_capacity", "queue_capacities", "corpus", "index", "similarity_threshold",
    "min_cluster_size", "embedding_dimension", "provider", "provider_url", "provider_path",
    "api_key_env", "provider_timeout_s", "max_retries", "backoff_ms", "rate_limit",
    "mock_latency_ms", "mock_fail_queries"};

Stage stage_key(const std::string& name) {
  if (auto s = parse_stage(name)) return *s;
  throw Error(ErrorKind::ConfigInvalid, "unknown stage '" + name + "'");
}

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

}  // namespace

AppConfig parse_app_config(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw Error(ErrorKind::ConfigInvalid, "config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!kKeys.contains(key)) throw Error(ErrorKind::ConfigInvalid, "unknown key '" + key + "'");
  }
  AppConfig c;
  try {
    auto& p = c.run.config;
    read(j, "l", p.l);
    read(j, "n", p.n);
    read(j, "k", p.k);
    read(j, "m", p.m);
    read(j, "rrf_k", p.rrf_k);
    read(j, "word_budget", p.word_budget);
    if (j.contains("top_clusters")) p.top_clusters = j.at("top_clusters").get<int>();
    if (j.contains("worker_shares")) {
      for (const auto& [name, share] : j.at("worker_shares").items()) {
        p.worker_shares[stage_key(name)] = share.get<double>();
      }
    }
    read(j, "total_workers", c.run.total_workers);
    read(j, "queue_capacity", c.run.queue_capacity);
    if (j.contains("queue_capacities")) {
      for (const auto& [name, cap] : j.at("queue_capacities").items()) {
        c.run.queue_capacities[stage_key(name)] = cap.get<std::size_t>();
      }
    }
    read(j, "similarity_threshold", c.run.clustering.similarity_threshold);
    read(j, "min_cluster_size", c.run.clustering.min_cluster_size);

    if (j.contains("corpus")) c.corpus = resolve(base_dir, j.at("corpus").get<std::string>());
    if (j.contains("index")) c.index = resolve(base_dir, j.at("index").get<std::string>());
    read(j, "embedding_dimension", c.embedding_dimension);
    read(j, "provider", c.provider);
    read(j, "provider_url", c.provider_url);
    read(j, "provider_path", c.provider_path);
    read(j, "api_key_env", c.api_key_env);
    if (j.contains("provider_timeout_s")) {
      c.provider_timeout = std::chrono::seconds(j.at("provider_timeout_s").get<long>());
    }
    read(j, "max_retries", c.policy.max_retries);
    if (j.contains("backoff_ms")) c.policy.backoff_base = std::chrono::milliseconds(j.at("backoff_ms").get<long>());
    read(j, "rate_limit", c.policy.rate_limit);
    if (j.contains("mock_latency_ms")) {
      c.mock_latency = std::chrono::milliseconds(j.at("mock_latency_ms").get<long>());
    }
    read(j, "mock_fail_queries", c.mock_fail_queries);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ConfigInvalid, e.what());
  }

  validate_config(c.run.config);
  validate(c.run.clustering);
  if (c.run.total_workers < 1) throw Error(ErrorKind::ConfigInvalid, "total_workers ≥ 1");
  if (c.run.queue_capacity < 1) throw Error(ErrorKind::ConfigInvalid, "queue_capacity ≥ 1");
  for (const auto& [stage, cap] : c.run.queue_capacities) {
    if (cap < 1) throw Error(ErrorKind::ConfigInvalid, "queue capacity ≥ 1");
  }
  if (c.provider != "mock" && c.provider != "http") {
    throw Error(ErrorKind::ConfigInvalid, "provider must be mock or http");
  }
  if (c.provider == "http" && c.provider_url.empty()) {
    throw Error(ErrorKind::ConfigInvalid, "provider_url is required for the http provider");
  }
  if (c.policy.max_retries < 0) throw Error(ErrorKind::ConfigInvalid, "max_retries ≥ 0");
  if (!(c.policy.rate_limit > 0)) throw Error(ErrorKind::ConfigInvalid, "rate_limit > 0");
  if (c.embedding_dimension < 1) throw Error(ErrorKind::ConfigInvalid, "embedding_dimension ≥ 1");
  return c;
}

void apply_override(nlohmann::json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw Error(ErrorKind::ConfigInvalid, "override must be key=value: '" + assignment + "'");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  auto value = nlohmann::json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  if (!j.is_object()) j = nlohmann::json::object();
  const auto dot = key.find('.');
  if (dot == std::string::npos) {
    j[key] = std::move(value);
  } else {
    j[key.substr(0, dot)][key.substr(dot + 1)] = std::move(value);
  }
}

Providers make_providers(const AppConfig& config) {
  std::shared_ptr<llm::Provider> provider;
  if (config.provider == "http") {
    provider = std::make_shared<llm::HttpProvider>(llm::HttpProviderOptions{
        config.provider_url, config.provider_path, config.api_key_env, config.provider_timeout});
  } else {
    llm::MockProvider::FailureHook hook;
    if (!config.mock_fail_queries.empty()) {
      hook = [fail = config.mock_fail_queries](const llm::CompletionRequest& r)
          -> std::optional<llm::ProviderError> {
        const auto it = r.bindings.find("query");
        if (it != r.bindings.end() && fail.contains(it->second)) {
          return llm::ProviderError(false, "mock provider rejects this query", 400);
        }
        return std::nullopt;
      };
    }
    provider = std::make_shared<llm::MockProvider>(
        std::chrono::duration_cast<std::chrono::microseconds>(config.mock_latency), std::move(hook));
  }
  Providers p;
  p.gateway = std::make_shared<llm::Gateway>(std::move(provider), config.policy);
  p.embedder = std::make_shared<HashingEmbedder>(config.embedding_dimension);
  p.pointwise = std::make_shared<LexicalOverlapScorer>();
  p.pairwise = std::make_shared<OverlapLogisticScorer>();
  return p;
}

}  // namespace ginger
