#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <string>

#include <json.hpp>

#include "ginger/pipeline.hpp"

namespace ginger {

/// Flat JSON run configuration: the pipeline tunables plus paths, worker
/// layout and provider settings. Unknown keys are rejected.
struct AppConfig {
  RunOptions run;
  std::filesystem::path corpus;
  std::optional<std::filesystem::path> index;

  std::string provider = "mock";  // mock | http
  std::string provider_url;
  std::string provider_path = "/v1/complete";
  std::string api_key_env = "GINGER_API_KEY";
  std::chrono::seconds provider_timeout{60};
  llm::ProviderPolicy policy;
  std::chrono::milliseconds mock_latency{0};
  std::set<std::string> mock_fail_queries;  // query texts the mock rejects permanently
  std::size_t embedding_dimension = 256;
};

/// Relative paths resolve against `base_dir`. Throws ConfigInvalid.
AppConfig parse_app_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});

/// "key=value"; the value is read as JSON when it parses, else as a string.
/// Throws ConfigInvalid.
void apply_override(nlohmann::json& j, const std::string& assignment);

/// Gateway, embedder and the lexical mock scorers.
Providers make_providers(const AppConfig& config);

}  // namespace ginger
