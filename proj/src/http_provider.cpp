#include "ginger/http_provider.hpp"

#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "ginger/error.hpp"

namespace ginger::llm {

HttpProvider::HttpProvider(HttpProviderOptions options) : options_(std::move(options)) {
  if (options_.base_url.empty()) throw Error(ErrorKind::ConfigInvalid, "provider base_url is empty");
  if (const char* key = std::getenv(options_.api_key_env.c_str())) api_key_ = key;
}

std::string HttpProvider::complete(const CompletionRequest& request, const RenderedPrompt& prompt) {
  httplib::Client client(options_.base_url);
  const auto secs = options_.timeout.count();
  client.set_connection_timeout(secs);
  client.set_read_timeout(secs);
  client.set_write_timeout(secs);

  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  const nlohmann::json body = {
      {"system", prompt.system},
      {"user", prompt.user},
      {"max_tokens", request.max_tokens},
      {"temperature", request.temperature},
  };
  auto res = client.Post(options_.path, headers, body.dump(), "application/json");
  if (!res) {
    throw ProviderError(true, "transport error: " + httplib::to_string(res.error()));
  }
  const int status = res->status;
  if (status == 408 || status == 429 || status >= 500) {
    throw ProviderError(true, "HTTP " + std::to_string(status), status);
  }
  if (status < 200 || status >= 300) {
    throw ProviderError(false, "HTTP " + std::to_string(status) + ": " + res->body, status);
  }
  const auto reply = nlohmann::json::parse(res->body, nullptr, false);
  if (reply.is_discarded() || !reply.is_object() || !reply.contains("text") ||
      !reply["text"].is_string()) {
    throw ProviderError(false, "malformed provider reply", status);
  }
  return reply["text"].get<std::string>();
}

}  // namespace ginger::llm
