#pragma once

#include <chrono>
#include <string>

#include "ginger/llm.hpp"

namespace ginger::llm {

struct HttpProviderOptions {
  std::string base_url;  // scheme://host[:port]
  std::string path = "/v1/complete";
  std::string api_key_env = "GINGER_API_KEY";
  std::chrono::seconds timeout{60};
};

/// JSON over HTTP: POST {system, user, max_tokens, temperature}, reply
/// {text}. The API key, when the named environment variable is set, goes
/// in a bearer Authorization header. 408, 429 and 5xx responses and
/// transport errors are transient; other non-2xx responses are rejections.
class HttpProvider : public Provider {
 public:
  explicit HttpProvider(HttpProviderOptions options);

  std::string complete(const CompletionRequest& request, const RenderedPrompt& prompt) override;

 private:
  HttpProviderOptions options_;
  std::string api_key_;
};

}  // namespace ginger::llm
