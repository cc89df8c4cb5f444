#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ginger::llm {

enum class TemplateId { intermediate_answer, query_rewrite, nugget_detection, cluster_summary, fluency };

std::string_view to_string(TemplateId id) noexcept;
/// Throws UnknownTemplate.
TemplateId parse_template_id(std::string_view name);

struct PromptTemplate {
  TemplateId id;
  std::string_view system_text;
  std::string_view user_text_pattern;  // `{name}` placeholders
  std::vector<std::string_view> placeholders;
};

const PromptTemplate& prompt_template(TemplateId id);

using Bindings = std::map<std::string, std::string, std::less<>>;

struct RenderedPrompt {
  std::string system;
  std::string user;
};

/// Substitutes bindings into the template in a single pass. The rewrite
/// prompt asks for three rewrites; `rewrite_count` replaces that digit.
/// Throws MissingBinding, or InvalidArgument for a binding the template does
/// not use.
RenderedPrompt render_prompt(TemplateId id, const Bindings& bindings, int rewrite_count = 3);
RenderedPrompt render_prompt(std::string_view template_name, const Bindings& bindings,
                             int rewrite_count = 3);

struct CompletionRequest {
  TemplateId template_id = TemplateId::intermediate_answer;
  Bindings bindings;
  int max_tokens = 512;
  double temperature = 0.0;
  int rewrite_count = 3;  // query_rewrite only
};

/// Raised by providers. Transient failures are retried by the gateway.
class ProviderError : public std::runtime_error {
 public:
  ProviderError(bool transient, const std::string& message, int status = 0)
      : std::runtime_error(message), transient_(transient), status_(status) {}

  bool transient() const noexcept { return transient_; }
  int status() const noexcept { return status_; }

 private:
  bool transient_;
  int status_;
};

/// Text-generation backend. Implementations must be thread-safe.
class Provider {
 public:
  virtual ~Provider() = default;
  virtual std::string complete(const CompletionRequest& request, const RenderedPrompt& prompt) = 0;
};

struct ProviderPolicy {
  int max_retries = 3;
  std::chrono::milliseconds backoff_base{200};
  std::chrono::milliseconds backoff_cap{10'000};
  double rate_limit = 10.0;  // requests per second
};

/// Spaces requests at least 1/rate apart; shared across threads.
class RateLimiter {
 public:
  explicit RateLimiter(double rate_per_second);
  void acquire();
  double rate() const noexcept { return rate_; }

 private:
  using Clock = std::chrono::steady_clock;
  double rate_;
  Clock::duration interval_;
  std::mutex mutex_;
  Clock::time_point next_slot_;
};

/// Retry, backoff and rate limiting in front of a provider.
class Gateway {
 public:
  Gateway(std::shared_ptr<Provider> provider, ProviderPolicy policy = {});

  /// Throws MissingBinding/InvalidArgument for a bad request,
  /// ProviderRejected for non-retryable responses and ProviderUnavailable
  /// once retries are exhausted.
  std::string complete(const CompletionRequest& request);

  const ProviderPolicy& policy() const noexcept { return policy_; }
  std::size_t attempts() const noexcept { return attempts_.load(); }

 private:
  std::shared_ptr<Provider> provider_;
  ProviderPolicy policy_;
  RateLimiter limiter_;
  std::atomic<std::size_t> attempts_{0};
};

/// Offline provider whose output is a pure function of the request:
///   intermediate_answer  top three content words of the query
///   query_rewrite        one line per rewrite, "<query> <answer word i>"
///   nugget_detection     tags every sentence sharing a content word with the query
///   cluster_summary      first 35 words of the cluster
///   fluency              the response unchanged
class MockProvider : public Provider {
 public:
  /// Returning an error makes the call fail with it.
  using FailureHook = std::function<std::optional<ProviderError>(const CompletionRequest&)>;

  MockProvider() = default;
  explicit MockProvider(std::chrono::microseconds latency, FailureHook hook = {})
      : latency_(latency), hook_(std::move(hook)) {}

  std::string complete(const CompletionRequest& request, const RenderedPrompt& prompt) override;

  std::size_t calls() const noexcept { return calls_.load(); }

 private:
  std::chrono::microseconds latency_{0};
  FailureHook hook_;
  std::atomic<std::size_t> calls_{0};
};

/// The pure part of MockProvider, exposed for tests.
std::string mock_completion(const CompletionRequest& request);

/// Content words ranked by frequency, ties by byte order; distinct.
std::vector<std::string> ranked_content_words(std::string_view s);

}  // namespace ginger::llm
