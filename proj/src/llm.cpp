#include "ginger/llm.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "ginger/error.hpp"
#include "ginger/text.hpp"

namespace ginger::llm {

namespace {

const PromptTemplate kTemplates[] = {
    {TemplateId::intermediate_answer,
     "You are a knowledgeable question answering AI that can answer a wide range of queries "
     "either in question form or keywords.",
     "{query}.",
     {"query"}},
    {TemplateId::query_rewrite,
     "You are a query rewriter that understands all necessary components of a good search query "
     "and helps users improve their queries.",
     "Rewrite and return 3 query rewrites, each of which should cover a different aspect of the "
     "answer. The query rewrites should still be relevant to the original query. Return only the "
     "queries, one in each line. Do not add context, or any other information, or text.\n\n"
     "original query: {query}\nanswer: {answer}",
     {"query", "answer"}},
    {TemplateId::nugget_detection,
     "You are given a query and a relevant passage. Your task is to pinpoint and annotate the "
     "succinct excerpts within the passage that directly respond to the query. Ensure these "
     "excerpts are brief yet complete. Once identified, copy the entire passage and encapsulate "
     "the relevant snippets using <START> and </END> tags without changing any part of the "
     "original text. This includes avoiding modifications to words, punctuation, or formatting, "
     "as well as not adding any extra characters, symbols, or spaces.",
     "Question: {query} Passage: {passage}",
     {"query", "passage"}},
    {TemplateId::cluster_summary,
     "Summarize the provided information into one sentence (approximately 35 words). Generate "
     "one-sentence long summary that is short, concise and only contains the information "
     "provided.",
     "{information_cluster}.",
     {"information_cluster"}},
    {TemplateId::fluency,
     "Rephrase the response given a query to improve its fluency. Do not change the information "
     "included in the response. Do not add information not mentioned in the original response.",
     "Question: {query} Response: {response}",
     {"query", "response"}},
};

constexpr std::string_view kRewriteCountSlot = "Rewrite and return 3 query rewrites";

const std::string& binding(const CompletionRequest& r, std::string_view name) {
  auto it = r.bindings.find(name);
  if (it == r.bindings.end()) throw Error(ErrorKind::MissingBinding, std::string(name));
  return it->second;
}

std::string mock_answer(const std::string& query) {
  auto words = ranked_content_words(query);
  if (words.size() > 3) words.resize(3);
  return text::join(words, " ");
}

std::string mock_rewrites(const std::string& query, const std::string& answer, int count) {
  auto words = ranked_content_words(answer);
  if (words.empty()) words = ranked_content_words(query);
  std::string out;
  for (int i = 0; i < count; ++i) {
    if (i) out.push_back('\n');
    out += query;
    if (!words.empty()) out += " " + words[static_cast<std::size_t>(i) % words.size()];
  }
  return out;
}

std::string mock_annotate(const std::string& query, const std::string& passage) {
  std::unordered_set<std::string> terms;
  for (const auto& w : text::content_words(query)) {
    for (auto& t : text::tokenize(w)) terms.insert(std::move(t));
  }
  std::string out;
  std::size_t cursor = 0;
  for (const auto& span : text::sentence_spans(passage)) {
    const auto sentence = std::string_view(passage).substr(span.begin, span.end - span.begin);
    const auto tokens = text::tokenize(sentence);
    const bool relevant =
        std::any_of(tokens.begin(), tokens.end(), [&](const auto& t) { return terms.contains(t); });
    if (!relevant) continue;
    out.append(passage, cursor, span.begin - cursor);
    out += "<START>";
    out.append(sentence);
    out += "</END>";
    cursor = span.end;
  }
  out.append(passage, cursor, std::string::npos);
  return out;
}

}  // namespace

std::string_view to_string(TemplateId id) noexcept {
  switch (id) {
    case TemplateId::intermediate_answer: return "intermediate_answer";
    case TemplateId::query_rewrite: return "query_rewrite";
    case TemplateId::nugget_detection: return "nugget_detection";
    case TemplateId::cluster_summary: return "cluster_summary";
    case TemplateId::fluency: return "fluency";
  }
  return "unknown";
}

TemplateId parse_template_id(std::string_view name) {
  for (const auto& t : kTemplates) {
    if (to_string(t.id) == name) return t.id;
  }
  throw Error(ErrorKind::UnknownTemplate, std::string(name));
}

const PromptTemplate& prompt_template(TemplateId id) {
  for (const auto& t : kTemplates) {
    if (t.id == id) return t;
  }
  throw Error(ErrorKind::UnknownTemplate, std::to_string(static_cast<int>(id)));
}

RenderedPrompt render_prompt(TemplateId id, const Bindings& bindings, int rewrite_count) {
  const PromptTemplate& tmpl = prompt_template(id);
  for (auto name : tmpl.placeholders) {
    if (!bindings.contains(name)) throw Error(ErrorKind::MissingBinding, std::string(name));
  }
  for (const auto& [name, value] : bindings) {
    if (std::find(tmpl.placeholders.begin(), tmpl.placeholders.end(), name) ==
        tmpl.placeholders.end()) {
      throw Error(ErrorKind::InvalidArgument,
                  "binding '" + name + "' not used by template " + std::string(to_string(id)));
    }
  }

  std::string pattern(tmpl.user_text_pattern);
  if (id == TemplateId::query_rewrite && rewrite_count != 3) {
    if (rewrite_count < 1) throw Error(ErrorKind::InvalidArgument, "rewrite_count must be ≥ 1");
    const auto pos = pattern.find(kRewriteCountSlot);
    pattern.replace(pos, kRewriteCountSlot.size(),
                    "Rewrite and return " + std::to_string(rewrite_count) + " query rewrites");
  }

  RenderedPrompt out;
  out.system = std::string(tmpl.system_text);
  out.user.reserve(pattern.size());
  for (std::size_t i = 0; i < pattern.size();) {
    if (pattern[i] == '{') {
      const auto close = pattern.find('}', i);
      if (close != std::string::npos) {
        const std::string_view name(pattern.data() + i + 1, close - i - 1);
        if (auto it = bindings.find(name); it != bindings.end()) {
          out.user += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out.user.push_back(pattern[i++]);
  }
  return out;
}

RenderedPrompt render_prompt(std::string_view template_name, const Bindings& bindings,
                             int rewrite_count) {
  return render_prompt(parse_template_id(template_name), bindings, rewrite_count);
}

RateLimiter::RateLimiter(double rate_per_second) : rate_(rate_per_second) {
  if (!(rate_per_second > 0)) throw Error(ErrorKind::InvalidArgument, "rate_limit must be > 0");
  interval_ = std::chrono::duration_cast<Clock::duration>(
      std::chrono::duration<double>(1.0 / rate_per_second));
  next_slot_ = Clock::now();
}

void RateLimiter::acquire() {
  Clock::time_point slot;
  {
    std::lock_guard lock(mutex_);
    const auto now = Clock::now();
    slot = std::max(now, next_slot_);
    next_slot_ = slot + interval_;
  }
  std::this_thread::sleep_until(slot);
}

Gateway::Gateway(std::shared_ptr<Provider> provider, ProviderPolicy policy)
    : provider_(std::move(provider)), policy_(policy), limiter_(policy.rate_limit) {
  if (!provider_) throw Error(ErrorKind::InvalidArgument, "gateway needs a provider");
  if (policy_.max_retries < 0) throw Error(ErrorKind::InvalidArgument, "max_retries must be ≥ 0");
}

std::string Gateway::complete(const CompletionRequest& request) {
  if (request.temperature < 0) throw Error(ErrorKind::InvalidArgument, "temperature must be ≥ 0");
  const RenderedPrompt prompt =
      render_prompt(request.template_id, request.bindings, request.rewrite_count);

  std::string last_error;
  for (int attempt = 0; attempt <= policy_.max_retries; ++attempt) {
    if (attempt > 0) {
      const double factor = std::pow(2.0, attempt - 1);
      auto delay = std::chrono::duration_cast<std::chrono::milliseconds>(policy_.backoff_base * factor);
      std::this_thread::sleep_for(std::min(delay, policy_.backoff_cap));
    }
    limiter_.acquire();
    ++attempts_;
    try {
      return provider_->complete(request, prompt);
    } catch (const ProviderError& e) {
      if (!e.transient()) throw Error(ErrorKind::ProviderRejected, e.what());
      last_error = e.what();
    }
  }
  throw Error(ErrorKind::ProviderUnavailable,
              std::to_string(policy_.max_retries + 1) + " attempts failed; last: " + last_error);
}

std::vector<std::string> ranked_content_words(std::string_view s) {
  struct Entry {
    std::string word;
    int count = 0;
  };
  std::vector<Entry> entries;
  std::unordered_map<std::string, std::size_t> index;
  for (auto& w : text::content_words(s)) {
    const std::string key = text::fold_case(w);
    auto [it, inserted] = index.emplace(key, entries.size());
    if (inserted) entries.push_back({std::move(w), 0});
    ++entries[it->second].count;
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.word < b.word;
  });
  std::vector<std::string> out;
  out.reserve(entries.size());
  for (auto& e : entries) out.push_back(std::move(e.word));
  return out;
}

std::string mock_completion(const CompletionRequest& r) {
  switch (r.template_id) {
    case TemplateId::intermediate_answer:
      return mock_answer(binding(r, "query"));
    case TemplateId::query_rewrite:
      return mock_rewrites(binding(r, "query"), binding(r, "answer"), r.rewrite_count);
    case TemplateId::nugget_detection:
      return mock_annotate(binding(r, "query"), binding(r, "passage"));
    case TemplateId::cluster_summary:
      return text::first_words(binding(r, "information_cluster"), 35);
    case TemplateId::fluency:
      return binding(r, "response");
  }
  throw Error(ErrorKind::UnknownTemplate, std::to_string(static_cast<int>(r.template_id)));
}

std::string MockProvider::complete(const CompletionRequest& request, const RenderedPrompt&) {
  ++calls_;
  if (latency_.count() > 0) std::this_thread::sleep_for(latency_);
  if (hook_) {
    if (auto failure = hook_(request)) throw *failure;
  }
  return mock_completion(request);
}

}  // namespace ginger::llm
