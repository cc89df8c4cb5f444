#include "ginger/query_rewriter.hpp"

#include <cctype>

#include "ginger/error.hpp"
#include "ginger/text.hpp"

namespace ginger {

namespace {

std::string_view strip_list_marker(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
  if (i > 0 && i < line.size() && (line[i] == '.' || line[i] == ')')) {
    return text::trim(line.substr(i + 1));
  }
  if (!line.empty() && (line[0] == '-' || line[0] == '*')) return text::trim(line.substr(1));
  if (line.starts_with("•")) return text::trim(line.substr(3));
  return line;
}

}  // namespace

std::string generate_intermediate_answer(llm::Gateway& gateway, const Query& q) {
  llm::CompletionRequest req;
  req.template_id = llm::TemplateId::intermediate_answer;
  req.bindings = {{"query", q.text}};
  req.max_tokens = kIntermediateAnswerMaxTokens;
  std::string answer = text::collapse_whitespace(gateway.complete(req));
  if (answer.empty()) {
    throw Error(ErrorKind::EmptyCompletion, "intermediate answer for query '" + q.id + "'");
  }
  return answer;
}

std::vector<std::string> parse_rewrite_lines(std::string_view completion) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos <= completion.size()) {
    auto nl = completion.find('\n', pos);
    if (nl == std::string_view::npos) nl = completion.size();
    auto line = strip_list_marker(text::trim(completion.substr(pos, nl - pos)));
    if (!line.empty()) lines.push_back(text::collapse_whitespace(line));
    pos = nl + 1;
  }
  return lines;
}

RewriteResult generate_rewrites(llm::Gateway& gateway, const Query& q, const std::string& answer,
                                int l) {
  if (l < 1) throw Error(ErrorKind::InvalidArgument, "rewrite count must be ≥ 1");
  llm::CompletionRequest req;
  req.template_id = llm::TemplateId::query_rewrite;
  req.bindings = {{"query", q.text}, {"answer", answer}};
  req.rewrite_count = l;

  RewriteResult result;
  result.rewrites = parse_rewrite_lines(gateway.complete(req));
  if (result.rewrites.empty()) {
    throw Error(ErrorKind::RewriteParseFailure, "no usable rewrite for query '" + q.id + "'");
  }
  const auto want = static_cast<std::size_t>(l);
  if (result.rewrites.size() > want) result.rewrites.resize(want);
  while (result.rewrites.size() < want) {
    result.rewrites.push_back(text::collapse_whitespace(q.text));
    result.repaired = true;
  }
  return result;
}

ComposedQuery compose_search_string(const Query& q, const std::vector<std::string>& rewrites) {
  ComposedQuery out;
  out.l = static_cast<int>(rewrites.size());
  if (rewrites.empty()) {
    out.text = q.text;
    return out;
  }
  for (const auto& r : rewrites) {
    if (!out.text.empty()) out.text.push_back(' ');
    out.text += q.text;
    out.text.push_back(' ');
    out.text += r;
  }
  return out;
}

RewriteSet rewrite_query(llm::Gateway& gateway, const Query& q, int l) {
  RewriteSet set{q, {}, {}, false};
  if (l <= 0) return set;  // the answer only feeds the rewrites
  set.intermediate_answer = generate_intermediate_answer(gateway, q);
  auto r = generate_rewrites(gateway, q, set.intermediate_answer, l);
  set.rewrites = std::move(r.rewrites);
  set.repaired = r.repaired;
  return set;
}

}  // namespace ginger
