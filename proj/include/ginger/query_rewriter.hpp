#pragma once

#include <string>
#include <vector>

#include "ginger/core.hpp"
#include "ginger/llm.hpp"

namespace ginger {

struct RewriteResult {
  std::vector<std::string> rewrites;
  bool repaired = false;  // padded with the original query
};

struct RewriteSet {
  Query original;
  std::string intermediate_answer;
  std::vector<std::string> rewrites;
  bool repaired = false;
};

/// Search string used for first-pass retrieval only.
struct ComposedQuery {
  std::string text;
  int l = 0;
};

inline constexpr int kIntermediateAnswerMaxTokens = 100;

/// Short LLM answer to the query, without retrieved context. Internal
/// whitespace is collapsed to single spaces. Throws EmptyCompletion.
std::string generate_intermediate_answer(llm::Gateway& gateway, const Query& q);

/// Splits a rewrite completion into usable lines, dropping blanks and list
/// markers ("1.", "2)", "-", "*").
std::vector<std::string> parse_rewrite_lines(std::string_view completion);

/// Exactly `l` rewrites. With fewer usable lines than asked the list is
/// padded with the original query text and marked repaired; extra lines are
/// dropped. Throws RewriteParseFailure when no line is usable.
RewriteResult generate_rewrites(llm::Gateway& gateway, const Query& q, const std::string& answer,
                                int l);

/// (q + r1) + ... + (q + rl) with single spaces; q alone when there are no
/// rewrites.
ComposedQuery compose_search_string(const Query& q, const std::vector<std::string>& rewrites);

/// Intermediate answer, rewrites and composition in one go.
RewriteSet rewrite_query(llm::Gateway& gateway, const Query& q, int l);

}  // namespace ginger
