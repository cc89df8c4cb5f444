#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// UTF-8 and word-level helpers shared by the index, the prompt parsers and
// the evaluation judge. Offsets exposed to callers are Unicode scalar
// indices; byte offsets stay internal.
namespace ginger::text {

std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);

std::size_t scalar_count(std::string_view s);
std::size_t byte_to_scalar(std::string_view s, std::size_t byte_offset);
std::size_t scalar_to_byte(std::string_view s, std::size_t scalar_offset);

char32_t to_lower(char32_t c);
bool is_alnum(char32_t c);
bool is_space(char32_t c);

std::string fold_case(std::string_view s);

/// Lowercase, replace every non-alphanumeric scalar by a separator, split.
std::vector<std::string> tokenize(std::string_view s);

/// Whitespace-delimited words, untouched.
std::vector<std::string_view> split_words(std::string_view s);
std::size_t word_count(std::string_view s);
std::string first_words(std::string_view s, std::size_t n);

std::string_view trim(std::string_view s);
std::string collapse_whitespace(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

bool is_stopword(std::string_view lowered_token);

/// Whitespace-split words of `s` that are not stopwords after case folding
/// and punctuation stripping; original casing kept.
std::vector<std::string> content_words(std::string_view s);

}  // namespace ginger::text

namespace ginger::text {

struct ByteSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// A sentence ends at '.', '?' or '!' followed by whitespace or end of
/// input. Spans exclude surrounding whitespace; trailing text without a
/// terminator forms a final sentence.
std::vector<ByteSpan> sentence_spans(std::string_view s);

}  // namespace ginger::text
