#include "ginger/text.hpp"

#include <cctype>
#include <clocale>
#include <cwctype>
#include <locale.h>

#include <algorithm>
#include <array>
#include <unordered_set>

namespace ginger::text {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

// Length of the UTF-8 sequence starting at s[i], or 0 when invalid.
std::size_t sequence_length(std::string_view s, std::size_t i, char32_t* out) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  std::size_t len = 0;
  char32_t cp = 0;
  if (b0 < 0x80) {
    *out = b0;
    return 1;
  } else if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return 0;
  }
  if (i + len > s.size()) return 0;
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) return 0;
    cp = (cp << 6) | (b & 0x3F);
  }
  *out = cp;
  return len;
}

// Invalid bytes count as one scalar each (decoded to U+FFFD).
std::size_t advance(std::string_view s, std::size_t i, char32_t* out) {
  const std::size_t len = sequence_length(s, i, out);
  if (len == 0) {
    *out = kReplacement;
    return 1;
  }
  return len;
}

locale_t utf8_locale() {
  static const locale_t loc = [] {
    locale_t l = newlocale(LC_CTYPE_MASK, "C.UTF-8", static_cast<locale_t>(0));
    if (l == static_cast<locale_t>(0)) {
      l = newlocale(LC_CTYPE_MASK, "C.utf8", static_cast<locale_t>(0));
    }
    return l;
  }();
  return loc;
}

}  // namespace

std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    char32_t cp = 0;
    i += advance(s, i, &cp);
    out.push_back(cp);
  }
  return out;
}

std::string encode_utf8(std::u32string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t cp : s) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }
  return out;
}

std::size_t scalar_count(std::string_view s) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.size(); ++n) {
    char32_t cp = 0;
    i += advance(s, i, &cp);
  }
  return n;
}

std::size_t byte_to_scalar(std::string_view s, std::size_t byte_offset) {
  std::size_t n = 0;
  std::size_t i = 0;
  while (i < byte_offset && i < s.size()) {
    char32_t cp = 0;
    i += advance(s, i, &cp);
    ++n;
  }
  return n;
}

std::size_t scalar_to_byte(std::string_view s, std::size_t scalar_offset) {
  std::size_t i = 0;
  for (std::size_t n = 0; n < scalar_offset && i < s.size(); ++n) {
    char32_t cp = 0;
    i += advance(s, i, &cp);
  }
  return i;
}

char32_t to_lower(char32_t c) {
  if (c < 0x80) return (c >= 'A' && c <= 'Z') ? c + ('a' - 'A') : c;
  const locale_t loc = utf8_locale();
  if (loc == static_cast<locale_t>(0)) return c;
  return static_cast<char32_t>(towlower_l(static_cast<wint_t>(c), loc));
}

bool is_alnum(char32_t c) {
  if (c < 0x80) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
  }
  const locale_t loc = utf8_locale();
  if (loc == static_cast<locale_t>(0)) return false;
  return iswalnum_l(static_cast<wint_t>(c), loc) != 0;
}

bool is_space(char32_t c) {
  switch (c) {
    case ' ': case '\t': case '\n': case '\r': case '\v': case '\f':
    case 0x85: case 0xA0: case 0x2028: case 0x2029: case 0x3000:
      return true;
    default:
      return c >= 0x2000 && c <= 0x200A;
  }
}

std::string fold_case(std::string_view s) {
  std::u32string u = decode_utf8(s);
  for (auto& c : u) c = to_lower(c);
  return encode_utf8(u);
}

std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> tokens;
  std::u32string current;
  auto flush = [&] {
    if (!current.empty()) {
      tokens.push_back(encode_utf8(current));
      current.clear();
    }
  };
  for (char32_t c : decode_utf8(s)) {
    if (is_alnum(c)) {
      current.push_back(to_lower(c));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

std::vector<std::string_view> split_words(std::string_view s) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) words.push_back(s.substr(start, i - start));
  }
  return words;
}

std::size_t word_count(std::string_view s) { return split_words(s).size(); }

std::string first_words(std::string_view s, std::size_t n) {
  const auto words = split_words(s);
  std::string out;
  for (std::size_t i = 0; i < words.size() && i < n; ++i) {
    if (i) out.push_back(' ');
    out.append(words[i]);
  }
  return out;
}

std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  for (auto w : split_words(s)) {
    if (!out.empty()) out.push_back(' ');
    out.append(w);
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.append(sep);
    out.append(parts[i]);
  }
  return out;
}

bool is_stopword(std::string_view lowered_token) {
  static const std::unordered_set<std::string_view> kStopwords = {
      "a",     "an",    "and",   "are",   "as",    "at",    "be",    "been",
      "but",   "by",    "can",   "did",   "do",    "does",  "for",   "from",
      "had",   "has",   "have",  "he",    "her",   "his",   "i",     "if",
      "in",    "into",  "is",    "it",    "its",   "me",    "my",    "no",
      "not",   "of",    "on",    "or",    "our",   "she",   "so",    "than",
      "that",  "the",   "their", "them",  "then",  "there", "these", "they",
      "this",  "those", "to",    "too",   "us",    "was",   "we",    "were",
      "will",  "with",  "would", "you",   "your",
  };
  return kStopwords.contains(lowered_token);
}

std::vector<std::string> content_words(std::string_view s) {
  std::vector<std::string> out;
  for (auto word : split_words(s)) {
    const auto tokens = tokenize(word);
    if (tokens.empty()) continue;
    const std::string joined = join(tokens, "");
    if (is_stopword(joined)) continue;
    // Strip leading/trailing punctuation but keep the original casing.
    const std::u32string u = decode_utf8(word);
    std::size_t b = 0;
    std::size_t e = u.size();
    while (b < e && !is_alnum(u[b])) ++b;
    while (e > b && !is_alnum(u[e - 1])) --e;
    out.push_back(encode_utf8(std::u32string_view(u).substr(b, e - b)));
  }
  return out;
}

}  // namespace ginger::text

namespace ginger::text {

std::vector<ByteSpan> sentence_spans(std::string_view s) {
  std::vector<ByteSpan> spans;
  auto space = [&](std::size_t i) { return std::isspace(static_cast<unsigned char>(s[i])) != 0; };
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && space(i)) ++i;
    if (i >= s.size()) break;
    const std::size_t begin = i;
    std::size_t end = s.size();
    for (; i < s.size(); ++i) {
      const char c = s[i];
      if ((c == '.' || c == '?' || c == '!') && (i + 1 == s.size() || space(i + 1))) {
        end = i + 1;
        ++i;
        break;
      }
    }
    if (end == s.size()) {
      while (end > begin && space(end - 1)) --end;
      i = s.size();
    }
    spans.push_back({begin, end});
  }
  return spans;
}

}  // namespace ginger::text
