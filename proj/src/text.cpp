#include "claimforge/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <cstdio>
#include <ctime>
#include <stdexcept>

namespace claimforge {

namespace {

const icu::Normalizer2& nfc() {
  UErrorCode ec = U_ZERO_ERROR;
  const icu::Normalizer2* n = icu::Normalizer2::getNFCInstance(ec);
  if (U_FAILURE(ec) || n == nullptr) {
    throw std::runtime_error("ICU NFC normalizer unavailable");
  }
  return *n;
}

bool is_space(UChar32 c) { return u_isUWhiteSpace(c); }

}  // namespace

std::string normalize_text(const std::string& utf8) {
  UErrorCode ec = U_ZERO_ERROR;
  icu::UnicodeString composed =
      nfc().normalize(icu::UnicodeString::fromUTF8(utf8), ec);
  if (U_FAILURE(ec)) {
    // Invalid sequences were already replaced by U+FFFD in fromUTF8;
    // a normalization failure beyond that leaves the input as-is.
    composed = icu::UnicodeString::fromUTF8(utf8);
  }

  icu::UnicodeString out;
  bool pending_space = false;
  bool seen_char = false;
  for (int32_t i = 0; i < composed.length();) {
    UChar32 c = composed.char32At(i);
    i += U16_LENGTH(c);
    if (is_space(c)) {
      pending_space = seen_char;
      continue;
    }
    if (pending_space) {
      out.append(static_cast<UChar32>(' '));
      pending_space = false;
    }
    out.append(c);
    seen_char = true;
  }

  std::string result;
  out.toUTF8String(result);
  return result;
}

std::string casefold(const std::string& utf8) {
  icu::UnicodeString s = icu::UnicodeString::fromUTF8(utf8);
  s.foldCase();
  std::string result;
  s.toUTF8String(result);
  return result;
}

std::string slugify(const std::string& utf8) {
  icu::UnicodeString s = icu::UnicodeString::fromUTF8(casefold(utf8));
  icu::UnicodeString out;
  bool pending_dash = false;
  bool seen = false;
  for (int32_t i = 0; i < s.length();) {
    UChar32 c = s.char32At(i);
    i += U16_LENGTH(c);
    if (u_isalnum(c)) {
      if (pending_dash) {
        out.append(static_cast<UChar32>('-'));
        pending_dash = false;
      }
      out.append(c);
      seen = true;
    } else {
      pending_dash = seen;
    }
  }
  std::string result;
  out.toUTF8String(result);
  return result;
}

size_t token_count(const std::string& text) {
  size_t n = 0;
  bool in_token = false;
  for (char ch : text) {
    bool ws = (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r');
    if (!ws && !in_token) ++n;
    in_token = !ws;
  }
  return n;
}

bool contains_casefold(const std::string& haystack, const std::string& needle) {
  if (needle.empty()) return true;
  return casefold(haystack).find(casefold(needle)) != std::string::npos;
}

bool truncate_sentence(std::string& text, size_t max_chars) {
  icu::UnicodeString s = icu::UnicodeString::fromUTF8(text);
  size_t chars = 0;
  int32_t cut_at = -1;           // code-unit offset of hard cut
  int32_t sentence_end = -1;     // code-unit offset just past a boundary
  for (int32_t i = 0; i < s.length();) {
    UChar32 c = s.char32At(i);
    int32_t next = i + U16_LENGTH(c);
    ++chars;
    if (chars > max_chars) {
      cut_at = i;
      break;
    }
    if (c == '.' || c == '!' || c == '?') {
      bool at_end = next >= s.length();
      if (at_end || is_space(s.char32At(next))) sentence_end = next;
    }
    i = next;
  }
  if (cut_at < 0) return false;

  icu::UnicodeString head =
      s.tempSubStringBetween(0, sentence_end > 0 ? sentence_end : cut_at);
  std::string result;
  head.toUTF8String(result);
  text = normalize_text(result);
  return true;
}

std::string format_utc(long long epoch_seconds) {
  std::time_t t = static_cast<std::time_t>(epoch_seconds);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                tm.tm_min, tm.tm_sec);
  return buf;
}

}  // namespace claimforge
