#pragma once

#include <string>
#include <vector>

namespace claimforge {

// Canonical text normalization used before hashing or comparing any
// free text: Unicode NFC, internal whitespace runs collapsed to a single
// space, leading/trailing whitespace trimmed.
std::string normalize_text(const std::string& utf8);

// Full Unicode case folding (for case-insensitive comparisons and for
// keyword canonicalization).
std::string casefold(const std::string& utf8);

// Lowercased identifier derived from free text: alphanumeric runs kept,
// everything else squeezed to single '-'.
std::string slugify(const std::string& utf8);

// Number of whitespace-separated tokens in a normalized string.
size_t token_count(const std::string& text);

// True if `haystack` contains `needle` after casefolding both.
bool contains_casefold(const std::string& haystack, const std::string& needle);

// Truncates to at most `max_chars` code points, preferring the last
// sentence boundary ('.', '!' or '?' followed by space or end) at or
// before the limit. Returns true if truncation happened.
bool truncate_sentence(std::string& text, size_t max_chars);

// Seconds since the Unix epoch rendered as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_utc(long long epoch_seconds);

}  // namespace claimforge
