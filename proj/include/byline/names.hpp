#pragma once

// Author-name canonicalization and the alphabetical-order relation.
//
// A raw name ("VAN RAAN", "A") is turned into a comparison key: the last
// name is uppercased with spaces, apostrophes and hyphens removed
// ("VANRAAN"), initials are uppercased with non-letters dropped. Canonical
// names order lexicographically by last-name key, with exact last-name ties
// broken by initials; a shorter key sorts before any of its extensions.

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace byline {

enum class PrefixMode {
  keep,   // "VAN RAAN" -> "VANRAAN"
  strip,  // "VAN RAAN" -> "RAAN"
};

struct NameOptions {
  bool fold_diacritics = true;          // E-acute -> E before comparison
  PrefixMode prefix_mode = PrefixMode::keep;
};

struct RawName {
  std::string last;       // as ingested: any case, may contain separators
  std::string initials;   // possibly empty, e.g. "JA"
};

// Thrown when a last name is empty once separators are removed. Bulk readers
// catch this and flag the record instead of aborting.
class InvalidNameError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct CanonicalName {
  std::string key_last;      // uppercase, free of spaces/apostrophes/hyphens
  std::string key_initials;  // uppercase letters only, possibly empty
  bool non_latin = false;    // kept a code point outside A..Z

  // Ordering ignores the non_latin flag: it is diagnostic only. Byte order
  // over UTF-8 equals code-point order, and a strict prefix compares less
  // than its extension, which is exactly the required name order.
  friend std::strong_ordering operator<=>(const CanonicalName& a, const CanonicalName& b) {
    if (const int c = a.key_last.compare(b.key_last); c != 0)
      return c <=> 0;
    return a.key_initials.compare(b.key_initials) <=> 0;
  }
  friend bool operator==(const CanonicalName& a, const CanonicalName& b) {
    return a.key_last == b.key_last && a.key_initials == b.key_initials;
  }
};

namespace detail {

// Base-letter folding for Latin-1 Supplement (U+00C0..U+00FF). nullptr means
// the code point is not a foldable letter and is left alone.
inline constexpr std::array<const char*, 64> kFoldLatin1 = {
    "A", "A", "A", "A", "A", "A", "AE", "C",      // U+00C0
    "E", "E", "E", "E", "I", "I", "I", "I",       // U+00C8
    "D", "N", "O", "O", "O", "O", "O", nullptr,   // U+00D0
    "O", "U", "U", "U", "U", "Y", "TH", "SS",     // U+00D8
    "A", "A", "A", "A", "A", "A", "AE", "C",      // U+00E0
    "E", "E", "E", "E", "I", "I", "I", "I",       // U+00E8
    "D", "N", "O", "O", "O", "O", "O", nullptr,   // U+00F0
    "O", "U", "U", "U", "U", "Y", "TH", "Y",      // U+00F8
};

// Base-letter folding for Latin Extended-A (U+0100..U+017F).
inline constexpr std::array<const char*, 128> kFoldLatinExtA = {
    "A", "A", "A", "A", "A", "A", "C", "C",       // U+0100
    "C", "C", "C", "C", "C", "C", "D", "D",       // U+0108
    "D", "D", "E", "E", "E", "E", "E", "E",       // U+0110
    "E", "E", "E", "E", "G", "G", "G", "G",       // U+0118
    "G", "G", "G", "G", "H", "H", "H", "H",       // U+0120
    "I", "I", "I", "I", "I", "I", "I", "I",       // U+0128
    "I", "I", "IJ", "IJ", "J", "J", "K", "K",     // U+0130
    "K", "L", "L", "L", "L", "L", "L", "L",       // U+0138
    "L", "L", "L", "N", "N", "N", "N", "N",       // U+0140
    "N", "N", "N", "N", "O", "O", "O", "O",       // U+0148
    "O", "O", "OE", "OE", "R", "R", "R", "R",     // U+0150
    "R", "R", "S", "S", "S", "S", "S", "S",       // U+0158
    "S", "S", "T", "T", "T", "T", "T", "T",       // U+0160
    "U", "U", "U", "U", "U", "U", "U", "U",       // U+0168
    "U", "U", "U", "U", "W", "W", "Y", "Y",       // U+0170
    "Y", "Z", "Z", "Z", "Z", "Z", "Z", "S",       // U+0178
};

// Name prefixes dropped in PrefixMode::strip, matched token-wise and
// case-insensitively against the space-separated raw last name.
inline constexpr std::array<std::string_view, 19> kNamePrefixes = {
    "AL", "DA", "DAL", "DE", "DEL", "DELLA", "DEN", "DER", "DI",
    "DOS", "DU", "EL", "LA", "LE", "LO", "TEN", "TER", "VAN", "VON",
};

inline bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && is_ascii_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_ascii_space(s.back())) s.remove_suffix(1);
  return s;
}

// Separators the last-name rule removes: spaces, apostrophes, hyphens, plus
// their common Unicode lookalikes (NBSP, curly quotes, dash family).
inline bool is_name_separator(char32_t cp) {
  switch (cp) {
    case U' ': case U'\t': case U'\r': case U'\n': case U'\f': case U'\v':
    case U'\'': case U'-':
    case 0x00A0: case 0x02BC:
    case 0x2010: case 0x2011: case 0x2012: case 0x2013: case 0x2014: case 0x2015:
    case 0x2018: case 0x2019:
      return true;
    default:
      return false;
  }
}

// Lenient UTF-8 decoding: a malformed byte is consumed as its Latin-1 value
// so dirty inputs degrade to a deterministic comparison instead of an error.
inline char32_t decode_utf8(std::string_view s, std::size_t& i) {
  const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
  const auto cont = [&](std::size_t k) { return k < s.size() && (byte(k) & 0xC0) == 0x80; };
  const unsigned char b0 = byte(i);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  if ((b0 & 0xE0) == 0xC0 && cont(i + 1)) {
    const char32_t cp = (char32_t(b0 & 0x1F) << 6) | (byte(i + 1) & 0x3F);
    i += 2;
    return cp;
  }
  if ((b0 & 0xF0) == 0xE0 && cont(i + 1) && cont(i + 2)) {
    const char32_t cp = (char32_t(b0 & 0x0F) << 12) | (char32_t(byte(i + 1) & 0x3F) << 6) |
                        (byte(i + 2) & 0x3F);
    i += 3;
    return cp;
  }
  if ((b0 & 0xF8) == 0xF0 && cont(i + 1) && cont(i + 2) && cont(i + 3)) {
    const char32_t cp = (char32_t(b0 & 0x07) << 18) | (char32_t(byte(i + 1) & 0x3F) << 12) |
                        (char32_t(byte(i + 2) & 0x3F) << 6) | (byte(i + 3) & 0x3F);
    i += 4;
    return cp;
  }
  ++i;
  return b0;
}

inline void append_utf8(std::string& out, char32_t cp) {
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

inline const char* fold_to_base(char32_t cp) {
  if (cp >= 0xC0 && cp <= 0xFF) return kFoldLatin1[cp - 0xC0];
  if (cp >= 0x100 && cp <= 0x17F) return kFoldLatinExtA[cp - 0x100];
  return nullptr;
}

// Simple case folding for the Latin ranges we understand; other scripts are
// compared by code point as-is.
inline char32_t to_upper_cp(char32_t cp) {
  if (cp < 0x80) return (cp >= 'a' && cp <= 'z') ? cp - 0x20 : cp;
  if (cp >= 0xE0 && cp <= 0xFE && cp != 0xF7) return cp - 0x20;
  if (cp == 0xFF) return 0x178;
  if (cp == 0x131) return 'I';
  if (cp == 0x17F) return 'S';
  if ((cp >= 0x100 && cp <= 0x137) || (cp >= 0x14A && cp <= 0x177))
    return (cp & 1) ? cp - 1 : cp;
  if ((cp >= 0x139 && cp <= 0x148) || (cp >= 0x179 && cp <= 0x17E))
    return (cp & 1) ? cp : cp - 1;
  return cp;
}

// Appends one canonicalized code point to a key. Returns false when the code
// point is dropped (separators in last names, non-letters in initials).
inline void append_canonical(std::string& out, char32_t cp, bool fold, bool& non_latin) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(to_upper_cp(cp)));
    return;
  }
  if (fold) {
    if (const char* base = fold_to_base(cp)) {
      out.append(base);
      return;
    }
  }
  const char32_t up = to_upper_cp(cp);
  if (up < 0x80) {
    out.push_back(static_cast<char>(up));
    return;
  }
  append_utf8(out, up);
  non_latin = true;
}

inline std::string ascii_upper(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 0x20);
  return out;
}

inline std::string strip_name_prefixes(std::string_view last) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < last.size()) {
    while (pos < last.size() && is_ascii_space(last[pos])) ++pos;
    std::size_t end = pos;
    while (end < last.size() && !is_ascii_space(last[end])) ++end;
    if (end > pos) tokens.push_back(last.substr(pos, end - pos));
    pos = end;
  }
  std::size_t start = 0;
  while (start + 1 < tokens.size()) {
    const std::string token = ascii_upper(tokens[start]);
    const bool is_prefix = std::find(kNamePrefixes.begin(), kNamePrefixes.end(), token) !=
                           kNamePrefixes.end();
    if (!is_prefix) break;
    ++start;
  }
  std::string out;
  for (std::size_t t = start; t < tokens.size(); ++t) {
    if (!out.empty()) out.push_back(' ');
    out.append(tokens[t]);
  }
  return out;
}

}  // namespace detail

/// Builds the comparison key for a raw author name. Throws InvalidNameError
/// when the last name is empty (or becomes empty once separators are gone).
/// Canonicalization is idempotent: feeding the output back in is a no-op.
inline CanonicalName canonicalize(const RawName& raw, const NameOptions& opts = {}) {
  std::string_view last = detail::trim(raw.last);
  if (last.empty()) throw InvalidNameError("author last name is empty");

  std::string stripped;
  if (opts.prefix_mode == PrefixMode::strip) {
    stripped = detail::strip_name_prefixes(last);
    last = stripped;
  }

  CanonicalName out;
  out.key_last.reserve(last.size());
  for (std::size_t i = 0; i < last.size();) {
    const char32_t cp = detail::decode_utf8(last, i);
    if (detail::is_name_separator(cp)) continue;
    detail::append_canonical(out.key_last, cp, opts.fold_diacritics, out.non_latin);
  }
  if (out.key_last.empty())
    throw InvalidNameError("author last name '" + raw.last + "' is empty after canonicalization");

  out.key_initials.reserve(raw.initials.size());
  for (std::size_t i = 0; i < raw.initials.size();) {
    const char32_t cp = detail::decode_utf8(raw.initials, i);
    if (cp < 0x80) {
      const char32_t up = detail::to_upper_cp(cp);
      if (up >= 'A' && up <= 'Z') out.key_initials.push_back(static_cast<char>(up));
      continue;
    }
    if (detail::is_name_separator(cp)) continue;
    detail::append_canonical(out.key_initials, cp, opts.fold_diacritics, out.non_latin);
  }
  return out;
}

/// Total order over canonical names: last-name key byte-wise (a strict prefix
/// precedes its extension), ties broken by initials, empty initials first.
inline std::strong_ordering compare(const CanonicalName& a, const CanonicalName& b) {
  return a <=> b;
}

}  // namespace byline
