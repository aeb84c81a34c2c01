#pragma once

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rre {

struct unicode_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Strict UTF-8 decoder (rejects overlong forms, surrogates, > U+10FFFF).
inline std::u32string utf8_decode(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const unsigned char b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
      out.push_back(b0);
      ++i;
      continue;
    }
    std::size_t len = 0;
    char32_t cp = 0;
    unsigned char lo = 0x80, hi = 0xBF;  // bounds for the second byte
    if (b0 >= 0xC2 && b0 <= 0xDF) {
      len = 2;
      cp = b0 & 0x1Fu;
    } else if (b0 == 0xE0) {
      len = 3;
      cp = 0;
      lo = 0xA0;
    } else if (b0 >= 0xE1 && b0 <= 0xEC) {
      len = 3;
      cp = b0 & 0x0Fu;
    } else if (b0 == 0xED) {
      len = 3;
      cp = 0x0D;
      hi = 0x9F;
    } else if (b0 >= 0xEE && b0 <= 0xEF) {
      len = 3;
      cp = b0 & 0x0Fu;
    } else if (b0 == 0xF0) {
      len = 4;
      cp = 0;
      lo = 0x90;
    } else if (b0 >= 0xF1 && b0 <= 0xF3) {
      len = 4;
      cp = b0 & 0x07u;
    } else if (b0 == 0xF4) {
      len = 4;
      cp = 0x04;
      hi = 0x8F;
    } else {
      throw unicode_error("invalid UTF-8 byte at offset " + std::to_string(i));
    }
    if (i + len > s.size())
      throw unicode_error("truncated UTF-8 sequence at offset " + std::to_string(i));
    for (std::size_t k = 1; k < len; ++k) {
      const unsigned char bk = static_cast<unsigned char>(s[i + k]);
      const unsigned char klo = (k == 1) ? lo : 0x80;
      const unsigned char khi = (k == 1) ? hi : 0xBF;
      if (bk < klo || bk > khi)
        throw unicode_error("invalid UTF-8 sequence at offset " + std::to_string(i));
      cp = (cp << 6) | (bk & 0x3Fu);
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

inline std::string utf8_encode(std::u32string_view cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t c : cps) {
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
    } else if (c < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (c >> 6)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else if (c < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (c >> 12)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (c >> 18)));
      out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
  }
  return out;
}

// Width folding (fullwidth forms U+FF01..U+FF5E to ASCII, ideographic space
// to space) followed by ASCII lowercasing. Everything else, CJK included,
// passes through.
inline char32_t fold_codepoint(char32_t c) {
  if (c == 0x3000) {
    c = 0x20;
  } else if (c >= 0xFF01 && c <= 0xFF5E) {
    c -= 0xFEE0;
  }
  if (c >= U'A' && c <= U'Z') c += 0x20;
  return c;
}

inline std::u32string normalize(std::u32string_view in) {
  std::u32string out;
  out.reserve(in.size());
  for (char32_t c : in) out.push_back(fold_codepoint(c));
  return out;
}

inline std::string normalize(std::string_view utf8) {
  return utf8_encode(normalize(utf8_decode(utf8)));
}

// Edit distance over Unicode scalar values, two-row dynamic program.
inline std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  const std::size_t n = b.size();
  std::vector<std::size_t> row(n + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= n; ++j) {
      const std::size_t del = row[j] + 1;
      const std::size_t ins = row[j - 1] + 1;
      const std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      diag = row[j];
      row[j] = std::min({del, ins, sub});
    }
  }
  return row[n];
}

inline std::size_t levenshtein(std::string_view a_utf8, std::string_view b_utf8) {
  return levenshtein(std::u32string_view(utf8_decode(a_utf8)),
                     std::u32string_view(utf8_decode(b_utf8)));
}

// Levenshtein over the normalized strings, divided by the longer normalized
// length; 0 when both normalize to empty.
inline double norm_edit_distance(std::string_view pred, std::string_view gt) {
  const std::u32string a = normalize(utf8_decode(pred));
  const std::u32string b = normalize(utf8_decode(gt));
  const std::size_t denom = std::max(a.size(), b.size());
  if (denom == 0) return 0.0;
  return static_cast<double>(levenshtein(std::u32string_view(a), std::u32string_view(b))) /
         static_cast<double>(denom);
}

}  // namespace rre
