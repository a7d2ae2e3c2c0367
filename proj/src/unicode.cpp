#include "stylo/unicode.hpp"

namespace stylo {

namespace {

constexpr std::uint32_t kCapitalSigma = 0x03A3;
constexpr std::uint32_t kSmallFinalSigma = 0x03C2;

// Decodes one UTF-8 sequence starting at s[i]. On malformed input returns
// the raw byte value with length 1 so the caller can copy it through.
std::uint32_t decode(std::string_view s, std::size_t i, std::size_t* len) {
  const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
  unsigned char b0 = byte(i);
  if (b0 < 0x80) {
    *len = 1;
    return b0;
  }
  std::size_t n = 0;
  std::uint32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    n = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    n = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    n = 4;
    cp = b0 & 0x07;
  } else {
    *len = 1;
    return b0;
  }
  if (i + n > s.size()) {
    *len = 1;
    return b0;
  }
  for (std::size_t k = 1; k < n; ++k) {
    unsigned char bk = byte(i + k);
    if ((bk & 0xC0) != 0x80) {
      *len = 1;
      return b0;
    }
    cp = (cp << 6) | (bk & 0x3F);
  }
  *len = n;
  return cp;
}

void encode(std::uint32_t cp, std::string& out) {
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

bool in(std::uint32_t cp, std::uint32_t lo, std::uint32_t hi) { return cp >= lo && cp <= hi; }

}  // namespace

std::uint32_t lower_codepoint(std::uint32_t cp) {
  // ASCII
  if (in(cp, 'A', 'Z')) return cp + 0x20;
  if (cp < 0xC0) return cp;
  // Latin-1 Supplement (multiplication sign excluded)
  if (in(cp, 0x00C0, 0x00DE) && cp != 0x00D7) return cp + 0x20;
  // Latin Extended-A
  if (in(cp, 0x0100, 0x017F)) {
    if (cp == 0x0130) return 0x0069;  // dotted capital I, simple mapping
    if (cp == 0x0131 || cp == 0x0138 || cp == 0x0149 || cp == 0x017F) return cp;
    if (cp == 0x0178) return 0x00FF;
    if (in(cp, 0x0100, 0x0137)) return (cp % 2 == 0) ? cp + 1 : cp;
    if (in(cp, 0x0139, 0x0148)) return (cp % 2 == 1) ? cp + 1 : cp;
    if (in(cp, 0x014A, 0x0177)) return (cp % 2 == 0) ? cp + 1 : cp;
    if (in(cp, 0x0179, 0x017E)) return (cp % 2 == 1) ? cp + 1 : cp;
    return cp;
  }
  // Latin Extended-B, regular upper/lower pair runs only
  if (in(cp, 0x01CD, 0x01DC)) return (cp % 2 == 1) ? cp + 1 : cp;
  if (in(cp, 0x01DE, 0x01EF)) return (cp % 2 == 0) ? cp + 1 : cp;
  if (in(cp, 0x01F8, 0x021F)) return (cp % 2 == 0) ? cp + 1 : cp;
  if (in(cp, 0x0222, 0x0233)) return (cp % 2 == 0) ? cp + 1 : cp;
  if (in(cp, 0x0246, 0x024F)) return (cp % 2 == 0) ? cp + 1 : cp;
  // Greek and Coptic
  if (cp == 0x0386) return 0x03AC;
  if (in(cp, 0x0388, 0x038A)) return cp + 0x25;
  if (cp == 0x038C) return 0x03CC;
  if (cp == 0x038E || cp == 0x038F) return cp + 0x3F;
  if (in(cp, 0x0391, 0x03A1)) return cp + 0x20;
  if (in(cp, 0x03A3, 0x03AB)) return cp + 0x20;  // sigma context handled in utf8_lower
  if (in(cp, 0x03D8, 0x03EF)) return (cp % 2 == 0) ? cp + 1 : cp;
  // Greek Extended, the regular +8 case pairs
  if (in(cp, 0x1F08, 0x1F0F) || in(cp, 0x1F18, 0x1F1D) || in(cp, 0x1F28, 0x1F2F) ||
      in(cp, 0x1F38, 0x1F3F) || in(cp, 0x1F48, 0x1F4D) || in(cp, 0x1F68, 0x1F6F)) {
    return cp - 8;
  }
  if (cp == 0x1F59 || cp == 0x1F5B || cp == 0x1F5D || cp == 0x1F5F) return cp - 8;
  // Cyrillic
  if (in(cp, 0x0400, 0x040F)) return cp + 0x50;
  if (in(cp, 0x0410, 0x042F)) return cp + 0x20;
  if (in(cp, 0x0460, 0x0481)) return (cp % 2 == 0) ? cp + 1 : cp;
  if (in(cp, 0x048A, 0x04BF)) return (cp % 2 == 0) ? cp + 1 : cp;
  if (cp == 0x04C0) return 0x04CF;
  if (in(cp, 0x04C1, 0x04CE)) return (cp % 2 == 1) ? cp + 1 : cp;
  if (in(cp, 0x04D0, 0x052F)) return (cp % 2 == 0) ? cp + 1 : cp;
  // Fullwidth Latin
  if (in(cp, 0xFF21, 0xFF3A)) return cp + 0x20;
  return cp;
}

bool is_cased_letter(std::uint32_t cp) {
  if (in(cp, 'A', 'Z') || in(cp, 'a', 'z')) return true;
  if (in(cp, 0x00C0, 0x00FF) && cp != 0x00D7 && cp != 0x00F7) return true;
  if (in(cp, 0x0100, 0x024F)) return true;
  if (in(cp, 0x0386, 0x03FF) && cp != 0x0387) return true;
  if (in(cp, 0x1F00, 0x1FFC)) return true;
  if (in(cp, 0x0400, 0x052F)) return true;
  if (in(cp, 0xFF21, 0xFF3A) || in(cp, 0xFF41, 0xFF5A)) return true;
  return false;
}

std::string utf8_lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool prev_cased = false;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t len = 0;
    std::uint32_t cp = decode(s, i, &len);
    if (len == 1 && static_cast<unsigned char>(s[i]) >= 0x80) {
      out.push_back(s[i]);  // malformed byte, keep as-is
      prev_cased = false;
      ++i;
      continue;
    }
    std::uint32_t lowered = lower_codepoint(cp);
    if (cp == kCapitalSigma && prev_cased) {
      std::size_t j = i + len;
      std::size_t next_len = 0;
      bool next_cased = j < s.size() && is_cased_letter(decode(s, j, &next_len));
      if (!next_cased) lowered = kSmallFinalSigma;
    }
    encode(lowered, out);
    prev_cased = is_cased_letter(cp);
    i += len;
  }
  return out;
}

}  // namespace stylo
