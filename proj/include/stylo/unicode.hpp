#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace stylo {

// Simple (one-to-one) lowercase mapping for the bicameral scripts this
// toolkit targets: ASCII, Latin-1 Supplement, Latin Extended-A and the
// regular Extended-B pair ranges, Greek (monotonic and the regular
// polytonic blocks), Cyrillic, and fullwidth Latin. Codepoints outside
// the covered ranges are returned unchanged.
std::uint32_t lower_codepoint(std::uint32_t cp);

// True for codepoints in the cased-letter ranges the mapping covers.
// Used for the Greek final-sigma context rule.
bool is_cased_letter(std::uint32_t cp);

// Lowercases a UTF-8 string. Applies the contextual final-sigma rule:
// capital sigma becomes U+03C2 when preceded by a cased letter and not
// followed by one. Invalid UTF-8 bytes are copied through unchanged.
std::string utf8_lower(std::string_view s);

}  // namespace stylo
