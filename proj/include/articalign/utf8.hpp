#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace articalign {

// Minimal UTF-8 codec. Invalid byte sequences are decoded as Latin-1
// (one codepoint per byte) so malformed input never throws here.
std::vector<char32_t> utf8_decode(const std::string& s);
std::string utf8_encode(const std::vector<char32_t>& cps);

}  // namespace articalign
