#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace articalign {

struct MatchBlock {
    std::size_t pos_a = 0;  // codepoint offset in a
    std::size_t pos_b = 0;  // codepoint offset in b
    std::size_t length = 0;
};

struct MatchingBlocks {
    std::vector<MatchBlock> blocks;  // non-overlapping, ordered in both strings
    std::size_t total_matched = 0;   // M = sum of block lengths
};

// Ratcliff-Obershelp decomposition: recursively take a longest common
// substring and recurse on the left and right remainders. M is the maximum
// total matched over all tied longest-substring choices, which makes it
// symmetric in (a, b); reported block positions pick the smallest
// (pos_a, pos_b) among decompositions achieving that maximum.
// Operates on Unicode codepoints.
MatchingBlocks matching_blocks(const std::string& a, const std::string& b);

// 2 * M / (|a| + |b|) in [0, 1]; 1.0 when both strings are empty.
double similarity(const std::string& a, const std::string& b);

}  // namespace articalign
