#include "articalign/text_similarity.hpp"

#include <cstdint>
#include <unordered_map>

#include "articalign/utf8.hpp"

namespace articalign {

namespace {

struct RangeKey {
    std::uint32_t v[4];
    bool operator==(const RangeKey& o) const {
        return v[0] == o.v[0] && v[1] == o.v[1] && v[2] == o.v[2] && v[3] == o.v[3];
    }
};

struct RangeKeyHash {
    std::size_t operator()(const RangeKey& k) const {
        std::uint64_t h = 1469598103934665603ull;
        for (std::uint32_t x : k.v) {
            h ^= x;
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};

class Matcher {
public:
    Matcher(const std::vector<char32_t>& a, const std::vector<char32_t>& b) : a_(a), b_(b) {}

    std::size_t best_total(std::size_t a_lo, std::size_t a_hi, std::size_t b_lo, std::size_t b_hi) {
        if (a_lo >= a_hi || b_lo >= b_hi) return 0;
        const RangeKey key{{static_cast<std::uint32_t>(a_lo), static_cast<std::uint32_t>(a_hi),
                            static_cast<std::uint32_t>(b_lo), static_cast<std::uint32_t>(b_hi)}};
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;

        std::size_t len = 0;
        const auto positions = longest_blocks(a_lo, a_hi, b_lo, b_hi, len);
        std::size_t best = 0;
        for (const auto& [i, j] : positions) {
            const std::size_t m = len + best_total(a_lo, i, b_lo, j) + best_total(i + len, a_hi, j + len, b_hi);
            best = std::max(best, m);
        }
        memo_.emplace(key, best);
        return best;
    }

    void collect(std::size_t a_lo, std::size_t a_hi, std::size_t b_lo, std::size_t b_hi,
                 std::vector<MatchBlock>& out) {
        if (a_lo >= a_hi || b_lo >= b_hi) return;
        std::size_t len = 0;
        const auto positions = longest_blocks(a_lo, a_hi, b_lo, b_hi, len);
        if (len == 0) return;
        const std::size_t target = best_total(a_lo, a_hi, b_lo, b_hi);
        for (const auto& [i, j] : positions) {
            if (len + best_total(a_lo, i, b_lo, j) + best_total(i + len, a_hi, j + len, b_hi) == target) {
                collect(a_lo, i, b_lo, j, out);
                out.push_back(MatchBlock{i, j, len});
                collect(i + len, a_hi, j + len, b_hi, out);
                return;
            }
        }
    }

private:
    // All start positions (absolute, sorted by (i, j)) of maximal-length
    // common substrings within the subranges; length returned via out-param.
    std::vector<std::pair<std::size_t, std::size_t>> longest_blocks(std::size_t a_lo, std::size_t a_hi,
                                                                    std::size_t b_lo, std::size_t b_hi,
                                                                    std::size_t& best_len) {
        const std::size_t la = a_hi - a_lo;
        const std::size_t lb = b_hi - b_lo;
        std::vector<std::size_t> prev(lb + 1, 0), curr(lb + 1, 0);
        std::vector<std::pair<std::size_t, std::size_t>> positions;
        best_len = 0;
        for (std::size_t i = 0; i < la; ++i) {
            curr[0] = 0;
            for (std::size_t j = 0; j < lb; ++j) {
                const std::size_t run = a_[a_lo + i] == b_[b_lo + j] ? prev[j] + 1 : 0;
                curr[j + 1] = run;
                if (run > best_len) {
                    best_len = run;
                    positions.clear();
                }
                if (run == best_len && run > 0) {
                    positions.emplace_back(a_lo + i + 1 - run, b_lo + j + 1 - run);
                }
            }
            std::swap(prev, curr);
        }
        return positions;
    }

    const std::vector<char32_t>& a_;
    const std::vector<char32_t>& b_;
    std::unordered_map<RangeKey, std::size_t, RangeKeyHash> memo_;
};

}  // namespace

MatchingBlocks matching_blocks(const std::string& a, const std::string& b) {
    const std::vector<char32_t> ca = utf8_decode(a);
    const std::vector<char32_t> cb = utf8_decode(b);
    Matcher m(ca, cb);
    MatchingBlocks result;
    result.total_matched = m.best_total(0, ca.size(), 0, cb.size());
    m.collect(0, ca.size(), 0, cb.size(), result.blocks);
    return result;
}

double similarity(const std::string& a, const std::string& b) {
    const std::vector<char32_t> ca = utf8_decode(a);
    const std::vector<char32_t> cb = utf8_decode(b);
    if (ca.empty() && cb.empty()) return 1.0;
    Matcher m(ca, cb);
    const std::size_t matched = m.best_total(0, ca.size(), 0, cb.size());
    return 2.0 * static_cast<double>(matched) / static_cast<double>(ca.size() + cb.size());
}

}  // namespace articalign
