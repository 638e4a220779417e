#include <algorithm>
#include <unordered_map>

#include "articalign/corpus_model.hpp"
#include "articalign/utf8.hpp"

namespace articalign {

namespace {

bool is_space_cp(char32_t c) {
    switch (c) {
        case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
        case 0xA0: case 0x1680: case 0x2028: case 0x2029: case 0x202F:
        case 0x205F: case 0x3000:
            return true;
        default:
            return c >= 0x2000 && c <= 0x200A;
    }
}

// Punctuation to strip. Apostrophes and hyphens are handled separately.
bool is_strippable_punct(char32_t c) {
    if (c < 0x80) {
        switch (static_cast<char>(c)) {
            case '!': case '"': case '#': case '$': case '%': case '&':
            case '(': case ')': case '*': case '+': case ',': case '.':
            case '/': case ':': case ';': case '<': case '=': case '>':
            case '?': case '@': case '[': case '\\': case ']': case '^':
            case '_': case '`': case '{': case '|': case '}': case '~':
                return true;
            default:
                return false;
        }
    }
    switch (c) {
        case 0xAB: case 0xBB:                              // « »
        case 0xB7:                                         // ·
        case 0xBF: case 0xA1:                              // ¿ ¡
        case 0x2018: case 0x201A: case 0x201B:             // single quotes
        case 0x201C: case 0x201D: case 0x201E: case 0x201F:
        case 0x2026:                                       // …
        case 0x2039: case 0x203A:                          // ‹ ›
            return true;
        default:
            return false;
    }
}

char32_t to_lower_cp(char32_t c) {
    if (c >= 'A' && c <= 'Z') return c + 0x20;
    // Latin-1 supplement: À..Þ except ×
    if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 0x20;
    if (c == 0x178) return 0xFF;  // Ÿ -> ÿ
    // Latin Extended-A upper/lower pairs
    if ((c >= 0x100 && c <= 0x137 && (c % 2) == 0) ||
        (c >= 0x139 && c <= 0x148 && (c % 2) == 1) ||
        (c >= 0x14A && c <= 0x177 && (c % 2) == 0) ||
        (c >= 0x179 && c <= 0x17E && (c % 2) == 1)) {
        return c + 1;
    }
    return c;
}

// NFC composition restricted to Latin base letters + the combining marks
// produced by French/European aligner output.
char32_t compose_pair(char32_t base, char32_t mark) {
    struct Key {
        char32_t base, mark;
        bool operator==(const Key& o) const { return base == o.base && mark == o.mark; }
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const {
            return std::hash<char32_t>()(k.base) * 1315423911u ^ std::hash<char32_t>()(k.mark);
        }
    };
    static const std::unordered_map<Key, char32_t, KeyHash> table = [] {
        std::unordered_map<Key, char32_t, KeyHash> t;
        auto add = [&t](char32_t b, char32_t m, char32_t r) { t[{b, m}] = r; };
        // grave 0x300
        add('a', 0x300, 0xE0); add('e', 0x300, 0xE8); add('i', 0x300, 0xEC);
        add('o', 0x300, 0xF2); add('u', 0x300, 0xF9);
        add('A', 0x300, 0xC0); add('E', 0x300, 0xC8); add('I', 0x300, 0xCC);
        add('O', 0x300, 0xD2); add('U', 0x300, 0xD9);
        // acute 0x301
        add('a', 0x301, 0xE1); add('e', 0x301, 0xE9); add('i', 0x301, 0xED);
        add('o', 0x301, 0xF3); add('u', 0x301, 0xFA); add('y', 0x301, 0xFD);
        add('A', 0x301, 0xC1); add('E', 0x301, 0xC9); add('I', 0x301, 0xCD);
        add('O', 0x301, 0xD3); add('U', 0x301, 0xDA); add('Y', 0x301, 0xDD);
        // circumflex 0x302
        add('a', 0x302, 0xE2); add('e', 0x302, 0xEA); add('i', 0x302, 0xEE);
        add('o', 0x302, 0xF4); add('u', 0x302, 0xFB);
        add('A', 0x302, 0xC2); add('E', 0x302, 0xCA); add('I', 0x302, 0xCE);
        add('O', 0x302, 0xD4); add('U', 0x302, 0xDB);
        // tilde 0x303
        add('a', 0x303, 0xE3); add('n', 0x303, 0xF1); add('o', 0x303, 0xF5);
        add('A', 0x303, 0xC3); add('N', 0x303, 0xD1); add('O', 0x303, 0xD5);
        // diaeresis 0x308
        add('a', 0x308, 0xE4); add('e', 0x308, 0xEB); add('i', 0x308, 0xEF);
        add('o', 0x308, 0xF6); add('u', 0x308, 0xFC); add('y', 0x308, 0xFF);
        add('A', 0x308, 0xC4); add('E', 0x308, 0xCB); add('I', 0x308, 0xCF);
        add('O', 0x308, 0xD6); add('U', 0x308, 0xDC);
        // cedilla 0x327
        add('c', 0x327, 0xE7); add('C', 0x327, 0xC7);
        return t;
    }();
    auto it = table.find({base, mark});
    return it == table.end() ? 0 : it->second;
}

bool is_word_char(char32_t c) {
    if (c == ' ' || c == '\'' || c == '-') return false;
    return true;  // anything kept that is not a space or joiner counts
}

}  // namespace

std::string normalize_text(const std::string& raw) {
    std::vector<char32_t> cps = utf8_decode(raw);

    // NFC (Latin subset): combine base + combining mark into precomposed.
    std::vector<char32_t> composed;
    composed.reserve(cps.size());
    for (char32_t c : cps) {
        if (!composed.empty() && c >= 0x300 && c <= 0x36F) {
            if (char32_t pre = compose_pair(composed.back(), c)) {
                composed.back() = pre;
                continue;
            }
        }
        composed.push_back(c);
    }

    // Canonicalize apostrophe/dash variants, lowercase, strip punctuation,
    // fold whitespace.
    std::vector<char32_t> kept;
    kept.reserve(composed.size());
    for (char32_t c : composed) {
        if (c == 0x2019 || c == 0x02BC || c == 0xFF07) c = '\'';
        if ((c >= 0x2010 && c <= 0x2015) || c == 0x2212) c = '-';
        if (is_space_cp(c)) {
            if (!kept.empty() && kept.back() != ' ') kept.push_back(' ');
            continue;
        }
        if (is_strippable_punct(c)) continue;
        kept.push_back(to_lower_cp(c));
    }

    // Apostrophes/hyphens survive only between two word characters.
    std::vector<char32_t> joined;
    joined.reserve(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) {
        const char32_t c = kept[i];
        if (c == '\'' || c == '-') {
            const bool prev_ok = !joined.empty() && is_word_char(joined.back());
            const bool next_ok = i + 1 < kept.size() && is_word_char(kept[i + 1]);
            if (!(prev_ok && next_ok)) continue;
        }
        joined.push_back(c);
    }

    // Final whitespace collapse + trim (strips can leave doubled spaces).
    std::vector<char32_t> out;
    out.reserve(joined.size());
    for (char32_t c : joined) {
        if (c == ' ' && (out.empty() || out.back() == ' ')) continue;
        out.push_back(c);
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return utf8_encode(out);
}

}  // namespace articalign
