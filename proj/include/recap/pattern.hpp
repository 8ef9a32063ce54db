#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace recap {

// Capture patterns are bitcodes over k lists, big-endian: list j (0-based,
// in ingestion column order) contributes bit (k-1-j). For k=3 the code of
// pattern 101 is 5 and its string form is "101".
//
// Serialized arrays over nonzero patterns use the canonical descending order
// 111, 110, 101, 100, 011, 010, 001, i.e. index = (2^k - 1) - code.

using PatternCode = std::uint32_t;

inline std::size_t n_nonzero_patterns(unsigned k) {
    return (std::size_t{1} << k) - 1;
}

inline std::size_t index_of_code(unsigned k, PatternCode code) {
    return ((std::size_t{1} << k) - 1) - code;
}

inline PatternCode code_of_index(unsigned k, std::size_t index) {
    return static_cast<PatternCode>(((std::size_t{1} << k) - 1) - index);
}

// 1 if list j captured the unit
inline unsigned pattern_bit(unsigned k, PatternCode code, unsigned j) {
    return (code >> (k - 1 - j)) & 1u;
}

inline unsigned pattern_weight(PatternCode code) {
    return static_cast<unsigned>(std::popcount(code));
}

inline std::string pattern_string(unsigned k, PatternCode code) {
    std::string s(k, '0');
    for (unsigned j = 0; j < k; ++j)
        if (pattern_bit(k, code, j)) s[j] = '1';
    return s;
}

inline PatternCode parse_pattern(const std::string& s) {
    PatternCode code = 0;
    for (char c : s) {
        if (c != '0' && c != '1') throw std::invalid_argument("pattern string must be binary: " + s);
        code = (code << 1) | static_cast<PatternCode>(c - '0');
    }
    return code;
}

}  // namespace recap
