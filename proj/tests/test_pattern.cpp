#include <doctest.h>

#include <set>

#include "recap/pattern.hpp"

using namespace recap;

TEST_CASE("pattern counts and canonical order for k=3") {
    CHECK(n_nonzero_patterns(3) == 7);
    CHECK(n_nonzero_patterns(2) == 3);
    CHECK(n_nonzero_patterns(1) == 1);
    CHECK(n_nonzero_patterns(5) == 31);

    // canonical descending order 111, 110, ..., 001
    const char* expected[] = {"111", "110", "101", "100", "011", "010", "001"};
    for (std::size_t i = 0; i < 7; ++i) {
        const PatternCode c = code_of_index(3, i);
        CHECK(pattern_string(3, c) == expected[i]);
        CHECK(index_of_code(3, c) == i);
    }
}

TEST_CASE("pattern bit layout is big-endian in list order") {
    const PatternCode c = parse_pattern("101");
    CHECK(c == 5);
    CHECK(pattern_bit(3, c, 0) == 1);
    CHECK(pattern_bit(3, c, 1) == 0);
    CHECK(pattern_bit(3, c, 2) == 1);
    CHECK(pattern_weight(c) == 2);
    CHECK(pattern_weight(parse_pattern("111")) == 3);
    CHECK(pattern_weight(parse_pattern("0001")) == 1);
}

TEST_CASE("parse and print round-trip over all k=4 patterns") {
    std::set<PatternCode> seen;
    for (std::size_t i = 0; i < n_nonzero_patterns(4); ++i) {
        const PatternCode c = code_of_index(4, i);
        CHECK(parse_pattern(pattern_string(4, c)) == c);
        seen.insert(c);
    }
    CHECK(seen.size() == 15);
    CHECK(seen.count(0) == 0);
}

TEST_CASE("parse_pattern rejects non-binary input") {
    CHECK_THROWS_AS(parse_pattern("10x"), std::invalid_argument);
    CHECK_THROWS_AS(parse_pattern("2"), std::invalid_argument);
}
