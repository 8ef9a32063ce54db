#include <doctest.h>

#include <algorithm>
#include <set>

#include "recap/csv.hpp"
#include "recap/types.hpp"

using namespace recap;

namespace {

Dataset tiny(unsigned k, const std::vector<std::string>& patterns) {
    Dataset d;
    d.k = k;
    for (std::size_t i = 0; i < patterns.size(); ++i) {
        Unit u;
        u.id = "u" + std::to_string(i + 1);
        u.pattern = parse_pattern(patterns[i]);
        d.units.push_back(u);
    }
    return d;
}

}  // namespace

TEST_CASE("cross_classify counts patterns in canonical order") {
    const Dataset d = tiny(3, {"111", "101", "101", "001", "110"});
    const CrossClassification cc = cross_classify(d);
    CHECK(cc.n_c() == doctest::Approx(5.0));
    CHECK(cc.at(parse_pattern("111")) == 1.0);
    CHECK(cc.at(parse_pattern("101")) == 2.0);
    CHECK(cc.at(parse_pattern("001")) == 1.0);
    CHECK(cc.at(parse_pattern("110")) == 1.0);
    CHECK(cc.at(parse_pattern("100")) == 0.0);
    CHECK_FALSE(cc.missing_cell.has_value());
}

TEST_CASE("dataset validation rejects malformed units") {
    Dataset d = tiny(2, {"11"});
    CHECK_NOTHROW(d.validate());
    d.units[0].pattern = 0;
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
    d.units[0].pattern = 4;  // out of range for k=2
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
    d = tiny(2, {"11"});
    d.covariate_names = {"x"};
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);  // arity mismatch
}

TEST_CASE("pattern distribution validation") {
    PatternDistribution p;
    p.k = 2;
    p.probs = {0.5, 0.25, 0.25};
    CHECK_NOTHROW(p.validate());
    p.probs = {0.5, 0.5, 0.25};
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.probs = {1.5, -0.25, -0.25};
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("collapse_lists marginalizes to two kept lists") {
    // hand-built 3-list table: 111:4, 110:3, 101:2, 100:1, 011:5, 010:6, 001:7
    CrossClassification cc;
    cc.k = 3;
    cc.counts = {4, 3, 2, 1, 5, 6, 7};
    const CrossClassification ab = collapse_lists(cc, 0, 1);
    // kept lists (0,1): 11 <- 111+110 = 7; 10 <- 101+100 = 3; 01 <- 011+010 = 11; dropped <- 001 = 7
    CHECK(ab.k == 2);
    CHECK(ab.at(parse_pattern("11")) == 7.0);
    CHECK(ab.at(parse_pattern("10")) == 3.0);
    CHECK(ab.at(parse_pattern("01")) == 11.0);
    REQUIRE(ab.missing_cell.has_value());
    CHECK(*ab.missing_cell == 7.0);

    const CrossClassification bc = collapse_lists(cc, 1, 2);
    // kept lists (1,2): 11 <- 111+011 = 9; 10 <- 110+010 = 9; 01 <- 101+001 = 9; dropped <- 100 = 1
    CHECK(bc.at(parse_pattern("11")) == 9.0);
    CHECK(bc.at(parse_pattern("10")) == 9.0);
    CHECK(bc.at(parse_pattern("01")) == 9.0);
    CHECK(*bc.missing_cell == 1.0);

    CHECK_THROWS_AS(collapse_lists(cc, 0, 3), std::out_of_range);
    CHECK_THROWS_AS(collapse_lists(cc, 1, 1), std::out_of_range);
}

TEST_CASE("collapse of the bundled fixture matches hand sums") {
    const Dataset d = read_dataset_csv(RECAP_FIXTURE_PATH, {"rank"}, {"y2009", "y2010", "y2011"});
    const CrossClassification cc = cross_classify(d);
    const CrossClassification ab = collapse_lists(cc, 0, 1);
    CHECK(ab.at(parse_pattern("11")) == 594.0);  // 581 + 13
    CHECK(ab.at(parse_pattern("10")) == 29.0);   // 11 + 18
    CHECK(ab.at(parse_pattern("01")) == 20.0);   // 10 + 10
    REQUIRE(ab.missing_cell.has_value());
    CHECK(*ab.missing_cell == 21.0);
}

TEST_CASE("rank covariate ascends with capture totals") {
    Dataset d = tiny(3, {"111", "100"});
    const Dataset r = rank_covariate(d);
    REQUIRE(r.covariate_names.back() == "rank");
    CHECK(r.units[0].x.back() == 2.0);  // total 3 -> rank 2
    CHECK(r.units[1].x.back() == 1.0);  // total 1 -> rank 1
}

TEST_CASE("rank covariate breaks ties by input order") {
    Dataset d = tiny(2, {"10", "01", "11", "10"});
    const Dataset r = rank_covariate(d);
    // totals (1,1,2,1): the three singletons keep input order
    CHECK(r.units[0].x.back() == 1.0);
    CHECK(r.units[1].x.back() == 2.0);
    CHECK(r.units[3].x.back() == 3.0);
    CHECK(r.units[2].x.back() == 4.0);
}

TEST_CASE("rank covariate is a permutation of 1..n_c on the fixture") {
    const Dataset d = read_dataset_csv(RECAP_FIXTURE_PATH, {}, {"y2009", "y2010", "y2011"});
    const Dataset r = rank_covariate(d);
    std::set<double> seen;
    for (const Unit& u : r.units) seen.insert(u.x.back());
    CHECK(seen.size() == r.units.size());
    CHECK(*seen.begin() == 1.0);
    CHECK(*seen.rbegin() == static_cast<double>(r.units.size()));
}
