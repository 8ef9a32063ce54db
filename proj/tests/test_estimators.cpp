#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "recap/csv.hpp"
#include "recap/estimators.hpp"

using namespace recap;

namespace {

Dataset make_units(const std::vector<double>& xs, const std::vector<std::string>& patterns,
                   unsigned k) {
    Dataset d;
    d.k = k;
    d.covariate_names = {"x"};
    for (std::size_t i = 0; i < xs.size(); ++i) {
        Unit u;
        u.id = "u" + std::to_string(i + 1);
        u.x = {xs[i]};
        u.pattern = parse_pattern(patterns[i]);
        d.units.push_back(u);
    }
    return d;
}

Dataset load_fixture() {
    return read_dataset_csv(RECAP_FIXTURE_PATH, {"rank"}, {"y2009", "y2010", "y2011"});
}

}  // namespace

TEST_CASE("petersen closed form") {
    CrossClassification cc;
    cc.k = 2;
    cc.counts = {10, 4, 6};  // 11, 10, 01
    CHECK(petersen(cc) == doctest::Approx(2.4).epsilon(1e-12));

    cc.counts = {0, 4, 6};
    CHECK_THROWS_AS(petersen(cc), std::domain_error);

    CrossClassification three;
    three.k = 3;
    three.counts.assign(7, 1.0);
    CHECK_THROWS_AS(petersen(three), std::invalid_argument);
}

TEST_CASE("horvitz-thompson sums inverse detection probabilities") {
    const HTResult r = horvitz_thompson({0.5, 0.25, 1.0}, 1e-3);
    CHECK(r.n_hat == doctest::Approx(2.0 + 4.0 + 1.0).epsilon(1e-10));
    CHECK(r.clamped == 0);

    // identity: psi = 1/(pi0+1) recovers n_c + sum pi0
    const std::vector<double> pi0 = {0.2, 0.05, 0.8, 0.0};
    std::vector<double> psi;
    double expect = 0.0;
    for (double p : pi0) {
        psi.push_back(detection_prob(p));
        expect += 1.0 + p;
    }
    CHECK(horvitz_thompson(psi, 1e-3).n_hat == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("horvitz-thompson clamps at the floor and validates input") {
    const HTResult r = horvitz_thompson({0.5, 1e-6}, 1e-3);
    CHECK(r.clamped == 1);
    CHECK(r.n_hat == doctest::Approx(2.0 + 1000.0).epsilon(1e-10));
    CHECK_THROWS_AS(horvitz_thompson({0.0}, 1e-3), std::invalid_argument);
    CHECK_THROWS_AS(horvitz_thompson({1.5}, 1e-3), std::invalid_argument);
    CHECK_THROWS_AS(horvitz_thompson({-0.2}, 1e-3), std::invalid_argument);
}

TEST_CASE("adjusted-saturated blends toward the raw table") {
    PatternDistribution d;
    d.k = 2;
    d.probs = {0.5, 0.3, 0.2};

    // eta*nu = 1 gives alpha = 1/2: blend is the midpoint of equal-catch fit and data
    const double eta = 5.0;  // nu = 0.2
    const double adj = adjusted_saturated_impute(d, eta);
    const LocalFit ec = pmml_fit(model_equal_catch(2), d, eta);
    std::vector<double> blend(3);
    for (int y = 0; y < 3; ++y) blend[y] = 0.5 * ec.fitted[y] + 0.5 * d.probs[y];
    PatternDistribution bd;
    bd.k = 2;
    bd.probs = blend;
    CHECK(adj == doctest::Approx(odd_even_impute(bd)).epsilon(1e-10));
}

TEST_CASE("adjusted-saturated stays finite on zero cells") {
    PatternDistribution d;
    d.k = 3;
    d.probs = {0.4, 0.2, 0.0, 0.1, 0.1, 0.1, 0.1};
    const double adj = adjusted_saturated_impute(d, 20.0);
    CHECK(std::isfinite(adj));
    CHECK(adj >= 0.0);
}

TEST_CASE("adjusted-saturated converges to the plain odd/even ratio as eta grows") {
    PatternDistribution d;
    d.k = 3;
    d.probs = {0.30, 0.10, 0.12, 0.08, 0.15, 0.10, 0.15};
    const double target = odd_even_impute(d);
    const double at_small = adjusted_saturated_impute(d, 10.0);
    const double at_large = adjusted_saturated_impute(d, 1e7);
    CHECK(std::fabs(at_large - target) < std::fabs(at_small - target));
    CHECK(at_large == doctest::Approx(target).epsilon(1e-4));
}

TEST_CASE("restriction parsing") {
    const Restriction r = parse_restriction("x<150");
    CHECK(r.covariate == "x");
    CHECK(r.op == "<");
    CHECK(r.value == 150.0);

    const Restriction r2 = parse_restriction(" rank >= 2.5 ");
    CHECK(r2.covariate == "rank");
    CHECK(r2.op == ">=");
    CHECK(r2.value == 2.5);

    CHECK_THROWS_AS(parse_restriction("rank"), std::invalid_argument);
    CHECK_THROWS_AS(parse_restriction("x < foo"), std::invalid_argument);
    CHECK_THROWS_AS(parse_restriction("< 5"), std::invalid_argument);
}

TEST_CASE("restriction membership and the x alias") {
    Dataset d = make_units({1.0, 2.0, 3.0}, {"10", "01", "11"}, 2);
    d.covariate_names = {"rank"};
    const Restriction lt = parse_restriction("x<2.5");  // "x" aliases the first covariate
    CHECK(lt.contains(d, d.units[0].x));
    CHECK(lt.contains(d, d.units[1].x));
    CHECK_FALSE(lt.contains(d, d.units[2].x));

    const Restriction byname = parse_restriction("rank>=2");
    CHECK_FALSE(byname.contains(d, d.units[0].x));
    CHECK(byname.contains(d, d.units[1].x));

    const Restriction missing = parse_restriction("weight<3");
    CHECK_THROWS_AS(missing.contains(d, d.units[0].x), std::invalid_argument);
}

TEST_CASE("boxcar smoothing with a wide window reduces to the petersen estimator") {
    // homogeneous two-list data: every unit sees the same pooled table, the
    // saturated imputer gives c10 c01 / c11 per unit divided by n_c
    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 20; ++rep) {
        std::uniform_int_distribution<int> cnt(1, 30);
        const int c11 = cnt(rng), c10 = cnt(rng), c01 = cnt(rng);
        std::vector<double> xs;
        std::vector<std::string> pats;
        for (int i = 0; i < c11; ++i) { xs.push_back(static_cast<double>(xs.size())); pats.push_back("11"); }
        for (int i = 0; i < c10; ++i) { xs.push_back(static_cast<double>(xs.size())); pats.push_back("10"); }
        for (int i = 0; i < c01; ++i) { xs.push_back(static_cast<double>(xs.size())); pats.push_back("01"); }
        const Dataset d = make_units(xs, pats, 2);

        PipelineConfig cfg;
        cfg.model = "saturated";
        cfg.bandwidth.method = BandwidthMethod::fixed;
        cfg.bandwidth.kernel = KernelFamily::boxcar;
        cfg.bandwidth.values = {1e9};
        const EstimateReport rep_out = smooth_poststrat_estimate(d, cfg);
        const double pet = petersen(cross_classify(d));
        CHECK(rep_out.c0_hat == doctest::Approx(pet).epsilon(1e-9));
        CHECK(rep_out.n_hat == doctest::Approx(xs.size() + pet).epsilon(1e-9));
    }
}

TEST_CASE("boxcar strata reproduce per-stratum petersen sums") {
    // two well-separated strata with narrow windows: the estimate is the sum
    // of the two stratum petersen estimates
    std::vector<double> xs;
    std::vector<std::string> pats;
    auto add = [&](double x, int c11, int c10, int c01) {
        for (int i = 0; i < c11; ++i) { xs.push_back(x + 0.001 * static_cast<double>(i)); pats.push_back("11"); }
        for (int i = 0; i < c10; ++i) { xs.push_back(x + 0.2 + 0.001 * i); pats.push_back("10"); }
        for (int i = 0; i < c01; ++i) { xs.push_back(x + 0.4 + 0.001 * i); pats.push_back("01"); }
    };
    add(0.0, 8, 3, 5);     // stratum A at x ~ 0
    add(100.0, 10, 6, 2);  // stratum B at x ~ 100
    const Dataset d = make_units(xs, pats, 2);

    PipelineConfig cfg;
    cfg.model = "saturated";
    cfg.bandwidth.method = BandwidthMethod::fixed;
    cfg.bandwidth.kernel = KernelFamily::boxcar;
    cfg.bandwidth.values = {2.0};  // covers a stratum, not the gap
    const EstimateReport rep = smooth_poststrat_estimate(d, cfg);
    const double expect = 3.0 * 5.0 / 8.0 + 6.0 * 2.0 / 10.0;
    CHECK(rep.c0_hat == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("failed units impute zero and mark the report partial") {
    // second stratum has c11 = 0, so its saturated odd/even ratio is undefined
    std::vector<double> xs;
    std::vector<std::string> pats;
    for (int i = 0; i < 4; ++i) { xs.push_back(0.0 + 0.01 * i); pats.push_back("11"); }
    xs.push_back(0.05); pats.push_back("10");
    xs.push_back(0.06); pats.push_back("01");
    xs.push_back(100.0); pats.push_back("10");
    xs.push_back(100.1); pats.push_back("01");
    const Dataset d = make_units(xs, pats, 2);

    PipelineConfig cfg;
    cfg.model = "saturated";
    cfg.bandwidth.method = BandwidthMethod::fixed;
    cfg.bandwidth.kernel = KernelFamily::boxcar;
    cfg.bandwidth.values = {1.0};
    const EstimateReport rep = smooth_poststrat_estimate(d, cfg);
    CHECK(rep.partial);
    CHECK_FALSE(rep.warnings.empty());
    std::size_t failed = 0;
    for (const PerUnitResult& u : rep.per_unit)
        if (u.status == FitStatus::failed) {
            ++failed;
            CHECK(u.pi0 == 0.0);
            CHECK(u.psi == 1.0);
        }
    CHECK(failed == 2);
}

TEST_CASE("psi floor clamps runaway imputations with a warning") {
    std::vector<double> xs;
    std::vector<std::string> pats;
    // c11 = 1, c10 = 40, c01 = 40: petersen blows up to 1600 per unit share
    xs.push_back(0.0); pats.push_back("11");
    for (int i = 0; i < 40; ++i) { xs.push_back(0.01 * (i + 1)); pats.push_back("10"); }
    for (int i = 0; i < 40; ++i) { xs.push_back(0.01 * (i + 42)); pats.push_back("01"); }
    const Dataset d = make_units(xs, pats, 2);

    PipelineConfig cfg;
    cfg.model = "saturated";
    cfg.bandwidth.method = BandwidthMethod::fixed;
    cfg.bandwidth.kernel = KernelFamily::boxcar;
    cfg.bandwidth.values = {1e9};
    cfg.psi_floor = 0.05;
    const EstimateReport rep = smooth_poststrat_estimate(d, cfg);
    const double cap = 1.0 / 0.05 - 1.0;
    bool any_clamped = false;
    for (const PerUnitResult& u : rep.per_unit) {
        CHECK(u.pi0 <= cap + 1e-12);
        if (u.clamped) any_clamped = true;
    }
    CHECK(any_clamped);
    CHECK_FALSE(rep.partial);  // clamping is a warning, not a failure
    bool warned = false;
    for (const std::string& w : rep.warnings)
        if (w.find("clamp") != std::string::npos) warned = true;
    CHECK(warned);
}

TEST_CASE("restriction zeroes imputations outside the region") {
    const Dataset d = load_fixture();
    PipelineConfig cfg;
    cfg.model = "independence";
    const EstimateReport full = smooth_poststrat_estimate(d, cfg);

    PipelineConfig rcfg = cfg;
    rcfg.restrict = parse_restriction("x<150");
    const EstimateReport restricted = smooth_poststrat_estimate(d, rcfg);

    double manual = 0.0;
    for (const PerUnitResult& u : full.per_unit)
        if (u.x[0] < 150.0) manual += u.pi0;
    CHECK(restricted.c0_hat == doctest::Approx(manual).epsilon(1e-12));
    for (const PerUnitResult& u : restricted.per_unit)
        if (u.x[0] >= 150.0) {
            CHECK(u.pi0 == 0.0);
            CHECK(u.restricted_out);
        }

    // an always-true restriction changes nothing
    PipelineConfig acfg = cfg;
    acfg.restrict = parse_restriction("x>-1");
    const EstimateReport all_in = smooth_poststrat_estimate(d, acfg);
    CHECK(all_in.c0_hat == doctest::Approx(full.c0_hat).epsilon(1e-12));
}

TEST_CASE("fixture independence estimate matches its frozen value") {
    const Dataset d = load_fixture();
    PipelineConfig cfg;
    cfg.model = "independence";
    const EstimateReport rep = smooth_poststrat_estimate(d, cfg);
    CHECK_FALSE(rep.partial);
    CHECK(rep.n_c == 664);
    CHECK(rep.c0_hat > 1.0);
    CHECK(rep.c0_hat < 40.0);  // single digits to low tens
    CHECK(rep.bandwidth.resolved());

    // imputed mass concentrates at low ranks
    double tail = 0.0;
    for (const PerUnitResult& u : rep.per_unit)
        if (u.x[0] >= 100.0) tail += u.pi0;
    CHECK(tail < 0.1 * rep.c0_hat);
}

TEST_CASE("pipeline output is independent of the thread count") {
    const Dataset d = load_fixture();
    PipelineConfig cfg;
    cfg.model = "select-bic";
    cfg.threads = 1;
    const EstimateReport a = smooth_poststrat_estimate(d, cfg);
    cfg.threads = 4;
    const EstimateReport b = smooth_poststrat_estimate(d, cfg);
    REQUIRE(a.per_unit.size() == b.per_unit.size());
    CHECK(a.c0_hat == b.c0_hat);
    for (std::size_t i = 0; i < a.per_unit.size(); ++i) {
        CHECK(a.per_unit[i].pi0 == b.per_unit[i].pi0);
        CHECK(a.per_unit[i].model == b.per_unit[i].model);
    }
}

TEST_CASE("emit_curves writes stacked monotone frequencies") {
    const Dataset d = make_units({3.0, 1.0, 2.0}, {"10", "01", "11"}, 2);
    PipelineConfig cfg;
    cfg.model = "saturated";
    cfg.bandwidth.method = BandwidthMethod::fixed;
    cfg.bandwidth.values = {1.5};
    const EstimateReport rep = smooth_poststrat_estimate(d, cfg);
    const std::string path = "recap_curves_test.csv";
    emit_curves(rep, d, path);
    std::ifstream f(path);
    REQUIRE(f.good());
    std::string header;
    std::getline(f, header);
    CHECK(header == "id,x,cum_11,cum_10,cum_01,top");
    std::string line;
    double prev_x = -1e300;
    std::size_t rows = 0;
    while (std::getline(f, line)) {
        std::stringstream ss(line);
        std::string field;
        std::getline(ss, field, ',');  // id
        std::vector<double> v;
        while (std::getline(ss, field, ',')) v.push_back(std::stod(field));
        REQUIRE(v.size() == 5);
        CHECK(v[0] >= prev_x);  // sorted by covariate
        prev_x = v[0];
        CHECK(v[1] <= v[2] + 1e-12);  // cumulative stack is monotone
        CHECK(v[2] <= v[3] + 1e-12);
        CHECK(v[3] == doctest::Approx(1.0).epsilon(1e-9));  // full conditional mass
        CHECK(v[4] >= 1.0);  // 1 + pi0 tops the stack
        ++rows;
    }
    CHECK(rows == 3);
    std::remove(path.c_str());
}
