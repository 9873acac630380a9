#include <doctest.h>

#include <nlohmann/json.hpp>

#include "helpers.hpp"
#include "quadboost/common.hpp"
#include "quadboost/stumps.hpp"

using namespace quadboost;

TEST_SUITE("stumps") {
    TEST_CASE("stump votes its polarity at or below the threshold") {
        const Stump s{0, 0.5, 1};
        const std::vector<double> low{0.2};
        const std::vector<double> high{0.7};
        const std::vector<double> at{0.5};
        CHECK(stump_eval(s, low) == 1);
        CHECK(stump_eval(s, high) == -1);
        CHECK(stump_eval(s, at) == 1);
        CHECK(stump_eval(s.complement(), low) == -1);
        CHECK_THROWS_AS(stump_eval(Stump{3, 0.0, 1}, low), Error);
    }

    TEST_CASE("ten stumps per attribute and their complements") {
        const auto ds = testing::synthetic(50, 3);
        const auto pool = generate_pool(ds);
        CHECK(pool.size() == 60);
        for (std::size_t j = 0; j < pool.size(); j += 2) {
            CHECK(pool.stump(j + 1) == pool.stump(j).complement());
        }
    }

    TEST_CASE("thresholds sit at the training quantiles i/(k+1)") {
        const auto ds = testing::rows({{-0.9, 1}, {0.9, -1}});
        const auto pool = generate_pool(ds, 1);
        REQUIRE(pool.size() == 2);
        CHECK(pool.stump(0).threshold == doctest::Approx(0.0));
        CHECK(quantile({4.0, 1.0, 3.0, 2.0}, 1.0 / 3.0) == doctest::Approx(2.0));
        CHECK(quantile({1.0, 2.0}, 0.25) == doctest::Approx(1.25));
        CHECK(quantile({5.0}, 0.7) == 5.0);
    }

    TEST_CASE("complement columns are exact negations on any dataset") {
        const auto train = testing::synthetic(80, 4, 1);
        const auto other = testing::synthetic(30, 4, 2);
        const auto pool = generate_pool(train);
        for (const auto* ds : {&train, &other}) {
            const auto h = eval_pool(pool, *ds);
            for (Eigen::Index j = 0; j < h.cols(); j += 2) CHECK(h.col(j) == -h.col(j + 1));
        }
    }

    TEST_CASE("re-evaluating the generating set reproduces the stored matrix") {
        const auto ds = testing::synthetic(60, 2);
        const auto pool = generate_pool(ds);
        CHECK(eval_pool(pool, ds) == pool.eval_matrix());
        CHECK((pool.eval_matrix().array().abs() == 1.0).all());
    }

    TEST_CASE("single sample and single stump give a 1x1 matrix") {
        const auto ds = testing::rows({{0.3, 1}});
        const std::vector<Stump> one{{0, 0.5, -1}};
        const auto h = eval_pool(one, ds);
        CHECK(h.rows() == 1);
        CHECK(h.cols() == 1);
        CHECK(h(0, 0) == -1.0);
    }

    TEST_CASE("eta is exactly one for every stump") {
        const auto pool = generate_pool(testing::synthetic(37, 3));
        for (Eigen::Index j = 0; j < pool.etas().size(); ++j) CHECK(pool.etas()[j] == 1.0);
    }

    TEST_CASE("pool generation is deterministic") {
        const auto ds = testing::synthetic(70, 3);
        CHECK(generate_pool(ds).stumps() == generate_pool(ds).stumps());
    }

    TEST_CASE("pool rejects mismatched attributes and unpaired stumps") {
        const auto ds = testing::synthetic(20, 2);
        const auto pool = generate_pool(ds);
        CHECK_THROWS_AS(eval_pool(pool, testing::synthetic(20, 3)), Error);
        CHECK_THROWS_AS(VoterPool({{0, 0.0, 1}}, ds), Error);
        CHECK_THROWS_AS(VoterPool({{0, 0.0, 1}, {0, 0.1, -1}}, ds), Error);
        CHECK_THROWS_AS(generate_pool(ds, 0), Error);
    }

    TEST_CASE("pool survives a JSON round trip") {
        const auto ds = testing::synthetic(30, 2);
        const auto pool = generate_pool(ds, 3);
        const auto back = stumps_from_json(nlohmann::json::parse(pool_to_json(pool).dump()));
        CHECK(back == pool.stumps());
        CHECK_THROWS_AS(stump_from_json(nlohmann::json{{"attribute", 0}, {"threshold", 0.0}, {"polarity", 2}}),
                        Error);
    }
}
