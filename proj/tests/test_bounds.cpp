#include <doctest.h>

#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "helpers.hpp"
#include "quadboost/bounds.hpp"
#include "quadboost/common.hpp"
#include "quadboost/random.hpp"

using namespace quadboost;

namespace {

// {h, -h} with h = +1 on every sample.
VoterPool constant_pool(std::size_t m) {
    Dataset ds;
    ds.name = "constant";
    ds.attribute_count = 1;
    for (std::size_t k = 0; k < m; ++k) ds.samples.push_back({{0.0}, 1});
    return VoterPool({{0, 1.0, 1}, {0, 1.0, -1}}, ds);
}

BoundInputs inputs(double p, std::size_t dim, double norm) {
    BoundInputs in;
    in.p = p;
    in.delta = 0.05;
    in.m = 100;
    in.rademacher = 0.1;
    in.dim_alpha = dim;
    in.norm_alpha = norm;
    return in;
}

}  // namespace

TEST_SUITE("bounds") {
    TEST_CASE("single sample: every draw attains 1") {
        const auto est = rademacher_mc(constant_pool(1), 50, 3);
        CHECK(est.mean == 1.0);
        CHECK(est.standard_error == 0.0);
        CHECK(est.draws == 50);
    }

    TEST_CASE("two samples: the four sign vectors average to 1/2") {
        const auto pool = constant_pool(2);
        double total = 0.0;
        for (int a : {-1, 1}) {
            for (int b : {-1, 1}) {
                const std::vector<int> sigma{a, b};
                const double v = rademacher_sup(pool, sigma);
                CHECK((v == 0.0 || v == 1.0));
                CHECK(rademacher_sup_symmetric(pool, sigma) == v);
                total += v;
            }
        }
        CHECK(total / 4.0 == 0.5);
        const auto est = rademacher_mc(pool, 4000, 1);
        CHECK(std::abs(est.mean - 0.5) <= 4 * est.standard_error);
    }

    TEST_CASE("standard error shrinks like 1/sqrt(draws)") {
        const auto pool = generate_pool(testing::synthetic(100, 3));
        const auto a = rademacher_mc(pool, 400, 9);
        const auto b = rademacher_mc(pool, 800, 9);
        const double ratio = b.standard_error / a.standard_error;
        CHECK(ratio > 0.6);
        CHECK(ratio < 0.85);
    }

    TEST_CASE("estimate does not depend on the thread count") {
        const auto pool = generate_pool(testing::synthetic(100, 3));
        const auto one = rademacher_mc(pool, 300, 4, 1);
        const auto four = rademacher_mc(pool, 300, 4, 4);
        CHECK(one.mean == four.mean);
        CHECK(one.standard_error == four.standard_error);
    }

    TEST_CASE("stump pool complexity lies in (0, 1] and falls with m") {
        const auto small = rademacher_mc(generate_pool(testing::synthetic(50, 5, 1)), 500, 2);
        const auto large = rademacher_mc(generate_pool(testing::synthetic(400, 5, 1)), 500, 2);
        CHECK(small.mean > 0.0);
        CHECK(small.mean <= 1.0);
        CHECK(large.mean > 0.0);
        CHECK(small.mean - large.mean > 3 * std::hypot(small.standard_error, large.standard_error));
    }

    TEST_CASE("dual exponent and Holder supremum") {
        CHECK(std::isinf(dual_exponent(1.0)));
        CHECK(dual_exponent(2.0) == 2.0);
        CHECK(dual_exponent(kInfinity) == 1.0);
        CHECK(dual_exponent(4.0) == doctest::Approx(4.0 / 3.0));
        CHECK_THROWS_AS(dual_exponent(0.5), Error);
        const std::vector<double> v{3.0, -4.0};
        CHECK(holder_sup(v, 2.0) == doctest::Approx(5.0));
        CHECK(holder_sup(v, 1.0) == 4.0);
        CHECK(holder_sup(v, kInfinity) == 7.0);
    }

    TEST_CASE("composite class identity on sign draws") {
        const auto ds = testing::synthetic(100, 3);
        const auto pool = generate_pool(ds);
        for (std::size_t d = 0; d < 20; ++d) {
            const auto sigma = rademacher_signs(ds.size(), 5, d);
            const auto at1 = lemma1_check(pool, 1.0, 7, sigma);
            CHECK(at1.lhs == at1.sup);
            CHECK(at1.rhs == at1.sup);
            const auto at2 = lemma1_check(pool, 2.0, 4, sigma);
            CHECK(at2.rhs == doctest::Approx(2.0 * at2.sup));
            for (double p : {1.0, 1.5, 2.0, 4.0}) {
                for (std::size_t n : {1U, 2U, 5U, 16U}) {
                    const auto c = lemma1_check(pool, p, n, sigma);
                    CHECK(std::abs(c.lhs - c.rhs) <= 1e-12);
                }
            }
        }
        CHECK_THROWS_AS(lemma1_check(pool, 0.9, 2, rademacher_signs(ds.size(), 5, 0)), Error);
    }

    TEST_CASE("random unit vectors never beat the Holder supremum") {
        const auto ds = testing::synthetic(100, 3);
        const auto pool = generate_pool(ds);
        const auto c = lemma1_check(pool, 2.0, 4, rademacher_signs(ds.size(), 1, 0));
        Rng rng(8);
        double best = -1.0;
        for (int t = 0; t < 100000; ++t) {
            double a[4];
            double norm = 0.0;
            for (double& x : a) {
                x = rng.normal();
                norm += x * x;
            }
            norm = std::sqrt(norm);
            double dot = 0.0;
            for (double x : a) dot += x / norm * c.sup;
            best = std::max(best, dot);
        }
        CHECK(best <= c.lhs + 1e-12);
        CHECK(best >= 0.99 * c.lhs);
    }

    TEST_CASE("bound terms by hand at p = 1") {
        auto in = inputs(1.0, 1, 1.0);
        in.empirical_risk = 0.2;
        const auto t = bound_value(in);
        CHECK(t.complexity == doctest::Approx(0.8));
        CHECK(t.confidence == doctest::Approx(0.15620062319249284));
        CHECK(t.norm_union == 0.0);
        CHECK(t.total == doctest::Approx(0.2 + 0.8 + 0.15620062319249284));
        in.empirical_rademacher = true;
        CHECK(bound_value(in).confidence == doctest::Approx(0.16692624295934674));
    }

    TEST_CASE("bound terms by hand at p = 2") {
        auto in = inputs(2.0, 9, 4.0);
        const auto t = bound_value(in);
        CHECK(t.complexity == doctest::Approx(9.6));
        CHECK(t.confidence == doctest::Approx(0.20122875989794337));
        CHECK(t.norm_union == doctest::Approx(0.1048147073968205));
        in.empirical_rademacher = true;
        CHECK(bound_value(in).norm_union == doctest::Approx(3 * 0.1048147073968205));
    }

    TEST_CASE("complexity is flat in dim at p = 1 and grows for p > 1") {
        for (std::size_t dim = 2; dim <= 40; ++dim) {
            CHECK(bound_value(inputs(1.0, dim, 3.0)).complexity == bound_value(inputs(1.0, 1, 3.0)).complexity);
            for (double p : {1.5, 2.0, kInfinity}) {
                CHECK(bound_value(inputs(p, dim, 3.0)).complexity > bound_value(inputs(p, dim - 1, 3.0)).complexity);
            }
            CHECK(bound_value(inputs(kInfinity, dim, 3.0)).complexity ==
                  doctest::Approx(static_cast<double>(dim) * bound_value(inputs(kInfinity, 1, 3.0)).complexity));
        }
    }

    TEST_CASE("total never falls below the empirical risk for norms of at least 1") {
        for (double norm : {1.0, 1.5, 10.0}) {
            auto in = inputs(2.0, 5, norm);
            in.empirical_risk = 0.3;
            CHECK(bound_value(in).total >= 0.3);
        }
    }

    TEST_CASE("bound rejects inputs outside its domain") {
        CHECK_THROWS_WITH_AS(bound_value(inputs(1.0, 1, 0.5)), doctest::Contains("1/2"), Error);
        CHECK_THROWS_AS(bound_value(inputs(0.5, 1, 2.0)), Error);
        auto in = inputs(1.0, 1, 2.0);
        in.delta = 0.0;
        CHECK_THROWS_AS(bound_value(in), Error);
        in = inputs(1.0, 1, 2.0);
        in.m = 0;
        CHECK_THROWS_AS(bound_value(in), Error);
        CHECK(bound_value(inputs(1.0, 1, 0.75)).norm_union == 0.0);
    }

    TEST_CASE("theoretical regularization strengths") {
        CHECK(theoretical_lambda(Variant::l1, 0.05, 3) == doctest::Approx(0.2));
        CHECK(theoretical_lambda(Variant::l2, 0.05, 16) == doctest::Approx(1.6));
        CHECK(theoretical_lambda(Variant::linf, 0.05, 10) == doctest::Approx(4.0));
        CHECK(theoretical_lambda(Variant::vanilla, 0.05, 10) == 0.0);
    }

    TEST_CASE("bound report JSON names every term") {
        const auto j = to_json(bound_value(inputs(2.0, 4, 2.0)));
        for (const char* key : {"empirical_risk", "complexity", "confidence", "norm_union", "total"}) {
            CHECK(j.contains(key));
        }
        CHECK(to_json(inputs(kInfinity, 4, 2.0))["p"] == "inf");
    }
}
