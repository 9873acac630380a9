#include <doctest.h>

#include <cmath>
#include <limits>

#include "helpers.hpp"
#include "quadboost/common.hpp"
#include "quadboost/engine.hpp"
#include "quadboost/random.hpp"

using namespace quadboost;

namespace {

// Mean squared residual of labels minus an explicit weighted vote.
double brute_risk(const Dataset& ds, const VoterPool& pool, const std::vector<double>& weights) {
    const auto& h = pool.eval_matrix();
    double sum = 0.0;
    for (std::size_t k = 0; k < ds.size(); ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < weights.size(); ++j) s += weights[j] * h(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j));
        const double r = ds.samples[k].label - s;
        sum += r * r;
    }
    return sum / static_cast<double>(ds.size());
}

template <class F>
double grid_argmin(F&& f, double lo = -10.0, double hi = 10.0, std::size_t points = 100000) {
    const double step = (hi - lo) / static_cast<double>(points - 1);
    double best_a = lo;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points; ++i) {
        const double a = lo + step * static_cast<double>(i);
        const double v = f(a);
        if (v < best) {
            best = v;
            best_a = a;
        }
    }
    return best_a;
}

// Four samples; voter 0 is constant +1 and voter 2 is (+1, -1, +1, +1).
struct Tiny {
    Dataset ds = testing::rows({{0.0, 0.0, 1}, {0.0, 1.0, 1}, {0.0, 0.0, 1}, {0.0, 0.0, -1}});
    VoterPool pool{{{0, 10.0, 1}, {0, 10.0, -1}, {1, 0.5, 1}, {1, 0.5, -1}}, ds};
};

BoostConfig config(Variant v, double lambda = 0.0, double alpha_max = 1.0, std::size_t rounds = 100) {
    BoostConfig c;
    c.variant = v;
    c.lambda = lambda;
    c.alpha_max = alpha_max;
    c.max_rounds = rounds;
    return c;
}

}  // namespace

TEST_SUITE("engine") {
    TEST_CASE("edges of an empty ensemble are the voter margins") {
        const auto ds = testing::rows({{-0.5, 1}, {0.5, -1}, {-0.2, 1}});
        const VoterPool pool({{0, 0.0, 1}, {0, 0.0, -1}}, ds);
        const Ensemble e(ds.labels());
        const auto g = edges(pool, e.residuals());
        CHECK(g[0] == 1.0);
        CHECK(g[1] == -1.0);
    }

    TEST_CASE("edge is the residual inner product over m") {
        const auto ds = testing::rows({{0.0, 1}, {0.0, -1}});
        const VoterPool pool({{0, 1.0, 1}, {0, 1.0, -1}}, ds);
        Eigen::VectorXd r(2);
        r << 0.5, -0.5;
        CHECK(edges(pool, r)[0] == 0.0);
        CHECK_THROWS_AS(edges(pool, Eigen::VectorXd::Zero(3)), Error);
    }

    TEST_CASE("select_voter takes the largest magnitude, lowest index on ties") {
        Eigen::VectorXd a(3);
        a << 0.1, -0.4, 0.3;
        CHECK(select_voter(a).index == 1);
        CHECK(select_voter(a).edge == -0.4);
        Eigen::VectorXd b(2);
        b << 0.2, -0.2;
        CHECK(select_voter(b).index == 0);
        CHECK(select_voter(Eigen::VectorXd::Zero(3)).index == 0);
        CHECK(select_voter(Eigen::VectorXd::Zero(3)).edge == 0.0);
    }

    TEST_CASE("closed-form weight rules") {
        CHECK(weight_vanilla(0.3, 1.0) == 0.3);
        CHECK(weight_vanilla(0.0, 1.0) == 0.0);
        CHECK(weight_l1(0.5, 1.0, 0.2) == doctest::Approx(0.3));
        CHECK(weight_l1(-0.5, 1.0, 0.2) == doctest::Approx(-0.3));
        CHECK(weight_l1(0.1, 1.0, 0.2) == 0.0);
        CHECK(weight_l2(0.4, 1.0, 0.0) == 0.4);
        CHECK(weight_l2(0.4, 1.0, 1.0) == doctest::Approx(0.2));
        CHECK(weight_linf(0.3, 1.0, 1.0) == 0.3);
        CHECK(weight_linf(0.9, 1.0, 0.5) == 0.5);
        CHECK(weight_linf(-0.9, 1.0, 0.5) == -0.5);
    }

    TEST_CASE("weight rules reject invalid parameters") {
        CHECK_THROWS_AS(weight_vanilla(0.1, 0.0), Error);
        CHECK_THROWS_AS(weight_l1(0.1, -1.0, 0.1), Error);
        CHECK_THROWS_AS(weight_l1(0.1, 1.0, -0.1), Error);
        CHECK_THROWS_AS(weight_l2(0.1, 0.0, 0.1), Error);
        CHECK_THROWS_AS(weight_linf(0.1, 1.0, 0.0), Error);
        BoostConfig bad;
        bad.max_rounds = 0;
        CHECK_THROWS_AS(bad.validate(), Error);
    }

    TEST_CASE("weight rules match a grid search of their scalar objectives") {
        const double resolution = 20.0 / 99999.0;
        CHECK(std::abs(weight_l1(0.5, 1.0, 0.2) -
                       grid_argmin([](double a) { return -2 * a * 0.5 + a * a + 0.4 * std::abs(a); })) <=
              resolution);
        CHECK(std::abs(weight_l2(0.4, 1.0, 3.0) -
                       grid_argmin([](double a) { return -2 * a * 0.4 + a * a * 4.0; })) <= resolution);
        Rng rng(3);
        for (int t = 0; t < 40; ++t) {
            const double g = 2 * rng.uniform01() - 1;
            const double eta = 0.25 + 2 * rng.uniform01();
            const double lambda = rng.uniform01();
            const double amax = 0.01 + rng.uniform01();
            CHECK(std::abs(weight_vanilla(g, eta) -
                           grid_argmin([&](double a) { return -2 * a * g + a * a * eta; })) <= 2 * resolution);
            CHECK(std::abs(weight_l1(g, eta, lambda) - grid_argmin([&](double a) {
                               return -2 * a * g + a * a * eta + 2 * lambda * std::abs(a);
                           })) <= 2 * resolution);
            CHECK(std::abs(weight_l2(g, eta, lambda) - grid_argmin([&](double a) {
                               return -2 * a * g + a * a * (eta + lambda);
                           })) <= 2 * resolution);
            CHECK(std::abs(weight_linf(g, eta, amax) - grid_argmin([&](double a) {
                               return std::abs(a) > amax ? std::numeric_limits<double>::infinity()
                                                         : -2 * a * g + a * a * eta;
                           })) <= 2 * resolution);
        }
    }

    TEST_CASE("zero penalties reduce every rule to vanilla") {
        Rng rng(4);
        for (int t = 0; t < 200; ++t) {
            const double g = 2 * rng.uniform01() - 1;
            const double eta = 0.25 + 2 * rng.uniform01();
            CHECK(weight_l1(g, eta, 0.0) == weight_vanilla(g, eta));
            CHECK(weight_l2(g, eta, 0.0) == weight_vanilla(g, eta));
            CHECK(weight_linf(g, eta, 1e9) == weight_vanilla(g, eta));
        }
    }

    TEST_CASE("adding a voter with edge 0.3 lowers the risk by 0.09") {
        Tiny t;
        Ensemble e(t.ds.labels());
        e.set_weight(0, -0.6, t.pool.eval_matrix());
        const double g = edges(t.pool, e.residuals())[2];
        CHECK(g == doctest::Approx(0.3));
        const double before = brute_risk(t.ds, t.pool, {-0.6, 0, 0, 0});
        const double after = brute_risk(t.ds, t.pool, {-0.6, 0, weight_vanilla(g, 1.0), 0});
        CHECK(before - after == doctest::Approx(0.09).epsilon(1e-12));
        CHECK(before == doctest::Approx(1.96));
        CHECK(after == doctest::Approx(1.87));
    }

    TEST_CASE("one perfect voter is fitted in one shot") {
        const auto ds = testing::rows({{-0.5, 1}, {0.5, -1}, {-0.2, 1}, {0.8, -1}});
        const VoterPool pool({{0, 0.0, 1}, {0, 0.0, -1}}, ds);
        const auto res = train(ds, pool, config(Variant::vanilla, 0, 1, 1));
        REQUIRE(res.history.size() == 1);
        CHECK(res.history[0].weight == 1.0);
        CHECK(res.ensemble.quadratic_risk() == 0.0);
        CHECK(training_error(res.ensemble) == 0.0);
        CHECK((res.ensemble.residuals().array() == 0.0).all());
    }

    TEST_CASE("every vanilla round lowers the risk by exactly g^2/eta") {
        const auto ds = testing::synthetic();
        const auto pool = generate_pool(ds);
        const auto res = train(ds, pool, config(Variant::vanilla, 0, 1, 200));
        CHECK(res.history.size() == 200);
        for (const auto& s : res.history) {
            CHECK(std::abs(s.risk_before - s.quadratic_risk - s.edge * s.edge / s.eta) <= 1e-10);
        }
    }

    TEST_CASE("L1 with lambda above every margin stops before the first round") {
        const auto ds = testing::synthetic();
        const auto pool = generate_pool(ds);
        const Ensemble empty(ds.labels());
        const double top = edges(pool, empty.residuals()).cwiseAbs().maxCoeff();
        Ensemble e(ds.labels());
        const auto out = boost_round(e, pool, config(Variant::l1, top));
        CHECK(out.stopped);
        CHECK(e.empty());
        const auto res = train(ds, pool, config(Variant::l1, top * 1.0001));
        CHECK(res.history.empty());
        CHECK(res.stopped_early);
    }

    TEST_CASE("reweighting a single optimal voter leaves it alone") {
        const auto ds = testing::synthetic(100, 3);
        const auto pool = generate_pool(ds);
        auto res = train(ds, pool, config(Variant::vanilla, 0, 1, 1));
        const double w = res.ensemble.entries()[0].weight;
        reweight_pass(res.ensemble, pool, config(Variant::vanilla));
        CHECK(res.ensemble.entries()[0].weight == doctest::Approx(w).epsilon(1e-14));
    }

    TEST_CASE("reweighting two identical voters reaches the joint minimum") {
        const auto ds = testing::rows({{-0.5, 1}, {0.5, -1}, {-0.2, -1}, {0.8, -1}, {-0.9, 1}});
        const VoterPool pool({{0, 0.0, 1}, {0, 0.0, -1}, {0, 0.0, 1}, {0, 0.0, -1}}, ds);
        const auto objective = [&](double a, double b, const BoostConfig& c) {
            double pen = 0.0;
            if (c.variant == Variant::l2) pen = c.lambda * (a * a + b * b);
            return brute_risk(ds, pool, {a, 0, b, 0}) + pen;
        };
        for (const auto& c : {config(Variant::vanilla), config(Variant::l2, 0.5)}) {
            Ensemble e(ds.labels());
            e.set_weight(0, 0.9, pool.eval_matrix());
            e.set_weight(2, -0.4, pool.eval_matrix());
            for (int pass = 0; pass < 60; ++pass) reweight_pass(e, pool, c);
            double best = std::numeric_limits<double>::infinity();
            for (int i = 0; i <= 400; ++i) {
                for (int j = 0; j <= 400; ++j) {
                    best = std::min(best, objective(-2.0 + 0.01 * i, -2.0 + 0.01 * j, c));
                }
            }
            const double got = objective(e.weight_of(0), e.weight_of(2), c);
            CHECK(got <= best + 1e-12);
            CHECK(got >= best - 1e-3);
            CHECK(penalized_objective(e, c) == doctest::Approx(got).epsilon(1e-12));
        }
    }

    TEST_CASE("L1 pass with a large lambda drops voters without raising the objective") {
        const auto ds = testing::synthetic();
        const auto pool = generate_pool(ds);
        auto res = train(ds, pool, config(Variant::l1, 0.001, 1, 60));
        const auto strict = config(Variant::l1, 0.05);
        const double before = penalized_objective(res.ensemble, strict);
        const auto dim = res.ensemble.dimension();
        reweight_pass(res.ensemble, pool, strict);
        CHECK(res.ensemble.dimension() < dim);
        CHECK(penalized_objective(res.ensemble, strict) <= before + 1e-12);
    }

    TEST_CASE("cached residuals match a recomputation after rounds and passes") {
        const auto ds = testing::synthetic();
        const auto pool = generate_pool(ds);
        for (auto v : {Variant::vanilla, Variant::l1, Variant::l2, Variant::linf}) {
            auto c = config(v, 0.01, 0.05, 300);
            c.reweight_every = 4;
            const auto res = train(ds, pool, c);
            const auto fresh = res.ensemble.recompute_residuals(pool.eval_matrix());
            CHECK((fresh - res.ensemble.residuals()).cwiseAbs().maxCoeff() <= 1e-9);
            CHECK(res.ensemble.quadratic_risk() == doctest::Approx(fresh.squaredNorm() / 200.0));
        }
    }

    TEST_CASE("term-by-term risk expansion equals the direct risk") {
        const auto ds = testing::synthetic();
        const auto pool = generate_pool(ds);
        const auto res = train(ds, pool, config(Variant::vanilla, 0, 1, 150));
        std::vector<double> weight(pool.size(), 0.0);
        double expansion = 1.0;
        for (const auto& s : res.history) {
            const double delta = s.weight - weight[s.voter];
            weight[s.voter] = s.weight;
            expansion -= 2.0 * delta * s.edge - delta * delta * s.eta;
        }
        CHECK(std::abs(expansion - res.ensemble.quadratic_risk()) <= 1e-9);
        CHECK(std::abs(brute_risk(ds, pool, weight) - res.ensemble.quadratic_risk()) <= 1e-9);
    }

    TEST_CASE("refit gain is the exact objective decrease") {
        const auto ds = testing::synthetic(120, 4);
        const auto pool = generate_pool(ds);
        for (const auto& c : {config(Variant::vanilla), config(Variant::l1, 0.02), config(Variant::l2, 0.7),
                              config(Variant::linf, 0, 0.05)}) {
            auto res = train(ds, pool, [&] { auto k = c; k.max_rounds = 25; return k; }());
            const auto g = edges(pool, res.ensemble.residuals());
            for (std::size_t j : {res.ensemble.entries()[0].voter, std::size_t{5}}) {
                auto copy = res.ensemble;
                const double before = penalized_objective(copy, c);
                const double current = copy.weight_of(j);
                const double gain = refit_gain(c, g[static_cast<Eigen::Index>(j)], 1.0, current);
                copy.set_weight(j, weight_for(c, g[static_cast<Eigen::Index>(j)] + current, 1.0),
                                pool.eval_matrix());
                CHECK(before - penalized_objective(copy, c) == doctest::Approx(gain).epsilon(1e-9).scale(1.0));
            }
        }
    }

    TEST_CASE("a voter and its complement never both carry weight") {
        const auto ds = testing::synthetic();
        const auto pool = generate_pool(ds);
        for (auto v : {Variant::vanilla, Variant::l1, Variant::l2, Variant::linf}) {
            const auto res = train(ds, pool, config(v, 1e-4, 0.01, 2000));
            for (const auto& e : res.ensemble.entries()) {
                CHECK_FALSE(res.ensemble.position_of(VoterPool::complement_index(e.voter)).has_value());
                CHECK(e.weight != 0.0);
            }
        }
    }

    TEST_CASE("one stump separates the data: error zero after a single round") {
        const auto ds = testing::rows({{0.1, 0.9, 1}, {0.2, -0.3, 1}, {0.8, 0.1, -1}, {0.6, -0.7, -1}});
        const auto pool = generate_pool(ds, 3);
        const auto res = train(ds, pool, config(Variant::vanilla, 0, 1, 1));
        CHECK(training_error(res.ensemble) == 0.0);
        CHECK(zero_one_error(res.ensemble, pool, ds) == 0.0);
    }

    TEST_CASE("quadratic risk after T rounds is at most 1 - T gamma^2") {
        const auto ds = testing::synthetic();
        const auto pool = generate_pool(ds);
        for (std::size_t T : {1U, 10U, 50U, 200U}) {
            const auto res = train(ds, pool, config(Variant::vanilla, 0, 1, T));
            double gamma = 1.0;
            for (const auto& s : res.history) gamma = std::min(gamma, std::abs(s.edge));
            const double bound = 1.0 - static_cast<double>(T) * gamma * gamma;
            CHECK(res.ensemble.quadratic_risk() <= bound + 1e-9);
            CHECK(training_error(res.ensemble) <= bound + 1e-9);
        }
    }

    TEST_CASE("training is deterministic") {
        const auto ds = testing::synthetic();
        const auto pool = generate_pool(ds);
        auto c = config(Variant::l2, 0.3, 1, 300);
        c.reweight_every = 10;
        const auto a = train(ds, pool, c);
        const auto b = train(ds, pool, c);
        REQUIRE(a.history.size() == b.history.size());
        for (std::size_t i = 0; i < a.history.size(); ++i) {
            CHECK(a.history[i].voter == b.history[i].voter);
            CHECK(a.history[i].weight == b.history[i].weight);
        }
        CHECK(a.ensemble.residuals() == b.ensemble.residuals());
    }

    TEST_CASE("zero penalties collapse full L1, L2 and L-infinity runs onto vanilla") {
        const auto ds = testing::synthetic();
        const auto pool = generate_pool(ds);
        const auto base = train(ds, pool, config(Variant::vanilla, 0, 1, 300));
        for (const auto& c : {config(Variant::l1, 0.0, 1, 300), config(Variant::l2, 0.0, 1, 300),
                              config(Variant::linf, 0.0, 1e9, 300)}) {
            const auto res = train(ds, pool, c);
            REQUIRE(res.history.size() == base.history.size());
            for (std::size_t i = 0; i < res.history.size(); ++i) {
                CHECK(res.history[i].voter == base.history[i].voter);
                CHECK(res.history[i].weight == base.history[i].weight);
            }
            CHECK(res.ensemble.residuals() == base.ensemble.residuals());
        }
    }

    TEST_CASE("sign convention and weight symmetry of predictions") {
        const auto ds = testing::rows({{-0.5, 1}, {0.5, -1}});
        const std::vector<Stump> stumps{{0, 0.0, 1}, {0, 0.0, -1}};
        const std::vector<double> cancel{0.5, 0.5};
        const auto s = score(stumps, cancel, ds);
        CHECK(s[0] == 0.0);
        CHECK(vote_sign(s[0]) == -1);
        CHECK(vote_sign(1e-300) == 1);

        const auto big = testing::synthetic(80, 3);
        const auto pool = generate_pool(big);
        auto res = train(big, pool, config(Variant::vanilla, 0, 1, 1));
        CHECK(predict(res.ensemble, pool, big) ==
              std::vector<int>([&] {
                  std::vector<int> v;
                  const auto col = pool.eval_matrix().col(static_cast<Eigen::Index>(res.ensemble.entries()[0].voter));
                  const double w = res.ensemble.entries()[0].weight;
                  for (Eigen::Index k = 0; k < col.size(); ++k) v.push_back(vote_sign(w * col[k]));
                  return v;
              }()));
        auto more = train(big, pool, config(Variant::vanilla, 0, 1, 30)).ensemble;
        const auto before = score(more, pool, big);
        Ensemble flipped(big.labels());
        for (const auto& e : more.entries()) flipped.set_weight(e.voter, -e.weight, pool.eval_matrix());
        const auto p = predict(more, pool, big);
        const auto q = predict(flipped, pool, big);
        for (std::size_t k = 0; k < p.size(); ++k) {
            if (before[static_cast<Eigen::Index>(k)] != 0.0) CHECK(p[k] == -q[k]);
        }
    }

    TEST_CASE("risks of empty, perfect and trained ensembles") {
        const auto ds = testing::synthetic(90, 3);
        const auto pool = generate_pool(ds);
        CHECK(quadratic_risk(Ensemble(ds.labels())) == 1.0);
        for (auto v : {Variant::vanilla, Variant::l1, Variant::l2, Variant::linf}) {
            const auto res = train(ds, pool, config(v, 0.01, 0.1, 100));
            for (const auto& s : res.history) CHECK(s.zero_one_error <= s.quadratic_risk + 1e-12);
            CHECK(zero_one_error(res.ensemble, pool, ds) == training_error(res.ensemble));
        }
    }

    TEST_CASE("vanilla risk and the L1 objective never increase") {
        const auto ds = testing::synthetic();
        const auto pool = generate_pool(ds);
        for (const auto& c0 : {config(Variant::vanilla, 0, 1, 300), config(Variant::l1, 0.01, 1, 300)}) {
            auto c = c0;
            c.reweight_every = 5;
            double previous = 1.0;
            train(ds, pool, c, [&](const Ensemble& e, const RoundStats&) {
                const double now = penalized_objective(e, c);
                CHECK(now <= previous + 1e-12);
                previous = now;
            });
        }
    }
}
