#include "quadboost/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <iomanip>
#include <map>
#include <sstream>

#include "quadboost/adaboost.hpp"
#include "quadboost/experiment.hpp"
#include "quadboost/random.hpp"
#include "quadboost/stumps.hpp"
#include "quadboost/synthetic.hpp"

namespace quadboost {

namespace {

struct Fixture {
    Dataset train;
    VoterPool pool;
};

Fixture make_fixture(const VerifyOptions& o) {
    const auto raw = make_noisy_linear(o.samples, o.attributes, o.noise, o.seed);
    auto train = apply_normalizer(fit_normalizer(raw), raw);
    auto pool = generate_pool(train);
    return {std::move(train), std::move(pool)};
}

std::string fmt(double v) {
    std::ostringstream s;
    s << std::setprecision(6) << v;
    return s.str();
}

// Equality check: passes when the worst deviation is within tolerance.
CheckResult equality(std::string name, double worst, double tolerance, const std::string& what) {
    CheckResult r{std::move(name), worst <= tolerance, tolerance - worst, {}};
    r.detail = what + ": worst deviation " + fmt(worst) + " (tolerance " + fmt(tolerance) + ")";
    return r;
}

// Inequality check: passes when the smallest slack is non-negative.
CheckResult inequality(std::string name, double slack, const std::string& what) {
    CheckResult r{std::move(name), slack >= 0.0, slack, {}};
    r.detail = what + ": smallest slack " + fmt(slack);
    return r;
}

constexpr std::size_t kGridPoints = 100000;
constexpr double kGridLo = -10.0;
constexpr double kGridHi = 10.0;

template <class Objective>
double grid_argmin(Objective&& f) {
    const double step = (kGridHi - kGridLo) / static_cast<double>(kGridPoints - 1);
    double best_a = kGridLo;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < kGridPoints; ++i) {
        const double a = kGridLo + step * static_cast<double>(i);
        const double v = f(a);
        if (v < best) {
            best = v;
            best_a = a;
        }
    }
    return best_a;
}

CheckResult check_grid_optimality(const WeightRules& rules, std::uint64_t seed) {
    const double resolution = (kGridHi - kGridLo) / static_cast<double>(kGridPoints - 1);
    Rng rng(seed, streams::synthetic + 1);
    double worst = 0.0;
    std::string where = "all rules";
    for (int t = 0; t < 100; ++t) {
        const double g = 2.0 * rng.uniform01() - 1.0;
        const double eta = 0.5 + 1.5 * rng.uniform01();
        const double lambda = rng.uniform01();
        const double amax = 0.01 + rng.uniform01();
        const auto note = [&](double rule, double oracle, const char* name) {
            const double d = std::abs(rule - oracle);
            if (d > worst) {
                worst = d;
                where = std::string(name) + " at g=" + fmt(g) + " eta=" + fmt(eta) + ": rule " +
                        fmt(rule) + " vs grid " + fmt(oracle);
            }
        };
        note(rules.vanilla(g, eta), grid_argmin([&](double a) { return -2 * a * g + a * a * eta; }),
             "vanilla");
        note(rules.l1(g, eta, lambda),
             grid_argmin([&](double a) { return -2 * a * g + a * a * eta + 2 * lambda * std::abs(a); }),
             "l1");
        note(rules.l2(g, eta, lambda),
             grid_argmin([&](double a) { return -2 * a * g + a * a * (eta + lambda); }), "l2");
        note(rules.linf(g, eta, amax), grid_argmin([&](double a) {
                 return std::abs(a) > amax ? std::numeric_limits<double>::infinity()
                                           : -2 * a * g + a * a * eta;
             }),
             "linf");
    }
    return equality("weight rules minimize their scalar objectives", worst, 2.0 * resolution, where);
}

CheckResult check_reductions(const WeightRules& rules, std::uint64_t seed) {
    Rng rng(seed, streams::synthetic + 2);
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const double g = 2.0 * rng.uniform01() - 1.0;
        const double eta = 0.5 + 1.5 * rng.uniform01();
        const double v = rules.vanilla(g, eta);
        worst = std::max({worst, std::abs(rules.l1(g, eta, 0.0) - v), std::abs(rules.l2(g, eta, 0.0) - v),
                          std::abs(rules.linf(g, eta, 1e9) - v)});
    }
    return equality("zero penalty reduces every rule to vanilla", worst, 0.0, "l1/l2 at 0, linf at 1e9");
}

// Rounds driven by the rule under test so that a corrupted rule surfaces here.
CheckResult check_exact_decrease(const WeightRules& rules, const Fixture& fx) {
    Ensemble ens(fx.train.labels());
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const auto g = edges(fx.pool, ens.residuals());
        const auto sel = select_voter(g);
        if (std::abs(sel.edge) <= 1e-12) break;
        const double eta = voter_eta(fx.pool, sel.index);
        const double current = ens.weight_of(sel.index);
        const double before = ens.quadratic_risk();
        ens.set_weight(sel.index, current + rules.vanilla(sel.edge, eta), fx.pool.eval_matrix());
        const double after = ens.quadratic_risk();
        worst = std::max(worst, std::abs((before - after) - sel.edge * sel.edge / eta));
    }
    return equality("vanilla round lowers the risk by g^2/eta", worst, 1e-10, "100 rounds");
}

CheckResult check_residual_identity(const Fixture& fx) {
    double worst = 0.0;
    for (auto variant : {Variant::vanilla, Variant::l1, Variant::l2, Variant::linf}) {
        BoostConfig c;
        c.variant = variant;
        c.lambda = variant == Variant::l2 ? 1.0 : 0.01;
        c.alpha_max = 0.05;
        c.max_rounds = 150;
        c.reweight_every = 7;
        const auto res = train(fx.train, fx.pool, c);
        const auto r = res.ensemble.recompute_residuals(fx.pool.eval_matrix());
        worst = std::max(worst, (r - res.ensemble.residuals()).cwiseAbs().maxCoeff());
    }
    return equality("cached residuals match recomputation", worst, 1e-9, "all variants with reweighting");
}

CheckResult check_decomposition(const Fixture& fx) {
    BoostConfig c;
    c.max_rounds = 100;
    const auto res = train(fx.train, fx.pool, c);
    std::map<std::size_t, double> weight;
    double expansion = 1.0;
    for (const auto& s : res.history) {
        const double delta = s.weight - weight[s.voter];
        weight[s.voter] = s.weight;
        expansion -= 2.0 * delta * s.edge - delta * delta * s.eta;
    }
    return equality("risk expansion matches the direct risk",
                    std::abs(expansion - res.ensemble.quadratic_risk()), 1e-9, "100 vanilla rounds");
}

CheckResult check_convergence(const Fixture& fx) {
    double slack = std::numeric_limits<double>::infinity();
    for (std::size_t T : {10U, 50U}) {
        BoostConfig c;
        c.max_rounds = T;
        const auto res = train(fx.train, fx.pool, c);
        double gamma = std::numeric_limits<double>::infinity();
        for (const auto& s : res.history) gamma = std::min(gamma, std::abs(s.edge));
        const double t = static_cast<double>(res.history.size());
        slack = std::min(slack, 1.0 - t * gamma * gamma + 1e-9 - res.ensemble.quadratic_risk());
    }
    return inequality("quadratic risk within 1 - T gamma^2", slack, "T in {10, 50}");
}

CheckResult check_surrogate(const Fixture& fx) {
    double slack = std::numeric_limits<double>::infinity();
    for (auto variant : {Variant::vanilla, Variant::l1, Variant::l2, Variant::linf}) {
        BoostConfig c;
        c.variant = variant;
        c.lambda = 0.01;
        c.alpha_max = 0.1;
        c.max_rounds = 100;
        const auto res = train(fx.train, fx.pool, c);
        for (const auto& s : res.history) slack = std::min(slack, s.quadratic_risk + 1e-12 - s.zero_one_error);
    }
    return inequality("training error within quadratic risk", slack, "every round, all variants");
}

CheckResult check_monotone(const Fixture& fx) {
    double slack = std::numeric_limits<double>::infinity();
    for (auto variant : {Variant::vanilla, Variant::l1, Variant::l2}) {
        BoostConfig c;
        c.variant = variant;
        c.lambda = 0.02;
        c.max_rounds = 200;
        c.reweight_every = 3;
        double previous = 1.0;
        train(fx.train, fx.pool, c, [&](const Ensemble& e, const RoundStats&) {
            const double now = penalized_objective(e, c);
            slack = std::min(slack, previous + 1e-12 - now);
            previous = now;
        });
    }
    return inequality("penalized objective never increases", slack, "vanilla, l1, l2 with reweighting");
}

CheckResult check_l1_sparsity(const Fixture& fx) {
    BoostConfig c;
    c.variant = Variant::l1;
    c.max_rounds = 10000;
    const auto g0 = edges(fx.pool, Ensemble(fx.train.labels()).residuals());
    c.lambda = g0.cwiseAbs().maxCoeff() * 1.01;
    const auto empty = train(fx.train, fx.pool, c);
    if (!empty.ensemble.empty() || !empty.history.empty()) {
        return {"l1 stops and thins out as lambda grows", false, -1.0,
                "lambda above max |mu| still produced " + std::to_string(empty.history.size()) +
                    " rounds"};
    }
    GridAxis axis{"lambda", 1e-4, 1.0, 10};
    std::size_t previous = std::numeric_limits<std::size_t>::max();
    double slack = std::numeric_limits<double>::infinity();
    for (double lambda : axis.values()) {
        c.lambda = lambda;
        const auto dim = train(fx.train, fx.pool, c).ensemble.dimension();
        slack = std::min(slack, static_cast<double>(previous) - static_cast<double>(dim));
        previous = dim;
    }
    return inequality("l1 stops and thins out as lambda grows", slack,
                      "round 0 stop above max |mu|; voter count over the lambda grid");
}

CheckResult check_adaboost(const Fixture& fx) {
    const auto res = adaboost_train(fx.train, fx.pool, 200);
    double sum = 0.0;
    double slack = std::numeric_limits<double>::infinity();
    for (const auto& r : res.history) {
        sum += r.edge * r.edge;
        slack = std::min(slack, std::exp(-2.0 * sum) + 1e-9 - r.training_error);
    }
    return inequality("adaboost training error within exp(-2 sum gamma^2)", slack, "200 rounds");
}

CheckResult check_lemma1(const VerifyOptions& o) {
    double worst = 0.0;
    for (double p : {1.0, 1.5, 2.0, 4.0}) {
        for (std::size_t n : {1U, 2U, 5U, 16U}) {
            for (const auto& d : lemma1_draws(p, n, 100, o)) worst = std::max(worst, std::abs(d.lhs - d.rhs));
        }
    }
    return equality("composite class complexity scales as n^(1-1/p)", worst, 1e-12,
                    "p in {1, 1.5, 2, 4}, n in {1, 2, 5, 16}, 100 draws");
}

CheckResult check_bound_shape() {
    const auto complexity = [](double p, std::size_t dim) {
        BoundInputs in;
        in.p = p;
        in.m = 100;
        in.rademacher = 0.1;
        in.dim_alpha = dim;
        in.norm_alpha = 2.0;
        return bound_value(in).complexity;
    };
    double flat = 0.0;
    double rise = std::numeric_limits<double>::infinity();
    for (std::size_t dim = 2; dim <= 64; ++dim) {
        flat = std::max(flat, std::abs(complexity(1.0, dim) - complexity(1.0, 1)));
        for (double p : {2.0, kInfinity}) rise = std::min(rise, complexity(p, dim) - complexity(p, dim - 1));
    }
    CheckResult r{"complexity term flat in dim at p=1, increasing otherwise", flat == 0.0 && rise > 0.0,
                  flat == 0.0 ? rise : -flat, {}};
    r.detail = "dim 1..64: change at p=1 " + fmt(flat) + ", smallest step at p in {2, inf} " + fmt(rise);
    return r;
}

CheckResult check_rademacher(const Fixture& fx, std::uint64_t seed) {
    const auto est = rademacher_mc(fx.pool, 200, seed);
    return inequality("rademacher estimate lies in (0, 1]", std::min(est.mean, 1.0 - est.mean),
                      "mean " + fmt(est.mean) + " over 200 draws");
}

}  // namespace

std::vector<Lemma1Check> lemma1_draws(double p, std::size_t n, std::size_t draws,
                                      const VerifyOptions& options) {
    const auto fx = make_fixture(options);
    std::vector<Lemma1Check> out;
    out.reserve(draws);
    for (std::size_t d = 0; d < draws; ++d) {
        out.push_back(lemma1_check(fx.pool, p, n, rademacher_signs(fx.train.size(), options.seed, d)));
    }
    return out;
}

std::vector<CheckResult> run_checks(const VerifyOptions& options) {
    const auto fx = make_fixture(options);
    std::vector<CheckResult> out;
    const auto guarded = [&](const std::string& name, auto&& fn) {
        try {
            out.push_back(fn());
        } catch (const std::exception& e) {
            out.push_back({name, false, -1.0, std::string("threw: ") + e.what()});
        }
    };
    guarded("weight rules minimize their scalar objectives",
            [&] { return check_grid_optimality(options.rules, options.seed); });
    guarded("zero penalty reduces every rule to vanilla",
            [&] { return check_reductions(options.rules, options.seed); });
    guarded("vanilla round lowers the risk by g^2/eta", [&] { return check_exact_decrease(options.rules, fx); });
    guarded("cached residuals match recomputation", [&] { return check_residual_identity(fx); });
    guarded("risk expansion matches the direct risk", [&] { return check_decomposition(fx); });
    guarded("quadratic risk within 1 - T gamma^2", [&] { return check_convergence(fx); });
    guarded("training error within quadratic risk", [&] { return check_surrogate(fx); });
    guarded("penalized objective never increases", [&] { return check_monotone(fx); });
    guarded("l1 stops and thins out as lambda grows", [&] { return check_l1_sparsity(fx); });
    guarded("adaboost training error within exp(-2 sum gamma^2)", [&] { return check_adaboost(fx); });
    guarded("composite class complexity scales as n^(1-1/p)", [&] { return check_lemma1(options); });
    guarded("complexity term flat in dim at p=1, increasing otherwise", [&] { return check_bound_shape(); });
    guarded("rademacher estimate lies in (0, 1]", [&] { return check_rademacher(fx, options.seed); });
    return out;
}

}  // namespace quadboost
