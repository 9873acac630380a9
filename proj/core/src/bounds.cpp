#include "quadboost/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "quadboost/common.hpp"
#include "quadboost/random.hpp"

namespace quadboost {

std::vector<int> rademacher_signs(std::size_t m, std::uint64_t seed, std::size_t draw) {
    Rng rng(seed, streams::rademacher + draw);
    std::vector<int> sigma(m);
    for (auto& s : sigma) s = rng.sign();
    return sigma;
}

namespace {

Eigen::VectorXd correlations(const VoterPool& pool, std::span<const int> sigma) {
    const auto& h = pool.eval_matrix();
    if (sigma.size() != static_cast<std::size_t>(h.rows())) {
        throw Error("rademacher: sign vector length does not match the pool sample count");
    }
    Eigen::VectorXd s(h.rows());
    for (Eigen::Index k = 0; k < h.rows(); ++k) s[k] = sigma[static_cast<std::size_t>(k)];
    return (h.transpose() * s) / static_cast<double>(h.rows());
}

}  // namespace

double rademacher_sup(const VoterPool& pool, std::span<const int> sigma) {
    return correlations(pool, sigma).maxCoeff();
}

double rademacher_sup_symmetric(const VoterPool& pool, std::span<const int> sigma) {
    const auto c = correlations(pool, sigma);
    double best = 0.0;
    for (Eigen::Index j = 0; j < c.size(); j += 2) best = std::max(best, std::abs(c[j]));
    return best;
}

RademacherEstimate rademacher_mc(const VoterPool& pool, std::size_t draws, std::uint64_t seed,
                                 std::size_t threads) {
    if (draws < 1) throw Error("rademacher_mc: need at least one draw");
    std::vector<double> values(draws);
    parallel_for(draws, threads, [&](std::size_t d) {
        values[d] = rademacher_sup(pool, rademacher_signs(pool.sample_count(), seed, d));
    });
    // Summed in draw order so the result does not depend on the thread count.
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(draws);
    double sq = 0.0;
    for (double v : values) sq += (v - mean) * (v - mean);
    const double sd = draws > 1 ? std::sqrt(sq / static_cast<double>(draws - 1)) : 0.0;
    return {mean, sd / std::sqrt(static_cast<double>(draws)), draws, seed};
}

double dual_exponent(double p) {
    if (!(p >= 1.0)) throw Error("dual_exponent: p must be >= 1");
    if (p == 1.0) return kInfinity;
    if (std::isinf(p)) return 1.0;
    return p / (p - 1.0);
}

double holder_sup(std::span<const double> v, double p) {
    const double q = dual_exponent(p);
    if (std::isinf(q)) {
        double best = 0.0;
        for (double x : v) best = std::max(best, std::abs(x));
        return best;
    }
    double sum = 0.0;
    for (double x : v) sum += std::pow(std::abs(x), q);
    return std::pow(sum, 1.0 / q);
}

Lemma1Check lemma1_check(const VoterPool& pool, double p, std::size_t n,
                         std::span<const int> sigma) {
    if (!(p >= 1.0)) throw Error("lemma1_check: p must be >= 1");
    if (n < 1) throw Error("lemma1_check: n must be at least 1");
    Lemma1Check out;
    out.sup = rademacher_sup(pool, sigma);
    // Each of the n voters independently attains the pool supremum.
    const std::vector<double> v(n, out.sup);
    out.lhs = holder_sup(v, p);
    out.rhs = std::pow(static_cast<double>(n), 1.0 - 1.0 / p) * out.sup;
    return out;
}

BoundTerms bound_value(const BoundInputs& in) {
    if (!(in.p >= 1.0)) throw Error("bound_value: p must be >= 1");
    if (!(in.delta > 0.0 && in.delta <= 1.0)) throw Error("bound_value: delta must be in (0, 1]");
    if (in.m < 1) throw Error("bound_value: m must be at least 1");
    if (in.dim_alpha < 1) throw Error("bound_value: dim(alpha) must be at least 1");
    if (!(in.lipschitz > 0.0)) throw Error("bound_value: Lipschitz constant must be > 0");
    if (!(in.rademacher >= 0.0)) throw Error("bound_value: Rademacher complexity must be >= 0");
    if (!(in.norm_alpha > 0.5)) {
        throw Error("bound_value: ||alpha||_p must exceed 1/2, otherwise log(log2(2 ||alpha||_p)) "
                    "is undefined");
    }
    const double m = static_cast<double>(in.m);
    const double dim = static_cast<double>(in.dim_alpha);
    const double delta = in.empirical_rademacher ? in.delta / 2.0 : in.delta;

    BoundTerms t;
    t.empirical_risk = in.empirical_risk;
    t.complexity = 4.0 * in.lipschitz * std::pow(dim, 1.0 - 1.0 / in.p) * in.norm_alpha * in.rademacher;
    t.confidence = std::sqrt(
        std::log(std::numbers::pi * std::numbers::pi * (dim + 1.0) * (dim + 1.0) / (6.0 * delta)) /
        (2.0 * m));
    const double loglog = std::log(std::log2(2.0 * in.norm_alpha));
    t.norm_union = loglog > 0.0 ? std::sqrt(loglog / m) : 0.0;
    if (in.empirical_rademacher) t.norm_union *= 3.0;
    t.total = t.empirical_risk + t.complexity + t.confidence + t.norm_union;
    return t;
}

double theoretical_lambda(Variant variant, double rademacher, std::size_t dim_alpha) {
    if (!(rademacher >= 0.0)) throw Error("theoretical_lambda: Rademacher complexity must be >= 0");
    const double dim = static_cast<double>(dim_alpha);
    switch (variant) {
        case Variant::vanilla: return 0.0;
        case Variant::l1: return 4.0 * rademacher;
        case Variant::l2: return 8.0 * std::sqrt(dim) * rademacher;
        case Variant::linf: return 8.0 * dim * rademacher;
    }
    return 0.0;
}

nlohmann::json to_json(const RademacherEstimate& e) {
    return {{"mean", e.mean}, {"standard_error", e.standard_error}, {"draws", e.draws},
            {"seed", e.seed}};
}

nlohmann::json to_json(const BoundInputs& in) {
    nlohmann::json j{{"delta", in.delta},
                     {"m", in.m},
                     {"lipschitz", in.lipschitz},
                     {"rademacher", in.rademacher},
                     {"dim_alpha", in.dim_alpha},
                     {"norm_alpha", in.norm_alpha},
                     {"empirical_risk", in.empirical_risk},
                     {"empirical_rademacher", in.empirical_rademacher}};
    if (std::isinf(in.p)) {
        j["p"] = "inf";
    } else {
        j["p"] = in.p;
    }
    return j;
}

nlohmann::json to_json(const BoundTerms& t) {
    return {{"empirical_risk", t.empirical_risk},
            {"complexity", t.complexity},
            {"confidence", t.confidence},
            {"norm_union", t.norm_union},
            {"total", t.total}};
}

}  // namespace quadboost
