#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "quadboost/engine.hpp"
#include "quadboost/stumps.hpp"

namespace quadboost {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Monte-Carlo estimate of the empirical Rademacher complexity of a pool.
struct RademacherEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
    std::size_t draws = 0;
    std::uint64_t seed = 0;
};

/// Sign vector of draw `draw`; a pure function of (seed, draw) so draws can
/// be evaluated in any order or in parallel.
std::vector<int> rademacher_signs(std::size_t m, std::uint64_t seed, std::size_t draw);

/// sup_h (1/m) sum_k sigma_k h(x_k) over the pool, on the pool's samples.
double rademacher_sup(const VoterPool& pool, std::span<const int> sigma);

/// Same supremum through the symmetric shortcut: max over one voter of each
/// complement pair of |(1/m) sum_k sigma_k h(x_k)|.
double rademacher_sup_symmetric(const VoterPool& pool, std::span<const int> sigma);

RademacherEstimate rademacher_mc(const VoterPool& pool, std::size_t draws, std::uint64_t seed,
                                 std::size_t threads = 1);

/// Dual exponent q with 1/p + 1/q = 1 (q = inf for p = 1, q = 1 for p = inf).
double dual_exponent(double p);

/// sup over unit-L_p alpha of sum_i alpha_i v_i, i.e. ||v||_q.
double holder_sup(std::span<const double> v, double p);

struct Lemma1Check {
    double sup = 0.0;  // per-draw sup over the pool
    double lhs = 0.0;  // sup over n voters and unit-L_p weights
    double rhs = 0.0;  // n^(1 - 1/p) * sup
};

/// One sigma draw of the identity R(C_p^n(H)) = n^(1 - 1/p) R(H): the
/// left side goes through the Holder attainment identity with all n
/// per-voter correlations equal to the pool supremum.
Lemma1Check lemma1_check(const VoterPool& pool, double p, std::size_t n,
                         std::span<const int> sigma);

struct BoundInputs {
    double p = 1.0;  // in [1, inf]
    double delta = 0.05;
    std::size_t m = 1;
    double lipschitz = 2.0;  // clipped quadratic loss
    double rademacher = 0.0;
    std::size_t dim_alpha = 1;
    double norm_alpha = 1.0;  // ||alpha||_p
    double empirical_risk = 0.0;
    /// `rademacher` is the empirical R_S(H) rather than R_m(H): delta is
    /// halved and the last term tripled.
    bool empirical_rademacher = false;
};

struct BoundTerms {
    double empirical_risk = 0.0;
    double complexity = 0.0;  // 4 l dim^(1-1/p) ||a||_p R
    double confidence = 0.0;  // sqrt(log(pi^2 (dim+1)^2 / (6 delta)) / (2m))
    double norm_union = 0.0;  // sqrt(log(log2(2 ||a||_p)) / m)
    double total = 0.0;
};

/// Risk bound for a weighted vote. Throws when norm_alpha <= 1/2 (the
/// log-log term is undefined there); for 1/2 < norm_alpha < 1 the log-log is
/// negative and the last term is taken as 0.
BoundTerms bound_value(const BoundInputs& in);

/// Regularization strength the bound prescribes: 4R for l1, 8 sqrt(dim) R for
/// l2, 8 dim R for linf, 0 for vanilla.
double theoretical_lambda(Variant variant, double rademacher, std::size_t dim_alpha);

nlohmann::json to_json(const RademacherEstimate& e);
nlohmann::json to_json(const BoundInputs& in);
nlohmann::json to_json(const BoundTerms& t);

}  // namespace quadboost
