#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "quadboost/bounds.hpp"
#include "quadboost/engine.hpp"

namespace quadboost {

/// The closed-form weight rules under test. Defaults to the library's rules;
/// replacing one lets a mutation test confirm the suite notices.
struct WeightRules {
    std::function<double(double, double)> vanilla = weight_vanilla;
    std::function<double(double, double, double)> l1 = weight_l1;
    std::function<double(double, double, double)> l2 = weight_l2;
    std::function<double(double, double, double)> linf = weight_linf;
};

struct CheckResult {
    std::string name;
    bool passed = false;
    /// Distance from the failure threshold: slack for inequalities, tolerance
    /// minus worst deviation for equalities. Negative when the check failed.
    double margin = 0.0;
    std::string detail;  // observed vs expected on failure, summary otherwise
};

struct VerifyOptions {
    std::uint64_t seed = 7;
    std::size_t samples = 200;
    std::size_t attributes = 5;
    double noise = 0.5;
    WeightRules rules;
};

/// Property suite on built-in synthetic data: weight-rule optimality and
/// reductions, per-round risk decrease, residual identity, convergence
/// bounds, L1 monotonicity, AdaBoost bound, composite-class identity and
/// bound-term shape.
std::vector<CheckResult> run_checks(const VerifyOptions& options = {});

/// Composite-class identity on `draws` sign vectors over the stump pool of the built-in
/// synthetic training data.
std::vector<Lemma1Check> lemma1_draws(double p, std::size_t n, std::size_t draws,
                                      const VerifyOptions& options = {});

}  // namespace quadboost
