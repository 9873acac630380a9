#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "quadboost/data.hpp"

namespace quadboost {

/// One-level decision tree: polarity when x[attribute] <= threshold,
/// -polarity otherwise.
struct Stump {
    std::size_t attribute = 0;
    double threshold = 0.0;
    int polarity = 1;

    int operator()(std::span<const double> x) const {
        return x[attribute] <= threshold ? polarity : -polarity;
    }
    Stump complement() const { return {attribute, threshold, -polarity}; }
    bool operator==(const Stump&) const = default;
};

/// Checked evaluation: throws when the attribute index is out of range.
int stump_eval(const Stump& s, std::span<const double> x);

/// m x n matrix of voter outputs, entry (k, j) = h_j(x_k). Column-major, so
/// each voter's outputs are contiguous.
using SignMatrix = Eigen::MatrixXd;

/// Finite symmetric voter class. Stumps come in complement pairs at indices
/// (2t, 2t+1). The evaluation matrix is computed on the generating dataset.
class VoterPool {
public:
    VoterPool(std::vector<Stump> stumps, const Dataset& ds);

    const std::vector<Stump>& stumps() const { return stumps_; }
    const Stump& stump(std::size_t j) const { return stumps_[j]; }
    const SignMatrix& eval_matrix() const { return eval_; }
    std::size_t size() const { return stumps_.size(); }
    std::size_t sample_count() const { return static_cast<std::size_t>(eval_.rows()); }
    std::size_t attribute_count() const { return attribute_count_; }
    /// (1/m) sum_k h_j(x_k)^2 per voter.
    const Eigen::VectorXd& etas() const { return etas_; }

    /// Index of the voter computing -h_j.
    static std::size_t complement_index(std::size_t j) { return j ^ 1U; }

private:
    std::vector<Stump> stumps_;
    SignMatrix eval_;
    Eigen::VectorXd etas_;
    std::size_t attribute_count_ = 0;
};

/// `per_attribute` thresholds per attribute at the training quantiles
/// i / (per_attribute + 1), i = 1..per_attribute, each in both polarities.
VoterPool generate_pool(const Dataset& train, std::size_t per_attribute = 10);

SignMatrix eval_pool(std::span<const Stump> stumps, const Dataset& ds);
SignMatrix eval_pool(const VoterPool& pool, const Dataset& ds);

/// Linear-interpolation quantile of an unsorted sample, level in [0, 1].
double quantile(std::vector<double> values, double level);

nlohmann::json to_json(const Stump& s);
Stump stump_from_json(const nlohmann::json& j);
nlohmann::json pool_to_json(const VoterPool& pool);
std::vector<Stump> stumps_from_json(const nlohmann::json& j);

}  // namespace quadboost
