#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "quadboost/data.hpp"
#include "quadboost/engine.hpp"
#include "quadboost/stumps.hpp"

namespace quadboost {

/// Weight given to a voter with zero weighted error, ln(1e15) / 2.
inline constexpr double kAdaBoostAlphaCap = 17.269388197455342;

struct AdaRound {
    std::size_t round = 0;
    std::size_t voter = 0;
    double weighted_error = 0.5;  // epsilon_t
    double edge = 0.0;            // gamma_t = 1/2 - epsilon_t
    double alpha = 0.0;
    double normalizer = 1.0;      // Z_t = sum_k w_k exp(-alpha y_k h(x_k))
    double training_error = 0.0;  // of the vote after this round
    double weight_sum = 1.0;      // sum of example weights after renormalizing
    double min_weight = 0.0;
};

struct AdaResult {
    /// Same representation as QuadBoost models: one entry per complement pair,
    /// weights summed (a vote for -h is subtracted from h).
    Ensemble ensemble;
    std::vector<AdaRound> history;
    Eigen::VectorXd example_weights;
    bool stopped_early = false;
};

using AdaObserver = std::function<void(const Ensemble&, const AdaRound&)>;

/// Discrete AdaBoost over a finite pool. Each round takes the voter with the
/// smallest weighted error (lowest index on ties); stops once the error
/// reaches 1/2, or right after accepting a voter with zero error (which gets
/// kAdaBoostAlphaCap).
AdaResult adaboost_train(const Dataset& train, const VoterPool& pool, std::size_t rounds,
                         const AdaObserver& observer = {});

/// exp(-2 gamma^2 T), the training-error guarantee after T rounds of edge gamma.
double adaboost_bound(double gamma, std::size_t rounds);

/// Rounds AdaBoost needs to guarantee training error below eps: ln(1/eps) / (2 gamma^2).
double adaboost_rounds_needed(double gamma, double eps);

/// 1 - T gamma^2 clamped at 0: the quadratic-risk guarantee of vanilla QuadBoost.
double quadboost_bound(double gamma, std::size_t rounds);

/// Rounds vanilla QuadBoost needs to bring the quadratic risk to eps: (1 - eps) / gamma^2.
double quadboost_rounds_needed(double gamma, double eps);

}  // namespace quadboost
