#include "quadboost/adaboost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "quadboost/common.hpp"

namespace quadboost {

AdaResult adaboost_train(const Dataset& train, const VoterPool& pool, std::size_t rounds,
                         const AdaObserver& observer) {
    if (rounds < 1) throw Error("adaboost_train: rounds must be at least 1");
    if (pool.sample_count() != train.size()) {
        throw Error("adaboost_train: pool was evaluated on " + std::to_string(pool.sample_count()) +
                    " samples, training set has " + std::to_string(train.size()));
    }
    const auto labels = train.labels();
    const auto& h = pool.eval_matrix();
    const auto m = static_cast<Eigen::Index>(train.size());

    AdaResult result{Ensemble(labels), {}, Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m)),
                     false};
    const Eigen::VectorXd& y = result.ensemble.labels();
    // Log-domain weights; exponentiated and normalized after every update.
    Eigen::VectorXd log_w = Eigen::VectorXd::Zero(m);
    auto& w = result.example_weights;

    for (std::size_t t = 1; t <= rounds; ++t) {
        // Weights below the normal range contribute nothing measurable to the
        // correlations but make the scan an order of magnitude slower.
        const Eigen::VectorXd wy =
            (w.array() < std::numeric_limits<double>::min()).select(0.0, w.cwiseProduct(y).array()).matrix();
        std::size_t best = 0;
        double best_corr = -std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < h.cols(); ++j) {
            const double corr = h.col(j).dot(wy);
            if (corr > best_corr) {
                best_corr = corr;
                best = static_cast<std::size_t>(j);
            }
        }
        const auto col = h.col(static_cast<Eigen::Index>(best));

        double eps = 0.0;
        for (Eigen::Index k = 0; k < m; ++k) {
            if (col[k] != y[k]) eps += w[k];
        }
        if (eps >= 0.5) {
            result.stopped_early = true;
            break;
        }
        const double alpha = eps == 0.0 ? kAdaBoostAlphaCap : 0.5 * std::log((1.0 - eps) / eps);

        AdaRound round;
        round.round = t;
        round.voter = best;
        round.weighted_error = eps;
        round.edge = 0.5 - eps;
        round.alpha = alpha;

        const Eigen::VectorXd margin = col.cwiseProduct(y);
        round.normalizer = w.cwiseProduct((-alpha * margin).array().exp().matrix()).sum();
        log_w -= alpha * margin;
        log_w.array() -= log_w.maxCoeff();
        w = log_w.array().exp().matrix();
        w /= w.sum();
        round.weight_sum = w.sum();
        round.min_weight = w.minCoeff();

        // Voting alpha for -h is the same as removing alpha from h.
        const auto complement = VoterPool::complement_index(best);
        if (result.ensemble.position_of(complement)) {
            result.ensemble.set_weight(complement, result.ensemble.weight_of(complement) - alpha, h);
        } else {
            result.ensemble.set_weight(best, result.ensemble.weight_of(best) + alpha, h);
        }
        round.training_error = training_error(result.ensemble);
        result.history.push_back(round);
        if (observer) observer(result.ensemble, round);

        if (eps == 0.0) {
            result.stopped_early = t < rounds;
            break;
        }
    }
    return result;
}

double adaboost_bound(double gamma, std::size_t rounds) {
    if (!(gamma > 0.0 && gamma <= 0.5)) throw Error("adaboost_bound: gamma must be in (0, 1/2]");
    if (rounds < 1) throw Error("adaboost_bound: rounds must be at least 1");
    return std::exp(-2.0 * gamma * gamma * static_cast<double>(rounds));
}

double adaboost_rounds_needed(double gamma, double eps) {
    if (!(gamma > 0.0 && gamma <= 0.5)) throw Error("adaboost_rounds_needed: gamma must be in (0, 1/2]");
    if (!(eps > 0.0 && eps < 1.0)) throw Error("adaboost_rounds_needed: eps must be in (0, 1)");
    return std::log(1.0 / eps) / (2.0 * gamma * gamma);
}

double quadboost_bound(double gamma, std::size_t rounds) {
    if (!(gamma > 0.0)) throw Error("quadboost_bound: gamma must be > 0");
    return std::max(0.0, 1.0 - static_cast<double>(rounds) * gamma * gamma);
}

double quadboost_rounds_needed(double gamma, double eps) {
    if (!(gamma > 0.0)) throw Error("quadboost_rounds_needed: gamma must be > 0");
    if (!(eps >= 0.0 && eps < 1.0)) throw Error("quadboost_rounds_needed: eps must be in [0, 1)");
    return (1.0 - eps) / (gamma * gamma);
}

}  // namespace quadboost
