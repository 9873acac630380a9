#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "quadboost/data.hpp"
#include "quadboost/stumps.hpp"

namespace quadboost {

enum class Variant { vanilla, l1, l2, linf };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view name);

struct BoostConfig {
    Variant variant = Variant::vanilla;
    double lambda = 0.0;     // l1, l2
    double alpha_max = 1.0;  // linf
    std::size_t max_rounds = 100;
    std::size_t reweight_every = 0;  // 0 = never
    double stop_tolerance = 1e-12;
    std::uint64_t seed = 0;

    void validate() const;
    /// Largest |edge| at which training stops: stop_tolerance, or lambda for l1
    /// when that is larger.
    double stop_threshold() const;
};

struct EnsembleEntry {
    std::size_t voter = 0;
    double weight = 0.0;
};

/// Weighted vote over pool voters together with the training residuals
/// r_k = y_k - sum_j alpha_j h_j(x_k). Each voter appears at most once and
/// never with weight zero.
class Ensemble {
public:
    explicit Ensemble(std::span<const int> labels);

    const std::vector<EnsembleEntry>& entries() const { return entries_; }
    const Eigen::VectorXd& residuals() const { return residuals_; }
    const Eigen::VectorXd& labels() const { return labels_; }
    std::size_t sample_count() const { return static_cast<std::size_t>(labels_.size()); }
    /// dim(alpha): number of voters with a nonzero weight.
    std::size_t dimension() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    std::optional<std::size_t> position_of(std::size_t voter) const;
    double weight_of(std::size_t voter) const;

    /// (1/m) sum_k r_k^2.
    double quadratic_risk() const;
    /// y - r, the weighted vote on the training samples.
    Eigen::VectorXd scores() const { return labels_ - residuals_; }
    /// L_p norm of the weight vector; p may be +infinity.
    double norm(double p) const;

    /// Sets the weight of `voter`, inserting or erasing the entry as needed and
    /// adjusting the residuals by (old - new) * h_voter.
    void set_weight(std::size_t voter, double weight, const SignMatrix& eval);

    /// Recomputes y - H alpha from the entries without touching the cache.
    Eigen::VectorXd recompute_residuals(const SignMatrix& eval) const;

private:
    std::vector<EnsembleEntry> entries_;
    Eigen::VectorXd labels_;
    Eigen::VectorXd residuals_;
};

struct RoundStats {
    std::size_t round = 0;
    std::size_t voter = 0;
    double edge = 0.0;  // mu_j - M_j against the ensemble before the round
    double eta = 1.0;
    double weight = 0.0;  // the voter's weight after the round
    double risk_before = 1.0;
    double quadratic_risk = 1.0;
    double zero_one_error = 0.0;
};

struct RoundOutcome {
    RoundStats stats;
    bool stopped = false;
};

/// g_j = (1/m) sum_k h_j(x_k) r_k for every voter.
Eigen::VectorXd edges(const VoterPool& pool, const Eigen::VectorXd& residuals);

struct Selection {
    std::size_t index = 0;
    double edge = 0.0;
};

/// argmax_j |g_j|, lowest index on ties.
Selection select_voter(const Eigen::VectorXd& g);

/// (1/m) sum_k h_j(x_k)^2.
double voter_eta(const VoterPool& pool, std::size_t voter);

// Closed-form minimizers of the per-voter objective -2*a*g + a^2*eta + penalty(a).
double weight_vanilla(double g, double eta);
double weight_l1(double g, double eta, double lambda);
double weight_l2(double g, double eta, double lambda);
double weight_linf(double g, double eta, double alpha_max);
double weight_for(const BoostConfig& config, double g, double eta);

/// Decrease of the variant's penalized objective when a voter with residual
/// edge `edge` and current weight `current` is refitted by weight_for().
double refit_gain(const BoostConfig& config, double edge, double eta, double current);

/// One greedy step: pick the voter whose refit lowers the objective most and
/// give it the variant's weight. Among voters outside the ensemble this is the
/// one with the largest |edge|; a voter already in the ensemble (or whose
/// complement is) is re-fitted in place. Leaves the ensemble untouched and
/// reports `stopped` when the largest |edge| does not exceed
/// config.stop_threshold() or no refit makes progress.
RoundOutcome boost_round(Ensemble& ensemble, const VoterPool& pool, const BoostConfig& config);

/// Re-fits every voter in insertion order against the residual of all the
/// others. Voters whose new weight is zero are dropped.
void reweight_pass(Ensemble& ensemble, const VoterPool& pool, const BoostConfig& config);

using RoundObserver = std::function<void(const Ensemble&, const RoundStats&)>;

struct TrainResult {
    Ensemble ensemble;
    std::vector<RoundStats> history;
    bool stopped_early = false;
};

/// Runs up to config.max_rounds rounds on the pool's generating dataset.
/// `observer` sees the ensemble after every completed round (after any
/// scheduled reweighting pass).
TrainResult train(const Dataset& train, const VoterPool& pool, const BoostConfig& config,
                  const RoundObserver& observer = {});

/// Weighted vote of arbitrary stumps on a dataset.
Eigen::VectorXd score(std::span<const Stump> stumps, std::span<const double> weights,
                      const Dataset& ds);
Eigen::VectorXd score(const Ensemble& ensemble, const VoterPool& pool, const Dataset& ds);

/// sgn with sgn(0) = -1.
inline int vote_sign(double s) { return s > 0.0 ? 1 : -1; }

std::vector<int> predict(const Ensemble& ensemble, const VoterPool& pool, const Dataset& ds);

double quadratic_risk(const Ensemble& ensemble);
double zero_one_error(const Ensemble& ensemble, const VoterPool& pool, const Dataset& ds);
/// Fraction of mismatches between predictions and the dataset labels.
double zero_one_error(std::span<const int> predictions, const Dataset& ds);
/// Zero-one error of the ensemble on its own training samples, from the cached residuals.
double training_error(const Ensemble& ensemble);

/// Quadratic risk plus the variant's penalty: 2*lambda*||a||_1 for l1,
/// lambda*||a||_2^2 for l2, nothing for vanilla and linf.
double penalized_objective(const Ensemble& ensemble, const BoostConfig& config);

}  // namespace quadboost
