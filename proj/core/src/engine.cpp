#include "quadboost/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "quadboost/common.hpp"

namespace quadboost {

std::string_view to_string(Variant v) {
    switch (v) {
        case Variant::vanilla: return "vanilla";
        case Variant::l1: return "l1";
        case Variant::l2: return "l2";
        case Variant::linf: return "linf";
    }
    return "?";
}

Variant parse_variant(std::string_view name) {
    if (name == "vanilla") return Variant::vanilla;
    if (name == "l1") return Variant::l1;
    if (name == "l2") return Variant::l2;
    if (name == "linf") return Variant::linf;
    throw Error("unknown QuadBoost variant '" + std::string(name) + "'");
}

void BoostConfig::validate() const {
    if (max_rounds < 1) throw Error("BoostConfig: max_rounds must be at least 1");
    if (!(stop_tolerance >= 0.0)) throw Error("BoostConfig: stop_tolerance must be >= 0");
    if ((variant == Variant::l1 || variant == Variant::l2) && !(lambda >= 0.0)) {
        throw Error("BoostConfig: lambda must be >= 0");
    }
    if (variant == Variant::linf && !(alpha_max > 0.0)) {
        throw Error("BoostConfig: alpha_max must be > 0");
    }
}

double BoostConfig::stop_threshold() const {
    return variant == Variant::l1 ? std::max(stop_tolerance, lambda) : stop_tolerance;
}

// ---------------------------------------------------------------------------
// Ensemble

Ensemble::Ensemble(std::span<const int> labels) : labels_(static_cast<Eigen::Index>(labels.size())) {
    if (labels.empty()) throw Error("Ensemble: no training labels");
    for (std::size_t k = 0; k < labels.size(); ++k) {
        labels_[static_cast<Eigen::Index>(k)] = labels[k];
    }
    residuals_ = labels_;
}

std::optional<std::size_t> Ensemble::position_of(std::size_t voter) const {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].voter == voter) return i;
    }
    return std::nullopt;
}

double Ensemble::weight_of(std::size_t voter) const {
    const auto pos = position_of(voter);
    return pos ? entries_[*pos].weight : 0.0;
}

double Ensemble::quadratic_risk() const {
    return residuals_.squaredNorm() / static_cast<double>(residuals_.size());
}

double Ensemble::norm(double p) const {
    if (!(p >= 1.0)) throw Error("norm: p must be >= 1");
    if (std::isinf(p)) {
        double out = 0.0;
        for (const auto& e : entries_) out = std::max(out, std::abs(e.weight));
        return out;
    }
    double sum = 0.0;
    for (const auto& e : entries_) sum += std::pow(std::abs(e.weight), p);
    return std::pow(sum, 1.0 / p);
}

void Ensemble::set_weight(std::size_t voter, double weight, const SignMatrix& eval) {
    if (voter >= static_cast<std::size_t>(eval.cols())) throw Error("set_weight: voter out of range");
    const auto pos = position_of(voter);
    const double old = pos ? entries_[*pos].weight : 0.0;
    if (old == weight) return;
    residuals_ += (old - weight) * eval.col(static_cast<Eigen::Index>(voter));
    if (weight == 0.0) {
        entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(*pos));
    } else if (pos) {
        entries_[*pos].weight = weight;
    } else {
        entries_.push_back({voter, weight});
    }
}

Eigen::VectorXd Ensemble::recompute_residuals(const SignMatrix& eval) const {
    Eigen::VectorXd r = labels_;
    for (const auto& e : entries_) r -= e.weight * eval.col(static_cast<Eigen::Index>(e.voter));
    return r;
}

// ---------------------------------------------------------------------------
// Edges, selection, weight rules

Eigen::VectorXd edges(const VoterPool& pool, const Eigen::VectorXd& residuals) {
    const auto& h = pool.eval_matrix();
    if (residuals.size() != h.rows()) {
        throw Error("edges: residual length " + std::to_string(residuals.size()) +
                    " does not match pool sample count " + std::to_string(h.rows()));
    }
    const double m = static_cast<double>(h.rows());
    return (h.transpose() * residuals) / m;
}

Selection select_voter(const Eigen::VectorXd& g) {
    if (g.size() == 0) throw Error("select_voter: empty pool");
    Selection best{0, g[0]};
    for (Eigen::Index j = 1; j < g.size(); ++j) {
        if (std::abs(g[j]) > std::abs(best.edge)) best = {static_cast<std::size_t>(j), g[j]};
    }
    return best;
}

double voter_eta(const VoterPool& pool, std::size_t voter) {
    if (voter >= pool.size()) throw Error("voter_eta: voter out of range");
    return pool.etas()[static_cast<Eigen::Index>(voter)];
}

namespace {
void require_eta(double eta) {
    if (!(eta > 0.0)) throw Error("weight rule: eta must be > 0");
}
}  // namespace

double weight_vanilla(double g, double eta) {
    require_eta(eta);
    return g / eta;
}

double weight_l1(double g, double eta, double lambda) {
    require_eta(eta);
    if (!(lambda >= 0.0)) throw Error("weight_l1: lambda must be >= 0");
    if (g > lambda) return (g - lambda) / eta;
    if (-g > lambda) return (g + lambda) / eta;
    return 0.0;
}

double weight_l2(double g, double eta, double lambda) {
    require_eta(eta);
    if (!(lambda >= 0.0)) throw Error("weight_l2: lambda must be >= 0");
    return g / (eta + lambda);
}

double weight_linf(double g, double eta, double alpha_max) {
    require_eta(eta);
    if (!(alpha_max > 0.0)) throw Error("weight_linf: alpha_max must be > 0");
    if (std::abs(g) / eta <= alpha_max) return g / eta;
    return g > 0.0 ? alpha_max : -alpha_max;
}

double weight_for(const BoostConfig& config, double g, double eta) {
    switch (config.variant) {
        case Variant::vanilla: return weight_vanilla(g, eta);
        case Variant::l1: return weight_l1(g, eta, config.lambda);
        case Variant::l2: return weight_l2(g, eta, config.lambda);
        case Variant::linf: return weight_linf(g, eta, config.alpha_max);
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Rounds and training

namespace {

// Refits `voter` against the residual of every other voter.
double refit(Ensemble& ensemble, const VoterPool& pool, const BoostConfig& config,
             std::size_t voter, double eta) {
    const auto& h = pool.eval_matrix();
    const double a = ensemble.weight_of(voter);
    const double g = h.col(static_cast<Eigen::Index>(voter)).dot(ensemble.residuals()) /
                         static_cast<double>(h.rows()) +
                     a * eta;
    const double alpha = weight_for(config, g, eta);
    ensemble.set_weight(voter, alpha, h);
    return alpha;
}

}  // namespace

double training_error(const Ensemble& ensemble) {
    const auto& y = ensemble.labels();
    const auto& r = ensemble.residuals();
    std::size_t wrong = 0;
    for (Eigen::Index k = 0; k < y.size(); ++k) {
        if (vote_sign(y[k] - r[k]) != static_cast<int>(y[k])) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(y.size());
}

double refit_gain(const BoostConfig& config, double edge, double eta, double current) {
    const double target = weight_for(config, edge + current * eta, eta);
    const double delta = target - current;
    double gain = 2.0 * delta * edge - delta * delta * eta;
    switch (config.variant) {
        case Variant::l1: gain -= 2.0 * config.lambda * (std::abs(target) - std::abs(current)); break;
        case Variant::l2: gain -= config.lambda * (target * target - current * current); break;
        case Variant::vanilla:
        case Variant::linf: break;
    }
    return gain;
}

RoundOutcome boost_round(Ensemble& ensemble, const VoterPool& pool, const BoostConfig& config) {
    config.validate();
    const auto g = edges(pool, ensemble.residuals());

    RoundOutcome out;
    out.stats.risk_before = ensemble.quadratic_risk();
    const auto finish_stopped = [&](std::size_t voter, double edge) {
        out.stopped = true;
        out.stats.voter = voter;
        out.stats.edge = edge;
        out.stats.eta = voter_eta(pool, voter);
        out.stats.weight = ensemble.weight_of(voter);
        out.stats.quadratic_risk = out.stats.risk_before;
        out.stats.zero_one_error = training_error(ensemble);
        return out;
    };

    const auto steepest = select_voter(g);
    if (std::abs(steepest.edge) <= config.stop_threshold()) {
        return finish_stopped(steepest.index, steepest.edge);
    }

    // Rank by the objective decrease of refitting each voter. For voters not
    // yet in the ensemble this is increasing in |g_j| (for equal eta), so the
    // pick matches select_voter(); voters already in the ensemble are ranked
    // by what moving them actually buys.
    std::vector<double> current(pool.size(), 0.0);
    for (const auto& e : ensemble.entries()) current[e.voter] = e.weight;
    std::size_t best = 0;
    double best_gain = -std::numeric_limits<double>::infinity();
    double best_eta = 1.0;
    for (std::size_t j = 0; j < pool.size(); ++j) {
        // h and -h span the same coordinate; once one of them carries weight
        // the other is reached by refitting it.
        if (current[j] == 0.0 && current[VoterPool::complement_index(j)] != 0.0) continue;
        const double eta = pool.etas()[static_cast<Eigen::Index>(j)];
        const double gain = refit_gain(config, g[static_cast<Eigen::Index>(j)], eta, current[j]);
        if (gain > best_gain) {
            best = j;
            best_gain = gain;
            best_eta = eta;
        }
    }
    const double best_edge = g[static_cast<Eigen::Index>(best)];
    if (!(best_gain > config.stop_tolerance * config.stop_tolerance)) {
        return finish_stopped(best, best_edge);
    }

    out.stats.voter = best;
    out.stats.edge = best_edge;
    out.stats.eta = best_eta;
    out.stats.weight = weight_for(config, best_edge + current[best] * best_eta, best_eta);
    ensemble.set_weight(best, out.stats.weight, pool.eval_matrix());
    out.stats.quadratic_risk = ensemble.quadratic_risk();
    out.stats.zero_one_error = training_error(ensemble);
    return out;
}

void reweight_pass(Ensemble& ensemble, const VoterPool& pool, const BoostConfig& config) {
    config.validate();
    std::vector<std::size_t> voters;
    voters.reserve(ensemble.dimension());
    for (const auto& e : ensemble.entries()) voters.push_back(e.voter);
    for (auto v : voters) refit(ensemble, pool, config, v, voter_eta(pool, v));
}

TrainResult train(const Dataset& train, const VoterPool& pool, const BoostConfig& config,
                  const RoundObserver& observer) {
    config.validate();
    if (pool.sample_count() != train.size()) {
        throw Error("train: pool was evaluated on " + std::to_string(pool.sample_count()) +
                    " samples, training set has " + std::to_string(train.size()));
    }
    const auto labels = train.labels();
    TrainResult result{Ensemble(labels), {}, false};
    result.history.reserve(std::min<std::size_t>(config.max_rounds, 1U << 16));
    for (std::size_t t = 1; t <= config.max_rounds; ++t) {
        auto outcome = boost_round(result.ensemble, pool, config);
        if (outcome.stopped) {
            result.stopped_early = true;
            break;
        }
        outcome.stats.round = t;
        if (config.reweight_every != 0 && t % config.reweight_every == 0) {
            reweight_pass(result.ensemble, pool, config);
        }
        result.history.push_back(outcome.stats);
        if (observer) observer(result.ensemble, outcome.stats);
    }
    return result;
}

// ---------------------------------------------------------------------------
// Prediction and risks

Eigen::VectorXd score(std::span<const Stump> stumps, std::span<const double> weights,
                      const Dataset& ds) {
    if (stumps.size() != weights.size()) throw Error("score: stump/weight count mismatch");
    for (const auto& s : stumps) {
        if (s.attribute >= ds.attribute_count) throw Error("score: stump attribute out of range");
    }
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ds.size()));
    for (std::size_t k = 0; k < ds.size(); ++k) {
        const auto& x = ds.samples[k].features;
        double s = 0.0;
        for (std::size_t j = 0; j < stumps.size(); ++j) s += weights[j] * stumps[j](x);
        out[static_cast<Eigen::Index>(k)] = s;
    }
    return out;
}

Eigen::VectorXd score(const Ensemble& ensemble, const VoterPool& pool, const Dataset& ds) {
    if (ds.attribute_count != pool.attribute_count()) {
        throw Error("score: dataset has " + std::to_string(ds.attribute_count) +
                    " attributes, pool expects " + std::to_string(pool.attribute_count()));
    }
    std::vector<Stump> stumps;
    std::vector<double> weights;
    for (const auto& e : ensemble.entries()) {
        stumps.push_back(pool.stump(e.voter));
        weights.push_back(e.weight);
    }
    return score(stumps, weights, ds);
}

std::vector<int> predict(const Ensemble& ensemble, const VoterPool& pool, const Dataset& ds) {
    const auto s = score(ensemble, pool, ds);
    std::vector<int> out(static_cast<std::size_t>(s.size()));
    for (Eigen::Index k = 0; k < s.size(); ++k) out[static_cast<std::size_t>(k)] = vote_sign(s[k]);
    return out;
}

double quadratic_risk(const Ensemble& ensemble) { return ensemble.quadratic_risk(); }

double zero_one_error(std::span<const int> predictions, const Dataset& ds) {
    if (predictions.size() != ds.size()) throw Error("zero_one_error: size mismatch");
    if (ds.size() == 0) return 0.0;
    std::size_t wrong = 0;
    for (std::size_t k = 0; k < ds.size(); ++k) {
        if (predictions[k] != ds.samples[k].label) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(ds.size());
}

double zero_one_error(const Ensemble& ensemble, const VoterPool& pool, const Dataset& ds) {
    return zero_one_error(predict(ensemble, pool, ds), ds);
}

double penalized_objective(const Ensemble& ensemble, const BoostConfig& config) {
    const double risk = ensemble.quadratic_risk();
    switch (config.variant) {
        case Variant::l1: return risk + 2.0 * config.lambda * ensemble.norm(1.0);
        case Variant::l2: {
            const double n2 = ensemble.norm(2.0);
            return risk + config.lambda * n2 * n2;
        }
        case Variant::vanilla:
        case Variant::linf: return risk;
    }
    return risk;
}

}  // namespace quadboost
