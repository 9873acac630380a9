#include "quadboost/stumps.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "quadboost/common.hpp"

namespace quadboost {

int stump_eval(const Stump& s, std::span<const double> x) {
    if (s.attribute >= x.size()) {
        throw Error("stump attribute " + std::to_string(s.attribute) + " out of range for " +
                    std::to_string(x.size()) + " features");
    }
    return s(x);
}

SignMatrix eval_pool(std::span<const Stump> stumps, const Dataset& ds) {
    for (const auto& s : stumps) {
        if (s.attribute >= ds.attribute_count) {
            throw Error("eval_pool: stump uses attribute " + std::to_string(s.attribute) +
                        " but dataset has " + std::to_string(ds.attribute_count));
        }
        if (s.polarity != 1 && s.polarity != -1) throw Error("eval_pool: polarity must be +-1");
    }
    const auto m = static_cast<Eigen::Index>(ds.size());
    const auto n = static_cast<Eigen::Index>(stumps.size());
    SignMatrix out(m, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const Stump& s = stumps[static_cast<std::size_t>(j)];
        for (Eigen::Index k = 0; k < m; ++k) {
            out(k, j) = s(ds.samples[static_cast<std::size_t>(k)].features);
        }
    }
    return out;
}

SignMatrix eval_pool(const VoterPool& pool, const Dataset& ds) {
    if (ds.attribute_count != pool.attribute_count()) {
        throw Error("eval_pool: pool built for " + std::to_string(pool.attribute_count()) +
                    " attributes, dataset has " + std::to_string(ds.attribute_count));
    }
    return eval_pool(pool.stumps(), ds);
}

VoterPool::VoterPool(std::vector<Stump> stumps, const Dataset& ds)
    : stumps_(std::move(stumps)), attribute_count_(ds.attribute_count) {
    if (stumps_.empty() || stumps_.size() % 2 != 0) {
        throw Error("voter pool must hold a non-empty set of complement pairs");
    }
    for (std::size_t j = 0; j < stumps_.size(); j += 2) {
        if (stumps_[j + 1] != stumps_[j].complement()) {
            throw Error("voter pool: stump " + std::to_string(j + 1) +
                        " is not the complement of stump " + std::to_string(j));
        }
    }
    eval_ = eval_pool(stumps_, ds);
    etas_ = eval_.colwise().squaredNorm().transpose() / static_cast<double>(eval_.rows());
}

double quantile(std::vector<double> values, double level) {
    if (values.empty()) throw Error("quantile of empty sample");
    std::sort(values.begin(), values.end());
    const double pos = level * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

VoterPool generate_pool(const Dataset& train, std::size_t per_attribute) {
    if (per_attribute == 0) throw Error("generate_pool: per_attribute must be at least 1");
    if (train.size() == 0) throw Error("generate_pool: empty training set");
    std::vector<Stump> stumps;
    stumps.reserve(2 * per_attribute * train.attribute_count);
    for (std::size_t a = 0; a < train.attribute_count; ++a) {
        const auto values = train.column(a);
        for (std::size_t i = 1; i <= per_attribute; ++i) {
            const double level = static_cast<double>(i) / static_cast<double>(per_attribute + 1);
            const Stump s{a, quantile(values, level), 1};
            stumps.push_back(s);
            stumps.push_back(s.complement());
        }
    }
    return VoterPool(std::move(stumps), train);
}

nlohmann::json to_json(const Stump& s) {
    return {{"attribute", s.attribute}, {"threshold", s.threshold}, {"polarity", s.polarity}};
}

Stump stump_from_json(const nlohmann::json& j) {
    Stump s{j.at("attribute").get<std::size_t>(), j.at("threshold").get<double>(),
            j.at("polarity").get<int>()};
    if (s.polarity != 1 && s.polarity != -1) throw Error("stump polarity must be +-1");
    return s;
}

nlohmann::json pool_to_json(const VoterPool& pool) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& s : pool.stumps()) arr.push_back(to_json(s));
    return {{"attribute_count", pool.attribute_count()}, {"stumps", std::move(arr)}};
}

std::vector<Stump> stumps_from_json(const nlohmann::json& j) {
    std::vector<Stump> out;
    for (const auto& e : j.at("stumps")) out.push_back(stump_from_json(e));
    return out;
}

}  // namespace quadboost
