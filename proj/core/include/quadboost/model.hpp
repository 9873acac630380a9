#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "quadboost/adaboost.hpp"
#include "quadboost/data.hpp"
#include "quadboost/engine.hpp"
#include "quadboost/stumps.hpp"

namespace quadboost {

inline constexpr int kSchemaVersion = 1;

enum class Algorithm { quadboost_vanilla, quadboost_l1, quadboost_l2, quadboost_linf, adaboost };

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view name);
/// QuadBoost variant behind an algorithm; nullopt for AdaBoost.
std::optional<Variant> variant_of(Algorithm a);
Algorithm algorithm_of(Variant v);

/// A trained vote that can be applied to raw (un-normalized) data.
struct Model {
    Algorithm algorithm = Algorithm::quadboost_vanilla;
    nlohmann::json config;
    Normalizer normalizer;
    std::size_t attribute_count = 0;
    std::vector<Stump> stumps;
    std::vector<double> weights;
    nlohmann::json metrics;

    Eigen::VectorXd score(const Dataset& raw) const;
    std::vector<int> predict(const Dataset& raw) const;
};

Model make_model(Algorithm algorithm, const Ensemble& ensemble, const VoterPool& pool,
                 const Normalizer& normalizer, nlohmann::json config, nlohmann::json metrics);

/// [{attribute, threshold, polarity, weight}, ...] in ensemble order.
nlohmann::json ensemble_to_json(const Ensemble& ensemble, const VoterPool& pool);

nlohmann::json to_json(const Model& model);
Model model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const BoostConfig& config);
nlohmann::json to_json(const Normalizer& norm);
Normalizer normalizer_from_json(const nlohmann::json& j);

/// Per-round history as CSV with a header row.
std::string history_csv(std::span<const RoundStats> history);
std::string history_csv(std::span<const AdaRound> history);

}  // namespace quadboost
