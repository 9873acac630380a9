#include "quadboost/model.hpp"

#include <iomanip>
#include <sstream>

#include "quadboost/common.hpp"

namespace quadboost {

std::string_view to_string(Algorithm a) {
    switch (a) {
        case Algorithm::quadboost_vanilla: return "quadboost-vanilla";
        case Algorithm::quadboost_l1: return "quadboost-l1";
        case Algorithm::quadboost_l2: return "quadboost-l2";
        case Algorithm::quadboost_linf: return "quadboost-linf";
        case Algorithm::adaboost: return "adaboost";
    }
    return "?";
}

Algorithm parse_algorithm(std::string_view name) {
    for (auto a : {Algorithm::quadboost_vanilla, Algorithm::quadboost_l1, Algorithm::quadboost_l2,
                   Algorithm::quadboost_linf, Algorithm::adaboost}) {
        if (to_string(a) == name) return a;
    }
    throw Error("unknown algorithm '" + std::string(name) +
                "' (expected quadboost-vanilla, quadboost-l1, quadboost-l2, quadboost-linf or "
                "adaboost)");
}

std::optional<Variant> variant_of(Algorithm a) {
    switch (a) {
        case Algorithm::quadboost_vanilla: return Variant::vanilla;
        case Algorithm::quadboost_l1: return Variant::l1;
        case Algorithm::quadboost_l2: return Variant::l2;
        case Algorithm::quadboost_linf: return Variant::linf;
        case Algorithm::adaboost: return std::nullopt;
    }
    return std::nullopt;
}

Algorithm algorithm_of(Variant v) {
    switch (v) {
        case Variant::vanilla: return Algorithm::quadboost_vanilla;
        case Variant::l1: return Algorithm::quadboost_l1;
        case Variant::l2: return Algorithm::quadboost_l2;
        case Variant::linf: return Algorithm::quadboost_linf;
    }
    return Algorithm::quadboost_vanilla;
}

Eigen::VectorXd Model::score(const Dataset& raw) const {
    if (raw.attribute_count != attribute_count) {
        throw Error("model expects " + std::to_string(attribute_count) + " attributes, data has " +
                    std::to_string(raw.attribute_count));
    }
    return quadboost::score(stumps, weights, apply_normalizer(normalizer, raw));
}

std::vector<int> Model::predict(const Dataset& raw) const {
    const auto s = score(raw);
    std::vector<int> out(static_cast<std::size_t>(s.size()));
    for (Eigen::Index k = 0; k < s.size(); ++k) out[static_cast<std::size_t>(k)] = vote_sign(s[k]);
    return out;
}

Model make_model(Algorithm algorithm, const Ensemble& ensemble, const VoterPool& pool,
                 const Normalizer& normalizer, nlohmann::json config, nlohmann::json metrics) {
    Model model;
    model.algorithm = algorithm;
    model.config = std::move(config);
    model.normalizer = normalizer;
    model.attribute_count = pool.attribute_count();
    for (const auto& e : ensemble.entries()) {
        model.stumps.push_back(pool.stump(e.voter));
        model.weights.push_back(e.weight);
    }
    model.metrics = std::move(metrics);
    return model;
}

nlohmann::json ensemble_to_json(const Ensemble& ensemble, const VoterPool& pool) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : ensemble.entries()) {
        auto j = to_json(pool.stump(e.voter));
        j["weight"] = e.weight;
        arr.push_back(std::move(j));
    }
    return arr;
}

nlohmann::json to_json(const Normalizer& norm) {
    return {{"center", norm.center}, {"scale", norm.scale}};
}

Normalizer normalizer_from_json(const nlohmann::json& j) {
    Normalizer norm{j.at("center").get<std::vector<double>>(), j.at("scale").get<std::vector<double>>()};
    if (norm.center.size() != norm.scale.size()) throw Error("normalizer: center/scale size mismatch");
    for (double s : norm.scale) {
        if (!(s > 0.0)) throw Error("normalizer: scale must be positive");
    }
    return norm;
}

nlohmann::json to_json(const Model& model) {
    nlohmann::json voters = nlohmann::json::array();
    for (std::size_t i = 0; i < model.stumps.size(); ++i) {
        auto j = to_json(model.stumps[i]);
        j["weight"] = model.weights[i];
        voters.push_back(std::move(j));
    }
    return {{"schema_version", kSchemaVersion},
            {"kind", "model"},
            {"algorithm", to_string(model.algorithm)},
            {"config", model.config},
            {"attribute_count", model.attribute_count},
            {"normalizer", to_json(model.normalizer)},
            {"voters", std::move(voters)},
            {"metrics", model.metrics}};
}

Model model_from_json(const nlohmann::json& j) {
    if (j.value("schema_version", 0) != kSchemaVersion) throw Error("model: unsupported schema_version");
    Model model;
    model.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    model.config = j.value("config", nlohmann::json::object());
    model.attribute_count = j.at("attribute_count").get<std::size_t>();
    model.normalizer = normalizer_from_json(j.at("normalizer"));
    if (model.normalizer.center.size() != model.attribute_count) {
        throw Error("model: normalizer size does not match attribute_count");
    }
    for (const auto& v : j.at("voters")) {
        model.stumps.push_back(stump_from_json(v));
        if (model.stumps.back().attribute >= model.attribute_count) {
            throw Error("model: voter attribute out of range");
        }
        model.weights.push_back(v.at("weight").get<double>());
    }
    model.metrics = j.value("metrics", nlohmann::json::object());
    return model;
}

nlohmann::json to_json(const BoostConfig& c) {
    nlohmann::json j{{"variant", to_string(c.variant)},
                     {"max_rounds", c.max_rounds},
                     {"reweight_every", c.reweight_every},
                     {"stop_tolerance", c.stop_tolerance},
                     {"seed", c.seed}};
    if (c.variant == Variant::l1 || c.variant == Variant::l2) j["lambda"] = c.lambda;
    if (c.variant == Variant::linf) j["alpha_max"] = c.alpha_max;
    return j;
}

std::string history_csv(std::span<const RoundStats> history) {
    std::ostringstream out;
    out << std::setprecision(17);
    out << "round,voter,edge,eta,weight,risk_before,quadratic_risk,zero_one_error\n";
    for (const auto& s : history) {
        out << s.round << ',' << s.voter << ',' << s.edge << ',' << s.eta << ',' << s.weight << ','
            << s.risk_before << ',' << s.quadratic_risk << ',' << s.zero_one_error << '\n';
    }
    return out.str();
}

std::string history_csv(std::span<const AdaRound> history) {
    std::ostringstream out;
    out << std::setprecision(17);
    out << "round,voter,weighted_error,edge,alpha,normalizer,training_error\n";
    for (const auto& s : history) {
        out << s.round << ',' << s.voter << ',' << s.weighted_error << ',' << s.edge << ','
            << s.alpha << ',' << s.normalizer << ',' << s.training_error << '\n';
    }
    return out.str();
}

}  // namespace quadboost
