#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "quadboost/data.hpp"
#include "quadboost/model.hpp"

namespace quadboost {

/// One log-spaced hyperparameter axis. The "rounds" axis is integer valued:
/// its points are rounded to the nearest integer and de-duplicated.
struct GridAxis {
    std::string name;  // lambda, alpha_max or rounds
    double min = 1.0;
    double max = 1.0;
    std::size_t count = 10;

    bool integer() const { return name == "rounds"; }
    std::vector<double> values() const;
};

/// Parses "<name>=<min>:<max>:<count>".
GridAxis parse_grid_axis(std::string_view text);

/// Hyperparameter ranges used when no --grid override is given, with every
/// rounds axis truncated at `max_rounds_cap`.
std::vector<GridAxis> default_grid(Algorithm algorithm, std::size_t max_rounds_cap);

/// Default grid with `overrides` substituted by name; rounds axes are capped.
std::vector<GridAxis> resolve_grid(Algorithm algorithm, const std::vector<GridAxis>& overrides,
                                   std::size_t max_rounds_cap);

struct ExperimentSpec {
    std::filesystem::path data;
    CsvOptions csv;
    Algorithm algorithm = Algorithm::quadboost_vanilla;
    std::vector<GridAxis> grid;  // overrides of the default axes
    std::size_t folds = 5;
    std::uint64_t seed = 0;
    std::size_t max_rounds_cap = 10000;
    std::size_t reweight_every = 0;
    std::size_t stumps_per_attribute = 10;
    std::size_t threads = 0;  // 0 = hardware concurrency
};

using ParamSet = std::vector<std::pair<std::string, double>>;

struct CvCell {
    ParamSet params;
    std::vector<double> fold_risks;
    double mean_risk = 0.0;
    double train_seconds = 0.0;
};

struct Report {
    ExperimentSpec spec;
    std::string dataset;
    std::size_t sample_count = 0;
    std::size_t train_size = 0;
    std::size_t test_size = 0;
    std::size_t attribute_count = 0;
    std::size_t pool_size = 0;
    std::vector<GridAxis> grid;
    std::vector<CvCell> cells;
    std::size_t selected = 0;
    double train_error = 0.0;
    double train_quadratic_risk = 0.0;
    double test_risk = 0.0;
    std::size_t rounds_run = 0;
    std::size_t dim_alpha = 0;
    Model model;
    std::vector<RoundStats> history;        // QuadBoost final run
    std::vector<AdaRound> adaboost_history;  // AdaBoost final run
    double cv_seconds = 0.0;
    double final_train_seconds = 0.0;
    double total_seconds = 0.0;
};

/// Full protocol on one dataset: random split (train <= 500 samples), tanh
/// normalization fit on the training part, k-fold CV over the grid on the
/// training part, refit of the best cell on the whole training part, one
/// evaluation on the test part.
Report cv_select(const ExperimentSpec& spec);
Report cv_select(const ExperimentSpec& spec, const Dataset& raw);

/// Report as JSON. Every timing field ends in "_seconds"; include_timing =
/// false drops them so identical runs serialize identically.
nlohmann::json to_json(const Report& report, bool include_timing = true);

struct BenchCell {
    std::optional<double> test_risk;
    double seconds = 0.0;
    std::string error;
};

/// Datasets by algorithms, in first-seen order of the specs.
struct BenchTable {
    std::vector<std::string> datasets;
    std::vector<Algorithm> algorithms;
    std::vector<std::vector<BenchCell>> cells;  // [dataset][algorithm]
    std::vector<double> mean_seconds;          // per algorithm, over datasets that ran
    std::vector<Report> reports;

    /// Columns holding the row minimum (all of them on exact ties).
    std::vector<bool> row_minima(std::size_t row) const;
};

/// Runs cv_select for every spec. A failing spec is recorded in its cell and
/// the run continues.
BenchTable bench(const std::vector<ExperimentSpec>& specs);

/// Marks every position holding the minimum of the present values.
std::vector<bool> mark_minima(const std::vector<std::optional<double>>& row);

nlohmann::json to_json(const BenchTable& table, bool include_timing = true);
/// Aligned text table; row minima are starred.
std::string render_text(const BenchTable& table);

/// Recursively removes keys ending in "_seconds".
nlohmann::json strip_timing(nlohmann::json j);

}  // namespace quadboost
