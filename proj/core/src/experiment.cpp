#include "quadboost/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "quadboost/adaboost.hpp"
#include "quadboost/common.hpp"
#include "quadboost/engine.hpp"
#include "quadboost/stumps.hpp"

namespace quadboost {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double parse_double(std::string_view s, std::string_view what) {
    try {
        std::size_t used = 0;
        const std::string str(s);
        const double v = std::stod(str, &used);
        if (used != str.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw Error("grid: cannot parse " + std::string(what) + " '" + std::string(s) + "'");
    }
}

GridAxis capped(GridAxis axis, std::size_t cap) {
    if (axis.integer()) {
        const auto c = static_cast<double>(cap);
        axis.max = std::min(axis.max, c);
        axis.min = std::min(axis.min, axis.max);
    }
    return axis;
}

BoostConfig make_config(Variant variant, const ParamSet& params, std::size_t max_rounds,
                        std::size_t reweight_every, std::uint64_t seed) {
    BoostConfig config;
    config.variant = variant;
    config.max_rounds = max_rounds;
    config.reweight_every = reweight_every;
    config.seed = seed;
    for (const auto& [name, value] : params) {
        if (name == "lambda") config.lambda = value;
        if (name == "alpha_max") config.alpha_max = value;
    }
    return config;
}

double error_of(const Ensemble& ensemble, const SignMatrix& eval, std::span<const int> labels) {
    const auto m = static_cast<Eigen::Index>(labels.size());
    Eigen::VectorXd s = Eigen::VectorXd::Zero(m);
    for (const auto& e : ensemble.entries()) s += e.weight * eval.col(static_cast<Eigen::Index>(e.voter));
    std::size_t wrong = 0;
    for (Eigen::Index k = 0; k < m; ++k) {
        if (vote_sign(s[k]) != labels[static_cast<std::size_t>(k)]) ++wrong;
    }
    return m == 0 ? 0.0 : static_cast<double>(wrong) / static_cast<double>(m);
}

// Trains one model and reports the ensemble after every round through `on_round`.
// Returns the final ensemble.
Ensemble run_algorithm(Algorithm algorithm, const Dataset& train, const VoterPool& pool,
                       const ParamSet& params, std::size_t max_rounds, const ExperimentSpec& spec,
                       const std::function<void(const Ensemble&, std::size_t)>& on_round,
                       std::vector<RoundStats>* history, std::vector<AdaRound>* ada_history) {
    if (const auto variant = variant_of(algorithm)) {
        const auto config = make_config(*variant, params, max_rounds, spec.reweight_every, spec.seed);
        auto result = quadboost::train(train, pool, config, [&](const Ensemble& e, const RoundStats& s) {
                if (on_round) on_round(e, s.round);
            });
        if (history) *history = std::move(result.history);
        return std::move(result.ensemble);
    }
    auto result = adaboost_train(train, pool, max_rounds, [&](const Ensemble& e, const AdaRound& r) {
        if (on_round) on_round(e, r.round);
    });
    if (ada_history) *ada_history = std::move(result.history);
    return std::move(result.ensemble);
}

nlohmann::json params_json(const ParamSet& params) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [name, value] : params) j[name] = value;
    return j;
}

}  // namespace

std::vector<double> GridAxis::values() const {
    if (count < 1) throw Error("grid axis '" + name + "': count must be at least 1");
    if (!(min > 0.0 && max > 0.0)) throw Error("grid axis '" + name + "': bounds must be positive");
    if (max < min) throw Error("grid axis '" + name + "': max is below min");
    std::vector<double> out;
    out.reserve(count);
    const double lo = std::log(min);
    const double hi = std::log(max);
    for (std::size_t i = 0; i < count; ++i) {
        double v = min;
        if (count > 1) {
            v = i + 1 == count ? max
                               : std::exp(lo + (hi - lo) * static_cast<double>(i) /
                                                    static_cast<double>(count - 1));
        }
        if (integer()) v = std::max(1.0, std::round(v));
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    }
    return out;
}

GridAxis parse_grid_axis(std::string_view text) {
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
        throw Error("grid: expected <name>=<min>:<max>:<count>, got '" + std::string(text) + "'");
    }
    GridAxis axis;
    axis.name = std::string(text.substr(0, eq));
    if (axis.name != "lambda" && axis.name != "alpha_max" && axis.name != "rounds") {
        throw Error("grid: unknown hyperparameter '" + axis.name +
                    "' (expected lambda, alpha_max or rounds)");
    }
    const auto rest = text.substr(eq + 1);
    const auto c1 = rest.find(':');
    const auto c2 = c1 == std::string_view::npos ? c1 : rest.find(':', c1 + 1);
    if (c2 == std::string_view::npos) {
        throw Error("grid: expected <name>=<min>:<max>:<count>, got '" + std::string(text) + "'");
    }
    axis.min = parse_double(rest.substr(0, c1), "min");
    axis.max = parse_double(rest.substr(c1 + 1, c2 - c1 - 1), "max");
    const double count = parse_double(rest.substr(c2 + 1), "count");
    if (!(count >= 1.0) || count != std::floor(count)) throw Error("grid: count must be a positive integer");
    axis.count = static_cast<std::size_t>(count);
    axis.values();  // validates the bounds
    return axis;
}

std::vector<GridAxis> default_grid(Algorithm algorithm, std::size_t max_rounds_cap) {
    std::vector<GridAxis> axes;
    switch (algorithm) {
        case Algorithm::quadboost_vanilla: axes = {{"rounds", 1.0, 1e3, 10}}; break;
        case Algorithm::quadboost_l1: axes = {{"lambda", 1e-4, 1.0, 10}}; break;
        case Algorithm::quadboost_l2: axes = {{"lambda", 1.0, 1e3, 10}, {"rounds", 10.0, 1e5, 10}}; break;
        case Algorithm::quadboost_linf:
            axes = {{"alpha_max", 1e-4, 1e-1, 10}, {"rounds", 1.0, 1e5, 10}};
            break;
        case Algorithm::adaboost: axes = {{"rounds", 1e2, 1e6, 10}}; break;
    }
    for (auto& a : axes) a = capped(a, max_rounds_cap);
    return axes;
}

std::vector<GridAxis> resolve_grid(Algorithm algorithm, const std::vector<GridAxis>& overrides,
                                   std::size_t max_rounds_cap) {
    if (max_rounds_cap < 1) throw Error("max_rounds_cap must be at least 1");
    auto axes = default_grid(algorithm, max_rounds_cap);
    for (const auto& o : overrides) {
        auto it = std::find_if(axes.begin(), axes.end(), [&](const GridAxis& a) { return a.name == o.name; });
        if (it == axes.end()) {
            throw Error("grid: " + std::string(to_string(algorithm)) + " has no hyperparameter '" +
                        o.name + "'");
        }
        *it = capped(o, max_rounds_cap);
    }
    return axes;
}

Report cv_select(const ExperimentSpec& spec) {
    return cv_select(spec, load_csv(spec.data, spec.csv));
}

Report cv_select(const ExperimentSpec& spec, const Dataset& raw) {
    const auto wall_start = Clock::now();
    if (spec.folds < 2) throw Error("cv: folds must be at least 2");

    Report rep;
    rep.spec = spec;
    rep.dataset = raw.name;
    rep.sample_count = raw.size();
    rep.attribute_count = raw.attribute_count;

    auto [train_raw, test_raw] = split_train_test(raw, spec.seed);
    if (train_raw.size() < spec.folds) {
        throw Error("cv: training split of " + std::to_string(train_raw.size()) +
                    " samples is too small for " + std::to_string(spec.folds) + " folds");
    }
    const auto norm = fit_normalizer(train_raw);
    const Dataset train = apply_normalizer(norm, train_raw);
    const Dataset test = apply_normalizer(norm, test_raw);
    rep.train_size = train.size();
    rep.test_size = test.size();

    rep.grid = resolve_grid(spec.algorithm, spec.grid, spec.max_rounds_cap);
    std::vector<std::vector<double>> axis_values;
    for (const auto& a : rep.grid) axis_values.push_back(a.values());

    // Rounds are checkpoints along a single run; every other axis needs its own run.
    std::optional<std::size_t> rounds_axis;
    for (std::size_t i = 0; i < rep.grid.size(); ++i) {
        if (rep.grid[i].integer()) rounds_axis = i;
    }
    const std::vector<double> checkpoints =
        rounds_axis ? axis_values[*rounds_axis]
                    : std::vector<double>{static_cast<double>(spec.max_rounds_cap)};
    const auto max_rounds =
        static_cast<std::size_t>(*std::max_element(checkpoints.begin(), checkpoints.end()));

    std::vector<ParamSet> run_params{ParamSet{}};
    for (std::size_t i = 0; i < rep.grid.size(); ++i) {
        if (rounds_axis && i == *rounds_axis) continue;
        std::vector<ParamSet> next;
        for (const auto& p : run_params) {
            for (double v : axis_values[i]) {
                auto q = p;
                q.emplace_back(rep.grid[i].name, v);
                next.push_back(std::move(q));
            }
        }
        run_params = std::move(next);
    }

    struct FoldContext {
        Dataset train;
        std::vector<int> val_labels;
        VoterPool pool;
        SignMatrix val_eval;
    };
    std::vector<FoldContext> folds;
    for (auto& f : kfold(train, spec.folds, spec.seed)) {
        auto pool = generate_pool(f.train, spec.stumps_per_attribute);
        auto val_eval = eval_pool(pool, f.validation);
        folds.push_back({std::move(f.train), f.validation.labels(), std::move(pool), std::move(val_eval)});
    }

    const std::size_t n_folds = folds.size();
    const std::size_t n_cp = checkpoints.size();
    // [run][fold][checkpoint]
    std::vector<double> risk(run_params.size() * n_folds * n_cp, 0.0);
    std::vector<double> secs(risk.size(), 0.0);
    const auto slot = [&](std::size_t run, std::size_t fold, std::size_t cp) {
        return (run * n_folds + fold) * n_cp + cp;
    };

    const auto cv_start = Clock::now();
    parallel_for(run_params.size() * n_folds, spec.threads, [&](std::size_t item) {
        const std::size_t run = item / n_folds;
        const std::size_t fold = item % n_folds;
        const auto& ctx = folds[fold];
        std::size_t next_cp = 0;
        double eval_time = 0.0;
        const auto start = Clock::now();
        const auto record = [&](const Ensemble& e) {
            const auto t0 = Clock::now();
            const double r = error_of(e, ctx.val_eval, ctx.val_labels);
            const double elapsed = std::chrono::duration<double>(t0 - start).count() - eval_time;
            risk[slot(run, fold, next_cp)] = r;
            secs[slot(run, fold, next_cp)] = elapsed;
            ++next_cp;
            eval_time += seconds_since(t0);
        };
        const auto final_ensemble = run_algorithm(
            spec.algorithm, ctx.train, ctx.pool, run_params[run], max_rounds, spec,
            [&](const Ensemble& e, std::size_t round) {
                while (next_cp < n_cp && static_cast<double>(round) == checkpoints[next_cp]) record(e);
            },
            nullptr, nullptr);
        // Runs that stopped before a checkpoint keep their final model for it.
        while (next_cp < n_cp) record(final_ensemble);
    });
    rep.cv_seconds = seconds_since(cv_start);

    // Cells in grid order: first axis outermost.
    std::vector<std::size_t> idx(rep.grid.size(), 0);
    const auto advance = [&] {
        for (std::size_t i = rep.grid.size(); i-- > 0;) {
            if (++idx[i] < axis_values[i].size()) return true;
            idx[i] = 0;
        }
        return false;
    };
    do {
        CvCell cell;
        std::size_t run = 0;
        std::size_t cp = 0;
        for (std::size_t i = 0; i < rep.grid.size(); ++i) {
            cell.params.emplace_back(rep.grid[i].name, axis_values[i][idx[i]]);
            if (rounds_axis && i == *rounds_axis) {
                cp = idx[i];
            } else {
                run = run * axis_values[i].size() + idx[i];
            }
        }
        double sum = 0.0;
        for (std::size_t f = 0; f < n_folds; ++f) {
            cell.fold_risks.push_back(risk[slot(run, f, cp)]);
            sum += risk[slot(run, f, cp)];
            cell.train_seconds += secs[slot(run, f, cp)];
        }
        cell.mean_risk = sum / static_cast<double>(n_folds);
        rep.cells.push_back(std::move(cell));
    } while (!rep.grid.empty() && advance());

    rep.selected = 0;
    for (std::size_t c = 1; c < rep.cells.size(); ++c) {
        if (rep.cells[c].mean_risk < rep.cells[rep.selected].mean_risk) rep.selected = c;
    }
    const auto& best = rep.cells[rep.selected].params;

    std::size_t final_rounds = spec.max_rounds_cap;
    ParamSet final_params;
    for (const auto& [name, value] : best) {
        if (name == "rounds") {
            final_rounds = static_cast<std::size_t>(value);
        } else {
            final_params.emplace_back(name, value);
        }
    }

    const auto final_start = Clock::now();
    const auto pool = generate_pool(train, spec.stumps_per_attribute);
    const auto ensemble = run_algorithm(spec.algorithm, train, pool, final_params, final_rounds, spec,
                                        {}, &rep.history, &rep.adaboost_history);
    rep.final_train_seconds = seconds_since(final_start);

    rep.pool_size = pool.size();
    rep.rounds_run = variant_of(spec.algorithm) ? rep.history.size() : rep.adaboost_history.size();
    rep.dim_alpha = ensemble.dimension();
    rep.train_error = training_error(ensemble);
    rep.train_quadratic_risk = ensemble.quadratic_risk();
    rep.test_risk = zero_one_error(ensemble, pool, test);

    nlohmann::json config = params_json(final_params);
    config["max_rounds"] = final_rounds;
    if (variant_of(spec.algorithm)) config["reweight_every"] = spec.reweight_every;
    rep.model = make_model(spec.algorithm, ensemble, pool, norm, std::move(config),
                           {{"train_error", rep.train_error},
                            {"train_quadratic_risk", rep.train_quadratic_risk},
                            {"test_risk", rep.test_risk},
                            {"dim_alpha", rep.dim_alpha},
                            {"rounds_run", rep.rounds_run}});
    rep.total_seconds = seconds_since(wall_start);
    return rep;
}

nlohmann::json to_json(const Report& r, bool include_timing) {
    nlohmann::json grid = nlohmann::json::array();
    for (const auto& a : r.grid) {
        grid.push_back({{"name", a.name}, {"min", a.min}, {"max", a.max}, {"count", a.count},
                        {"values", a.values()}});
    }
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : r.cells) {
        nlohmann::json cell{{"params", params_json(c.params)},
                            {"fold_risks", c.fold_risks},
                            {"mean_cv_risk", c.mean_risk}};
        if (include_timing) cell["train_seconds"] = c.train_seconds;
        cells.push_back(std::move(cell));
    }
    nlohmann::json csv{{"header", r.spec.csv.header}};
    csv["label_column"] = r.spec.csv.label_column ? nlohmann::json(*r.spec.csv.label_column)
                                                  : nlohmann::json("last");
    nlohmann::json j{
        {"schema_version", kSchemaVersion},
        {"kind", "cv_report"},
        {"dataset", r.dataset},
        {"algorithm", to_string(r.spec.algorithm)},
        {"config",
         {{"data", r.spec.data.string()},
          {"csv", csv},
          {"seed", r.spec.seed},
          {"folds", r.spec.folds},
          {"max_rounds_cap", r.spec.max_rounds_cap},
          {"reweight_every", r.spec.reweight_every},
          {"stumps_per_attribute", r.spec.stumps_per_attribute}}},
        {"data",
         {{"samples", r.sample_count},
          {"train", r.train_size},
          {"test", r.test_size},
          {"attributes", r.attribute_count},
          {"pool_size", r.pool_size}}},
        {"grid", grid},
        {"cells", cells},
        {"selected", {{"index", r.selected}, {"params", params_json(r.cells.at(r.selected).params)}}},
        {"train_error", r.train_error},
        {"train_quadratic_risk", r.train_quadratic_risk},
        {"test_risk", r.test_risk},
        {"rounds_run", r.rounds_run},
        {"dim_alpha", r.dim_alpha},
        {"model", to_json(r.model)}};
    if (include_timing) {
        j["cv_seconds"] = r.cv_seconds;
        j["final_train_seconds"] = r.final_train_seconds;
        j["total_seconds"] = r.total_seconds;
    }
    return j;
}

std::vector<bool> mark_minima(const std::vector<std::optional<double>>& row) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& v : row) {
        if (v) best = std::min(best, *v);
    }
    std::vector<bool> out(row.size(), false);
    for (std::size_t i = 0; i < row.size(); ++i) out[i] = row[i] && *row[i] == best;
    return out;
}

std::vector<bool> BenchTable::row_minima(std::size_t row) const {
    std::vector<std::optional<double>> values;
    for (const auto& c : cells.at(row)) values.push_back(c.test_risk);
    return mark_minima(values);
}

BenchTable bench(const std::vector<ExperimentSpec>& specs) {
    if (specs.empty()) throw Error("bench: no experiments given");
    BenchTable table;
    const auto index_of = [](auto& vec, const auto& value) {
        auto it = std::find(vec.begin(), vec.end(), value);
        if (it != vec.end()) return static_cast<std::size_t>(it - vec.begin());
        vec.push_back(value);
        return vec.size() - 1;
    };
    std::vector<std::tuple<std::size_t, std::size_t, BenchCell>> results;
    for (const auto& spec : specs) {
        const auto name = spec.data.stem().string();
        const auto row = index_of(table.datasets, name);
        const auto col = index_of(table.algorithms, spec.algorithm);
        BenchCell cell;
        try {
            auto report = cv_select(spec);
            cell.test_risk = report.test_risk;
            cell.seconds = report.total_seconds;
            table.reports.push_back(std::move(report));
        } catch (const std::exception& e) {
            cell.error = e.what();
        }
        results.emplace_back(row, col, std::move(cell));
    }
    table.cells.assign(table.datasets.size(), std::vector<BenchCell>(table.algorithms.size()));
    for (auto& [row, col, cell] : results) table.cells[row][col] = std::move(cell);

    table.mean_seconds.assign(table.algorithms.size(), 0.0);
    for (std::size_t c = 0; c < table.algorithms.size(); ++c) {
        std::size_t n = 0;
        for (std::size_t r = 0; r < table.datasets.size(); ++r) {
            if (table.cells[r][c].test_risk) {
                table.mean_seconds[c] += table.cells[r][c].seconds;
                ++n;
            }
        }
        if (n > 0) table.mean_seconds[c] /= static_cast<double>(n);
    }
    return table;
}

nlohmann::json to_json(const BenchTable& t, bool include_timing) {
    nlohmann::json algos = nlohmann::json::array();
    for (auto a : t.algorithms) algos.push_back(to_string(a));
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t r = 0; r < t.datasets.size(); ++r) {
        const auto minima = t.row_minima(r);
        nlohmann::json cells = nlohmann::json::array();
        for (std::size_t c = 0; c < t.algorithms.size(); ++c) {
            const auto& cell = t.cells[r][c];
            nlohmann::json j{{"algorithm", to_string(t.algorithms[c])}, {"row_min", bool(minima[c])}};
            j["test_risk"] = cell.test_risk ? nlohmann::json(*cell.test_risk) : nlohmann::json(nullptr);
            if (!cell.error.empty()) j["error"] = cell.error;
            if (include_timing) j["total_seconds"] = cell.seconds;
            cells.push_back(std::move(j));
        }
        rows.push_back({{"dataset", t.datasets[r]}, {"cells", cells}});
    }
    nlohmann::json reports = nlohmann::json::array();
    for (const auto& rep : t.reports) reports.push_back(to_json(rep, include_timing));
    nlohmann::json j{{"schema_version", kSchemaVersion},
                     {"kind", "bench"},
                     {"algorithms", algos},
                     {"rows", rows},
                     {"reports", reports}};
    if (include_timing) j["mean_running_time_seconds"] = t.mean_seconds;
    return j;
}

std::string render_text(const BenchTable& t) {
    std::vector<std::vector<std::string>> grid;
    std::vector<std::string> header{"dataset"};
    for (auto a : t.algorithms) header.emplace_back(to_string(a));
    grid.push_back(header);
    for (std::size_t r = 0; r < t.datasets.size(); ++r) {
        const auto minima = t.row_minima(r);
        std::vector<std::string> line{t.datasets[r]};
        for (std::size_t c = 0; c < t.algorithms.size(); ++c) {
            const auto& cell = t.cells[r][c];
            std::ostringstream s;
            if (cell.test_risk) {
                s << std::fixed << std::setprecision(3) << *cell.test_risk << (minima[c] ? "*" : " ");
            } else {
                s << "failed";
            }
            line.push_back(s.str());
        }
        grid.push_back(line);
    }
    std::vector<std::string> timing{"mean running time (s)"};
    for (double s : t.mean_seconds) {
        std::ostringstream o;
        o << std::fixed << std::setprecision(3) << s;
        timing.push_back(o.str());
    }
    grid.push_back(timing);

    std::vector<std::size_t> width(header.size(), 0);
    for (const auto& line : grid) {
        for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
    }
    std::ostringstream out;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t c = 0; c < grid[i].size(); ++c) {
            if (c == 0) {
                out << std::left << std::setw(static_cast<int>(width[c])) << grid[i][c];
            } else {
                out << "  " << std::right << std::setw(static_cast<int>(width[c])) << grid[i][c];
            }
        }
        out << '\n';
        if (i == 0 || i + 2 == grid.size()) {
            std::size_t total = 0;
            for (auto w : width) total += w + 2;
            out << std::string(total - 2, '-') << '\n';
        }
    }
    return out.str();
}

nlohmann::json strip_timing(nlohmann::json j) {
    if (j.is_object()) {
        nlohmann::json out = nlohmann::json::object();
        for (auto& [key, value] : j.items()) {
            if (key.size() >= 8 && key.compare(key.size() - 8, 8, "_seconds") == 0) continue;
            out[key] = strip_timing(value);
        }
        return out;
    }
    if (j.is_array()) {
        nlohmann::json out = nlohmann::json::array();
        for (auto& v : j) out.push_back(strip_timing(v));
        return out;
    }
    return j;
}

}  // namespace quadboost
