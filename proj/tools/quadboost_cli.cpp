#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "quadboost/adaboost.hpp"
#include "quadboost/bounds.hpp"
#include "quadboost/common.hpp"
#include "quadboost/data.hpp"
#include "quadboost/engine.hpp"
#include "quadboost/experiment.hpp"
#include "quadboost/model.hpp"
#include "quadboost/stumps.hpp"
#include "quadboost/verify.hpp"

namespace qb = quadboost;

namespace {

struct DataArgs {
    std::string path;
    bool header = false;
    int label_col = -1;

    qb::CsvOptions csv() const {
        qb::CsvOptions o;
        o.header = header;
        if (label_col >= 0) o.label_column = static_cast<std::size_t>(label_col);
        return o;
    }
};

void add_data_options(CLI::App* cmd, DataArgs& args, bool required = true) {
    auto* opt = cmd->add_option("--data", args.path, "CSV file, one sample per row")->check(CLI::ExistingFile);
    if (required) opt->required();
    cmd->add_flag("--header", args.header, "Skip the first row");
    cmd->add_option("--label-col", args.label_col, "Zero-based label column (default: last)")
        ->check(CLI::NonNegativeNumber);
}

void write_text(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw qb::Error("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw qb::Error("failed writing '" + path + "'");
}

void write_json(const std::string& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw qb::Error("cannot open '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw qb::Error("'" + path + "' is not valid JSON: " + e.what());
    }
}

double parse_p(const std::string& text) {
    if (text == "inf" || text == "infinity") return qb::kInfinity;
    try {
        std::size_t used = 0;
        const double p = std::stod(text, &used);
        if (used == text.size() && p >= 1.0) return p;
    } catch (const std::exception&) {
    }
    throw qb::Error("--p must be a number >= 1 or 'inf', got '" + text + "'");
}

struct ExperimentArgs {
    DataArgs data;
    std::string algo = "quadboost-vanilla";
    std::vector<std::string> grid;
    std::size_t folds = 5;
    std::uint64_t seed = 0;
    std::size_t max_rounds_cap = 10000;
    std::size_t reweight_every = 0;
    std::size_t threads = 0;
    std::string out;
    bool omit_timing = false;
};

void add_experiment_options(CLI::App* cmd, ExperimentArgs& a) {
    cmd->add_option("--grid", a.grid, "Override an axis: <name>=<min>:<max>:<count>");
    cmd->add_option("--folds", a.folds, "Cross-validation folds")->check(CLI::Range(2, 1000));
    cmd->add_option("--seed", a.seed, "Seed for the split and the folds");
    cmd->add_option("--max-rounds-cap", a.max_rounds_cap, "Upper limit of every rounds axis")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--reweight-every", a.reweight_every, "Reweighting period in rounds (0 = off)");
    cmd->add_option("--threads", a.threads, "Worker threads (0 = all cores)");
    cmd->add_option("--out", a.out, "Write the JSON report here ('-' for stdout)");
    cmd->add_flag("--omit-timing", a.omit_timing, "Leave timing fields out of the JSON report");
}

qb::ExperimentSpec make_spec(const ExperimentArgs& a, const std::string& data, const std::string& algo) {
    qb::ExperimentSpec spec;
    spec.data = data;
    spec.csv = a.data.csv();
    spec.algorithm = qb::parse_algorithm(algo);
    for (const auto& g : a.grid) spec.grid.push_back(qb::parse_grid_axis(g));
    spec.folds = a.folds;
    spec.seed = a.seed;
    spec.max_rounds_cap = a.max_rounds_cap;
    spec.reweight_every = a.reweight_every;
    spec.threads = a.threads;
    // Surface grid mistakes before any work is done.
    qb::resolve_grid(spec.algorithm, spec.grid, spec.max_rounds_cap);
    return spec;
}

std::string params_text(const qb::ParamSet& params) {
    std::ostringstream s;
    for (std::size_t i = 0; i < params.size(); ++i) {
        s << (i ? ", " : "") << params[i].first << "=" << params[i].second;
    }
    return params.empty() ? "(none)" : s.str();
}

// ---------------------------------------------------------------------------

struct TrainArgs {
    DataArgs data;
    std::string algo = "quadboost-vanilla";
    double lambda = 0.0;
    double alpha_max = 1.0;
    std::size_t rounds = 100;
    std::size_t reweight_every = 0;
    std::uint64_t seed = 0;
    std::string out;
    std::string history;
};

int run_train(const TrainArgs& a) {
    const auto raw = qb::load_csv(a.data.path, a.data.csv());
    const auto algorithm = qb::parse_algorithm(a.algo);
    const auto norm = qb::fit_normalizer(raw);
    const auto ds = qb::apply_normalizer(norm, raw);
    const auto pool = qb::generate_pool(ds);

    nlohmann::json config;
    std::string history;
    auto ensemble = [&] {
        if (const auto variant = qb::variant_of(algorithm)) {
            qb::BoostConfig c;
            c.variant = *variant;
            c.lambda = a.lambda;
            c.alpha_max = a.alpha_max;
            c.max_rounds = a.rounds;
            c.reweight_every = a.reweight_every;
            c.seed = a.seed;
            auto res = qb::train(ds, pool, c);
            config = qb::to_json(c);
            history = qb::history_csv(res.history);
            return std::move(res.ensemble);
        }
        auto res = qb::adaboost_train(ds, pool, a.rounds);
        config = {{"max_rounds", a.rounds}};
        history = qb::history_csv(res.history);
        return std::move(res.ensemble);
    }();

    const nlohmann::json metrics{{"train_error", qb::training_error(ensemble)},
                                 {"train_quadratic_risk", ensemble.quadratic_risk()},
                                 {"dim_alpha", ensemble.dimension()},
                                 {"samples", ds.size()}};
    const auto model = qb::make_model(algorithm, ensemble, pool, norm, config, metrics);
    std::cout << qb::to_string(algorithm) << ": " << ensemble.dimension() << " voters, training error "
              << qb::training_error(ensemble) << ", quadratic risk " << ensemble.quadratic_risk() << "\n";
    if (!a.out.empty()) write_json(a.out, qb::to_json(model));
    if (!a.history.empty()) write_text(a.history, history);
    return 0;
}

struct PredictArgs {
    DataArgs data;
    std::string model;
    std::string out = "-";
};

int run_predict(const PredictArgs& a) {
    const auto model = qb::model_from_json(read_json(a.model));
    const auto raw = qb::load_csv(a.data.path, a.data.csv());
    const auto predictions = model.predict(raw);
    std::ostringstream text;
    for (int p : predictions) text << p << "\n";
    write_text(a.out, text.str());
    std::cerr << "zero-one error on " << raw.size() << " samples: " << qb::zero_one_error(predictions, raw)
              << "\n";
    return 0;
}

int run_cv(const ExperimentArgs& a, const std::string& history_path) {
    const auto spec = make_spec(a, a.data.path, a.algo);
    const auto report = qb::cv_select(spec);
    std::cout << qb::to_string(spec.algorithm) << " on " << report.dataset << ": train " << report.train_size
              << ", test " << report.test_size << ", " << report.cells.size() << " cells\n"
              << "selected " << params_text(report.cells[report.selected].params) << " (mean CV risk "
              << report.cells[report.selected].mean_risk << ")\n"
              << "test risk " << report.test_risk << ", " << report.dim_alpha << " voters, "
              << std::fixed << std::setprecision(3) << report.total_seconds << " s\n";
    if (!a.out.empty()) write_json(a.out, qb::to_json(report, !a.omit_timing));
    if (!history_path.empty()) {
        write_text(history_path, qb::variant_of(spec.algorithm) ? qb::history_csv(report.history)
                                                                 : qb::history_csv(report.adaboost_history));
    }
    return 0;
}

int run_bench(const ExperimentArgs& a, const std::vector<std::string>& datasets,
              std::vector<std::string> algos, const std::string& text_path) {
    if (datasets.empty()) throw CLI::ValidationError("bench", "at least one --data file is required");
    if (algos.empty()) {
        algos = {"quadboost-l1", "quadboost-l2", "quadboost-linf", "quadboost-vanilla", "adaboost"};
    }
    std::vector<qb::ExperimentSpec> specs;
    for (const auto& d : datasets) {
        for (const auto& algo : algos) specs.push_back(make_spec(a, d, algo));
    }
    const auto table = qb::bench(specs);
    const auto text = qb::render_text(table);
    std::cout << text;
    if (!text_path.empty()) write_text(text_path, text);
    if (!a.out.empty()) write_json(a.out, qb::to_json(table, !a.omit_timing));
    for (const auto& row : table.cells) {
        for (const auto& c : row) {
            if (!c.error.empty()) return 1;
        }
    }
    return 0;
}

struct BoundArgs {
    std::string p = "1";
    double delta = 0.05;
    std::size_t m = 0;
    double lipschitz = 2.0;
    double rademacher = -1.0;
    std::size_t dim = 0;
    double norm = 0.0;
    double risk = 0.0;
    bool empirical = false;
    std::string model;
    DataArgs data;
    std::size_t draws = 1000;
    std::uint64_t seed = 0;
    std::size_t threads = 0;
    std::string out;
};

int run_bound(const BoundArgs& a) {
    qb::BoundInputs in;
    in.p = parse_p(a.p);
    in.delta = a.delta;
    in.lipschitz = a.lipschitz;
    nlohmann::json extra = nlohmann::json::object();
    std::optional<qb::Variant> variant;

    if (!a.model.empty()) {
        if (a.data.path.empty()) throw qb::Error("bound --model needs --data");
        const auto model = qb::model_from_json(read_json(a.model));
        variant = qb::variant_of(model.algorithm);
        const auto raw = qb::load_csv(a.data.path, a.data.csv());
        const auto ds = qb::apply_normalizer(model.normalizer, raw);
        const auto pool = qb::generate_pool(ds);
        const auto est = qb::rademacher_mc(pool, a.draws, a.seed, a.threads);
        const auto s = model.score(raw);
        double clipped = 0.0;
        for (std::size_t k = 0; k < raw.size(); ++k) {
            const double r = raw.samples[k].label - s[static_cast<Eigen::Index>(k)];
            clipped += std::min(r * r, 1.0);
        }
        double norm = 0.0;
        for (double w : model.weights) {
            norm = std::isinf(in.p) ? std::max(norm, std::abs(w)) : norm + std::pow(std::abs(w), in.p);
        }
        if (!std::isinf(in.p)) norm = std::pow(norm, 1.0 / in.p);
        std::size_t dim = 0;
        for (double w : model.weights) dim += w != 0.0 ? 1 : 0;
        in.m = raw.size();
        in.rademacher = est.mean;
        in.dim_alpha = dim;
        in.norm_alpha = norm;
        in.empirical_risk = clipped / static_cast<double>(raw.size());
        in.empirical_rademacher = true;
        extra["rademacher_estimate"] = qb::to_json(est);
        extra["algorithm"] = qb::to_string(model.algorithm);
    } else {
        if (a.m == 0 || a.rademacher < 0.0 || a.dim == 0 || a.norm <= 0.0) {
            throw qb::Error("bound needs either --model/--data or all of --m, --rademacher, --dim, --norm");
        }
        in.m = a.m;
        in.rademacher = a.rademacher;
        in.dim_alpha = a.dim;
        in.norm_alpha = a.norm;
        in.empirical_risk = a.risk;
        in.empirical_rademacher = a.empirical;
    }

    const auto terms = qb::bound_value(in);
    nlohmann::json lambdas = nlohmann::json::object();
    for (auto v : {qb::Variant::l1, qb::Variant::l2, qb::Variant::linf}) {
        lambdas[std::string(qb::to_string(v))] = qb::theoretical_lambda(v, in.rademacher, in.dim_alpha);
    }
    nlohmann::json report{{"schema_version", qb::kSchemaVersion},
                          {"kind", "bound"},
                          {"inputs", qb::to_json(in)},
                          {"terms", qb::to_json(terms)},
                          {"theoretical_lambda", lambdas}};
    report.update(extra);

    std::cout << std::setprecision(6) << "empirical risk  " << terms.empirical_risk << "\n"
              << "complexity      " << terms.complexity << "\n"
              << "confidence      " << terms.confidence << "\n"
              << "norm union      " << terms.norm_union << "\n"
              << "total           " << terms.total << "\n";
    if (variant && *variant != qb::Variant::vanilla) {
        std::cout << "theoretical lambda (" << qb::to_string(*variant)
                  << ")  " << qb::theoretical_lambda(*variant, in.rademacher, in.dim_alpha) << "\n";
    }
    if (!a.out.empty()) write_json(a.out, report);
    return 0;
}

struct VerifyArgs {
    std::uint64_t seed = 7;
    bool inject_fault = false;
    bool lemma1 = false;
    std::string p = "2";
    std::size_t n = 4;
    std::size_t draws = 100;
};

int run_verify(const VerifyArgs& a) {
    qb::VerifyOptions options;
    options.seed = a.seed;
    if (a.inject_fault) {
        options.rules.vanilla = [](double g, double eta) { return 0.5 * qb::weight_vanilla(g, eta); };
    }
    if (a.lemma1) {
        const double p = parse_p(a.p);
        const auto draws = qb::lemma1_draws(p, a.n, a.draws, options);
        bool ok = true;
        std::cout << "draw  sup  lhs  rhs  |lhs-rhs|\n" << std::setprecision(17);
        for (std::size_t d = 0; d < draws.size(); ++d) {
            const double diff = std::abs(draws[d].lhs - draws[d].rhs);
            ok = ok && diff <= 1e-12;
            std::cout << d << "  " << draws[d].sup << "  " << draws[d].lhs << "  " << draws[d].rhs << "  "
                      << diff << (diff <= 1e-12 ? "" : "  MISMATCH") << "\n";
        }
        std::cout << (ok ? "lhs = rhs on every draw" : "lhs != rhs on some draw") << "\n";
        return ok ? 0 : 1;
    }
    const auto results = qb::run_checks(options);
    std::size_t failed = 0;
    for (const auto& r : results) {
        if (!r.passed) ++failed;
        std::cout << (r.passed ? "PASS  " : "FAIL  ") << r.name << "  margin=" << std::setprecision(6)
                  << r.margin << "  " << r.detail << "\n";
    }
    std::cout << (results.size() - failed) << "/" << results.size() << " checks passed\n";
    return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"QuadBoost: boosting with a quadratic surrogate and closed-form voter weights"};
    app.require_subcommand(1);

    TrainArgs train;
    auto* train_cmd = app.add_subcommand("train", "Train one model on a whole CSV file");
    add_data_options(train_cmd, train.data);
    train_cmd->add_option("--algo", train.algo, "quadboost-{vanilla,l1,l2,linf} or adaboost");
    train_cmd->add_option("--lambda", train.lambda, "Regularization strength (l1, l2)")
        ->check(CLI::NonNegativeNumber);
    train_cmd->add_option("--alpha-max", train.alpha_max, "Weight bound (linf)")->check(CLI::PositiveNumber);
    train_cmd->add_option("--rounds", train.rounds, "Maximum number of rounds")->check(CLI::PositiveNumber);
    train_cmd->add_option("--reweight-every", train.reweight_every, "Reweighting period (0 = off)");
    train_cmd->add_option("--seed", train.seed, "Seed recorded in the model");
    train_cmd->add_option("--out", train.out, "Write the model JSON here");
    train_cmd->add_option("--history", train.history, "Write the per-round history CSV here");

    PredictArgs predict;
    auto* predict_cmd = app.add_subcommand("predict", "Apply a saved model to a CSV file");
    add_data_options(predict_cmd, predict.data);
    predict_cmd->add_option("--model", predict.model, "Model JSON from train")->required()->check(CLI::ExistingFile);
    predict_cmd->add_option("--out", predict.out, "Write one prediction per line ('-' for stdout)");

    ExperimentArgs cv;
    std::string cv_history;
    auto* cv_cmd = app.add_subcommand("cv", "Split, cross-validate the grid, refit and test");
    add_data_options(cv_cmd, cv.data);
    cv_cmd->add_option("--algo", cv.algo, "quadboost-{vanilla,l1,l2,linf} or adaboost");
    add_experiment_options(cv_cmd, cv);
    cv_cmd->add_option("--history", cv_history, "Write the final run's history CSV here");

    ExperimentArgs bench;
    std::vector<std::string> bench_data;
    std::vector<std::string> bench_algos;
    std::string bench_text;
    auto* bench_cmd = app.add_subcommand("bench", "Run cv for every dataset and algorithm; print a table");
    bench_cmd->add_option("--data", bench_data, "CSV files (repeatable)")->check(CLI::ExistingFile);
    bench_cmd->add_flag("--header", bench.data.header, "Skip the first row of every file");
    bench_cmd->add_option("--label-col", bench.data.label_col, "Zero-based label column (default: last)")
        ->check(CLI::NonNegativeNumber);
    bench_cmd->add_option("--algo", bench_algos, "Algorithms (repeatable; default: all five)");
    add_experiment_options(bench_cmd, bench);
    bench_cmd->add_option("--text", bench_text, "Also write the text table here");

    BoundArgs bound;
    auto* bound_cmd = app.add_subcommand("bound", "Evaluate the risk bound for a weighted vote");
    bound_cmd->add_option("--p", bound.p, "Norm exponent, >= 1 or 'inf'");
    bound_cmd->add_option("--delta", bound.delta, "Confidence parameter")->check(CLI::Range(0.0, 1.0));
    bound_cmd->add_option("--m", bound.m, "Sample size");
    bound_cmd->add_option("--lipschitz", bound.lipschitz, "Lipschitz constant of the clipped loss");
    bound_cmd->add_option("--rademacher", bound.rademacher, "Rademacher complexity of the voter class");
    bound_cmd->add_option("--dim", bound.dim, "Number of voters with nonzero weight");
    bound_cmd->add_option("--norm", bound.norm, "||alpha||_p");
    bound_cmd->add_option("--risk", bound.risk, "Empirical clipped quadratic risk");
    bound_cmd->add_flag("--empirical", bound.empirical, "The Rademacher value was estimated on the sample");
    bound_cmd->add_option("--model", bound.model, "Model JSON; derives every input from it and --data")
        ->check(CLI::ExistingFile);
    add_data_options(bound_cmd, bound.data, false);
    bound_cmd->add_option("--draws", bound.draws, "Monte Carlo draws for the Rademacher estimate")
        ->check(CLI::PositiveNumber);
    bound_cmd->add_option("--seed", bound.seed, "Seed of the Rademacher draws");
    bound_cmd->add_option("--threads", bound.threads, "Worker threads (0 = all cores)");
    bound_cmd->add_option("--out", bound.out, "Write the JSON report here ('-' for stdout)");

    VerifyArgs verify;
    auto* verify_cmd = app.add_subcommand("verify", "Run the property checks on synthetic data");
    verify_cmd->add_option("--seed", verify.seed, "Seed of the synthetic data");
    verify_cmd->add_flag("--inject-fault", verify.inject_fault, "Halve the vanilla weight rule");
    verify_cmd->add_flag("--lemma1", verify.lemma1, "Print the per-draw complexity identity instead");
    verify_cmd->add_option("--p", verify.p, "Norm exponent for --lemma1, >= 1 or 'inf'");
    verify_cmd->add_option("--n", verify.n, "Number of voters for --lemma1")->check(CLI::PositiveNumber);
    verify_cmd->add_option("--draws", verify.draws, "Sign draws for --lemma1")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train_cmd) return run_train(train);
        if (*predict_cmd) return run_predict(predict);
        if (*cv_cmd) return run_cv(cv, cv_history);
        if (*bench_cmd) return run_bench(bench, bench_data, bench_algos, bench_text);
        if (*bound_cmd) return run_bound(bound);
        if (*verify_cmd) return run_verify(verify);
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
