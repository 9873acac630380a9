#include "quadboost/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "quadboost/common.hpp"
#include "quadboost/random.hpp"

namespace quadboost {

namespace {

constexpr std::size_t kMaxTrainingSize = 500;

std::string_view trim(std::string_view s) {
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_cells(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.push_back(trim(line.substr(start)));
            return cells;
        }
        cells.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
}

[[noreturn]] void cell_error(const std::string& name, std::size_t row, std::size_t col,
                             const std::string& what) {
    std::ostringstream msg;
    msg << name << ": row " << row << ", column " << col << ": " << what;
    throw Error(msg.str());
}

double parse_number(std::string_view cell, const std::string& name, std::size_t row,
                    std::size_t col) {
    if (cell.empty()) cell_error(name, row, col, "missing value");
    if (cell.front() == '+') cell.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
        cell_error(name, row, col, "not a number: '" + std::string(cell) + "'");
    }
    return value;
}

}  // namespace

std::vector<int> Dataset::labels() const {
    std::vector<int> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.label);
    return out;
}

std::vector<double> Dataset::column(std::size_t attribute) const {
    if (attribute >= attribute_count) throw Error("attribute index out of range");
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.features[attribute]);
    return out;
}

Dataset parse_csv(std::istream& in, const CsvOptions& options, std::string name) {
    Dataset ds;
    ds.name = std::move(name);

    std::string line;
    std::size_t row = 0;
    std::optional<std::size_t> columns;
    std::size_t label_col = 0;
    while (std::getline(in, line)) {
        ++row;
        if (options.header && row == 1) continue;
        if (trim(line).empty()) continue;

        const auto cells = split_cells(line);
        if (!columns) {
            columns = cells.size();
            if (*columns < 2) cell_error(ds.name, row, 1, "need at least one feature and a label");
            label_col = options.label_column.value_or(*columns - 1);
            if (label_col >= *columns) {
                throw Error(ds.name + ": label column " + std::to_string(label_col) +
                            " out of range for " + std::to_string(*columns) + " columns");
            }
            ds.attribute_count = *columns - 1;
        } else if (cells.size() != *columns) {
            cell_error(ds.name, row, cells.size(),
                       "expected " + std::to_string(*columns) + " columns, found " +
                           std::to_string(cells.size()));
        }

        LabeledSample sample;
        sample.features.reserve(ds.attribute_count);
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const double v = parse_number(cells[c], ds.name, row, c + 1);
            if (c == label_col) {
                if (v == 1.0) {
                    sample.label = 1;
                } else if (v == 0.0 || v == -1.0) {
                    sample.label = -1;
                } else {
                    cell_error(ds.name, row, c + 1,
                               "label must be one of -1, +1, 0, 1: '" + std::string(cells[c]) + "'");
                }
            } else {
                sample.features.push_back(v);
            }
        }
        ds.samples.push_back(std::move(sample));
    }
    if (ds.samples.empty()) throw Error(ds.name + ": no data rows");
    return ds;
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    return parse_csv(in, options, path.stem().string());
}

Normalizer fit_normalizer(const Dataset& train) {
    if (train.size() == 0) throw Error("fit_normalizer: empty dataset");
    const auto m = static_cast<double>(train.size());
    Normalizer norm;
    norm.center.assign(train.attribute_count, 0.0);
    norm.scale.assign(train.attribute_count, 1.0);
    for (std::size_t a = 0; a < train.attribute_count; ++a) {
        double sum = 0.0;
        for (const auto& s : train.samples) sum += s.features[a];
        const double mean = sum / m;
        double sq = 0.0;
        for (const auto& s : train.samples) sq += (s.features[a] - mean) * (s.features[a] - mean);
        const double sd = std::sqrt(sq / m);
        norm.center[a] = mean;
        norm.scale[a] = sd > 0.0 ? sd : 1.0;
    }
    return norm;
}

Dataset apply_normalizer(const Normalizer& norm, const Dataset& ds) {
    if (norm.center.size() != ds.attribute_count || norm.scale.size() != ds.attribute_count) {
        throw Error("apply_normalizer: normalizer has " + std::to_string(norm.center.size()) +
                    " attributes, dataset has " + std::to_string(ds.attribute_count));
    }
    // tanh rounds to +-1 for |z| > ~19; keep the output strictly inside.
    const double upper = std::nextafter(1.0, 0.0);
    Dataset out = ds;
    for (auto& s : out.samples) {
        for (std::size_t a = 0; a < ds.attribute_count; ++a) {
            const double v = std::tanh((s.features[a] - norm.center[a]) / norm.scale[a]);
            s.features[a] = std::clamp(v, -upper, upper);
        }
    }
    return out;
}

Dataset subset(const Dataset& ds, std::span<const std::size_t> rows) {
    Dataset out;
    out.name = ds.name;
    out.attribute_count = ds.attribute_count;
    out.samples.reserve(rows.size());
    for (auto r : rows) {
        if (r >= ds.size()) throw Error("subset: row index out of range");
        out.samples.push_back(ds.samples[r]);
    }
    return out;
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& ds, std::uint64_t seed) {
    const std::size_t m = ds.size();
    if (m < 2) throw Error("split_train_test: need at least 2 samples");
    const std::size_t n_train = std::min((m + 1) / 2, kMaxTrainingSize);
    Rng rng(seed, streams::split);
    const auto perm = rng.permutation(m);
    const std::span<const std::size_t> all(perm);
    return {subset(ds, all.first(n_train)), subset(ds, all.subspan(n_train))};
}

std::vector<std::vector<std::size_t>> kfold_indices(std::size_t m, std::size_t k,
                                                    std::uint64_t seed) {
    if (k < 2) throw Error("kfold: k must be at least 2");
    if (m < k) {
        throw Error("kfold: " + std::to_string(m) + " samples cannot fill " + std::to_string(k) +
                    " folds");
    }
    Rng rng(seed, streams::folds);
    const auto perm = rng.permutation(m);
    std::vector<std::vector<std::size_t>> folds(k);
    std::size_t pos = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t size = m / k + (f < m % k ? 1 : 0);
        folds[f].assign(perm.begin() + static_cast<std::ptrdiff_t>(pos),
                        perm.begin() + static_cast<std::ptrdiff_t>(pos + size));
        pos += size;
    }
    return folds;
}

std::vector<Fold> kfold(const Dataset& ds, std::size_t k, std::uint64_t seed) {
    const auto folds = kfold_indices(ds.size(), k, seed);
    std::vector<Fold> out;
    out.reserve(k);
    for (std::size_t f = 0; f < k; ++f) {
        std::vector<std::size_t> train_rows;
        for (std::size_t g = 0; g < k; ++g) {
            if (g != f) train_rows.insert(train_rows.end(), folds[g].begin(), folds[g].end());
        }
        out.push_back({subset(ds, train_rows), subset(ds, folds[f])});
    }
    return out;
}

}  // namespace quadboost
