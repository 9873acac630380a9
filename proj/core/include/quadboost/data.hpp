#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace quadboost {

struct LabeledSample {
    std::vector<double> features;
    int label = 1;  // -1 or +1
};

/// A labeled binary classification sample set. All samples carry exactly
/// `attribute_count` features.
struct Dataset {
    std::string name;
    std::size_t attribute_count = 0;
    std::vector<LabeledSample> samples;

    std::size_t size() const { return samples.size(); }
    std::vector<int> labels() const;
    /// All values of one attribute, in sample order.
    std::vector<double> column(std::size_t attribute) const;
};

/// Per-attribute affine parameters of the tanh squashing
/// x -> tanh((x - center) / scale).
struct Normalizer {
    std::vector<double> center;
    std::vector<double> scale;
};

struct CsvOptions {
    bool header = false;
    /// Zero-based; defaults to the last column.
    std::optional<std::size_t> label_column;
};

/// Reads a comma-separated numeric file. Labels are accepted as -1/+1 or 0/1
/// (0 maps to -1). Empty cells, non-numeric cells, ragged rows and other
/// label values raise quadboost::Error naming the row and column (1-based).
Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});
Dataset parse_csv(std::istream& in, const CsvOptions& options, std::string name);

/// Training mean and population standard deviation per attribute;
/// zero-variance attributes get scale 1.
Normalizer fit_normalizer(const Dataset& train);

/// Squashes every feature into the open interval (-1, 1).
Dataset apply_normalizer(const Normalizer& norm, const Dataset& ds);

/// Rows picked by index, in the given order.
Dataset subset(const Dataset& ds, std::span<const std::size_t> rows);

/// Random train/test split. The training part holds min(ceil(m/2), 500)
/// samples; the rest is the test part.
std::pair<Dataset, Dataset> split_train_test(const Dataset& ds, std::uint64_t seed);

struct Fold {
    Dataset train;
    Dataset validation;
};

/// k-fold partition of a shuffled copy of `ds`. Validation folds are
/// disjoint, cover ds, and the first m % k of them hold one extra sample.
std::vector<Fold> kfold(const Dataset& ds, std::size_t k, std::uint64_t seed);

/// Row indices assigned to each validation fold (what kfold() uses).
std::vector<std::vector<std::size_t>> kfold_indices(std::size_t m, std::size_t k,
                                                    std::uint64_t seed);

}  // namespace quadboost
