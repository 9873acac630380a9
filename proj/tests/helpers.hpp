#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include "quadboost/data.hpp"
#include "quadboost/stumps.hpp"
#include "quadboost/synthetic.hpp"

namespace testing {

/// Dataset from explicit rows; every row is features followed by the label.
inline quadboost::Dataset rows(std::initializer_list<std::vector<double>> data) {
    quadboost::Dataset ds;
    ds.name = "rows";
    for (const auto& r : data) {
        quadboost::LabeledSample s;
        s.features.assign(r.begin(), r.end() - 1);
        s.label = static_cast<int>(r.back());
        ds.attribute_count = s.features.size();
        ds.samples.push_back(std::move(s));
    }
    return ds;
}

/// Normalized noisy-linear sample, the workhorse of the property tests.
inline quadboost::Dataset synthetic(std::size_t m = 200, std::size_t attributes = 5,
                                    std::uint64_t seed = 7, double noise = 0.5) {
    const auto raw = quadboost::make_noisy_linear(m, attributes, noise, seed);
    return quadboost::apply_normalizer(quadboost::fit_normalizer(raw), raw);
}

}  // namespace testing
