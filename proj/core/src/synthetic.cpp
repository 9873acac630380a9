#include "quadboost/synthetic.hpp"

#include "quadboost/common.hpp"
#include "quadboost/random.hpp"

namespace quadboost {

Dataset make_noisy_linear(std::size_t m, std::size_t attributes, double noise_std,
                          std::uint64_t seed) {
    if (m < 1 || attributes < 1) throw Error("make_noisy_linear: need m >= 1 and attributes >= 1");
    Rng rng(seed, streams::synthetic);
    std::vector<double> w(attributes);
    for (auto& v : w) v = rng.normal();

    Dataset ds;
    ds.name = "noisy_linear";
    ds.attribute_count = attributes;
    ds.samples.reserve(m);
    for (std::size_t k = 0; k < m; ++k) {
        LabeledSample s;
        s.features.resize(attributes);
        double dot = 0.0;
        for (std::size_t a = 0; a < attributes; ++a) {
            s.features[a] = rng.normal();
            dot += w[a] * s.features[a];
        }
        dot += noise_std * rng.normal();
        s.label = dot > 0.0 ? 1 : -1;
        ds.samples.push_back(std::move(s));
    }
    return ds;
}

}  // namespace quadboost
