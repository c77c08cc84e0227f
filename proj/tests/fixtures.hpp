#pragma once

#include <credit/credit.hpp>

#include <string>
#include <vector>

namespace fixture {

using namespace credit;

inline Feature numeric(std::string name, FeatureGroup g = FeatureGroup::form) {
    return {std::move(name), FeatureKind::numeric, g, {}};
}

inline Feature nominal(std::string name, std::vector<std::string> cats, FeatureGroup g = FeatureGroup::form) {
    return {std::move(name), FeatureKind::nominal, g, std::move(cats)};
}

inline Schema schema(std::vector<Feature> features) {
    Schema s;
    s.features = std::move(features);
    return s;
}

inline Instance row(std::vector<Value> values, Label label) { return {std::move(values), label}; }

/// One numeric feature.
inline Dataset column(const std::vector<double>& values, const std::vector<Label>& labels) {
    Dataset d{schema({numeric("x")}), {}};
    for (std::size_t i = 0; i < values.size(); ++i)
        d.instances.push_back(row({values[i]}, labels[i]));
    return d;
}

/// Random mixed dataset: numeric features shift with the class, nominal
/// features tilt with it; `missing_rate` of cells are blanked.
inline Dataset random_mixed(std::size_t n, std::size_t numerics, std::size_t nominals, std::uint64_t seed,
                            double bad_share = 0.3, double missing_rate = 0.0) {
    Rng rng(seed);
    Dataset d;
    for (std::size_t j = 0; j < numerics; ++j)
        d.schema.features.push_back(numeric("n" + std::to_string(j)));
    for (std::size_t j = 0; j < nominals; ++j)
        d.schema.features.push_back(nominal("c" + std::to_string(j), {"a", "b", "c"}, FeatureGroup::bank));
    for (std::size_t i = 0; i < n; ++i) {
        Instance inst;
        inst.label = rng.uniform() < bad_share ? Label::bad : Label::good;
        const double shift = inst.label == Label::bad ? 0.8 : 0.0;
        for (std::size_t j = 0; j < numerics; ++j)
            inst.values.emplace_back(std::round((rng.normal() + shift) * 1000.0) / 1000.0);
        for (std::size_t j = 0; j < nominals; ++j) {
            const double u = rng.uniform() + (inst.label == Label::bad ? 0.25 : 0.0);
            inst.values.emplace_back(Category{u < 0.4 ? 0u : (u < 0.8 ? 1u : 2u)});
        }
        for (auto& v : inst.values)
            if (missing_rate > 0.0 && rng.uniform() < missing_rate)
                v = Missing{};
        d.instances.push_back(std::move(inst));
    }
    // both classes present
    d.instances[0].label = Label::good;
    d.instances[1].label = Label::bad;
    return d;
}

/// Default synthetic data at a reduced scale for quick tests.
inline Dataset small_synth(std::uint64_t seed, std::size_t n_good = 1500, std::size_t n_bad = 120) {
    auto spec = default_synth_spec(seed);
    spec.n_good = n_good;
    spec.n_bad = n_bad;
    return generate(spec);
}

inline std::string csv_text(const Dataset& d) {
    std::ostringstream s;
    write_csv(s, d);
    return s.str();
}

} // namespace fixture
