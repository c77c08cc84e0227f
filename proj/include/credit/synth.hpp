#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "rng.hpp"

namespace credit {

/// One generated column. Goods draw numerics from N(0,1); bads from
/// N(signal * effect, 1), where signal is the group's strength. Nominal bads draw
/// from p_good tilted by exp(signal * tilt) and renormalized. Numerics are
/// reported as offset + scale * z, rounded to `decimals`.
struct SynthFeature {
    std::string name;
    FeatureGroup group = FeatureGroup::form;
    FeatureKind kind = FeatureKind::numeric;
    bool informative = false;
    double effect = 0.0;
    double offset = 0.0;
    double scale = 1.0;
    int decimals = 2;
    std::vector<std::string> categories;
    std::vector<double> p_good;
    std::vector<double> tilt;
};

struct SynthSpec {
    std::size_t n_good = 7401;
    std::size_t n_bad = 121;
    std::vector<SynthFeature> features;
    double form_signal = 1.0;
    double bank_signal = 1.0;
    double correlation = 0.0; // shared latent factor loading for numeric noise, in [0,1)
    std::uint64_t seed = 1;

    void validate() const {
        if (n_good == 0 || n_bad == 0)
            throw UsageError("synth: class counts must be positive");
        if (features.empty())
            throw UsageError("synth: no features configured");
        if (!(correlation >= 0.0 && correlation < 1.0))
            throw UsageError("synth: correlation must lie in [0, 1)");
        if (form_signal < 0.0 || bank_signal < 0.0)
            throw UsageError("synth: signal strengths must be non-negative");
        for (const auto& f : features) {
            if (f.kind == FeatureKind::nominal) {
                if (f.categories.empty() || f.p_good.size() != f.categories.size() ||
                    f.tilt.size() != f.categories.size())
                    throw UsageError("synth: nominal feature '" + f.name + "' is misconfigured");
                double sum = 0.0;
                for (double p : f.p_good) {
                    if (p < 0.0)
                        throw UsageError("synth: negative probability in '" + f.name + "'");
                    sum += p;
                }
                if (std::abs(sum - 1.0) > 1e-9)
                    throw UsageError("synth: probabilities of '" + f.name + "' do not sum to 1");
            } else if (!(f.scale > 0.0)) {
                throw UsageError("synth: numeric feature '" + f.name + "' needs a positive scale");
            }
        }
    }

    double signal(FeatureGroup g) const { return g == FeatureGroup::form ? form_signal : bank_signal; }

    /// Category probabilities for bads.
    std::vector<double> p_bad(const SynthFeature& f) const {
        std::vector<double> p(f.p_good.size());
        double sum = 0.0;
        for (std::size_t c = 0; c < p.size(); ++c) {
            p[c] = f.p_good[c] * std::exp(signal(f.group) * f.tilt[c]);
            sum += p[c];
        }
        for (auto& v : p)
            v /= sum;
        return p;
    }
};

namespace detail {

inline SynthFeature numeric_feature(std::string name, FeatureGroup g, double effect, double offset, double scale,
                                    int decimals = 2) {
    SynthFeature f;
    f.name = std::move(name);
    f.group = g;
    f.kind = FeatureKind::numeric;
    f.informative = effect != 0.0;
    f.effect = effect;
    f.offset = offset;
    f.scale = scale;
    f.decimals = decimals;
    return f;
}

inline SynthFeature nominal_feature(std::string name, FeatureGroup g, std::vector<std::string> categories,
                                    std::vector<double> p_good, std::vector<double> tilt) {
    SynthFeature f;
    f.name = std::move(name);
    f.group = g;
    f.kind = FeatureKind::nominal;
    f.informative = std::any_of(tilt.begin(), tilt.end(), [](double t) { return t != 0.0; });
    f.categories = std::move(categories);
    f.p_good = std::move(p_good);
    f.tilt = std::move(tilt);
    return f;
}

} // namespace detail

/// 11 application-form features (7 informative) and 18 bank-statement features
/// (5 informative), 7401 goods and 121 bads.
inline SynthSpec default_synth_spec(std::uint64_t seed = 1) {
    using detail::nominal_feature;
    using detail::numeric_feature;
    constexpr auto form = FeatureGroup::form;
    constexpr auto bank = FeatureGroup::bank;
    const std::vector<std::string> yes_no{"no", "yes"};

    SynthSpec s;
    s.seed = seed;
    s.features = {
        numeric_feature("age", form, -0.85, 41.0, 12.0, 0),
        numeric_feature("income", form, -0.8, 950.0, 320.0),
        nominal_feature("residential_status", form, {"owner", "renting", "boarding", "with_parents"},
                        {0.35, 0.40, 0.10, 0.15}, {-0.9, 0.1, 0.8, 0.3}),
        numeric_feature("loan_amount", form, 0.75, 1800.0, 700.0),
        nominal_feature("employment_type", form, {"full_time", "part_time", "casual", "beneficiary"},
                        {0.55, 0.2, 0.15, 0.10}, {-0.5, 0.2, 0.6, 0.9}),
        numeric_feature("employment_years", form, -0.75, 4.0, 3.0, 1),
        nominal_feature("marital_status", form, {"single", "married", "separated"}, {0.5, 0.4, 0.1},
                        {0.4, -0.7, 0.7}),
        numeric_feature("dependants", form, 0.0, 1.2, 1.0, 0),
        numeric_feature("time_at_address", form, 0.0, 30.0, 20.0, 0),
        nominal_feature("phone_type", form, {"mobile", "landline"}, {0.8, 0.2}, {0.0, 0.0}),
        nominal_feature("region", form, {"north", "central", "south"}, {0.4, 0.35, 0.25}, {0.0, 0.0, 0.0}),

        numeric_feature("txn_feature_1", bank, 0.8, 12.0, 6.0),
        numeric_feature("txn_feature_2", bank, -0.75, 420.0, 150.0),
        nominal_feature("credit_card_type_1", bank, yes_no, {0.7, 0.3}, {0.0, -1.4}),
        nominal_feature("bank_1", bank, yes_no, {0.75, 0.25}, {0.0, 1.1}),
        numeric_feature("income_regularity", bank, -0.75, 0.6, 0.2, 3),
        numeric_feature("txn_feature_3", bank, 0.0, 80.0, 30.0),
    };
    for (int i = 2; i <= 4; ++i)
        s.features.push_back(
            nominal_feature("credit_card_type_" + std::to_string(i), bank, yes_no, {0.85, 0.15}, {0.0, 0.0}));
    for (int i = 2; i <= 6; ++i)
        s.features.push_back(nominal_feature("bank_" + std::to_string(i), bank, yes_no, {0.8, 0.2}, {0.0, 0.0}));
    for (int i = 1; i <= 4; ++i)
        s.features.push_back(
            nominal_feature("benefit_type_" + std::to_string(i), bank, yes_no, {0.9, 0.1}, {0.0, 0.0}));
    return s;
}

inline Schema synth_schema(const SynthSpec& spec) {
    Schema schema;
    schema.class_name = "class";
    schema.good_label = "good";
    schema.bad_label = "bad";
    for (const auto& f : spec.features)
        schema.features.push_back({f.name, f.kind, f.group, f.kind == FeatureKind::nominal ? f.categories
                                                                                           : std::vector<std::string>{}});
    return schema;
}

/// Class-conditionally independent draws (unless correlation > 0), exact class
/// counts, instance order shuffled. Deterministic per seed.
inline Dataset generate(const SynthSpec& spec) {
    spec.validate();
    Dataset d;
    d.schema = synth_schema(spec);
    d.schema.validate();

    std::vector<std::vector<double>> p_bad;
    for (const auto& f : spec.features)
        p_bad.push_back(f.kind == FeatureKind::nominal ? spec.p_bad(f) : std::vector<double>{});

    Rng rng(derive_seed(spec.seed, "synth"));
    auto draw_category = [&](const std::vector<double>& p) {
        const double u = rng.uniform();
        double acc = 0.0;
        for (std::size_t c = 0; c < p.size(); ++c) {
            acc += p[c];
            if (u < acc)
                return static_cast<std::uint32_t>(c);
        }
        return static_cast<std::uint32_t>(p.size() - 1);
    };
    const double load = std::sqrt(spec.correlation);
    const double own = std::sqrt(1.0 - spec.correlation);

    auto make = [&](Label label) {
        Instance inst;
        inst.label = label;
        const double latent = rng.normal();
        for (std::size_t j = 0; j < spec.features.size(); ++j) {
            const auto& f = spec.features[j];
            if (f.kind == FeatureKind::nominal) {
                inst.values.emplace_back(Category{draw_category(label == Label::good ? f.p_good : p_bad[j])});
                continue;
            }
            double z = load * latent + own * rng.normal();
            if (label == Label::bad)
                z += spec.signal(f.group) * f.effect;
            const double factor = std::pow(10.0, f.decimals);
            inst.values.emplace_back(std::round((f.offset + f.scale * z) * factor) / factor);
        }
        return inst;
    };

    for (std::size_t i = 0; i < spec.n_good; ++i)
        d.instances.push_back(make(Label::good));
    for (std::size_t i = 0; i < spec.n_bad; ++i)
        d.instances.push_back(make(Label::bad));
    Rng order(derive_seed(spec.seed, "synth-order"));
    order.shuffle(d.instances);
    return d;
}

} // namespace credit
