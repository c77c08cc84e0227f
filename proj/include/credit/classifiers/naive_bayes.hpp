#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "../dataset.hpp"
#include "../serialize.hpp"
#include "spec.hpp"

namespace credit {

/// Categorical naive Bayes over nominal (discretized) inputs.
struct NaiveBayesModel {
    std::array<double, 2> prior{0.5, 0.5};                       // indexed by label_index
    std::vector<std::vector<std::array<double, 2>>> conditional; // [feature][bin][class]

    /// Normalized {P(bad|x), P(good|x)}. Missing values drop their factor.
    std::array<double, 2> posterior(const Instance& inst) const {
        if (inst.values.size() != conditional.size())
            throw ModelError("naive_bayes: instance width mismatch");
        double log_odds = std::log(prior[1]) - std::log(prior[0]); // good over bad
        for (std::size_t j = 0; j < conditional.size(); ++j) {
            const auto* c = std::get_if<Category>(&inst.values[j]);
            if (!c)
                continue;
            if (c->index >= conditional[j].size())
                throw ModelError("naive_bayes: category out of range");
            const auto& p = conditional[j][c->index];
            log_odds += std::log(p[1]) - std::log(p[0]);
        }
        const double good = 1.0 / (1.0 + std::exp(-log_odds));
        const double bad = 1.0 / (1.0 + std::exp(log_odds));
        return {bad, good};
    }

    double score(const Instance& inst) const { return posterior(inst)[1]; }

    void write(RecordWriter& w) const {
        w.numbers("prior", {prior[0], prior[1]});
        w.line("features", {std::to_string(conditional.size())});
        for (const auto& feature : conditional) {
            std::vector<double> flat;
            for (const auto& bin : feature) {
                flat.push_back(bin[0]);
                flat.push_back(bin[1]);
            }
            w.numbers("conditional", flat);
        }
    }

    static NaiveBayesModel read(RecordReader& r) {
        NaiveBayesModel m;
        auto p = r.numbers("prior", 2);
        m.prior = {p[0], p[1]};
        const auto n = r.count("features");
        for (std::size_t j = 0; j < n; ++j) {
            auto flat = r.numbers("conditional");
            if (flat.size() % 2 != 0 || flat.empty())
                throw ModelError("model file: malformed conditional table");
            std::vector<std::array<double, 2>> bins;
            for (std::size_t b = 0; b < flat.size(); b += 2)
                bins.push_back({flat[b], flat[b + 1]});
            m.conditional.push_back(std::move(bins));
        }
        return m;
    }

    bool operator==(const NaiveBayesModel&) const = default;
};

/// Laplace-smoothed class priors and per-bin class conditionals.
inline NaiveBayesModel fit_naive_bayes(const Dataset& train, const ClassifierSpec& spec) {
    const double alpha = spec.laplace;
    NaiveBayesModel m;
    const auto [n_good, n_bad] = class_counts(train);
    const double n = static_cast<double>(n_good + n_bad);
    m.prior[label_index(Label::good)] = (static_cast<double>(n_good) + alpha) / (n + 2.0 * alpha);
    m.prior[label_index(Label::bad)] = (static_cast<double>(n_bad) + alpha) / (n + 2.0 * alpha);

    for (std::size_t j = 0; j < train.schema.size(); ++j) {
        const auto& f = train.schema.features[j];
        if (f.kind != FeatureKind::nominal)
            throw ModelError("naive_bayes: feature '" + f.name + "' must be discretized");
        const auto bins = f.categories.size();
        std::vector<std::array<double, 2>> counts(bins, {0.0, 0.0});
        std::array<double, 2> known{0.0, 0.0};
        for (const auto& inst : train.instances)
            if (const auto* c = std::get_if<Category>(&inst.values[j])) {
                counts[c->index][label_index(inst.label)] += 1.0;
                known[label_index(inst.label)] += 1.0;
            }
        for (auto& row : counts)
            for (std::size_t c = 0; c < 2; ++c)
                row[c] = (row[c] + alpha) / (known[c] + alpha * static_cast<double>(bins));
        m.conditional.push_back(std::move(counts));
    }
    return m;
}

} // namespace credit
