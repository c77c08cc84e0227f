#pragma once

#include <algorithm>
#include <array>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "discretize.hpp"

namespace credit {

enum class RankMetric { chi2, infogain };

inline std::string_view to_string(RankMetric m) { return m == RankMetric::chi2 ? "chi2" : "infogain"; }

/// Bin x class table; column 0 = bad, column 1 = good.
using ContingencyTable = std::vector<std::array<std::size_t, 2>>;

struct ContingencyOptions {
    bool missing_as_bin = false;
};

inline ContingencyTable contingency(const Dataset& d, std::size_t feature, const ContingencyOptions& opts = {}) {
    if (feature >= d.schema.size())
        throw UsageError("contingency: feature index out of range");
    const auto& f = d.schema.features[feature];
    if (f.kind != FeatureKind::nominal)
        throw UsageError("contingency: feature '" + f.name + "' is not nominal; discretize first");
    ContingencyTable table(f.categories.size() + (opts.missing_as_bin ? 1 : 0), {0, 0});
    for (const auto& inst : d.instances) {
        const auto& v = inst.values[feature];
        if (const auto* c = std::get_if<Category>(&v))
            ++table[c->index][label_index(inst.label)];
        else if (opts.missing_as_bin)
            ++table.back()[label_index(inst.label)];
    }
    return table;
}

/// Pearson chi-squared, summed over cells with positive expected count. No Yates correction.
inline double chi_squared(const ContingencyTable& table) {
    std::array<double, 2> col{0.0, 0.0};
    double n = 0.0;
    for (const auto& row : table)
        for (std::size_t c = 0; c < 2; ++c) {
            col[c] += static_cast<double>(row[c]);
            n += static_cast<double>(row[c]);
        }
    if (n == 0.0)
        return 0.0;
    double stat = 0.0;
    for (const auto& row : table) {
        const double row_total = static_cast<double>(row[0] + row[1]);
        for (std::size_t c = 0; c < 2; ++c) {
            const double expected = row_total * col[c] / n;
            if (expected <= 0.0)
                continue;
            const double diff = static_cast<double>(row[c]) - expected;
            stat += diff * diff / expected;
        }
    }
    return stat;
}

/// H(class) - sum_b (n_b / N) H(class | b), in bits.
inline double info_gain(const ContingencyTable& table) {
    std::array<std::size_t, 2> total{0, 0};
    for (const auto& row : table) {
        total[0] += row[0];
        total[1] += row[1];
    }
    const double n = static_cast<double>(total[0] + total[1]);
    if (n == 0.0)
        return 0.0;
    double conditional = 0.0;
    for (const auto& row : table) {
        const auto nb = row[0] + row[1];
        if (nb == 0)
            continue;
        conditional += static_cast<double>(nb) / n * entropy(row);
    }
    return std::max(0.0, entropy(total) - conditional);
}

inline double chi_squared(const Dataset& d, std::size_t feature, const ContingencyOptions& opts = {}) {
    return chi_squared(contingency(d, feature, opts));
}

inline double info_gain(const Dataset& d, std::size_t feature, const ContingencyOptions& opts = {}) {
    return info_gain(contingency(d, feature, opts));
}

struct RankedFeature {
    std::size_t feature = 0; // schema index
    std::string name;
    double statistic = 0.0;

    bool operator==(const RankedFeature&) const = default;
};

struct FeatureRanking {
    RankMetric metric = RankMetric::chi2;
    std::vector<RankedFeature> entries; // descending by statistic

    /// Schema indices of the top n features, in rank order.
    std::vector<std::size_t> top(std::size_t n) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < std::min(n, entries.size()); ++i)
            out.push_back(entries[i].feature);
        return out;
    }

    bool operator==(const FeatureRanking&) const = default;
};

/// Ranks every feature of a discretized dataset; ties keep schema order.
inline FeatureRanking rank_features(const Dataset& d, RankMetric metric, const ContingencyOptions& opts = {}) {
    FeatureRanking r;
    r.metric = metric;
    for (std::size_t j = 0; j < d.schema.size(); ++j) {
        auto table = contingency(d, j, opts);
        const double stat = metric == RankMetric::chi2 ? chi_squared(table) : info_gain(table);
        r.entries.push_back({j, d.schema.features[j].name, stat});
    }
    std::stable_sort(r.entries.begin(), r.entries.end(),
                     [](const auto& a, const auto& b) { return a.statistic > b.statistic; });
    return r;
}

/// `rank,feature,group,statistic`
inline void write_ranking_csv(std::ostream& out, const FeatureRanking& r, const Schema& schema) {
    out << "rank,feature,group,statistic\n";
    for (std::size_t i = 0; i < r.entries.size(); ++i) {
        const auto& e = r.entries[i];
        out << (i + 1) << ',' << csv_escape(e.name) << ',' << to_string(schema.features[e.feature].group) << ','
            << format_double(e.statistic) << '\n';
    }
}

} // namespace credit
