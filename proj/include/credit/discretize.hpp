#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dataset.hpp"

namespace credit {

/// Shannon entropy in bits of a class-count vector. 0 log 0 is taken as 0.
inline double entropy(std::span<const std::size_t> counts) {
    std::size_t total = 0;
    for (auto c : counts)
        total += c;
    if (total == 0)
        throw UsageError("entropy: all counts are zero");
    double h = 0.0;
    for (auto c : counts) {
        if (c == 0)
            continue;
        const double p = static_cast<double>(c) / static_cast<double>(total);
        h -= p * std::log2(p);
    }
    return h;
}

inline double entropy(std::initializer_list<std::size_t> counts) {
    return entropy(std::span<const std::size_t>(counts.begin(), counts.size()));
}

namespace detail {

struct ValueGroup {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::array<std::size_t, 2> counts{0, 0};

    bool pure() const { return counts[0] == 0 || counts[1] == 0; }
};

inline std::size_t classes_present(const std::array<std::size_t, 2>& c) {
    return static_cast<std::size_t>(c[0] > 0) + static_cast<std::size_t>(c[1] > 0);
}

// Recursive MDLP split over groups [first, last) of sorted distinct values.
inline void mdlp_split(const std::vector<ValueGroup>& groups, std::span<const double> sorted,
                       std::size_t first, std::size_t last, std::vector<double>& cuts) {
    if (last - first < 2)
        return;
    std::array<std::size_t, 2> total{0, 0};
    for (auto g = first; g < last; ++g) {
        total[0] += groups[g].counts[0];
        total[1] += groups[g].counts[1];
    }
    const std::size_t n = total[0] + total[1];
    const double h_all = entropy(total);
    if (h_all == 0.0)
        return;

    std::array<std::size_t, 2> left{0, 0};
    std::optional<std::size_t> best; // index of the last group on the left side
    double best_weighted = 0.0;
    std::array<std::size_t, 2> best_left{}, best_right{};
    for (auto g = first; g + 1 < last; ++g) {
        left[0] += groups[g].counts[0];
        left[1] += groups[g].counts[1];
        const auto& a = groups[g];
        const auto& b = groups[g + 1];
        // Non-boundary: both neighbouring groups pure with the same class.
        if (a.pure() && b.pure() && (a.counts[0] > 0) == (b.counts[0] > 0))
            continue;
        const std::array<std::size_t, 2> right{total[0] - left[0], total[1] - left[1]};
        const double nl = static_cast<double>(left[0] + left[1]);
        const double nr = static_cast<double>(right[0] + right[1]);
        const double weighted = (nl * entropy(left) + nr * entropy(right)) / static_cast<double>(n);
        if (!best || weighted < best_weighted) {
            best = g;
            best_weighted = weighted;
            best_left = left;
            best_right = right;
        }
    }
    if (!best)
        return;

    const double gain = h_all - best_weighted;
    const double k = static_cast<double>(classes_present(total));
    const double k1 = static_cast<double>(classes_present(best_left));
    const double k2 = static_cast<double>(classes_present(best_right));
    const double nd = static_cast<double>(n);
    const double delta = std::log2(std::pow(3.0, k) - 2.0) -
                         (k * h_all - k1 * entropy(best_left) - k2 * entropy(best_right));
    if (!(gain > (std::log2(nd - 1.0) + delta) / nd))
        return;

    const auto g = *best;
    cuts.push_back((sorted[groups[g].end - 1] + sorted[groups[g + 1].begin]) / 2.0);
    mdlp_split(groups, sorted, first, g + 1, cuts);
    mdlp_split(groups, sorted, g + 1, last, cuts);
}

} // namespace detail

/// Fayyad-Irani multi-interval discretization with the MDL stopping rule.
/// Missing values must already be excluded. Returns strictly increasing cuts.
inline std::vector<double> fit_cut_points(std::span<const double> values, std::span<const Label> labels) {
    if (values.size() != labels.size())
        throw UsageError("fit_cut_points: values and labels differ in length");
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });

    std::vector<double> sorted(values.size());
    std::vector<detail::ValueGroup> groups;
    for (std::size_t i = 0; i < order.size(); ++i) {
        sorted[i] = values[order[i]];
        if (groups.empty() || sorted[i] != sorted[i - 1])
            groups.push_back({i, i, {0, 0}});
        auto& g = groups.back();
        g.end = i + 1;
        ++g.counts[label_index(labels[order[i]])];
    }

    std::vector<double> cuts;
    detail::mdlp_split(groups, sorted, 0, groups.size(), cuts);
    std::sort(cuts.begin(), cuts.end());
    return cuts;
}

/// Per-feature cut lists; nominal features carry no entry.
struct CutPointModel {
    std::vector<std::optional<std::vector<double>>> cuts;

    bool operator==(const CutPointModel&) const = default;
};

inline std::string bin_label(const std::vector<double>& cuts, std::size_t bin) {
    if (cuts.empty())
        return "all";
    if (bin == 0)
        return "(-inf," + format_double(cuts.front()) + "]";
    if (bin == cuts.size())
        return "(" + format_double(cuts.back()) + ",+inf)";
    return "(" + format_double(cuts[bin - 1]) + "," + format_double(cuts[bin]) + "]";
}

/// Bin i holds values v with cut[i-1] < v <= cut[i].
inline std::uint32_t bin_index(const std::vector<double>& cuts, double v) {
    return static_cast<std::uint32_t>(std::lower_bound(cuts.begin(), cuts.end(), v) - cuts.begin());
}

/// Fits cut points for every numeric feature from the given data only.
inline CutPointModel fit_discretizer(const Dataset& d) {
    CutPointModel model;
    model.cuts.resize(d.schema.size());
    for (std::size_t j = 0; j < d.schema.size(); ++j) {
        if (d.schema.features[j].kind != FeatureKind::numeric)
            continue;
        std::vector<double> values;
        std::vector<Label> labels;
        for (const auto& inst : d.instances) {
            if (const auto* v = std::get_if<double>(&inst.values[j])) {
                values.push_back(*v);
                labels.push_back(inst.label);
            }
        }
        model.cuts[j] = values.empty() ? std::vector<double>{} : fit_cut_points(values, labels);
    }
    return model;
}

inline void check_model_covers(const Schema& schema, const CutPointModel& m) {
    if (m.cuts.size() != schema.size())
        throw ModelError("discretizer covers " + std::to_string(m.cuts.size()) + " features, schema has " +
                         std::to_string(schema.size()));
    for (std::size_t j = 0; j < schema.size(); ++j) {
        const bool numeric = schema.features[j].kind == FeatureKind::numeric;
        if (numeric != m.cuts[j].has_value())
            throw ModelError("discretizer does not match feature '" + schema.features[j].name + "'");
    }
}

inline Schema discretized_schema(const Schema& schema, const CutPointModel& m) {
    check_model_covers(schema, m);
    Schema out = schema;
    for (std::size_t j = 0; j < schema.size(); ++j) {
        if (!m.cuts[j])
            continue;
        auto& f = out.features[j];
        f.kind = FeatureKind::nominal;
        f.categories.clear();
        for (std::size_t b = 0; b <= m.cuts[j]->size(); ++b)
            f.categories.push_back(bin_label(*m.cuts[j], b));
    }
    return out;
}

inline Instance discretize_instance(const Instance& inst, const CutPointModel& m) {
    Instance out = inst;
    for (std::size_t j = 0; j < m.cuts.size(); ++j) {
        if (!m.cuts[j])
            continue;
        if (const auto* v = std::get_if<double>(&inst.values[j]))
            out.values[j] = Category{bin_index(*m.cuts[j], *v)};
    }
    return out;
}

inline Dataset apply_discretization(const Dataset& d, const CutPointModel& m) {
    Dataset out;
    out.schema = discretized_schema(d.schema, m);
    out.instances.reserve(d.size());
    for (const auto& inst : d.instances)
        out.instances.push_back(discretize_instance(inst, m));
    return out;
}

} // namespace credit
