#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "rng.hpp"

namespace credit {

struct ScoredLabel {
    double score = 0.0; // P(good)
    Label label = Label::good;
};

/// Cost of accepting a bad relative to rejecting a good (which costs 1).
struct CostMatrix {
    double false_positive_cost = 1.0;
};

enum class ThresholdProvenance { default_half, f1_optimized, cost_ratio };

inline std::string_view to_string(ThresholdProvenance p) {
    switch (p) {
    case ThresholdProvenance::default_half: return "default_half";
    case ThresholdProvenance::f1_optimized: return "f1_optimized";
    case ThresholdProvenance::cost_ratio: return "cost_ratio";
    }
    return "?";
}

/// Decision rule: good iff score > value.
struct Threshold {
    double value = 0.5;
    ThresholdProvenance provenance = ThresholdProvenance::default_half;

    bool operator==(const Threshold&) const = default;
};

inline Label classify(double score, const Threshold& t) { return score > t.value ? Label::good : Label::bad; }

/// Minimum expected cost cutoff: predict good iff P(good) > x / (1 + x).
inline Threshold cost_threshold(const CostMatrix& c) {
    const double x = c.false_positive_cost;
    if (!(x > 0.0) || !std::isfinite(x))
        throw UsageError("cost ratio must be positive and finite");
    return {x / (1.0 + x), ThresholdProvenance::cost_ratio};
}

/// F1 of the bad class when everything scoring <= t is called bad. 0 when no bad is found.
inline double bad_class_f1(std::span<const ScoredLabel> scored, double t) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (const auto& s : scored) {
        const bool predicted_bad = !(s.score > t);
        if (s.label == Label::bad)
            predicted_bad ? ++tp : ++fn;
        else if (predicted_bad)
            ++fp;
    }
    if (tp == 0)
        return 0.0;
    return 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

/// Candidate cutoffs: 0, midpoints between adjacent distinct scores, 1.
inline std::vector<double> threshold_candidates(std::span<const ScoredLabel> scored) {
    std::vector<double> scores;
    for (const auto& s : scored)
        scores.push_back(s.score);
    std::sort(scores.begin(), scores.end());
    scores.erase(std::unique(scores.begin(), scores.end()), scores.end());
    std::vector<double> out{0.0};
    for (std::size_t i = 0; i + 1 < scores.size(); ++i)
        out.push_back((scores[i] + scores[i + 1]) / 2.0);
    out.push_back(1.0);
    std::sort(out.begin(), out.end());
    return out;
}

/// Maximizes bad-class F1 over the candidate cutoffs; ties go to the larger cutoff.
inline Threshold select_threshold_f1(std::span<const ScoredLabel> scored) {
    std::size_t n_bad = 0;
    for (const auto& s : scored)
        n_bad += s.label == Label::bad;
    if (n_bad == 0 || n_bad == scored.size())
        throw ModelError("threshold selection needs both classes");

    std::vector<ScoredLabel> sorted(scored.begin(), scored.end());
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.score < b.score; });

    // Sweep candidates upward, moving instances with score <= t into the "bad" side.
    std::size_t tp = 0, fp = 0, pos = 0;
    double best_t = 0.0;
    double best_f1 = -1.0;
    for (double t : threshold_candidates(scored)) {
        while (pos < sorted.size() && !(sorted[pos].score > t)) {
            sorted[pos].label == Label::bad ? ++tp : ++fp;
            ++pos;
        }
        const std::size_t fn = n_bad - tp;
        const double f1 = tp == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
        if (f1 >= best_f1) {
            best_f1 = f1;
            best_t = t;
        }
    }
    return {best_t, ThresholdProvenance::f1_optimized};
}

// ---------------------------------------------------------------------------
// SMOTE

struct SmoteOptions {
    std::size_t percent = 100; // multiple of 100: synthetics per minority instance = percent / 100
    std::size_t k = 5;
};

/// Appends synthetic minority instances interpolated towards one of each
/// instance's k nearest minority neighbours (Euclidean on min-max scaled
/// numerics). Originals and the majority class are left untouched.
inline Dataset smote(const Dataset& d, const SmoteOptions& opts, std::uint64_t seed) {
    if (opts.percent % 100 != 0)
        throw UsageError("smote: percent must be a multiple of 100");
    if (opts.k == 0)
        throw UsageError("smote: k must be positive");
    const auto [n_good, n_bad] = class_counts(d);
    const Label minority = n_bad <= n_good ? Label::bad : Label::good;
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < d.size(); ++i)
        if (d.instances[i].label == minority)
            members.push_back(i);
    if (members.size() <= opts.k)
        throw DataError("smote: minority class has " + std::to_string(members.size()) +
                        " instances, needs more than k=" + std::to_string(opts.k));

    Dataset out = d;
    if (opts.percent == 0)
        return out;

    const auto width = d.schema.size();
    std::vector<double> low(width, 0.0), high(width, 0.0);
    for (std::size_t j = 0; j < width; ++j) {
        if (d.schema.features[j].kind != FeatureKind::numeric)
            continue;
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& inst : d.instances)
            if (const auto* v = std::get_if<double>(&inst.values[j])) {
                lo = std::min(lo, *v);
                hi = std::max(hi, *v);
            }
        if (lo <= hi) {
            low[j] = lo;
            high[j] = hi;
        }
    }
    auto distance2 = [&](const Instance& a, const Instance& b) {
        double d2 = 0.0;
        for (std::size_t j = 0; j < width; ++j) {
            if (d.schema.features[j].kind != FeatureKind::numeric)
                continue;
            const auto* x = std::get_if<double>(&a.values[j]);
            const auto* y = std::get_if<double>(&b.values[j]);
            if (!x || !y) {
                d2 += (x || y) ? 1.0 : 0.0;
                continue;
            }
            const double range = high[j] - low[j];
            const double diff = range > 0.0 ? (*x - *y) / range : 0.0;
            d2 += diff * diff;
        }
        return d2;
    };

    Rng rng(derive_seed(seed, "smote"));
    const std::size_t per_instance = opts.percent / 100;
    for (auto base_idx : members) {
        const auto& base = d.instances[base_idx];
        std::vector<std::pair<double, std::size_t>> dist;
        for (auto other : members)
            if (other != base_idx)
                dist.emplace_back(distance2(base, d.instances[other]), other);
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(opts.k), dist.end());
        for (std::size_t s = 0; s < per_instance; ++s) {
            const auto& neighbour = d.instances[dist[rng.index(opts.k)].second];
            Instance synth;
            synth.label = minority;
            synth.values.reserve(width);
            for (std::size_t j = 0; j < width; ++j) {
                const auto* x = std::get_if<double>(&base.values[j]);
                const auto* y = std::get_if<double>(&neighbour.values[j]);
                if (x && y) {
                    const double gap = rng.uniform();
                    synth.values.emplace_back(std::clamp(*x + gap * (*y - *x), std::min(*x, *y), std::max(*x, *y)));
                } else {
                    // Majority of the pair {base, neighbour}; a disagreement is a tie and keeps the base.
                    synth.values.push_back(base.values[j]);
                }
            }
            out.instances.push_back(std::move(synth));
        }
    }
    return out;
}

} // namespace credit
