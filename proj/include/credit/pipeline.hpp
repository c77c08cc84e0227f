#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "classifiers/classifier.hpp"
#include "dataset.hpp"
#include "discretize.hpp"
#include "imbalance.hpp"
#include "rank.hpp"

namespace credit {

enum class ThresholdMode { default_half, f1_optimized, cost_ratio };

struct ThresholdSpec {
    ThresholdMode mode = ThresholdMode::default_half;
    double cost_ratio = 1.0; // used by ThresholdMode::cost_ratio

    bool operator==(const ThresholdSpec&) const = default;
};

/// "half", "f1" or "cost:X".
inline ThresholdSpec parse_threshold_spec(std::string_view s) {
    if (s == "half")
        return {};
    if (s == "f1")
        return {ThresholdMode::f1_optimized, 1.0};
    if (s.starts_with("cost:")) {
        auto x = parse_double(s.substr(5));
        if (!x || !(*x > 0.0) || !std::isfinite(*x))
            throw UsageError("threshold cost ratio must be a positive number");
        return {ThresholdMode::cost_ratio, *x};
    }
    throw UsageError("threshold must be half, f1 or cost:X");
}

struct PipelineSpec {
    RankMetric metric = RankMetric::chi2;
    std::optional<std::size_t> n_features; // empty: keep every feature
    ClassifierSpec classifier;
    ThresholdSpec threshold;
    ContingencyOptions ranking;
    std::size_t threshold_folds = 3;
};

/// Discretizer, selected features, classifier and cutoff, all fitted from the
/// same training data.
struct FittedPipeline {
    Schema schema; // raw input schema
    CutPointModel cuts;
    RankMetric metric = RankMetric::chi2;
    std::vector<std::size_t> selected; // schema indices, ascending
    ClassifierModel model;
    Threshold threshold;
    std::uint64_t seed = 0;
    std::string fingerprint; // of the training data
};

/// Training-side state shared by every classifier and feature count.
struct PreparedTrain {
    CutPointModel cuts;
    Dataset discretized;
    FeatureRanking ranking;
};

inline PreparedTrain prepare_training(const Dataset& train, RankMetric metric, const ContingencyOptions& opts = {}) {
    PreparedTrain p;
    p.cuts = fit_discretizer(train);
    p.discretized = apply_discretization(train, p.cuts);
    p.ranking = rank_features(p.discretized, metric, opts);
    return p;
}

inline std::vector<std::size_t> select_top(const FeatureRanking& ranking, std::size_t n) {
    auto top = ranking.top(n);
    std::sort(top.begin(), top.end());
    return top;
}

/// Classifier input row for one raw instance.
inline Instance model_input(const Instance& raw, const CutPointModel& cuts, const std::vector<std::size_t>& selected,
                            ClassifierKind kind) {
    const bool binned = uses_discretized_inputs(kind);
    Instance out;
    out.label = raw.label;
    out.values.reserve(selected.size());
    for (auto j : selected) {
        const auto& v = raw.values[j];
        const auto* d = std::get_if<double>(&v);
        if (binned && d && cuts.cuts[j])
            out.values.emplace_back(Category{bin_index(*cuts.cuts[j], *d)});
        else
            out.values.push_back(v);
    }
    return out;
}

namespace detail {

inline ClassifierModel fit_on_selection(const Dataset& raw, const PreparedTrain& prep,
                                        const std::vector<std::size_t>& selected, const ClassifierSpec& spec,
                                        std::uint64_t seed) {
    const auto& source = uses_discretized_inputs(spec.kind) ? prep.discretized : raw;
    return fit_classifier(project(source, selected), spec, derive_seed(seed, "classifier"));
}

inline std::size_t resolve_feature_count(const PipelineSpec& spec, std::size_t available) {
    const auto n = spec.n_features.value_or(available);
    if (n == 0 || n > available)
        throw UsageError("feature count " + std::to_string(n) + " outside [1, " + std::to_string(available) + "]");
    return n;
}

} // namespace detail

inline double pipeline_score(const FittedPipeline& p, const Instance& inst) {
    if (auto err = conformance_error(p.schema, inst))
        throw DataError("instance does not match the pipeline schema: " + *err);
    return score(p.model, model_input(inst, p.cuts, p.selected, kind_of(p.model)));
}

inline std::vector<ScoredLabel> score_dataset(const FittedPipeline& p, const Dataset& d) {
    if (!(d.schema == p.schema))
        throw DataError("dataset schema differs from the pipeline schema");
    std::vector<ScoredLabel> out;
    out.reserve(d.size());
    for (const auto& inst : d.instances)
        out.push_back({pipeline_score(p, inst), inst.label});
    return out;
}

/// Fits the discretizer, ranking, selection and classifier on `train` only,
/// then sets the cutoff. The F1 cutoff is chosen on out-of-fold scores from an
/// internal stratified split of `train`; with too few bads for that split the
/// training scores are used instead.
inline FittedPipeline fit_pipeline(const Dataset& train, const PipelineSpec& spec, std::uint64_t seed) {
    train.schema.validate();
    spec.classifier.validate();
    const auto [n_good, n_bad] = class_counts(train);
    if (n_good == 0 || n_bad == 0)
        throw ModelError("fit_pipeline: training data must contain both classes");
    const auto n = detail::resolve_feature_count(spec, train.schema.size());

    const auto prep = prepare_training(train, spec.metric, spec.ranking);
    FittedPipeline p;
    p.schema = train.schema;
    p.cuts = prep.cuts;
    p.metric = spec.metric;
    p.selected = select_top(prep.ranking, n);
    p.model = detail::fit_on_selection(train, prep, p.selected, spec.classifier, seed);
    p.seed = seed;
    p.fingerprint = dataset_fingerprint(train);

    switch (spec.threshold.mode) {
    case ThresholdMode::default_half:
        p.threshold = {0.5, ThresholdProvenance::default_half};
        break;
    case ThresholdMode::cost_ratio:
        p.threshold = cost_threshold({spec.threshold.cost_ratio});
        break;
    case ThresholdMode::f1_optimized: {
        const std::size_t k = spec.threshold_folds;
        std::vector<ScoredLabel> scored;
        if (k >= 2 && std::min(n_good, n_bad) >= k) {
            PipelineSpec inner = spec;
            inner.threshold = {};
            const auto folds = stratified_folds(train, k, derive_seed(seed, "threshold-folds"));
            std::vector<std::optional<ScoredLabel>> oof(train.size());
            for (std::size_t f = 0; f < k; ++f) {
                const auto fitted = fit_pipeline(subset(train, folds.complement(f)), inner,
                                                 derive_seed(seed, "threshold-fit", f));
                for (auto i : folds.members(f))
                    oof[i] = ScoredLabel{pipeline_score(fitted, train.instances[i]), train.instances[i].label};
            }
            for (auto& s : oof)
                scored.push_back(*s);
        } else {
            for (const auto& inst : train.instances)
                scored.push_back({pipeline_score(p, inst), inst.label});
        }
        p.threshold = select_threshold_f1(scored);
        break;
    }
    }
    return p;
}

} // namespace credit
