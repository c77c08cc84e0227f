#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "metrics.hpp"
#include "parallel.hpp"
#include "pipeline.hpp"

namespace credit {

struct FoldResult {
    std::size_t fold = 0;
    std::size_t n_test = 0;
    ConfusionMatrix confusion;
    MetricSet metrics;
    double auc = 0.0;
    Threshold threshold;
};

struct CvResult {
    std::vector<FoldResult> folds;
    double mean_auc = 0.0;
    std::vector<ScoredLabel> out_of_fold; // in instance order
    RocCurve pooled_curve;
    double pooled_auc = 0.0;
    ConfusionMatrix pooled_confusion;
};

/// Stratified k-fold evaluation of a full pipeline; every fold refits the
/// discretizer, ranking and classifier on its training part. Folds run on up to
/// `threads` workers and are reduced in fold order.
inline CvResult cross_validate(const Dataset& d, const PipelineSpec& spec, std::size_t k, std::uint64_t seed,
                               std::size_t threads = 1) {
    const auto folds = stratified_folds(d, k, derive_seed(seed, "cv-folds"));
    struct FoldOutput {
        FoldResult result;
        std::vector<std::pair<std::size_t, ScoredLabel>> scored;
    };
    auto outputs = parallel_map(k, threads, [&](std::size_t f) {
        const auto pipeline = fit_pipeline(subset(d, folds.complement(f)), spec, derive_seed(seed, "cv-fit", f));
        FoldOutput out;
        std::vector<ScoredLabel> scored;
        for (auto i : folds.members(f)) {
            const ScoredLabel s{pipeline_score(pipeline, d.instances[i]), d.instances[i].label};
            scored.push_back(s);
            out.scored.emplace_back(i, s);
        }
        out.result.fold = f;
        out.result.n_test = scored.size();
        out.result.threshold = pipeline.threshold;
        out.result.confusion = confusion(scored, pipeline.threshold);
        out.result.metrics = metrics(out.result.confusion);
        out.result.auc = auc(scored);
        return out;
    });

    CvResult cv;
    cv.out_of_fold.resize(d.size());
    double sum = 0.0;
    for (auto& o : outputs) {
        sum += o.result.auc;
        cv.pooled_confusion += o.result.confusion;
        for (const auto& [i, s] : o.scored)
            cv.out_of_fold[i] = s;
        cv.folds.push_back(std::move(o.result));
    }
    cv.mean_auc = sum / static_cast<double>(k);
    cv.pooled_curve = roc_curve(cv.out_of_fold);
    cv.pooled_auc = auc(cv.pooled_curve);
    return cv;
}

struct FeatureSweepRow {
    std::size_t n_features = 0;
    std::vector<double> mean_auc; // one per classifier, in request order
};

struct FeatureSweep {
    std::vector<ClassifierSpec> classifiers;
    std::vector<FeatureSweepRow> rows; // n_features from m down to 1
};

/// Cross-validated mean AUC for every feature count m..1 and classifier. The
/// ranking is recomputed inside each training fold; the classifier at count n
/// is fitted exactly as fit_pipeline would with n_features = n.
inline FeatureSweep feature_sweep(const Dataset& d, const std::vector<ClassifierSpec>& classifiers, RankMetric metric,
                                  std::size_t k, std::uint64_t seed, std::size_t threads = 1) {
    const std::size_t m = d.schema.size();
    const auto folds = stratified_folds(d, k, derive_seed(seed, "cv-folds"));
    // per fold: [classifier][m - n] -> AUC
    auto per_fold = parallel_map(k, threads, [&](std::size_t f) {
        const auto train = subset(d, folds.complement(f));
        const auto test = folds.members(f);
        const auto prep = prepare_training(train, metric);
        const auto fold_seed = derive_seed(seed, "cv-fit", f);
        std::vector<std::vector<double>> aucs(classifiers.size(), std::vector<double>(m, 0.0));
        for (std::size_t c = 0; c < classifiers.size(); ++c) {
            for (std::size_t n = m; n >= 1; --n) {
                const auto selected = select_top(prep.ranking, n);
                const auto model = detail::fit_on_selection(train, prep, selected, classifiers[c], fold_seed);
                std::vector<ScoredLabel> scored;
                for (auto i : test)
                    scored.push_back({score(model, model_input(d.instances[i], prep.cuts, selected, classifiers[c].kind)),
                                      d.instances[i].label});
                aucs[c][m - n] = auc(scored);
            }
        }
        return aucs;
    });

    FeatureSweep sweep;
    sweep.classifiers = classifiers;
    for (std::size_t n = m; n >= 1; --n) {
        FeatureSweepRow row;
        row.n_features = n;
        for (std::size_t c = 0; c < classifiers.size(); ++c) {
            double sum = 0.0;
            for (const auto& fold : per_fold)
                sum += fold[c][m - n];
            row.mean_auc.push_back(sum / static_cast<double>(k));
        }
        sweep.rows.push_back(std::move(row));
    }
    return sweep;
}

/// Table-4 style row for one cost ratio.
struct CostSweepRow {
    double ratio = 1.0;
    double threshold = 0.5;
    std::optional<double> accuracy;
    std::optional<double> tp_rate;
    std::size_t goods_correct = 0;
    std::optional<double> tn_rate;
    std::size_t bads_correct = 0;
};

inline std::vector<CostSweepRow> cost_sweep(std::span<const ScoredLabel> scored, const std::vector<double>& ratios) {
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        if (!(ratios[i] > 0.0))
            throw UsageError("cost ratios must be positive");
        if (i > 0 && !(ratios[i] > ratios[i - 1]))
            throw UsageError("cost ratios must be strictly ascending");
    }
    std::vector<CostSweepRow> rows;
    for (double x : ratios) {
        const auto t = cost_threshold({x});
        const auto cm = confusion(scored, t);
        const auto ms = metrics(cm);
        rows.push_back({x, t.value, ms.accuracy, ms.tp_rate, cm.tp, ms.tn_rate, cm.tn});
    }
    return rows;
}

inline std::vector<CostSweepRow> cost_sweep(const FittedPipeline& p, const Dataset& test,
                                            const std::vector<double>& ratios) {
    const auto scored = score_dataset(p, test);
    return cost_sweep(scored, ratios);
}

// ---------------------------------------------------------------------------
// CSV output

inline std::string format_optional(const std::optional<double>& v) { return v ? format_double(*v) : "NA"; }

inline void write_metrics_csv(std::ostream& out, const CvResult& cv) {
    out << "fold,n_test,tp,fp,tn,fn,accuracy,tp_rate,tn_rate,fp_rate,precision,recall,f1,auc,threshold\n";
    auto row = [&](const std::string& label, std::size_t n, const ConfusionMatrix& cm, const MetricSet& ms,
                   const std::string& auc_text, const std::string& threshold) {
        out << label << ',' << n << ',' << cm.tp << ',' << cm.fp << ',' << cm.tn << ',' << cm.fn << ','
            << format_optional(ms.accuracy) << ',' << format_optional(ms.tp_rate) << ','
            << format_optional(ms.tn_rate) << ',' << format_optional(ms.fp_rate) << ','
            << format_optional(ms.precision) << ',' << format_optional(ms.recall) << ',' << format_optional(ms.f1)
            << ',' << auc_text << ',' << threshold << '\n';
    };
    for (const auto& f : cv.folds)
        row(std::to_string(f.fold), f.n_test, f.confusion, f.metrics, format_double(f.auc),
            format_double(f.threshold.value));
    row("pooled", cv.pooled_confusion.total(), cv.pooled_confusion, metrics(cv.pooled_confusion),
        format_double(cv.pooled_auc), "NA");
    // Fold means over the folds where each metric is defined.
    auto mean = [&](auto member) {
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& f : cv.folds)
            if (const auto& v = f.metrics.*member) {
                sum += *v;
                ++n;
            }
        return n ? format_double(sum / static_cast<double>(n)) : std::string("NA");
    };
    out << "mean," << cv.pooled_confusion.total() << ",NA,NA,NA,NA," << mean(&MetricSet::accuracy) << ','
        << mean(&MetricSet::tp_rate) << ',' << mean(&MetricSet::tn_rate) << ',' << mean(&MetricSet::fp_rate) << ','
        << mean(&MetricSet::precision) << ',' << mean(&MetricSet::recall) << ',' << mean(&MetricSet::f1) << ','
        << format_double(cv.mean_auc) << ",NA\n";
}

inline void write_feature_sweep_csv(std::ostream& out, const FeatureSweep& s) {
    out << "n_features";
    for (const auto& c : s.classifiers)
        out << ',' << to_string(c.kind);
    out << '\n';
    for (const auto& r : s.rows) {
        out << r.n_features;
        for (double a : r.mean_auc)
            out << ',' << format_double(a);
        out << '\n';
    }
}

/// Columns of the cost-ratio table: x, accuracy, TP rate, goods correct, TN rate, bads correct.
inline void write_cost_sweep_csv(std::ostream& out, const std::vector<CostSweepRow>& rows) {
    out << "x,accuracy,tp_rate,goods_correct,tn_rate,bads_correct\n";
    for (const auto& r : rows)
        out << format_double(r.ratio) << ',' << format_optional(r.accuracy) << ',' << format_optional(r.tp_rate)
            << ',' << r.goods_correct << ',' << format_optional(r.tn_rate) << ',' << r.bads_correct << '\n';
}

} // namespace credit
