#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "dataset.hpp"
#include "imbalance.hpp"

namespace credit {

/// Positive class is good: tp = goods classified good, tn = bads classified bad.
struct ConfusionMatrix {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

    std::size_t total() const { return tp + fp + tn + fn; }
    std::size_t goods() const { return tp + fn; }
    std::size_t bads() const { return tn + fp; }

    ConfusionMatrix& operator+=(const ConfusionMatrix& o) {
        tp += o.tp;
        fp += o.fp;
        tn += o.tn;
        fn += o.fn;
        return *this;
    }
    bool operator==(const ConfusionMatrix&) const = default;
};

struct Prediction {
    Label predicted;
    Label actual;
};

inline ConfusionMatrix confusion(std::span<const Prediction> pairs) {
    ConfusionMatrix m;
    for (const auto& p : pairs) {
        if (p.actual == Label::good)
            p.predicted == Label::good ? ++m.tp : ++m.fn;
        else
            p.predicted == Label::bad ? ++m.tn : ++m.fp;
    }
    return m;
}

inline ConfusionMatrix confusion(std::span<const ScoredLabel> scored, const Threshold& t) {
    std::vector<Prediction> pairs;
    pairs.reserve(scored.size());
    for (const auto& s : scored)
        pairs.push_back({classify(s.score, t), s.label});
    return confusion(pairs);
}

/// Undefined ratios (zero denominators) are left empty rather than zeroed.
struct MetricSet {
    std::optional<double> accuracy, tp_rate, tn_rate, fp_rate, precision, recall, f1;
    Label designated = Label::bad; // class that precision / recall / f1 refer to
};

namespace detail {
inline std::optional<double> ratio(std::size_t num, std::size_t den) {
    if (den == 0)
        return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
}
} // namespace detail

inline MetricSet metrics(const ConfusionMatrix& m, Label designated = Label::bad) {
    MetricSet s;
    s.designated = designated;
    s.accuracy = detail::ratio(m.tp + m.tn, m.total());
    s.tp_rate = detail::ratio(m.tp, m.tp + m.fn);
    s.tn_rate = detail::ratio(m.tn, m.tn + m.fp);
    s.fp_rate = detail::ratio(m.fp, m.tn + m.fp);
    if (designated == Label::good) {
        s.precision = detail::ratio(m.tp, m.tp + m.fp);
        s.recall = s.tp_rate;
    } else {
        s.precision = detail::ratio(m.tn, m.tn + m.fn);
        s.recall = s.tn_rate;
    }
    if (s.precision && s.recall && (*s.precision + *s.recall) > 0.0)
        s.f1 = 2.0 * *s.precision * *s.recall / (*s.precision + *s.recall);
    return s;
}

// ---------------------------------------------------------------------------
// ROC

struct RocPoint {
    double threshold = 0.0;    // the point classifies good iff score >= threshold
    std::size_t fp_count = 0; // bads scored at or above the threshold
    std::size_t tp_count = 0; // goods scored at or above the threshold
};

/// Points run from (0,0) to (1,1); tied scores advance in a single diagonal step.
struct RocCurve {
    std::vector<RocPoint> points;
    std::size_t n_good = 0;
    std::size_t n_bad = 0;

    double fp_rate(const RocPoint& p) const { return static_cast<double>(p.fp_count) / static_cast<double>(n_bad); }
    double tp_rate(const RocPoint& p) const { return static_cast<double>(p.tp_count) / static_cast<double>(n_good); }
};

inline RocCurve roc_curve(std::span<const ScoredLabel> scored) {
    RocCurve c;
    for (const auto& s : scored)
        s.label == Label::good ? ++c.n_good : ++c.n_bad;
    if (c.n_good == 0 || c.n_bad == 0)
        throw ModelError("roc_curve needs both classes");
    std::vector<ScoredLabel> sorted(scored.begin(), scored.end());
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.score > b.score; });
    c.points.push_back({std::numeric_limits<double>::infinity(), 0, 0});
    std::size_t fp = 0, tp = 0;
    for (std::size_t i = 0; i < sorted.size();) {
        const double s = sorted[i].score;
        for (; i < sorted.size() && sorted[i].score == s; ++i)
            sorted[i].label == Label::good ? ++tp : ++fp;
        c.points.push_back({s, fp, tp});
    }
    return c;
}

/// Trapezoidal area, accumulated in integer units of 1/(2 n_good n_bad).
inline double auc(const RocCurve& c) {
    std::uint64_t twice_area = 0;
    for (std::size_t i = 1; i < c.points.size(); ++i) {
        const auto& a = c.points[i - 1];
        const auto& b = c.points[i];
        twice_area += static_cast<std::uint64_t>(b.fp_count - a.fp_count) * (a.tp_count + b.tp_count);
    }
    return static_cast<double>(twice_area) /
           (2.0 * static_cast<double>(c.n_good) * static_cast<double>(c.n_bad));
}

inline double auc(std::span<const ScoredLabel> scored) { return auc(roc_curve(scored)); }

/// `threshold,fp_rate,tp_rate`
inline void write_roc_csv(std::ostream& out, const RocCurve& c) {
    out << "threshold,fp_rate,tp_rate\n";
    for (const auto& p : c.points)
        out << format_double(p.threshold) << ',' << format_double(c.fp_rate(p)) << ','
            << format_double(c.tp_rate(p)) << '\n';
}

} // namespace credit
