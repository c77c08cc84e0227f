#pragma once

// Slow, independent reference implementations used to cross-check the library.

#include <credit/credit.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace oracle {

using credit::Label;

/// P(score_good > score_bad) + 0.5 P(tie), by counting every pair.
inline double mann_whitney(const std::vector<credit::ScoredLabel>& s) {
    double wins = 0.0;
    std::size_t pairs = 0;
    for (const auto& g : s) {
        if (g.label != Label::good)
            continue;
        for (const auto& b : s) {
            if (b.label != Label::bad)
                continue;
            ++pairs;
            if (g.score > b.score)
                wins += 1.0;
            else if (g.score == b.score)
                wins += 0.5;
        }
    }
    return wins / static_cast<double>(pairs);
}

inline double entropy2(std::size_t bad, std::size_t good) {
    const double n = static_cast<double>(bad + good);
    double h = 0.0;
    for (auto c : {bad, good})
        if (c) {
            const double p = static_cast<double>(c) / n;
            h -= p * std::log2(p);
        }
    return h;
}

struct Point {
    double value;
    Label label;
};

/// Recursive MDLP working on raw points: every midpoint between distinct values
/// is scored from fresh counts; a midpoint is a candidate unless all points on
/// both adjacent values share one class.
inline void mdlp(std::vector<Point> pts, std::vector<double>& cuts) {
    std::sort(pts.begin(), pts.end(), [](auto a, auto b) { return a.value < b.value; });
    auto count = [](const std::vector<Point>& v, Label l) {
        return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [&](auto p) { return p.label == l; }));
    };
    const std::size_t nb = count(pts, Label::bad), ng = count(pts, Label::good);
    if (nb == 0 || ng == 0)
        return;
    std::vector<double> distinct;
    for (const auto& p : pts)
        if (distinct.empty() || distinct.back() != p.value)
            distinct.push_back(p.value);
    if (distinct.size() < 2)
        return;

    const double n = static_cast<double>(pts.size());
    std::optional<std::size_t> best;
    double best_w = 0.0;
    for (std::size_t i = 0; i + 1 < distinct.size(); ++i) {
        std::vector<Label> at_a, at_b;
        for (const auto& p : pts) {
            if (p.value == distinct[i])
                at_a.push_back(p.label);
            if (p.value == distinct[i + 1])
                at_b.push_back(p.label);
        }
        bool single = true;
        for (auto l : at_a)
            single = single && l == at_a.front();
        for (auto l : at_b)
            single = single && l == at_a.front();
        if (single)
            continue;
        std::vector<Point> left, right;
        for (const auto& p : pts)
            (p.value <= distinct[i] ? left : right).push_back(p);
        const double w = (static_cast<double>(left.size()) * entropy2(count(left, Label::bad), count(left, Label::good)) +
                          static_cast<double>(right.size()) *
                              entropy2(count(right, Label::bad), count(right, Label::good))) /
                         n;
        if (!best || w < best_w) {
            best = i;
            best_w = w;
        }
    }
    if (!best)
        return;
    std::vector<Point> left, right;
    for (const auto& p : pts)
        (p.value <= distinct[*best] ? left : right).push_back(p);
    auto classes = [&](const std::vector<Point>& v) {
        return static_cast<double>((count(v, Label::bad) > 0) + (count(v, Label::good) > 0));
    };
    const double h = entropy2(nb, ng);
    const double h1 = entropy2(count(left, Label::bad), count(left, Label::good));
    const double h2 = entropy2(count(right, Label::bad), count(right, Label::good));
    const double k = classes(pts), k1 = classes(left), k2 = classes(right);
    const double delta = std::log2(std::pow(3.0, k) - 2.0) - (k * h - k1 * h1 - k2 * h2);
    if (!(h - best_w > (std::log2(n - 1.0) + delta) / n))
        return;
    cuts.push_back((distinct[*best] + distinct[*best + 1]) / 2.0);
    mdlp(left, cuts);
    mdlp(right, cuts);
}

inline std::vector<double> mdlp_cuts(const std::vector<double>& values, const std::vector<Label>& labels) {
    std::vector<Point> pts;
    for (std::size_t i = 0; i < values.size(); ++i)
        pts.push_back({values[i], labels[i]});
    std::vector<double> cuts;
    mdlp(pts, cuts);
    std::sort(cuts.begin(), cuts.end());
    return cuts;
}

/// Best bad-class F1 over a dense grid that contains every score, every
/// midpoint, 0 and 1. Returns the F1 and how many instances are called bad at
/// the largest threshold reaching it.
inline std::pair<double, std::size_t> best_f1(const std::vector<credit::ScoredLabel>& s) {
    std::vector<double> scores;
    for (const auto& x : s)
        scores.push_back(x.score);
    std::sort(scores.begin(), scores.end());
    scores.erase(std::unique(scores.begin(), scores.end()), scores.end());
    std::vector<double> grid{0.0, 1.0};
    for (std::size_t i = 0; i < scores.size(); ++i) {
        grid.push_back(scores[i]);
        if (i + 1 < scores.size())
            grid.push_back((scores[i] + scores[i + 1]) / 2.0);
    }
    std::sort(grid.begin(), grid.end());
    double best = -1.0;
    std::size_t best_called = 0;
    for (double t : grid) {
        std::size_t tn = 0, fn = 0, fp = 0;
        for (const auto& x : s) {
            const bool predicted_bad = !(x.score > t);
            if (predicted_bad && x.label == Label::bad)
                ++tn;
            else if (predicted_bad)
                ++fn;
            else if (x.label == Label::bad)
                ++fp;
        }
        const double f1 = tn == 0 ? 0.0 : 2.0 * tn / (2.0 * tn + fn + fp);
        if (f1 >= best) {
            best = f1;
            best_called = tn + fn;
        }
    }
    return {best, best_called};
}

/// Central finite differences of f at x.
inline Eigen::VectorXd numeric_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                        const Eigen::VectorXd& x, double h = 1e-5) {
    Eigen::VectorXd g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        Eigen::VectorXd a = x, b = x;
        a[i] += h;
        b[i] -= h;
        g[i] = (f(a) - f(b)) / (2.0 * h);
    }
    return g;
}

} // namespace oracle
