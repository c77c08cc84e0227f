#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "../dataset.hpp"
#include "../serialize.hpp"
#include "encoder.hpp"
#include "logistic.hpp"
#include "spec.hpp"

namespace credit {

namespace svm {

/// lambda/2 |w|^2 + mean hinge loss; y in {-1, +1}.
inline double objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w, double b,
                        double lambda) {
    const Eigen::VectorXd margins = ((X * w).array() + b).matrix().cwiseProduct(y);
    const double hinge = (1.0 - margins.array()).max(0.0).sum() / static_cast<double>(X.rows());
    return 0.5 * lambda * w.squaredNorm() + hinge;
}

inline double mean_hinge(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w, double b) {
    return objective(X, y, w, b, 0.0);
}

struct TrainResult {
    Eigen::VectorXd w;
    double b = 0.0;
    double objective = 0.0;
    std::size_t best_epoch = 0;
    bool improved_last_epoch = false;
};

/// Full-batch subgradient descent. The weight step is 1/(lambda k) and the bias
/// step 1/sqrt(k) at epoch k; the best iterate by objective is returned.
/// Scaling X by s together with lambda by s^2 maps w to w/s and leaves b and
/// every margin unchanged.
inline TrainResult train(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda, std::size_t epochs) {
    const auto n = static_cast<double>(X.rows());
    Eigen::VectorXd w = Eigen::VectorXd::Zero(X.cols());
    double b = 0.0;
    TrainResult best;
    best.w = w;
    best.b = b;
    best.objective = objective(X, y, w, b, lambda);
    for (std::size_t k = 1; k <= epochs; ++k) {
        const Eigen::VectorXd margins = ((X * w).array() + b).matrix().cwiseProduct(y);
        Eigen::VectorXd active(X.rows());
        for (Eigen::Index i = 0; i < X.rows(); ++i)
            active[i] = margins[i] < 1.0 ? y[i] : 0.0;
        const Eigen::VectorXd sub_w = X.transpose() * active / n; // negative hinge subgradient
        const double sub_b = active.sum() / n;
        const double eta = 1.0 / (lambda * static_cast<double>(k));
        w = (1.0 - eta * lambda) * w + eta * sub_w;
        b += sub_b / std::sqrt(static_cast<double>(k));

        const double obj = objective(X, y, w, b, lambda);
        best.improved_last_epoch = obj < best.objective;
        if (obj < best.objective) {
            best.objective = obj;
            best.w = w;
            best.b = b;
            best.best_epoch = k;
        }
    }
    return best;
}

} // namespace svm

/// Linear soft-margin SVM with a logistic calibration of the margin:
/// P(good|x) = logistic(A (w.x + b) + B).
struct SvmModel {
    Encoder encoder;
    std::vector<double> w;
    double b = 0.0;
    double a = 1.0; // calibration slope
    double c = 0.0; // calibration offset
    bool improved_last_epoch = false;

    double margin(const Instance& inst) const {
        const Eigen::VectorXd x = encoder.encode(inst);
        double m = b;
        for (Eigen::Index j = 0; j < x.size(); ++j)
            m += w[static_cast<std::size_t>(j)] * x[j];
        return m;
    }

    double score(const Instance& inst) const { return logistic_fn(a * margin(inst) + c); }

    void write(RecordWriter& wr) const {
        encoder.write(wr);
        wr.numbers("weights", w);
        wr.numbers("bias", {b});
        wr.numbers("calibration", {a, c});
        wr.line("fit", {improved_last_epoch ? "improving" : "stalled"});
    }

    static SvmModel read(RecordReader& r) {
        SvmModel m;
        m.encoder = Encoder::read(r);
        m.w = r.numbers("weights", m.encoder.width());
        m.b = r.number("bias");
        auto cal = r.numbers("calibration", 2);
        m.a = cal[0];
        m.c = cal[1];
        auto fit = r.next("fit");
        m.improved_last_epoch = !fit.empty() && fit[0] == "improving";
        return m;
    }

    bool operator==(const SvmModel&) const = default;
};

/// Fits the margin on standardized one-hot inputs with lambda = 1/(C n), then
/// calibrates with a one-dimensional logistic fit on Platt's smoothed targets.
inline SvmModel fit_svm(const Dataset& train, const ClassifierSpec& spec) {
    SvmModel m;
    m.encoder = fit_encoder(train, true);
    const Eigen::MatrixXd X = m.encoder.encode(train);
    const auto n = static_cast<Eigen::Index>(train.size());
    Eigen::VectorXd y(n);
    const auto [n_good, n_bad] = class_counts(train);
    for (Eigen::Index i = 0; i < n; ++i)
        y[i] = train.instances[static_cast<std::size_t>(i)].label == Label::good ? 1.0 : -1.0;

    const double lambda = 1.0 / (spec.complexity * static_cast<double>(n));
    const auto fit = svm::train(X, y, lambda, spec.epochs);
    m.w.assign(fit.w.data(), fit.w.data() + fit.w.size());
    m.b = fit.b;
    m.improved_last_epoch = fit.improved_last_epoch;

    Eigen::MatrixXd M(n, 2);
    Eigen::VectorXd target(n);
    const double hi = (static_cast<double>(n_good) + 1.0) / (static_cast<double>(n_good) + 2.0);
    const double lo = 1.0 / (static_cast<double>(n_bad) + 2.0);
    const Eigen::VectorXd margins = (X * fit.w).array() + fit.b;
    for (Eigen::Index i = 0; i < n; ++i) {
        M(i, 0) = 1.0;
        M(i, 1) = margins[i];
        target[i] = y[i] > 0 ? hi : lo;
    }
    const auto cal = logistic::newton(M, target, 1e-8, 100, 1e-10);
    m.c = cal.beta[0];
    m.a = cal.beta[1];
    return m;
}

} // namespace credit
