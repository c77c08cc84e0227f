#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "../dataset.hpp"
#include "../serialize.hpp"
#include "encoder.hpp"
#include "spec.hpp"

namespace credit {

inline double logistic_fn(double x) {
    if (x >= 0.0)
        return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

namespace logistic {

inline double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

// X carries the intercept in column 0, which is not penalized.
// Targets y may be soft (in [0,1]).

inline double log_likelihood(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& beta,
                             double ridge) {
    const Eigen::VectorXd z = X * beta;
    double ll = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i)
        ll += y[i] * z[i] - softplus(z[i]);
    return ll - 0.5 * ridge * beta.tail(beta.size() - 1).squaredNorm();
}

inline Eigen::VectorXd gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& beta,
                                double ridge) {
    const Eigen::VectorXd z = X * beta;
    Eigen::VectorXd residual(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i)
        residual[i] = y[i] - logistic_fn(z[i]);
    Eigen::VectorXd g = X.transpose() * residual;
    g.tail(g.size() - 1) -= ridge * beta.tail(beta.size() - 1);
    return g;
}

struct FitResult {
    Eigen::VectorXd beta;
    std::size_t iterations = 0;
    bool converged = false;
    double gradient_norm = 0.0; // per-instance, infinity norm
};

/// Newton-Raphson with step halving on the ridge-penalized log-likelihood.
/// Stops when the per-instance gradient's infinity norm is within `tolerance`.
inline FitResult newton(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double ridge, std::size_t max_iterations,
                        double tolerance) {
    const auto p = X.cols();
    const double n = std::max<double>(1.0, static_cast<double>(X.rows()));
    FitResult fit;
    fit.beta = Eigen::VectorXd::Zero(p);
    double ll = log_likelihood(X, y, fit.beta, ridge);
    for (;;) {
        const Eigen::VectorXd g = gradient(X, y, fit.beta, ridge);
        fit.gradient_norm = g.cwiseAbs().maxCoeff() / n;
        if (fit.gradient_norm <= tolerance) {
            fit.converged = true;
            break;
        }
        if (fit.iterations >= max_iterations)
            break;
        ++fit.iterations;

        const Eigen::VectorXd z = X * fit.beta;
        Eigen::VectorXd w(z.size());
        for (Eigen::Index i = 0; i < z.size(); ++i) {
            const double pi = logistic_fn(z[i]);
            w[i] = pi * (1.0 - pi);
        }
        Eigen::MatrixXd H = X.transpose() * w.asDiagonal() * X;
        H.diagonal().tail(p - 1).array() += ridge;
        H.diagonal().array() += 1e-12;
        const Eigen::VectorXd step = H.ldlt().solve(g);
        if (!step.allFinite())
            break;

        double scale = 1.0;
        bool improved = false;
        for (int halving = 0; halving < 40; ++halving, scale *= 0.5) {
            const Eigen::VectorXd candidate = fit.beta + scale * step;
            const double cand_ll = log_likelihood(X, y, candidate, ridge);
            if (std::isfinite(cand_ll) && cand_ll >= ll) {
                fit.beta = candidate;
                ll = cand_ll;
                improved = true;
                break;
            }
        }
        if (!improved)
            break;
    }
    return fit;
}

inline Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& X) {
    Eigen::MatrixXd out(X.rows(), X.cols() + 1);
    out.col(0).setOnes();
    out.rightCols(X.cols()) = X;
    return out;
}

} // namespace logistic

/// P(good|x) = logistic(beta . [1, encode(x)]).
struct LogisticModel {
    Encoder encoder;
    std::vector<double> beta; // intercept first
    bool converged = true;
    std::size_t iterations = 0;

    double linear_predictor(const Instance& inst) const {
        const Eigen::VectorXd x = encoder.encode(inst);
        double z = beta.at(0);
        for (Eigen::Index c = 0; c < x.size(); ++c)
            z += beta[static_cast<std::size_t>(c) + 1] * x[c];
        return z;
    }

    double score(const Instance& inst) const { return logistic_fn(linear_predictor(inst)); }

    void write(RecordWriter& w) const {
        encoder.write(w);
        w.numbers("beta", beta);
        w.line("fit", {converged ? "converged" : "not_converged", std::to_string(iterations)});
    }

    static LogisticModel read(RecordReader& r) {
        LogisticModel m;
        m.encoder = Encoder::read(r);
        m.beta = r.numbers("beta", m.encoder.width() + 1);
        auto fit = r.next("fit");
        if (fit.size() != 2)
            throw ModelError("model file: malformed logistic fit line");
        m.converged = fit[0] == "converged";
        m.iterations = RecordReader::to_size(fit[1]);
        return m;
    }

    bool operator==(const LogisticModel&) const = default;
};

/// Ridge-stabilized maximum likelihood over one-hot encoded bins.
/// Non-convergence is recorded on the model; the last iterate is kept.
inline LogisticModel fit_logistic(const Dataset& train, const ClassifierSpec& spec) {
    LogisticModel m;
    m.encoder = fit_encoder(train, false);
    const Eigen::MatrixXd X = logistic::with_intercept(m.encoder.encode(train));
    Eigen::VectorXd y(static_cast<Eigen::Index>(train.size()));
    for (std::size_t i = 0; i < train.size(); ++i)
        y[static_cast<Eigen::Index>(i)] = train.instances[i].label == Label::good ? 1.0 : 0.0;
    const auto fit = logistic::newton(X, y, spec.ridge, spec.max_iterations, spec.tolerance);
    m.beta.assign(fit.beta.data(), fit.beta.data() + fit.beta.size());
    m.converged = fit.converged;
    m.iterations = fit.iterations;
    return m;
}

} // namespace credit
