#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "beetle/core/dataset.hpp"

namespace beetle::learners {

/// Which environment a GP row or query belongs to.
enum class Task { source, target };

/// Squared-exponential covariance over configurations, multiplied across
/// environments by `scale` (the source/target performance correlation):
///
///   k((x, a), (x', b)) = (a == b ? 1 : scale) * variance * exp(-|x - x'|^2 / (2 l^2))
struct TransferKernel {
    double scale = 1.0;
    double length_scale = 0.0;  // <= 0: median pairwise distance of the training inputs
    double signal_variance = 1.0;

    double base(std::span<const double> a, std::span<const double> b) const {
        double d2 = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
        return signal_variance * std::exp(-d2 / (2.0 * length_scale * length_scale));
    }

    double operator()(std::span<const double> a, Task ta, std::span<const double> b, Task tb) const {
        return (ta == tb ? 1.0 : scale) * base(a, b);
    }
};

struct GPParams {
    double noise_variance = 1e-8;
    double jitter_start = 1e-8;
    double jitter_max = 1e-2;
};

/// Maps configurations into [0,1]^n: numeric options are min-max scaled over
/// the space's domain, binary options pass through.
class InputScaler {
public:
    InputScaler() = default;
    explicit InputScaler(const ConfigurationSpace& space) {
        for (const auto& dom : space.domains()) {
            if (dom.is_binary() || dom.empty()) {
                lo_.push_back(0.0);
                span_.push_back(1.0);
            } else {
                lo_.push_back(dom.min());
                span_.push_back(dom.max() > dom.min() ? dom.max() - dom.min() : 1.0);
            }
        }
    }
    InputScaler(std::vector<double> lo, std::vector<double> span) : lo_(std::move(lo)), span_(std::move(span)) {}

    std::vector<double> operator()(const Configuration& c) const {
        if (c.size() != lo_.size()) {
            throw Error(ErrorKind::schema, "configuration does not belong to the GP's training space");
        }
        std::vector<double> out(c.size());
        for (std::size_t i = 0; i < c.size(); ++i) out[i] = (c[i] - lo_[i]) / span_[i];
        return out;
    }

    const std::vector<double>& lower() const noexcept { return lo_; }
    const std::vector<double>& range() const noexcept { return span_; }

private:
    std::vector<double> lo_;
    std::vector<double> span_;
};

inline double median_pairwise_distance(const std::vector<std::vector<double>>& xs) {
    std::vector<double> d;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t j = i + 1; j < xs.size(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < xs[i].size(); ++k) s += (xs[i][k] - xs[j][k]) * (xs[i][k] - xs[j][k]);
            d.push_back(std::sqrt(s));
        }
    }
    if (d.empty()) return 1.0;
    auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
    std::nth_element(d.begin(), mid, d.end());
    double m = *mid;
    if (d.size() % 2 == 0) {
        m = (m + *std::max_element(d.begin(), mid)) / 2.0;
    }
    return m > 0.0 ? m : 1.0;
}

/// GP regression with a constant prior mean (the training-target mean).
/// Targets are standardized internally; `predict` returns the posterior mean
/// in the original units.
class GaussianProcess {
public:
    GaussianProcess() = default;

    static GaussianProcess fit(const ConfigurationSpace& space, std::span<const Configuration> xs,
                               std::span<const double> ys, std::span<const Task> tasks, TransferKernel kernel,
                               const GPParams& params = {}) {
        if (xs.size() < 2) throw Error(ErrorKind::insufficient_data, "GP needs at least 2 training rows");
        if (xs.size() != ys.size() || xs.size() != tasks.size()) {
            throw Error(ErrorKind::schema, "GP inputs differ in length");
        }
        if (!std::isfinite(kernel.scale) || kernel.signal_variance <= 0.0) {
            throw Error(ErrorKind::config, "invalid transfer kernel");
        }
        GaussianProcess gp;
        gp.scaler_ = InputScaler(space);
        gp.tasks_.assign(tasks.begin(), tasks.end());
        for (const auto& x : xs) gp.inputs_.push_back(gp.scaler_(x));
        if (kernel.length_scale <= 0.0) kernel.length_scale = median_pairwise_distance(gp.inputs_);
        gp.kernel_ = kernel;

        const std::size_t n = xs.size();
        double mean = 0.0;
        for (double y : ys) mean += y;
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (double y : ys) var += (y - mean) * (y - mean);
        var /= static_cast<double>(n);
        gp.mean_ = mean;
        gp.sd_ = var > 0.0 ? std::sqrt(var) : 1.0;

        Eigen::MatrixXd k(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                const double v = kernel(gp.inputs_[i], gp.tasks_[i], gp.inputs_[j], gp.tasks_[j]);
                k(i, j) = v;
                k(j, i) = v;
            }
        }
        Eigen::VectorXd y(n);
        for (std::size_t i = 0; i < n; ++i) y(i) = (ys[i] - mean) / gp.sd_;

        double jitter = 0.0;
        while (true) {
            Eigen::MatrixXd a = k;
            a.diagonal().array() += params.noise_variance + jitter;
            Eigen::LLT<Eigen::MatrixXd> llt(a);
            if (llt.info() == Eigen::Success) {
                Eigen::VectorXd alpha = llt.solve(y);
                if (alpha.allFinite()) {
                    gp.alpha_.assign(alpha.data(), alpha.data() + n);
                    gp.jitter_ = jitter;
                    return gp;
                }
            }
            jitter = jitter == 0.0 ? params.jitter_start : jitter * 10.0;
            if (jitter > params.jitter_max * (1.0 + 1e-9)) {
                throw Error(ErrorKind::numeric, "GP covariance is not positive definite after jitter");
            }
        }
    }

    double predict(const Configuration& c, Task task = Task::target) const {
        if (alpha_.empty()) throw Error(ErrorKind::config, "GP is not trained");
        const auto x = scaler_(c);
        double acc = 0.0;
        for (std::size_t i = 0; i < inputs_.size(); ++i) acc += kernel_(x, task, inputs_[i], tasks_[i]) * alpha_[i];
        return mean_ + sd_ * acc;
    }

    std::vector<double> predict(std::span<const Configuration> cs, Task task = Task::target) const {
        std::vector<double> out;
        out.reserve(cs.size());
        for (const auto& c : cs) out.push_back(predict(c, task));
        return out;
    }

    const TransferKernel& kernel() const noexcept { return kernel_; }
    double prior_mean() const noexcept { return mean_; }
    double target_scale() const noexcept { return sd_; }
    double jitter() const noexcept { return jitter_; }
    const std::vector<std::vector<double>>& scaled_inputs() const noexcept { return inputs_; }
    const std::vector<Task>& tasks() const noexcept { return tasks_; }
    const std::vector<double>& alpha() const noexcept { return alpha_; }
    const InputScaler& scaler() const noexcept { return scaler_; }

    static GaussianProcess restore(InputScaler scaler, TransferKernel kernel, std::vector<std::vector<double>> inputs,
                                   std::vector<Task> tasks, std::vector<double> alpha, double mean, double sd) {
        if (inputs.size() != tasks.size() || inputs.size() != alpha.size()) {
            throw Error(ErrorKind::schema, "inconsistent GP state");
        }
        GaussianProcess gp;
        gp.scaler_ = std::move(scaler);
        gp.kernel_ = kernel;
        gp.inputs_ = std::move(inputs);
        gp.tasks_ = std::move(tasks);
        gp.alpha_ = std::move(alpha);
        gp.mean_ = mean;
        gp.sd_ = sd;
        return gp;
    }

private:
    InputScaler scaler_;
    TransferKernel kernel_;
    std::vector<std::vector<double>> inputs_;
    std::vector<Task> tasks_;
    std::vector<double> alpha_;
    double mean_ = 0.0;
    double sd_ = 1.0;
    double jitter_ = 0.0;
};

/// GP trained on source-environment rows; predictions default to the target task.
inline GaussianProcess train_gp(const ConfigurationSpace& space, std::span<const Configuration> xs,
                                std::span<const double> ys, const TransferKernel& kernel,
                                const GPParams& params = {}) {
    std::vector<Task> tasks(xs.size(), Task::source);
    return GaussianProcess::fit(space, xs, ys, tasks, kernel, params);
}

}  // namespace beetle::learners
