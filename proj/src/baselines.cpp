#include "bfeopt/baselines.hpp"

#include <cmath>
#include <stdexcept>

namespace bfeopt {

void MomentumConfig::validate() const {
    if (!(eta > 0.0) || !std::isfinite(eta)) {
        throw std::invalid_argument("MomentumConfig: eta must be positive and finite");
    }
    if (!(beta >= 0.0 && beta < 1.0)) {
        throw std::invalid_argument("MomentumConfig: beta must lie in [0, 1)");
    }
}

void AdamConfig::validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw std::invalid_argument("AdamConfig: alpha must be positive and finite");
    }
    if (!(beta1 >= 0.0 && beta1 < 1.0)) {
        throw std::invalid_argument("AdamConfig: beta1 must lie in [0, 1)");
    }
    if (!(beta2 >= 0.0 && beta2 < 1.0)) {
        throw std::invalid_argument("AdamConfig: beta2 must lie in [0, 1)");
    }
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw std::invalid_argument("AdamConfig: delta must be positive and finite");
    }
}

MomentumStepResult sgd_momentum_step(const Problem& problem, const Batch& batch,
                                     const ParamVector& theta, const GradVector& velocity,
                                     const MomentumConfig& cfg) {
    cfg.validate();
    if (theta.empty()) throw std::invalid_argument("sgd_momentum_step: theta must be nonempty");
    if (velocity.size() != theta.size()) {
        throw std::invalid_argument("sgd_momentum_step: velocity size must match theta");
    }
    if (!all_finite(theta) || !all_finite(velocity)) {
        throw std::invalid_argument("sgd_momentum_step: theta and velocity must be finite");
    }

    const std::size_t n = theta.size();
    GradVector g;
    if (cfg.nesterov) {
        // Evaluate the gradient at the look-ahead point theta - eta*beta*v.
        ParamVector lookahead(n);
        for (std::size_t i = 0; i < n; ++i) {
            lookahead[i] = theta[i] - cfg.eta * cfg.beta * velocity[i];
        }
        g = problem.gradient(lookahead, batch);
    } else {
        g = problem.gradient(theta, batch);
    }
    if (!all_finite(g)) throw std::runtime_error("sgd_momentum_step: non-finite gradient");

    MomentumStepResult out;
    out.velocity.resize(n);
    out.theta.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.velocity[i] = cfg.beta * velocity[i] + g[i];
        out.theta[i] = theta[i] - cfg.eta * out.velocity[i];
    }
    return out;
}

AdamStepResult adam_step(const Problem& problem, const Batch& batch, const ParamVector& theta,
                         const GradVector& m, const GradVector& v, std::size_t t,
                         const AdamConfig& cfg) {
    cfg.validate();
    if (theta.empty()) throw std::invalid_argument("adam_step: theta must be nonempty");
    if (m.size() != theta.size() || v.size() != theta.size()) {
        throw std::invalid_argument("adam_step: moment sizes must match theta");
    }
    if (!all_finite(theta) || !all_finite(m) || !all_finite(v)) {
        throw std::invalid_argument("adam_step: theta and moments must be finite");
    }
    if (t < 1) throw std::invalid_argument("adam_step: t must be >= 1");

    const GradVector g = problem.gradient(theta, batch);
    if (!all_finite(g)) throw std::runtime_error("adam_step: non-finite gradient");

    const std::size_t n = theta.size();
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));

    AdamStepResult out;
    out.m.resize(n);
    out.v.resize(n);
    out.theta.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
        out.v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * (g[i] * g[i]);
        const double m_hat = out.m[i] / bc1;
        const double v_hat = out.v[i] / bc2;
        out.theta[i] = theta[i] - cfg.alpha * m_hat / (std::sqrt(v_hat) + cfg.delta);
    }
    return out;
}

}  // namespace bfeopt
