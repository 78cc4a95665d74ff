#pragma once

// Reference optimizers used for comparisons: mini-batch SGD with classical or
// Nesterov momentum, and Adam with bias correction.

#include <cstddef>

#include "bfeopt/core.hpp"

namespace bfeopt {

struct MomentumConfig {
    double eta = 0.001;
    double beta = 0.9;      // in [0, 1)
    bool nesterov = false;  // gradient at the look-ahead point theta - eta*beta*v

    void validate() const;  // throws std::invalid_argument
};

struct AdamConfig {
    double alpha = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double delta = 1e-8;  // denominator stabilizer

    void validate() const;  // throws std::invalid_argument
};

struct MomentumStepResult {
    ParamVector theta;
    GradVector velocity;
};

// Classical: v' = beta*v + g(theta); theta' = theta - eta*v'.
// Nesterov: same recurrence with g evaluated at theta - eta*beta*v.
// Throws std::runtime_error on a non-finite gradient.
MomentumStepResult sgd_momentum_step(const Problem& problem, const Batch& batch,
                                     const ParamVector& theta, const GradVector& velocity,
                                     const MomentumConfig& cfg);

struct AdamStepResult {
    ParamVector theta;
    GradVector m;  // first-moment estimate
    GradVector v;  // second-moment estimate
};

// Standard bias-corrected recurrence; t is the 1-based step index.
// Throws std::invalid_argument when t < 1 and std::runtime_error on a
// non-finite gradient.
AdamStepResult adam_step(const Problem& problem, const Batch& batch, const ParamVector& theta,
                         const GradVector& m, const GradVector& v, std::size_t t,
                         const AdamConfig& cfg);

}  // namespace bfeopt
