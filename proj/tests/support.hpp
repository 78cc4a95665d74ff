#pragma once

// Shared test fixtures: small closed-form problems, seeded random problem
// instances, and the oracle-equivalence harness that replays chained steps
// through both the library and the line-by-line interpreters and compares
// every output bitwise.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>

#include "bfeopt/core.hpp"
#include "bfeopt/problems.hpp"
#include "bfeopt/rng.hpp"

namespace testsupport {

// A Problem backed by plain functions of theta; the batch is ignored.
// The callables must be pure for the bitwise-reproducibility tests to hold.
class FnProblem : public bfeopt::Problem {
  public:
    using LossFn = std::function<double(const bfeopt::ParamVector&)>;
    using GradFn = std::function<bfeopt::GradVector(const bfeopt::ParamVector&)>;

    FnProblem(std::size_t dim, LossFn loss, GradFn grad)
        : dim_(dim), loss_(std::move(loss)), grad_(std::move(grad)) {}

    std::size_t dimension() const override { return dim_; }
    double loss(const bfeopt::ParamVector& theta, const bfeopt::Batch&) const override {
        return loss_(theta);
    }
    bfeopt::GradVector gradient(const bfeopt::ParamVector& theta,
                                const bfeopt::Batch&) const override {
        return grad_(theta);
    }

  private:
    std::size_t dim_;
    LossFn loss_;
    GradFn grad_;
};

bfeopt::Batch unit_batch();

// f = 0.5 * sum theta_i^2, gradient theta.
FnProblem half_square(std::size_t dim);

// f = c . theta + offset, constant gradient c.
FnProblem linear_loss(bfeopt::GradVector c, double offset);

// f = value everywhere, zero gradient.
FnProblem constant_loss(double value, std::size_t dim);

// Random symmetric positive-definite curvature (M'M plus a positive diagonal
// shift) around a random optimum.
bfeopt::QuadraticSpec random_spd_spec(bfeopt::Rng& rng, std::size_t dim);

struct OracleCheckStats {
    std::size_t instances = 0;
    std::size_t steps = 0;       // steps compared without mismatch
    std::size_t zoom_in = 0;
    std::size_t zoom_out = 0;
    std::size_t safeguards = 0;
    std::size_t mismatches = 0;
    std::string first_mismatch;  // empty when everything matched
};

// Each check runs `instances` seeded random problem/config instances (mixing
// quadratic bowls, regression batches, linear and constant losses so both
// branches and every safeguard path appear) and chains several steps per
// instance, comparing the library against the transcription interpreter
// bitwise after every step.
OracleCheckStats check_improved_bfe_oracle(std::size_t instances, std::uint64_t seed);
OracleCheckStats check_mfe_oracle(std::size_t instances, std::uint64_t seed, std::size_t factor);
OracleCheckStats check_zoom_in_only_oracle(std::size_t instances, std::uint64_t seed);
OracleCheckStats check_gradient_change_oracle(std::size_t instances, std::uint64_t seed);
OracleCheckStats check_adaptive_oracle(std::size_t instances, std::uint64_t seed);

}  // namespace testsupport
