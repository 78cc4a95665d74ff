#pragma once

// Synthetic optimization problems: linear regression with mean-squared-error
// loss over a generated dataset, quadratic bowls, and a 2D loss-grid sampler
// for contour rendering.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "bfeopt/core.hpp"

namespace bfeopt {

// Linear model y = w . x + b with MSE loss (1/N) * sum (pred - y)^2.
// The parameter vector is [w_0 .. w_{k-1}, b]: the intercept is the last
// entry and the dataset stores only the k feature columns.
class LinearRegressionProblem : public Problem {
  public:
    explicit LinearRegressionProblem(std::size_t dimension);

    std::size_t dimension() const override { return dimension_; }
    double loss(const ParamVector& theta, const Batch& batch) const override;
    GradVector gradient(const ParamVector& theta, const Batch& batch) const override;

    // w . x + b; shared with the dataset generator so that a noiseless
    // dataset evaluates to exactly zero loss at the true parameters.
    double predict(const ParamVector& theta, const std::vector<double>& features) const;

  private:
    std::size_t dimension_;
};

struct RegressionSpec {
    ParamVector true_weights{2.0, -1.0};  // last entry is the intercept
    double noise_std = 0.1;
    std::size_t n_samples = 4096;
    double feature_min = -1.0;
    double feature_max = 1.0;
    std::uint64_t seed = 42;

    void validate() const;  // throws std::invalid_argument
};

struct RegressionData {
    Batch dataset;
    LinearRegressionProblem problem;
};

// Features uniform on [feature_min, feature_max], targets from the true
// parameters plus Gaussian noise.  The Gaussian draw happens even when
// noise_std is zero, so the feature stream is identical across noise levels.
RegressionData make_regression(const RegressionSpec& spec);

struct QuadraticSpec {
    std::vector<std::vector<double>> curvature;  // symmetric positive-definite
    ParamVector theta_opt;                       // minimizer

    void validate() const;  // throws std::invalid_argument (incl. non-PD)
};

// f(theta) = 0.5 * (theta-opt)' A (theta-opt); gradient A (theta-opt).
// The batch argument is ignored (pair with a one-row placeholder dataset).
class QuadraticProblem : public Problem {
  public:
    explicit QuadraticProblem(QuadraticSpec spec);

    std::size_t dimension() const override { return spec_.theta_opt.size(); }
    double loss(const ParamVector& theta, const Batch& batch) const override;
    GradVector gradient(const ParamVector& theta, const Batch& batch) const override;

    const QuadraticSpec& spec() const { return spec_; }

  private:
    QuadraticSpec spec_;
};

QuadraticProblem make_quadratic(const QuadraticSpec& spec);

// One-row dataset for problems that ignore batches, keeping the mini-batch
// plumbing uniform.
Batch placeholder_dataset();

struct LandscapeBounds {
    double x_min = -1.0;
    double x_max = 1.0;
    double y_min = -1.0;
    double y_max = 1.0;
};

struct LandscapeGrid {
    LandscapeBounds bounds;
    std::size_t resolution = 2;       // lattice points per axis
    std::vector<double> values;       // row-major by y: values[iy*resolution + ix]

    double x_at(std::size_t ix) const;
    double y_at(std::size_t iy) const;
    double value_at(std::size_t ix, std::size_t iy) const;
};

// Evaluates the loss on a resolution x resolution lattice over the bounds.
// Throws std::invalid_argument unless the problem is 2D and resolution >= 2.
LandscapeGrid landscape_grid(const Problem& problem, const Batch& batch,
                             const LandscapeBounds& bounds, std::size_t resolution);

// CSV round-trip for datasets (header x0,...,x{k-1},y; full-precision values).
void write_dataset_csv(const std::string& path, const Batch& dataset);
Batch read_dataset_csv(const std::string& path);

}  // namespace bfeopt
