#pragma once

// Core vocabulary: parameter vectors, datasets, the differentiable-problem
// interface, and the small vector helpers every optimizer builds on.

#include <cstddef>
#include <cstdint>
#include <vector>

namespace bfeopt {

using ParamVector = std::vector<double>;
using GradVector = std::vector<double>;

// True iff every entry is finite (no NaN / infinity).
bool all_finite(const std::vector<double>& v);

double l2_norm(const std::vector<double>& v);

// theta - rate * grad, evaluated coordinate-wise in this exact expression
// shape (the library's reproducibility contract depends on it).
ParamVector gradient_step(const ParamVector& theta, double rate, const GradVector& grad);

// A mini-batch view of a dataset: row-major feature rows plus targets.
struct Batch {
    std::vector<std::vector<double>> features;
    std::vector<double> targets;

    std::size_t size() const { return targets.size(); }
    bool operator==(const Batch&) const = default;
};

// A differentiable objective.  Implementations must be pure: repeated calls
// with identical arguments return bit-identical results.
class Problem {
  public:
    virtual ~Problem() = default;
    virtual std::size_t dimension() const = 0;
    virtual double loss(const ParamVector& theta, const Batch& batch) const = 0;
    virtual GradVector gradient(const ParamVector& theta, const Batch& batch) const = 0;
};

// Central-difference gradient, used to validate analytic gradients.
// Throws std::runtime_error naming the offending coordinate if a probe
// evaluates non-finite.
GradVector finite_difference_gradient(const Problem& problem, const ParamVector& theta,
                                      const Batch& batch, double h);

// Deterministically shuffles the dataset rows with the given seed and splits
// them into consecutive batches of batch_size (the final batch may be short).
std::vector<Batch> mini_batches(const Batch& dataset, std::size_t batch_size,
                                std::uint64_t seed);

}  // namespace bfeopt
