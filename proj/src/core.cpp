#include "bfeopt/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "bfeopt/rng.hpp"

namespace bfeopt {

bool all_finite(const std::vector<double>& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

double l2_norm(const std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x * x;
    return std::sqrt(sum);
}

ParamVector gradient_step(const ParamVector& theta, double rate, const GradVector& grad) {
    ParamVector out(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        out[i] = theta[i] - rate * grad[i];
    }
    return out;
}

GradVector finite_difference_gradient(const Problem& problem, const ParamVector& theta,
                                      const Batch& batch, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("finite_difference_gradient: h must be positive");
    if (!all_finite(theta)) {
        throw std::invalid_argument("finite_difference_gradient: theta must be finite");
    }
    GradVector grad(theta.size());
    ParamVector probe = theta;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        probe[i] = theta[i] + h;
        const double up = problem.loss(probe, batch);
        probe[i] = theta[i] - h;
        const double down = problem.loss(probe, batch);
        probe[i] = theta[i];
        if (!std::isfinite(up) || !std::isfinite(down)) {
            throw std::runtime_error("finite_difference_gradient: non-finite loss at coordinate " +
                                     std::to_string(i));
        }
        grad[i] = (up - down) / (2.0 * h);
    }
    return grad;
}

std::vector<Batch> mini_batches(const Batch& dataset, std::size_t batch_size, std::uint64_t seed) {
    if (batch_size < 1) throw std::invalid_argument("mini_batches: batch_size must be >= 1");
    const std::size_t n = dataset.size();
    if (n == 0) throw std::invalid_argument("mini_batches: dataset must be nonempty");
    if (dataset.features.size() != dataset.targets.size()) {
        throw std::invalid_argument("mini_batches: features/targets length mismatch");
    }
    if (batch_size >= n) return {dataset};

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);

    std::vector<Batch> batches;
    batches.reserve((n + batch_size - 1) / batch_size);
    for (std::size_t start = 0; start < n; start += batch_size) {
        const std::size_t stop = std::min(start + batch_size, n);
        Batch b;
        b.features.reserve(stop - start);
        b.targets.reserve(stop - start);
        for (std::size_t k = start; k < stop; ++k) {
            b.features.push_back(dataset.features[order[k]]);
            b.targets.push_back(dataset.targets[order[k]]);
        }
        batches.push_back(std::move(b));
    }
    return batches;
}

}  // namespace bfeopt
