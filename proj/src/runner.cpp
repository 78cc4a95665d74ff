#include "bfeopt/runner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bfeopt/rng.hpp"

namespace bfeopt {

const char* to_string(OptimizerKind kind) {
    switch (kind) {
        case OptimizerKind::ImprovedBfe: return "improved_bfe";
        case OptimizerKind::BfeZoomInOnly: return "bfe_zoom_in_only";
        case OptimizerKind::BfeGradientChange: return "bfe_gradient_change";
        case OptimizerKind::AdaptiveBfeGradientChange: return "adaptive_bfe_gradient_change";
        case OptimizerKind::Mfe: return "mfe";
        case OptimizerKind::SgdMomentum: return "sgd";
        case OptimizerKind::Adam: return "adam";
    }
    return "unknown";
}

const char* to_string(RunStatus status) {
    switch (status) {
        case RunStatus::MaxSteps: return "max_steps";
        case RunStatus::Converged: return "converged";
        case RunStatus::Failed: return "failed";
    }
    return "unknown";
}

namespace {

void validate_run_args(const Problem& problem, const OptimizerSpec& optimizer,
                       const ParamVector& theta0, const StopRule& stop) {
    if (theta0.size() != problem.dimension()) {
        throw std::invalid_argument("run: theta0 size must match the problem dimension");
    }
    if (!all_finite(theta0)) throw std::invalid_argument("run: theta0 must be finite");
    if (stop.max_steps < 1) throw std::invalid_argument("run: max_steps must be >= 1");
    if (!(stop.grad_norm_tol >= 0.0) || !std::isfinite(stop.grad_norm_tol)) {
        throw std::invalid_argument("run: grad_norm_tol must be >= 0 and finite");
    }
    switch (optimizer.kind) {
        case OptimizerKind::ImprovedBfe:
        case OptimizerKind::BfeZoomInOnly:
            optimizer.bfe.validate();
            if (optimizer.bfe.factor != 2) {
                throw std::invalid_argument("run: this optimizer kind requires factor == 2");
            }
            break;
        case OptimizerKind::BfeGradientChange:
        case OptimizerKind::AdaptiveBfeGradientChange:
        case OptimizerKind::Mfe:
            optimizer.bfe.validate();
            break;
        case OptimizerKind::SgdMomentum:
            optimizer.momentum.validate();
            break;
        case OptimizerKind::Adam:
            optimizer.adam.validate();
            break;
    }
}

}  // namespace

Trace run(const Problem& problem, const Batch& dataset, std::size_t batch_size,
          const OptimizerSpec& optimizer, const ParamVector& theta0, const StopRule& stop,
          std::uint64_t seed) {
    validate_run_args(problem, optimizer, theta0, stop);

    Trace trace;
    trace.theta0 = theta0;
    trace.theta_final = theta0;
    trace.initial_loss = problem.loss(theta0, dataset);
    if (!std::isfinite(trace.initial_loss)) {
        trace.status = RunStatus::Failed;
        trace.failed_step = 0;
        return trace;
    }

    const bool snapshot_theta = (problem.dimension() == 2);

    std::vector<Batch> epoch_batches = mini_batches(dataset, batch_size, mix_seed(seed, 0));
    const std::size_t bpe = epoch_batches.size();
    std::size_t cached_epoch = 0;

    // Per-optimizer running state.
    ParamVector theta = theta0;
    double eta = optimizer.bfe.eta0;
    std::optional<CarriedTolerance> carried;
    AdaptiveState adaptive;
    GradVector velocity(theta0.size(), 0.0);
    GradVector adam_m(theta0.size(), 0.0);
    GradVector adam_v(theta0.size(), 0.0);

    trace.status = RunStatus::MaxSteps;
    for (std::size_t t = 1; t <= stop.max_steps; ++t) {
        const std::size_t epoch = (t - 1) / bpe;
        if (epoch != cached_epoch) {
            epoch_batches = mini_batches(dataset, batch_size, mix_seed(seed, epoch));
            cached_epoch = epoch;
        }
        const Batch& batch = epoch_batches[(t - 1) % bpe];

        TraceRow row;
        row.t = t;
        bool stepped = false;
        try {
            switch (optimizer.kind) {
                case OptimizerKind::ImprovedBfe:
                case OptimizerKind::Mfe: {
                    const ScalarStepResult r =
                        (optimizer.kind == OptimizerKind::ImprovedBfe)
                            ? improved_bfe_step(problem, batch, theta, eta, t, optimizer.bfe,
                                                carried)
                            : mfe_step(problem, batch, theta, eta, t, optimizer.bfe, carried);
                    theta = r.theta;
                    eta = r.eta;
                    carried = r.carried;
                    row.eta_min = row.eta_mean = row.eta_max = r.report.eta_out;
                    row.inner_loops = r.report.inner_loops;
                    row.branch = r.report.branch;
                    row.safeguard_hit = r.report.safeguard_hit;
                    stepped = true;
                    break;
                }
                case OptimizerKind::BfeZoomInOnly: {
                    const ScalarStepResult r =
                        bfe_zoom_in_only_step(problem, batch, theta, t, optimizer.bfe);
                    theta = r.theta;
                    row.eta_min = row.eta_mean = row.eta_max = r.report.eta_out;
                    row.inner_loops = r.report.inner_loops;
                    row.branch = r.report.branch;
                    row.safeguard_hit = r.report.safeguard_hit;
                    stepped = true;
                    break;
                }
                case OptimizerKind::BfeGradientChange: {
                    const ScalarStepResult r =
                        bfe_gradient_change_step(problem, batch, theta, eta, optimizer.bfe,
                                                 carried);
                    theta = r.theta;
                    eta = r.eta;
                    carried = r.carried;
                    row.eta_min = row.eta_mean = row.eta_max = r.report.eta_out;
                    row.inner_loops = r.report.inner_loops;
                    row.branch = r.report.branch;
                    row.safeguard_hit = r.report.safeguard_hit;
                    stepped = true;
                    break;
                }
                case OptimizerKind::AdaptiveBfeGradientChange: {
                    if (t == 1) {
                        adaptive = AdaptiveState::init(problem, batch, theta, optimizer.bfe);
                    }
                    const AdaptiveStepResult r = adaptive_bfe_gradient_change_step(
                        problem, batch, theta, adaptive, optimizer.bfe);
                    theta = r.theta;
                    adaptive = r.state;
                    double mn = adaptive.eta.front();
                    double mx = mn;
                    double sum = 0.0;
                    for (double e : adaptive.eta) {
                        mn = std::min(mn, e);
                        mx = std::max(mx, e);
                        sum += e;
                    }
                    row.eta_min = mn;
                    row.eta_mean = sum / static_cast<double>(adaptive.eta.size());
                    row.eta_max = mx;
                    row.inner_loops = r.report.inner_loops;
                    row.branch = r.report.branch;
                    row.safeguard_hit = r.report.safeguard_hit;
                    stepped = true;
                    break;
                }
                case OptimizerKind::SgdMomentum: {
                    const MomentumStepResult r =
                        sgd_momentum_step(problem, batch, theta, velocity, optimizer.momentum);
                    theta = r.theta;
                    velocity = r.velocity;
                    row.eta_min = row.eta_mean = row.eta_max = optimizer.momentum.eta;
                    row.inner_loops = 0;
                    row.branch = Branch::None;
                    row.safeguard_hit = false;
                    stepped = true;
                    break;
                }
                case OptimizerKind::Adam: {
                    const AdamStepResult r =
                        adam_step(problem, batch, theta, adam_m, adam_v, t, optimizer.adam);
                    theta = r.theta;
                    adam_m = r.m;
                    adam_v = r.v;
                    row.eta_min = row.eta_mean = row.eta_max = optimizer.adam.alpha;
                    row.inner_loops = 0;
                    row.branch = Branch::None;
                    row.safeguard_hit = false;
                    stepped = true;
                    break;
                }
            }
        } catch (const std::runtime_error&) {
            stepped = false;
        }

        if (!stepped || !all_finite(theta)) {
            trace.status = RunStatus::Failed;
            trace.failed_step = t;
            return trace;
        }
        row.loss = problem.loss(theta, dataset);
        if (!std::isfinite(row.loss)) {
            trace.status = RunStatus::Failed;
            trace.failed_step = t;
            return trace;
        }
        if (snapshot_theta) row.theta = theta;
        trace.rows.push_back(std::move(row));
        trace.theta_final = theta;

        if (stop.grad_norm_tol > 0.0) {
            const GradVector g = problem.gradient(theta, dataset);
            const double norm = l2_norm(g);
            if (std::isfinite(norm) && norm < stop.grad_norm_tol) {
                trace.status = RunStatus::Converged;
                return trace;
            }
        }
    }
    return trace;
}

}  // namespace bfeopt
