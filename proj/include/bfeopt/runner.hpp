#pragma once

// Drives one optimizer over mini-batches of a dataset, recording a Trace:
// full-dataset loss, rate summary, inner-loop telemetry and (for 2D problems)
// the parameter trajectory per step.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "bfeopt/baselines.hpp"
#include "bfeopt/bfe.hpp"
#include "bfeopt/core.hpp"

namespace bfeopt {

enum class OptimizerKind {
    ImprovedBfe,
    BfeZoomInOnly,
    BfeGradientChange,
    AdaptiveBfeGradientChange,
    Mfe,
    SgdMomentum,
    Adam,
};

const char* to_string(OptimizerKind kind);

struct OptimizerSpec {
    OptimizerKind kind = OptimizerKind::ImprovedBfe;
    std::string label;  // used in file names and legends
    BfeConfig bfe;
    MomentumConfig momentum;
    AdamConfig adam;
};

struct StopRule {
    std::size_t max_steps = 1000;
    double grad_norm_tol = 0.0;  // 0 disables the convergence check
};

enum class RunStatus { MaxSteps, Converged, Failed };

const char* to_string(RunStatus status);

struct TraceRow {
    std::size_t t = 0;        // 1-based step index
    double loss = 0.0;        // full-dataset loss after the step
    double eta_min = 0.0;     // scalar-rate optimizers repeat one value
    double eta_mean = 0.0;
    double eta_max = 0.0;
    std::size_t inner_loops = 0;
    Branch branch = Branch::None;
    bool safeguard_hit = false;
    ParamVector theta;        // snapshot, 2D problems only

    bool operator==(const TraceRow&) const = default;
};

struct Trace {
    std::vector<TraceRow> rows;
    RunStatus status = RunStatus::MaxSteps;
    std::size_t failed_step = 0;   // 1-based step that failed; 0 = initial evaluation
    double initial_loss = 0.0;     // full-dataset loss at theta0
    ParamVector theta0;
    ParamVector theta_final;

    bool operator==(const Trace&) const = default;
};

// Runs the optimizer from theta0.  Batches are drawn per epoch from a
// deterministic shuffle stream derived from the seed.  Stops at max_steps,
// when the full-dataset gradient norm drops below grad_norm_tol (if enabled),
// or with status Failed when a step throws or produces a non-finite loss
// (the failing step records no row).
// Throws std::invalid_argument on inconsistent arguments or configs.
Trace run(const Problem& problem, const Batch& dataset, std::size_t batch_size,
          const OptimizerSpec& optimizer, const ParamVector& theta0, const StopRule& stop,
          std::uint64_t seed);

}  // namespace bfeopt
