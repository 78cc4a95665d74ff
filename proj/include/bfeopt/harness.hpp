#pragma once

// Benchmark harness: JSON experiment configs, trace/trajectory CSV output,
// SVG charts, and the four CLI commands (run, histogram, landscape, sweep).

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bfeopt/problems.hpp"
#include "bfeopt/runner.hpp"

namespace bfeopt {

struct ProblemConfig {
    std::string type;  // "regression" | "quadratic"
    RegressionSpec regression;
    QuadraticSpec quadratic;
    std::string load_csv;    // regression only: read the dataset instead of generating
    std::string export_csv;  // write the dataset after building
};

struct ExperimentConfig {
    ProblemConfig problem;
    std::vector<OptimizerSpec> optimizers;
    std::size_t batch_size = 512;
    StopRule stop;
    std::uint64_t seed = 1;
    ParamVector theta0;  // empty = zeros
    std::string out_dir = "out";
    bool log_loss_axis = true;
    LandscapeBounds bounds{-6.0, 6.0, -6.0, 6.0};
    std::size_t resolution = 61;
    std::vector<ToleranceRule> sweep_rules;
    nlohmann::json raw;  // config echo for the manifest
};

struct CliOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> max_steps;
    std::optional<std::string> out_dir;
};

// Strict parsing: unknown keys, missing required keys, or out-of-range values
// throw std::invalid_argument with the offending key path.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path, const CliOverrides& overrides);

struct BuiltExperiment {
    std::unique_ptr<Problem> problem;
    Batch dataset;
    ParamVector theta0;
};

BuiltExperiment build_experiment(const ExperimentConfig& config);

// Sentinel for "threshold never reached" (rendered as null in JSON and as an
// empty CSV cell).
inline constexpr std::size_t kStepsUnreached = std::numeric_limits<std::size_t>::max();

// Loss threshold for cross-optimizer speed metrics: kThresholdFactor times
// the best loss any compared trace reached (including the shared start).
inline constexpr double kThresholdFactor = 1.05;

struct RunSummary {
    std::string label;
    OptimizerKind kind = OptimizerKind::ImprovedBfe;
    RunStatus status = RunStatus::MaxSteps;
    std::size_t failed_step = 0;
    std::size_t steps = 0;
    double final_loss = 0.0;
    double best_loss = 0.0;
    double mean_inner_loops = 0.0;
    std::size_t steps_to_threshold = kStepsUnreached;
    double path_length_to_threshold = 0.0;  // +inf when unreached
};

double best_loss_found(const std::vector<Trace>& traces);
std::size_t steps_to_threshold(const Trace& trace, double threshold);
double path_length_to_threshold(const Trace& trace, double threshold);
double mean_inner_loops(const Trace& trace);

void write_trace_csv(const std::string& path, const Trace& trace);
void write_trajectory_csv(const std::string& path, const Trace& trace);

// Commands return the process exit code (0 ok, 2 run failure); config and
// input errors throw std::invalid_argument (exit code 1 in the CLI).
int cmd_run(const ExperimentConfig& config);
int cmd_histogram(const std::vector<std::string>& trace_files, const std::string& out_dir);
int cmd_landscape(const ExperimentConfig& config);
int cmd_sweep(const ExperimentConfig& config);

}  // namespace bfeopt
