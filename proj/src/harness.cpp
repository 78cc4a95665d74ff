#include "bfeopt/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#include "bfeopt/svg.hpp"

namespace bfeopt {

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Formatting helpers
// ---------------------------------------------------------------------------

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string format_short(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

std::string rule_label(const ToleranceRule& rule) {
    switch (rule.kind()) {
        case ToleranceRule::Kind::MeanScaled:
            return "mean_scaled(" + format_short(rule.eps()) + ")";
        case ToleranceRule::Kind::MinScaled:
            return "min_scaled(" + format_short(rule.eps()) + ")";
        case ToleranceRule::Kind::Constant:
            return "constant(" + format_short(rule.eps()) + ")";
        case ToleranceRule::Kind::DecayMeanScaled:
            return "decay_mean_scaled(" + format_short(rule.eps()) + ";" +
                   format_short(rule.t_decay()) + ")";
    }
    return "unknown";
}

bool valid_label(const std::string& label) {
    if (label.empty()) return false;
    for (char c : label) {
        const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                        (c >= '0' && c <= '9') || c == '_' || c == '-';
        if (!ok) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Strict JSON access
// ---------------------------------------------------------------------------

[[noreturn]] void config_error(const std::string& path, const std::string& what) {
    throw std::invalid_argument("config: " + path + ": " + what);
}

void require_object(const json& j, const std::string& path,
                    std::initializer_list<const char*> allowed) {
    if (!j.is_object()) config_error(path, "must be an object");
    for (const auto& item : j.items()) {
        bool found = false;
        for (const char* key : allowed) {
            if (item.key() == key) {
                found = true;
                break;
            }
        }
        if (!found) config_error(path + "." + item.key(), "unknown key");
    }
}

double get_double(const json& j, const std::string& path, const char* key, double def) {
    if (!j.contains(key)) return def;
    const json& v = j.at(key);
    if (!v.is_number()) config_error(path + "." + key, "must be a number");
    return v.get<double>();
}

std::uint64_t get_count(const json& j, const std::string& path, const char* key,
                        std::uint64_t def) {
    if (!j.contains(key)) return def;
    const json& v = j.at(key);
    if (!(v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0))) {
        config_error(path + "." + key, "must be a nonnegative integer");
    }
    return v.get<std::uint64_t>();
}

bool get_bool(const json& j, const std::string& path, const char* key, bool def) {
    if (!j.contains(key)) return def;
    const json& v = j.at(key);
    if (!v.is_boolean()) config_error(path + "." + key, "must be a boolean");
    return v.get<bool>();
}

std::string get_string(const json& j, const std::string& path, const char* key,
                       const std::string& def) {
    if (!j.contains(key)) return def;
    const json& v = j.at(key);
    if (!v.is_string()) config_error(path + "." + key, "must be a string");
    return v.get<std::string>();
}

std::vector<double> get_number_array(const json& v, const std::string& path) {
    if (!v.is_array()) config_error(path, "must be an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) config_error(path + "[" + std::to_string(i) + "]",
                                            "must be a number");
        out.push_back(v[i].get<double>());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Config parsing
// ---------------------------------------------------------------------------

ToleranceRule parse_tolerance(const json& j, const std::string& path) {
    if (!j.is_object()) config_error(path, "must be an object");
    const std::string rule = get_string(j, path, "rule", "");
    if (rule.empty()) config_error(path + ".rule", "required");
    try {
        if (rule == "mean_scaled") {
            require_object(j, path, {"rule", "eps"});
            return ToleranceRule::mean_scaled(get_double(j, path, "eps", 0.001));
        }
        if (rule == "min_scaled") {
            require_object(j, path, {"rule", "eps"});
            return ToleranceRule::min_scaled(get_double(j, path, "eps", 0.001));
        }
        if (rule == "constant") {
            require_object(j, path, {"rule", "value"});
            if (!j.contains("value")) config_error(path + ".value", "required");
            return ToleranceRule::constant(get_double(j, path, "value", 0.0));
        }
        if (rule == "decay_mean_scaled") {
            require_object(j, path, {"rule", "eps", "t_decay"});
            return ToleranceRule::decay_mean_scaled(
                get_double(j, path, "eps", 0.001),
                static_cast<std::size_t>(get_count(j, path, "t_decay", 0)));
        }
    } catch (const std::invalid_argument& e) {
        // Re-anchor rule-constructor messages at the config path.
        const std::string what = e.what();
        if (what.rfind("config:", 0) == 0) throw;
        config_error(path, what);
    }
    config_error(path + ".rule", "must be one of mean_scaled, min_scaled, constant, "
                                 "decay_mean_scaled");
}

OptimizerKind parse_kind(const std::string& kind, const std::string& path) {
    if (kind == "improved_bfe") return OptimizerKind::ImprovedBfe;
    if (kind == "bfe_zoom_in_only") return OptimizerKind::BfeZoomInOnly;
    if (kind == "bfe_gradient_change") return OptimizerKind::BfeGradientChange;
    if (kind == "adaptive_bfe_gradient_change") return OptimizerKind::AdaptiveBfeGradientChange;
    if (kind == "mfe") return OptimizerKind::Mfe;
    if (kind == "sgd") return OptimizerKind::SgdMomentum;
    if (kind == "adam") return OptimizerKind::Adam;
    config_error(path, "unknown optimizer kind '" + kind + "'");
}

bool is_bfe_kind(OptimizerKind kind) {
    return kind == OptimizerKind::ImprovedBfe || kind == OptimizerKind::BfeZoomInOnly ||
           kind == OptimizerKind::BfeGradientChange ||
           kind == OptimizerKind::AdaptiveBfeGradientChange || kind == OptimizerKind::Mfe;
}

bool is_loss_bfe_kind(OptimizerKind kind) {
    return kind == OptimizerKind::ImprovedBfe || kind == OptimizerKind::BfeZoomInOnly ||
           kind == OptimizerKind::Mfe;
}

OptimizerSpec parse_optimizer(const json& j, const std::string& path) {
    if (!j.is_object()) config_error(path, "must be an object");
    const std::string kind_str = get_string(j, path, "kind", "");
    if (kind_str.empty()) config_error(path + ".kind", "required");
    OptimizerSpec spec;
    spec.kind = parse_kind(kind_str, path + ".kind");
    spec.label = get_string(j, path, "label", kind_str);
    if (!valid_label(spec.label)) {
        config_error(path + ".label", "must match [A-Za-z0-9_-]+");
    }

    if (is_bfe_kind(spec.kind)) {
        if (spec.kind == OptimizerKind::Mfe) {
            require_object(j, path, {"kind", "label", "eta0", "tolerance", "eta_min", "eta_max",
                                     "max_inner", "angle_threshold_deg", "angle_aggregate",
                                     "factor"});
            spec.bfe.factor = static_cast<std::size_t>(get_count(j, path, "factor", 2));
        } else {
            require_object(j, path, {"kind", "label", "eta0", "tolerance", "eta_min", "eta_max",
                                     "max_inner", "angle_threshold_deg", "angle_aggregate"});
        }
        spec.bfe.eta0 = get_double(j, path, "eta0", spec.bfe.eta0);
        spec.bfe.eta_min = get_double(j, path, "eta_min", spec.bfe.eta_min);
        spec.bfe.eta_max = get_double(j, path, "eta_max", spec.bfe.eta_max);
        spec.bfe.max_inner = static_cast<std::size_t>(
            get_count(j, path, "max_inner", spec.bfe.max_inner));
        if (j.contains("tolerance")) {
            spec.bfe.tolerance = parse_tolerance(j.at("tolerance"), path + ".tolerance");
        }
        const double deg = get_double(j, path, "angle_threshold_deg", 1.0);
        spec.bfe.angle_threshold = deg * (std::numbers::pi / 180.0);
        const std::string agg = get_string(j, path, "angle_aggregate", "max");
        if (agg == "max") {
            spec.bfe.angle_aggregate = AngleAggregate::Max;
        } else if (agg == "mean") {
            spec.bfe.angle_aggregate = AngleAggregate::Mean;
        } else {
            config_error(path + ".angle_aggregate", "must be 'max' or 'mean'");
        }
        try {
            spec.bfe.validate();
        } catch (const std::invalid_argument& e) {
            config_error(path, e.what());
        }
    } else if (spec.kind == OptimizerKind::SgdMomentum) {
        require_object(j, path, {"kind", "label", "eta", "beta", "nesterov"});
        spec.momentum.eta = get_double(j, path, "eta", spec.momentum.eta);
        spec.momentum.beta = get_double(j, path, "beta", spec.momentum.beta);
        spec.momentum.nesterov = get_bool(j, path, "nesterov", spec.momentum.nesterov);
        try {
            spec.momentum.validate();
        } catch (const std::invalid_argument& e) {
            config_error(path, e.what());
        }
    } else {
        require_object(j, path, {"kind", "label", "alpha", "beta1", "beta2", "delta"});
        spec.adam.alpha = get_double(j, path, "alpha", spec.adam.alpha);
        spec.adam.beta1 = get_double(j, path, "beta1", spec.adam.beta1);
        spec.adam.beta2 = get_double(j, path, "beta2", spec.adam.beta2);
        spec.adam.delta = get_double(j, path, "delta", spec.adam.delta);
        try {
            spec.adam.validate();
        } catch (const std::invalid_argument& e) {
            config_error(path, e.what());
        }
    }
    return spec;
}

ProblemConfig parse_problem(const json& j, const std::string& path) {
    ProblemConfig cfg;
    if (!j.is_object()) config_error(path, "must be an object");
    cfg.type = get_string(j, path, "type", "");
    if (cfg.type.empty()) config_error(path + ".type", "required");
    if (cfg.type == "regression") {
        require_object(j, path, {"type", "regression", "load_csv", "export_csv"});
        cfg.load_csv = get_string(j, path, "load_csv", "");
        cfg.export_csv = get_string(j, path, "export_csv", "");
        if (j.contains("regression")) {
            if (!cfg.load_csv.empty()) {
                config_error(path, "'regression' and 'load_csv' are mutually exclusive");
            }
            const json& r = j.at("regression");
            const std::string rp = path + ".regression";
            require_object(r, rp, {"true_weights", "noise_std", "n_samples", "feature_min",
                                   "feature_max", "seed"});
            if (r.contains("true_weights")) {
                cfg.regression.true_weights =
                    get_number_array(r.at("true_weights"), rp + ".true_weights");
            }
            cfg.regression.noise_std = get_double(r, rp, "noise_std", cfg.regression.noise_std);
            cfg.regression.n_samples = static_cast<std::size_t>(
                get_count(r, rp, "n_samples", cfg.regression.n_samples));
            cfg.regression.feature_min =
                get_double(r, rp, "feature_min", cfg.regression.feature_min);
            cfg.regression.feature_max =
                get_double(r, rp, "feature_max", cfg.regression.feature_max);
            cfg.regression.seed = get_count(r, rp, "seed", cfg.regression.seed);
        }
        if (cfg.load_csv.empty()) {
            try {
                cfg.regression.validate();
            } catch (const std::invalid_argument& e) {
                config_error(path + ".regression", e.what());
            }
        }
    } else if (cfg.type == "quadratic") {
        require_object(j, path, {"type", "quadratic"});
        if (!j.contains("quadratic")) config_error(path + ".quadratic", "required");
        const json& q = j.at("quadratic");
        const std::string qp = path + ".quadratic";
        require_object(q, qp, {"curvature", "theta_opt"});
        if (!q.contains("curvature")) config_error(qp + ".curvature", "required");
        if (!q.contains("theta_opt")) config_error(qp + ".theta_opt", "required");
        const json& a = q.at("curvature");
        if (!a.is_array()) config_error(qp + ".curvature", "must be an array of rows");
        for (std::size_t i = 0; i < a.size(); ++i) {
            cfg.quadratic.curvature.push_back(
                get_number_array(a[i], qp + ".curvature[" + std::to_string(i) + "]"));
        }
        cfg.quadratic.theta_opt = get_number_array(q.at("theta_opt"), qp + ".theta_opt");
        try {
            cfg.quadratic.validate();
        } catch (const std::invalid_argument& e) {
            config_error(qp, e.what());
        }
    } else {
        config_error(path + ".type", "must be 'regression' or 'quadratic'");
    }
    return cfg;
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
    ExperimentConfig cfg;
    require_object(j, "config", {"problem", "optimizers", "batch_size", "max_steps",
                                 "grad_norm_tol", "seed", "theta0", "out_dir", "log_loss_axis",
                                 "bounds", "resolution", "sweep_rules"});
    if (!j.contains("problem")) config_error("config.problem", "required");
    cfg.problem = parse_problem(j.at("problem"), "config.problem");

    if (!j.contains("optimizers")) config_error("config.optimizers", "required");
    const json& opts = j.at("optimizers");
    if (!opts.is_array() || opts.empty()) {
        config_error("config.optimizers", "must be a nonempty array");
    }
    std::set<std::string> labels;
    for (std::size_t i = 0; i < opts.size(); ++i) {
        OptimizerSpec spec =
            parse_optimizer(opts[i], "config.optimizers[" + std::to_string(i) + "]");
        if (!labels.insert(spec.label).second) {
            config_error("config.optimizers[" + std::to_string(i) + "].label",
                         "duplicate label '" + spec.label + "'");
        }
        cfg.optimizers.push_back(std::move(spec));
    }

    cfg.batch_size = static_cast<std::size_t>(get_count(j, "config", "batch_size",
                                                        cfg.batch_size));
    if (cfg.batch_size < 1) config_error("config.batch_size", "must be >= 1");
    cfg.stop.max_steps = static_cast<std::size_t>(get_count(j, "config", "max_steps",
                                                            cfg.stop.max_steps));
    if (cfg.stop.max_steps < 1) config_error("config.max_steps", "must be >= 1");
    cfg.stop.grad_norm_tol = get_double(j, "config", "grad_norm_tol", cfg.stop.grad_norm_tol);
    if (!(cfg.stop.grad_norm_tol >= 0.0) || !std::isfinite(cfg.stop.grad_norm_tol)) {
        config_error("config.grad_norm_tol", "must be >= 0 and finite");
    }
    cfg.seed = get_count(j, "config", "seed", cfg.seed);
    if (j.contains("theta0")) cfg.theta0 = get_number_array(j.at("theta0"), "config.theta0");
    cfg.out_dir = get_string(j, "config", "out_dir", cfg.out_dir);
    if (cfg.out_dir.empty()) config_error("config.out_dir", "must be nonempty");
    cfg.log_loss_axis = get_bool(j, "config", "log_loss_axis", cfg.log_loss_axis);

    if (j.contains("bounds")) {
        const json& b = j.at("bounds");
        require_object(b, "config.bounds", {"x_min", "x_max", "y_min", "y_max"});
        cfg.bounds.x_min = get_double(b, "config.bounds", "x_min", cfg.bounds.x_min);
        cfg.bounds.x_max = get_double(b, "config.bounds", "x_max", cfg.bounds.x_max);
        cfg.bounds.y_min = get_double(b, "config.bounds", "y_min", cfg.bounds.y_min);
        cfg.bounds.y_max = get_double(b, "config.bounds", "y_max", cfg.bounds.y_max);
    }
    cfg.resolution = static_cast<std::size_t>(get_count(j, "config", "resolution",
                                                        cfg.resolution));
    if (cfg.resolution < 2) config_error("config.resolution", "must be >= 2");

    if (j.contains("sweep_rules")) {
        const json& rules = j.at("sweep_rules");
        if (!rules.is_array()) config_error("config.sweep_rules", "must be an array");
        for (std::size_t i = 0; i < rules.size(); ++i) {
            cfg.sweep_rules.push_back(parse_tolerance(
                rules[i], "config.sweep_rules[" + std::to_string(i) + "]"));
        }
    }

    cfg.raw = j;
    return cfg;
}

ExperimentConfig load_config(const std::string& path, const CliOverrides& overrides) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config: " + path + ": " + e.what());
    }
    if (overrides.seed.has_value()) j["seed"] = *overrides.seed;
    if (overrides.max_steps.has_value()) j["max_steps"] = *overrides.max_steps;
    if (overrides.out_dir.has_value()) j["out_dir"] = *overrides.out_dir;
    return parse_config(j);
}

BuiltExperiment build_experiment(const ExperimentConfig& config) {
    BuiltExperiment built;
    if (config.problem.type == "regression") {
        if (!config.problem.load_csv.empty()) {
            try {
                built.dataset = read_dataset_csv(config.problem.load_csv);
            } catch (const std::runtime_error& e) {
                throw std::invalid_argument(e.what());
            }
            built.problem = std::make_unique<LinearRegressionProblem>(
                built.dataset.features.front().size() + 1);
        } else {
            RegressionData data = make_regression(config.problem.regression);
            built.dataset = std::move(data.dataset);
            built.problem = std::make_unique<LinearRegressionProblem>(data.problem);
        }
        if (!config.problem.export_csv.empty()) {
            write_dataset_csv(config.problem.export_csv, built.dataset);
        }
    } else {
        built.problem = std::make_unique<QuadraticProblem>(config.problem.quadratic);
        built.dataset = placeholder_dataset();
    }

    if (config.theta0.empty()) {
        built.theta0.assign(built.problem->dimension(), 0.0);
    } else {
        if (config.theta0.size() != built.problem->dimension()) {
            throw std::invalid_argument("config: theta0: size must match the problem dimension");
        }
        if (!all_finite(config.theta0)) {
            throw std::invalid_argument("config: theta0: must be finite");
        }
        built.theta0 = config.theta0;
    }
    return built;
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

double best_loss_found(const std::vector<Trace>& traces) {
    double best = std::numeric_limits<double>::infinity();
    for (const Trace& trace : traces) {
        if (std::isfinite(trace.initial_loss)) best = std::min(best, trace.initial_loss);
        for (const TraceRow& row : trace.rows) {
            if (std::isfinite(row.loss)) best = std::min(best, row.loss);
        }
    }
    return best;
}

std::size_t steps_to_threshold(const Trace& trace, double threshold) {
    if (trace.initial_loss <= threshold) return 0;
    for (const TraceRow& row : trace.rows) {
        if (row.loss <= threshold) return row.t;
    }
    return kStepsUnreached;
}

double path_length_to_threshold(const Trace& trace, double threshold) {
    if (trace.initial_loss <= threshold) return 0.0;
    double length = 0.0;
    const ParamVector* prev = &trace.theta0;
    for (const TraceRow& row : trace.rows) {
        if (row.theta.size() != prev->size() || row.theta.empty()) {
            return std::numeric_limits<double>::infinity();
        }
        double seg = 0.0;
        for (std::size_t i = 0; i < row.theta.size(); ++i) {
            const double d = row.theta[i] - (*prev)[i];
            seg += d * d;
        }
        length += std::sqrt(seg);
        if (row.loss <= threshold) return length;
        prev = &row.theta;
    }
    return std::numeric_limits<double>::infinity();
}

double mean_inner_loops(const Trace& trace) {
    if (trace.rows.empty()) return 0.0;
    double total = 0.0;
    for (const TraceRow& row : trace.rows) total += static_cast<double>(row.inner_loops);
    return total / static_cast<double>(trace.rows.size());
}

// ---------------------------------------------------------------------------
// CSV / manifest writers
// ---------------------------------------------------------------------------

void write_trace_csv(const std::string& path, const Trace& trace) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_trace_csv: cannot open " + path);
    const bool with_theta = (trace.theta0.size() == 2);
    out << "t,loss,eta_min,eta_mean,eta_max,inner_loops,branch";
    if (with_theta) out << ",theta1,theta2";
    out << "\n";
    for (const TraceRow& row : trace.rows) {
        out << row.t << "," << format_double(row.loss) << "," << format_double(row.eta_min)
            << "," << format_double(row.eta_mean) << "," << format_double(row.eta_max) << ","
            << row.inner_loops << "," << to_string(row.branch);
        if (with_theta) {
            out << "," << format_double(row.theta[0]) << "," << format_double(row.theta[1]);
        }
        out << "\n";
    }
    if (!out) throw std::runtime_error("write_trace_csv: write failed for " + path);
}

void write_trajectory_csv(const std::string& path, const Trace& trace) {
    if (trace.theta0.size() != 2) {
        throw std::invalid_argument("write_trajectory_csv: trace must come from a 2D problem");
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_trajectory_csv: cannot open " + path);
    out << "t,theta1,theta2,loss\n";
    out << "0," << format_double(trace.theta0[0]) << "," << format_double(trace.theta0[1]) << ","
        << format_double(trace.initial_loss) << "\n";
    for (const TraceRow& row : trace.rows) {
        out << row.t << "," << format_double(row.theta[0]) << "," << format_double(row.theta[1])
            << "," << format_double(row.loss) << "\n";
    }
    if (!out) throw std::runtime_error("write_trajectory_csv: write failed for " + path);
}

namespace {

RunSummary summarize(const OptimizerSpec& spec, const Trace& trace, double threshold) {
    RunSummary s;
    s.label = spec.label;
    s.kind = spec.kind;
    s.status = trace.status;
    s.failed_step = trace.failed_step;
    s.steps = trace.rows.size();
    s.final_loss = trace.rows.empty() ? trace.initial_loss : trace.rows.back().loss;
    s.best_loss = best_loss_found({trace});
    s.mean_inner_loops = mean_inner_loops(trace);
    s.steps_to_threshold = steps_to_threshold(trace, threshold);
    s.path_length_to_threshold = path_length_to_threshold(trace, threshold);
    return s;
}

json summary_json(const RunSummary& s, const std::string& file_key,
                  const std::string& file_name) {
    json j;
    j["label"] = s.label;
    j["kind"] = to_string(s.kind);
    j["status"] = to_string(s.status);
    j["failed_step"] = s.failed_step;
    j["steps"] = s.steps;
    j["final_loss"] = s.final_loss;
    j["best_loss"] = s.best_loss;
    j["mean_inner_loops"] = s.mean_inner_loops;
    if (s.steps_to_threshold == kStepsUnreached) {
        j["steps_to_threshold"] = nullptr;
    } else {
        j["steps_to_threshold"] = s.steps_to_threshold;
    }
    if (std::isfinite(s.path_length_to_threshold)) {
        j["path_length_to_threshold"] = s.path_length_to_threshold;
    } else {
        j["path_length_to_threshold"] = nullptr;
    }
    if (!file_name.empty()) j[file_key] = file_name;
    return j;
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << j.dump(2) << "\n";
    if (!out) throw std::runtime_error("write failed for " + path);
}

// ---------------------------------------------------------------------------
// Charts
// ---------------------------------------------------------------------------

constexpr int kChartWidth = 880;
constexpr int kChartHeight = 560;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 50.0;
constexpr double kLogFloor = 1e-300;

const char* const kPalette[8] = {"#c0392b", "#2c3e50", "#2980b9", "#27ae60",
                                 "#8e44ad", "#d35400", "#16a085", "#7f8c8d"};

struct ChartSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;  // data space
};

struct AxisMap {
    double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;

    double px(double x) const {
        return kMarginLeft + (x - x_min) / (x_max - x_min) *
                                 (kChartWidth - kMarginLeft - kMarginRight);
    }
    double py(double y) const {
        return kChartHeight - kMarginBottom -
               (y - y_min) / (y_max - y_min) * (kChartHeight - kMarginTop - kMarginBottom);
    }
};

void draw_frame(SvgDocument& doc, const AxisMap& map, const std::string& title,
                const std::string& x_label, const std::string& y_label, bool log_y) {
    const double left = kMarginLeft;
    const double right = kChartWidth - kMarginRight;
    const double top = kMarginTop;
    const double bottom = kChartHeight - kMarginBottom;
    doc.text(kChartWidth / 2.0, 24.0, title, 16, "#1a1a1a", "middle");
    for (int i = 0; i <= 4; ++i) {
        const double fx = map.x_min + (map.x_max - map.x_min) * i / 4.0;
        const double fy = map.y_min + (map.y_max - map.y_min) * i / 4.0;
        const double gx = map.px(fx);
        const double gy = map.py(fy);
        doc.line(gx, top, gx, bottom, "#e3e6e8", 1.0);
        doc.line(left, gy, right, gy, "#e3e6e8", 1.0);
        doc.text(gx, bottom + 18.0, format_short(fx), 12, "#333333", "middle");
        const double label_val = log_y ? std::pow(10.0, fy) : fy;
        doc.text(left - 6.0, gy + 4.0, format_short(label_val), 12, "#333333", "end");
    }
    doc.line(left, bottom, right, bottom, "#333333", 1.0);
    doc.line(left, top, left, bottom, "#333333", 1.0);
    doc.text(right, bottom + 36.0, x_label, 13, "#333333", "end");
    doc.text(left, top - 8.0, y_label, 13, "#333333", "start");
}

void draw_legend(SvgDocument& doc, const std::vector<std::string>& labels) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const double y = kMarginTop + 14.0 + 18.0 * static_cast<double>(i);
        const char* color = kPalette[i % 8];
        doc.line(kChartWidth - 190.0, y, kChartWidth - 162.0, y, color, 2.0);
        doc.text(kChartWidth - 156.0, y + 4.0, labels[i], 12, "#333333", "start");
    }
}

void render_loss_chart(const std::string& path, const std::vector<ChartSeries>& series,
                       bool log_y) {
    AxisMap map;
    bool first = true;
    for (const ChartSeries& s : series) {
        for (const auto& [x, y] : s.points) {
            const double yy = log_y ? std::log10(std::max(y, kLogFloor)) : y;
            if (!std::isfinite(yy)) continue;
            if (first) {
                map.x_min = map.x_max = x;
                map.y_min = map.y_max = yy;
                first = false;
            } else {
                map.x_min = std::min(map.x_min, x);
                map.x_max = std::max(map.x_max, x);
                map.y_min = std::min(map.y_min, yy);
                map.y_max = std::max(map.y_max, yy);
            }
        }
    }
    if (first) {
        map = AxisMap{0.0, 1.0, 0.0, 1.0};
    } else {
        if (map.x_max == map.x_min) map.x_max = map.x_min + 1.0;
        if (map.y_max == map.y_min) {
            map.y_min -= 1.0;
            map.y_max += 1.0;
        }
    }

    SvgDocument doc(kChartWidth, kChartHeight);
    draw_frame(doc, map, "Full-dataset loss per step", "step",
               log_y ? "loss (log scale)" : "loss", log_y);
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < series.size(); ++i) {
        std::vector<std::pair<double, double>> pts;
        pts.reserve(series[i].points.size());
        for (const auto& [x, y] : series[i].points) {
            const double yy = log_y ? std::log10(std::max(y, kLogFloor)) : y;
            if (!std::isfinite(yy)) continue;
            pts.emplace_back(map.px(x), map.py(yy));
        }
        doc.polyline(pts, kPalette[i % 8], 1.5);
        labels.push_back(series[i].label);
    }
    draw_legend(doc, labels);
    doc.save(path);
}

// Marching squares over a landscape grid: emits contour segments for one
// level.  Corner bits: 1 = (ix,iy), 2 = (ix+1,iy), 4 = (ix+1,iy+1),
// 8 = (ix,iy+1); saddle cells are split by the cell-center average.
struct Segment {
    double x1, y1, x2, y2;
};

double edge_interp(double a, double b, double level) {
    const double denom = b - a;
    if (denom == 0.0) return 0.5;
    return (level - a) / denom;
}

void contour_segments(const LandscapeGrid& grid, double level, std::vector<Segment>& out) {
    const std::size_t n = grid.resolution;
    for (std::size_t iy = 0; iy + 1 < n; ++iy) {
        for (std::size_t ix = 0; ix + 1 < n; ++ix) {
            const double va = grid.value_at(ix, iy);
            const double vb = grid.value_at(ix + 1, iy);
            const double vc = grid.value_at(ix + 1, iy + 1);
            const double vd = grid.value_at(ix, iy + 1);
            if (!std::isfinite(va) || !std::isfinite(vb) || !std::isfinite(vc) ||
                !std::isfinite(vd)) {
                continue;
            }
            int mask = 0;
            if (va > level) mask |= 1;
            if (vb > level) mask |= 2;
            if (vc > level) mask |= 4;
            if (vd > level) mask |= 8;
            if (mask == 0 || mask == 15) continue;

            const double x0 = grid.x_at(ix);
            const double x1 = grid.x_at(ix + 1);
            const double y0 = grid.y_at(iy);
            const double y1 = grid.y_at(iy + 1);
            // Crossing points on the four edges (bottom, right, top, left).
            const double abx = x0 + (x1 - x0) * edge_interp(va, vb, level);
            const double bcy = y0 + (y1 - y0) * edge_interp(vb, vc, level);
            const double cdx = x0 + (x1 - x0) * edge_interp(vd, vc, level);
            const double day = y0 + (y1 - y0) * edge_interp(va, vd, level);
            const Segment ab_bc{abx, y0, x1, bcy};
            const Segment ab_da{abx, y0, x0, day};
            const Segment cd_bc{cdx, y1, x1, bcy};
            const Segment cd_da{cdx, y1, x0, day};
            const Segment ab_cd{abx, y0, cdx, y1};
            const Segment da_bc{x0, day, x1, bcy};

            switch (mask) {
                case 1: case 14: out.push_back(ab_da); break;
                case 2: case 13: out.push_back(ab_bc); break;
                case 3: case 12: out.push_back(da_bc); break;
                case 4: case 11: out.push_back(cd_bc); break;
                case 6: case 9: out.push_back(ab_cd); break;
                case 7: case 8: out.push_back(cd_da); break;
                case 5: {
                    const double center = 0.25 * (va + vb + vc + vd);
                    if (center > level) {
                        out.push_back(cd_da);
                        out.push_back(ab_bc);
                    } else {
                        out.push_back(ab_da);
                        out.push_back(cd_bc);
                    }
                    break;
                }
                case 10: {
                    const double center = 0.25 * (va + vb + vc + vd);
                    if (center > level) {
                        out.push_back(ab_da);
                        out.push_back(cd_bc);
                    } else {
                        out.push_back(ab_bc);
                        out.push_back(cd_da);
                    }
                    break;
                }
                default: break;
            }
        }
    }
}

void render_landscape_chart(const std::string& path, const LandscapeGrid& grid,
                            const std::vector<ChartSeries>& trajectories) {
    AxisMap map{grid.bounds.x_min, grid.bounds.x_max, grid.bounds.y_min, grid.bounds.y_max};
    SvgDocument doc(kChartWidth, kChartHeight);
    draw_frame(doc, map, "Optimizer trajectories on the loss landscape", "theta1", "theta2",
               false);

    double vmin = std::numeric_limits<double>::infinity();
    double vmax = -std::numeric_limits<double>::infinity();
    for (double v : grid.values) {
        if (!std::isfinite(v)) continue;
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    }
    if (std::isfinite(vmin) && std::isfinite(vmax) && vmax > vmin) {
        const int n_levels = 10;
        for (int k = 0; k < n_levels; ++k) {
            // Quadratic level spacing concentrates contours near the minimum.
            const double f = static_cast<double>(k + 1) / static_cast<double>(n_levels + 1);
            const double level = vmin + (vmax - vmin) * f * f;
            std::vector<Segment> segments;
            contour_segments(grid, level, segments);
            for (const Segment& s : segments) {
                doc.line(map.px(s.x1), map.py(s.y1), map.px(s.x2), map.py(s.y2), "#c4cad1",
                         1.0);
            }
        }
    }

    std::vector<std::string> labels;
    for (std::size_t i = 0; i < trajectories.size(); ++i) {
        std::vector<std::pair<double, double>> pts;
        pts.reserve(trajectories[i].points.size());
        for (const auto& [x, y] : trajectories[i].points) {
            pts.emplace_back(map.px(x), map.py(y));
        }
        doc.polyline(pts, kPalette[i % 8], 1.8);
        if (!pts.empty()) {
            doc.circle(pts.front().first, pts.front().second, 3.0, "#000000");
            doc.circle(pts.back().first, pts.back().second, 3.0, kPalette[i % 8]);
        }
        labels.push_back(trajectories[i].label);
    }
    draw_legend(doc, labels);
    doc.save(path);
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

std::vector<Trace> run_all(const ExperimentConfig& config, const BuiltExperiment& built) {
    std::vector<Trace> traces;
    traces.reserve(config.optimizers.size());
    for (const OptimizerSpec& spec : config.optimizers) {
        traces.push_back(run(*built.problem, built.dataset, config.batch_size, spec,
                             built.theta0, config.stop, config.seed));
    }
    return traces;
}

std::string csv_or_blank(std::size_t steps) {
    if (steps == kStepsUnreached) return "";
    return std::to_string(steps);
}

}  // namespace

int cmd_run(const ExperimentConfig& config) {
    const BuiltExperiment built = build_experiment(config);
    std::filesystem::create_directories(config.out_dir);
    const std::vector<Trace> traces = run_all(config, built);
    const double threshold = kThresholdFactor * best_loss_found(traces);

    json manifest;
    manifest["command"] = "run";
    manifest["config"] = config.raw;
    manifest["threshold"] = std::isfinite(threshold) ? json(threshold) : json(nullptr);
    manifest["summaries"] = json::array();

    std::vector<ChartSeries> series;
    bool any_failed = false;
    for (std::size_t i = 0; i < traces.size(); ++i) {
        const OptimizerSpec& spec = config.optimizers[i];
        const Trace& trace = traces[i];
        const std::string trace_name = "trace_" + spec.label + ".csv";
        write_trace_csv(config.out_dir + "/" + trace_name, trace);

        const RunSummary s = summarize(spec, trace, threshold);
        manifest["summaries"].push_back(summary_json(s, "trace_csv", trace_name));
        if (trace.status == RunStatus::Failed) any_failed = true;

        ChartSeries cs;
        cs.label = spec.label;
        cs.points.emplace_back(0.0, trace.initial_loss);
        for (const TraceRow& row : trace.rows) {
            cs.points.emplace_back(static_cast<double>(row.t), row.loss);
        }
        series.push_back(std::move(cs));
    }
    write_json_file(config.out_dir + "/manifest.json", manifest);
    render_loss_chart(config.out_dir + "/loss_curves.svg", series, config.log_loss_axis);
    return any_failed ? 2 : 0;
}

int cmd_histogram(const std::vector<std::string>& trace_files, const std::string& out_dir) {
    if (trace_files.empty()) {
        throw std::invalid_argument("histogram: at least one trace CSV is required");
    }
    std::map<std::size_t, std::size_t> counts;
    double total = 0.0;
    std::size_t rows = 0;
    for (const std::string& file : trace_files) {
        std::ifstream in(file);
        if (!in) throw std::invalid_argument("histogram: cannot open " + file);
        std::string line;
        if (!std::getline(in, line)) throw std::invalid_argument("histogram: empty file " + file);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::vector<std::string> header;
        {
            std::stringstream ss(line);
            std::string field;
            while (std::getline(ss, field, ',')) header.push_back(field);
        }
        std::size_t col = header.size();
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == "inner_loops") col = i;
        }
        if (col == header.size()) {
            throw std::invalid_argument("histogram: no inner_loops column in " + file);
        }
        std::size_t file_rows = 0;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            std::vector<std::string> fields;
            std::stringstream ss(line);
            std::string field;
            while (std::getline(ss, field, ',')) fields.push_back(field);
            if (fields.size() <= col) {
                throw std::invalid_argument("histogram: short row in " + file);
            }
            const char* begin = fields[col].c_str();
            char* end = nullptr;
            const unsigned long long v = std::strtoull(begin, &end, 10);
            if (end == begin || end != begin + fields[col].size()) {
                throw std::invalid_argument("histogram: bad inner_loops value '" + fields[col] +
                                            "' in " + file);
            }
            counts[static_cast<std::size_t>(v)] += 1;
            total += static_cast<double>(v);
            ++file_rows;
        }
        if (file_rows == 0) throw std::invalid_argument("histogram: no data rows in " + file);
        rows += file_rows;
    }
    const double mean = total / static_cast<double>(rows);

    std::filesystem::create_directories(out_dir);
    {
        std::ofstream out(out_dir + "/histogram.csv");
        if (!out) throw std::runtime_error("histogram: cannot open " + out_dir + "/histogram.csv");
        out << "inner_loops,count\n";
        for (const auto& [value, count] : counts) out << value << "," << count << "\n";
        if (!out) throw std::runtime_error("histogram: write failed");
    }

    // Bar chart over the contiguous bin range.
    const std::size_t bin_lo = counts.begin()->first;
    const std::size_t bin_hi = counts.rbegin()->first;
    const double n_bins = static_cast<double>(bin_hi - bin_lo + 1);
    std::size_t max_count = 0;
    for (const auto& [value, count] : counts) max_count = std::max(max_count, count);
    AxisMap map{static_cast<double>(bin_lo) - 0.5, static_cast<double>(bin_hi) + 0.5, 0.0,
                static_cast<double>(max_count) * 1.05};
    SvgDocument doc(kChartWidth, kChartHeight);
    char title[96];
    std::snprintf(title, sizeof(title), "Inner loops per step (mean = %.4g)", mean);
    draw_frame(doc, map, title, "inner_loops", "count", false);
    const double slot = (kChartWidth - kMarginLeft - kMarginRight) / n_bins;
    for (const auto& [value, count] : counts) {
        const double cx = map.px(static_cast<double>(value));
        const double top = map.py(static_cast<double>(count));
        const double bottom = map.py(0.0);
        doc.rect(cx - 0.4 * slot, top, 0.8 * slot, bottom - top, kPalette[2], "none");
    }
    doc.save(out_dir + "/histogram.svg");

    std::printf("mean_inner_loops=%.17g over %zu steps\n", mean, rows);
    return 0;
}

int cmd_landscape(const ExperimentConfig& config) {
    const BuiltExperiment built = build_experiment(config);
    if (built.problem->dimension() != 2) {
        throw std::invalid_argument("landscape: the problem must be 2D");
    }
    std::filesystem::create_directories(config.out_dir);
    const std::vector<Trace> traces = run_all(config, built);
    const double threshold = kThresholdFactor * best_loss_found(traces);
    const LandscapeGrid grid =
        landscape_grid(*built.problem, built.dataset, config.bounds, config.resolution);

    json manifest;
    manifest["command"] = "landscape";
    manifest["config"] = config.raw;
    manifest["threshold"] = std::isfinite(threshold) ? json(threshold) : json(nullptr);
    manifest["summaries"] = json::array();

    std::vector<ChartSeries> trajectories;
    bool any_failed = false;
    for (std::size_t i = 0; i < traces.size(); ++i) {
        const OptimizerSpec& spec = config.optimizers[i];
        const Trace& trace = traces[i];
        const std::string traj_name = "trajectory_" + spec.label + ".csv";
        write_trajectory_csv(config.out_dir + "/" + traj_name, trace);

        const RunSummary s = summarize(spec, trace, threshold);
        manifest["summaries"].push_back(summary_json(s, "trajectory_csv", traj_name));
        if (trace.status == RunStatus::Failed) any_failed = true;

        ChartSeries cs;
        cs.label = spec.label;
        cs.points.emplace_back(trace.theta0[0], trace.theta0[1]);
        for (const TraceRow& row : trace.rows) cs.points.emplace_back(row.theta[0], row.theta[1]);
        trajectories.push_back(std::move(cs));
    }
    write_json_file(config.out_dir + "/manifest.json", manifest);
    render_landscape_chart(config.out_dir + "/landscape.svg", grid, trajectories);
    return any_failed ? 2 : 0;
}

int cmd_sweep(const ExperimentConfig& config) {
    if (config.sweep_rules.empty()) {
        throw std::invalid_argument("sweep: sweep_rules must be nonempty");
    }
    const BuiltExperiment built = build_experiment(config);
    std::filesystem::create_directories(config.out_dir);

    struct Cell {
        std::string label;
        OptimizerKind kind;
        std::string rule;
        Trace trace;
    };
    std::vector<Cell> cells;
    for (const OptimizerSpec& spec : config.optimizers) {
        if (is_loss_bfe_kind(spec.kind)) {
            for (const ToleranceRule& rule : config.sweep_rules) {
                OptimizerSpec variant = spec;
                variant.bfe.tolerance = rule;
                cells.push_back({spec.label, spec.kind, rule_label(rule),
                                 run(*built.problem, built.dataset, config.batch_size, variant,
                                     built.theta0, config.stop, config.seed)});
            }
        } else {
            // The tolerance rule does not apply to angle-based or baseline
            // optimizers; they contribute a single reference row.
            cells.push_back({spec.label, spec.kind, "-",
                             run(*built.problem, built.dataset, config.batch_size, spec,
                                 built.theta0, config.stop, config.seed)});
        }
    }

    std::vector<Trace> traces;
    traces.reserve(cells.size());
    for (const Cell& cell : cells) traces.push_back(cell.trace);
    const double threshold = kThresholdFactor * best_loss_found(traces);

    std::ofstream out(config.out_dir + "/sweep.csv");
    if (!out) throw std::runtime_error("sweep: cannot open " + config.out_dir + "/sweep.csv");
    out << "label,kind,rule,status,final_loss,steps_to_threshold,mean_inner_loops\n";
    bool any_ok = false;
    for (const Cell& cell : cells) {
        const double final_loss =
            cell.trace.rows.empty() ? cell.trace.initial_loss : cell.trace.rows.back().loss;
        out << cell.label << "," << to_string(cell.kind) << "," << cell.rule << ","
            << to_string(cell.trace.status) << "," << format_double(final_loss) << ","
            << csv_or_blank(steps_to_threshold(cell.trace, threshold)) << ","
            << format_double(mean_inner_loops(cell.trace)) << "\n";
        if (cell.trace.status != RunStatus::Failed) any_ok = true;
    }
    if (!out) throw std::runtime_error("sweep: write failed");
    return any_ok ? 0 : 2;
}

}  // namespace bfeopt
