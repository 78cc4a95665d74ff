#include "support.hpp"

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bfeopt/bfe.hpp"
#include "oracles/transcription.hpp"

namespace testsupport {

using bfeopt::Batch;
using bfeopt::BfeConfig;
using bfeopt::Branch;
using bfeopt::CarriedTolerance;
using bfeopt::GradVector;
using bfeopt::ParamVector;
using bfeopt::Rng;
using bfeopt::ToleranceRule;

Batch unit_batch() { return bfeopt::placeholder_dataset(); }

FnProblem half_square(std::size_t dim) {
    return FnProblem(
        dim,
        [](const ParamVector& theta) {
            double s = 0.0;
            for (double x : theta) s += 0.5 * x * x;
            return s;
        },
        [](const ParamVector& theta) { return theta; });
}

FnProblem linear_loss(GradVector c, double offset) {
    const std::size_t dim = c.size();
    auto coeffs = std::make_shared<GradVector>(std::move(c));
    return FnProblem(
        dim,
        [coeffs, offset](const ParamVector& theta) {
            double s = offset;
            for (std::size_t i = 0; i < theta.size(); ++i) s += (*coeffs)[i] * theta[i];
            return s;
        },
        [coeffs](const ParamVector&) { return *coeffs; });
}

FnProblem constant_loss(double value, std::size_t dim) {
    return FnProblem(
        dim, [value](const ParamVector&) { return value; },
        [dim](const ParamVector&) { return GradVector(dim, 0.0); });
}

bfeopt::QuadraticSpec random_spd_spec(Rng& rng, std::size_t dim) {
    std::vector<std::vector<double>> m(dim, std::vector<double>(dim, 0.0));
    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c = 0; c < dim; ++c) m[r][c] = rng.gaussian();
    }
    const double shift = 0.1 + rng.uniform();
    bfeopt::QuadraticSpec spec;
    spec.curvature.assign(dim, std::vector<double>(dim, 0.0));
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < dim; ++k) s += m[k][i] * m[k][j];
            spec.curvature[i][j] = s;  // summation order matches transposed entry
        }
        spec.curvature[i][i] += shift;
    }
    spec.theta_opt.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) spec.theta_opt[i] = rng.uniform(-2.0, 2.0);
    return spec;
}

namespace {

struct Instance {
    std::unique_ptr<bfeopt::Problem> problem;
    Batch batch;
    ParamVector theta0;
    BfeConfig cfg;
    double eta_entry = 0.0;
};

// Seeded mix of problem shapes: quadratic bowls and regression batches drive
// the regular zoom-in/zoom-out paths, linear losses push the rate to the
// ceiling, constant losses pin the branch decision (zero loss hits the rate
// floor, nonzero loss the ceiling), and a periodic tiny max_inner with an
// unreachable tolerance forces the probe-cap safeguard.
Instance make_instance(std::size_t i, std::uint64_t seed, std::size_t factor) {
    Rng rng(bfeopt::mix_seed(seed, i));
    Instance inst;

    if (i % 11 == 0) {
        const double value = (i % 22 == 0) ? 0.0 : 3.0;
        inst.problem = std::make_unique<FnProblem>(constant_loss(value, 2));
        inst.batch = unit_batch();
        inst.theta0 = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
    } else if (i % 7 == 0) {
        GradVector c = {rng.uniform(0.5, 1.5), -rng.uniform(0.5, 1.5)};
        inst.problem = std::make_unique<FnProblem>(linear_loss(std::move(c), 2.0));
        inst.batch = unit_batch();
        inst.theta0 = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    } else if (i % 2 == 0) {
        const std::size_t dim = 2 + i % 3;
        const bfeopt::QuadraticSpec spec = random_spd_spec(rng, dim);
        inst.theta0.resize(dim);
        for (std::size_t k = 0; k < dim; ++k) inst.theta0[k] = spec.theta_opt[k] + rng.gaussian();
        inst.problem = std::make_unique<bfeopt::QuadraticProblem>(bfeopt::make_quadratic(spec));
        inst.batch = unit_batch();
    } else {
        bfeopt::RegressionSpec spec;
        spec.true_weights = {2.0, -1.0, 0.5};  // two features plus intercept
        spec.n_samples = 48;
        spec.seed = bfeopt::mix_seed(seed, 1000 + i);
        bfeopt::RegressionData data = bfeopt::make_regression(spec);
        inst.problem = std::make_unique<bfeopt::LinearRegressionProblem>(data.problem);
        inst.batch = std::move(data.dataset);
        inst.theta0.resize(3);
        for (std::size_t k = 0; k < 3; ++k) inst.theta0[k] = 0.5 * rng.gaussian();
    }

    BfeConfig& cfg = inst.cfg;
    cfg.factor = factor;
    switch (i % 4) {
        case 0: cfg.tolerance = ToleranceRule::mean_scaled(0.001); break;
        case 1: cfg.tolerance = ToleranceRule::min_scaled(0.001); break;
        case 2: cfg.tolerance = ToleranceRule::constant(0.01); break;
        default: cfg.tolerance = ToleranceRule::decay_mean_scaled(0.001, 100.0); break;
    }
    if (i % 5 == 0 && i % 11 != 0) {
        cfg.max_inner = 5;
        cfg.tolerance = ToleranceRule::constant(1e-9);
    }
    if (i % 3 == 0) cfg.angle_threshold = 0.05;
    cfg.angle_aggregate = (i % 2 == 0) ? bfeopt::AngleAggregate::Max : bfeopt::AngleAggregate::Mean;
    static constexpr double kEtaChoices[] = {0.001, 0.01, 0.1, 1.0};
    cfg.eta0 = kEtaChoices[rng.index(4)];
    const int shift = static_cast<int>(rng.index(5)) - 2;
    inst.eta_entry = cfg.eta0 * std::pow(2.0, static_cast<double>(shift));
    return inst;
}

std::string where(std::size_t instance, std::size_t t, const char* field) {
    return "instance " + std::to_string(instance) + " step " + std::to_string(t) + ": " +
           field + " mismatch";
}

// Returns the first mismatching field name, or nullptr when all equal.
const char* compare_scalar(const bfeopt::ScalarStepResult& r, const oracle::ScalarStep& o) {
    if (r.theta != o.theta) return "theta";
    if (r.eta != o.eta) return "eta";
    if (r.carried.eps_comp != o.eps_comp) return "carried eps_comp";
    if (r.carried.eps_val != o.eps_val) return "carried eps_val";
    if (r.report.inner_loops != o.inner_loops) return "inner_loops";
    if (r.report.branch != o.branch) return "branch";
    if (r.report.safeguard_hit != o.safeguard) return "safeguard";
    if (r.report.loss_accepted != o.loss_accepted) return "loss_accepted";
    if (r.report.eta_in != o.eta_in) return "eta_in";
    if (r.report.eta_out != o.eta_out) return "eta_out";
    return nullptr;
}

void tally(OracleCheckStats& st, Branch branch, bool safeguard) {
    ++st.steps;
    if (branch == Branch::ZoomIn) ++st.zoom_in;
    if (branch == Branch::ZoomOut) ++st.zoom_out;
    if (safeguard) ++st.safeguards;
}

OracleCheckStats check_scalar_loss(std::size_t instances, std::uint64_t seed, std::size_t factor,
                                   bool pinned_binary) {
    OracleCheckStats st;
    for (std::size_t i = 0; i < instances; ++i) {
        Instance inst = make_instance(i, seed, factor);
        ++st.instances;
        ParamVector theta_impl = inst.theta0;
        ParamVector theta_orc = inst.theta0;
        double eta_impl = inst.eta_entry;
        double eta_orc = inst.eta_entry;
        std::optional<CarriedTolerance> car_impl;
        std::optional<CarriedTolerance> car_orc;
        for (std::size_t t = 1; t <= 5; ++t) {
            const bfeopt::ScalarStepResult r =
                pinned_binary
                    ? bfeopt::improved_bfe_step(*inst.problem, inst.batch, theta_impl, eta_impl,
                                                t, inst.cfg, car_impl)
                    : bfeopt::mfe_step(*inst.problem, inst.batch, theta_impl, eta_impl, t,
                                       inst.cfg, car_impl);
            const oracle::ScalarStep o =
                pinned_binary
                    ? oracle::improved_bfe_step(*inst.problem, inst.batch, theta_orc, eta_orc, t,
                                                inst.cfg, car_orc)
                    : oracle::mfe_step(*inst.problem, inst.batch, theta_orc, eta_orc, t, inst.cfg,
                                       car_orc);
            if (const char* field = compare_scalar(r, o)) {
                ++st.mismatches;
                if (st.first_mismatch.empty()) st.first_mismatch = where(i, t, field);
                break;
            }
            tally(st, r.report.branch, r.report.safeguard_hit);
            theta_impl = r.theta;
            eta_impl = r.eta;
            car_impl = r.carried;
            theta_orc = o.theta;
            eta_orc = o.eta;
            car_orc = CarriedTolerance{o.eps_comp, o.eps_val};
        }
    }
    return st;
}

}  // namespace

OracleCheckStats check_improved_bfe_oracle(std::size_t instances, std::uint64_t seed) {
    return check_scalar_loss(instances, seed, 2, true);
}

OracleCheckStats check_mfe_oracle(std::size_t instances, std::uint64_t seed, std::size_t factor) {
    return check_scalar_loss(instances, seed, factor, false);
}

OracleCheckStats check_zoom_in_only_oracle(std::size_t instances, std::uint64_t seed) {
    OracleCheckStats st;
    for (std::size_t i = 0; i < instances; ++i) {
        Instance inst = make_instance(i, seed, 2);
        ++st.instances;
        ParamVector theta_impl = inst.theta0;
        ParamVector theta_orc = inst.theta0;
        for (std::size_t t = 1; t <= 5; ++t) {
            const bfeopt::ScalarStepResult r =
                bfeopt::bfe_zoom_in_only_step(*inst.problem, inst.batch, theta_impl, t, inst.cfg);
            const oracle::ScalarStep o =
                oracle::zoom_in_only_step(*inst.problem, inst.batch, theta_orc, t, inst.cfg);
            if (const char* field = compare_scalar(r, o)) {
                ++st.mismatches;
                if (st.first_mismatch.empty()) st.first_mismatch = where(i, t, field);
                break;
            }
            tally(st, r.report.branch, r.report.safeguard_hit);
            theta_impl = r.theta;
            theta_orc = o.theta;
        }
    }
    return st;
}

OracleCheckStats check_gradient_change_oracle(std::size_t instances, std::uint64_t seed) {
    OracleCheckStats st;
    for (std::size_t i = 0; i < instances; ++i) {
        Instance inst = make_instance(i, seed, 2);
        ++st.instances;
        ParamVector theta_impl = inst.theta0;
        ParamVector theta_orc = inst.theta0;
        double eta_impl = inst.eta_entry;
        double eta_orc = inst.eta_entry;
        std::optional<CarriedTolerance> car_impl;
        std::optional<CarriedTolerance> car_orc;
        for (std::size_t t = 1; t <= 5; ++t) {
            const bfeopt::ScalarStepResult r = bfeopt::bfe_gradient_change_step(
                *inst.problem, inst.batch, theta_impl, eta_impl, inst.cfg, car_impl);
            const oracle::ScalarStep o = oracle::gradient_change_step(
                *inst.problem, inst.batch, theta_orc, eta_orc, inst.cfg, car_orc);
            if (const char* field = compare_scalar(r, o)) {
                ++st.mismatches;
                if (st.first_mismatch.empty()) st.first_mismatch = where(i, t, field);
                break;
            }
            tally(st, r.report.branch, r.report.safeguard_hit);
            theta_impl = r.theta;
            eta_impl = r.eta;
            car_impl = r.carried;
            theta_orc = o.theta;
            eta_orc = o.eta;
            car_orc = CarriedTolerance{o.eps_comp, o.eps_val};
        }
    }
    return st;
}

OracleCheckStats check_adaptive_oracle(std::size_t instances, std::uint64_t seed) {
    OracleCheckStats st;
    for (std::size_t i = 0; i < instances; ++i) {
        Instance inst = make_instance(i, seed, 2);
        ++st.instances;

        bfeopt::AdaptiveState state_impl =
            bfeopt::AdaptiveState::init(*inst.problem, inst.batch, inst.theta0, inst.cfg);
        oracle::AdaptiveStep state_orc =
            oracle::adaptive_init(*inst.problem, inst.batch, inst.theta0, inst.cfg);
        if (state_impl.eta != state_orc.eta || state_impl.eps_comp != state_orc.eps_comp ||
            state_impl.eps_val != state_orc.eps_val) {
            ++st.mismatches;
            if (st.first_mismatch.empty()) st.first_mismatch = where(i, 0, "init state");
            continue;
        }

        ParamVector theta_impl = inst.theta0;
        ParamVector theta_orc = inst.theta0;
        for (std::size_t t = 1; t <= 5; ++t) {
            const bfeopt::AdaptiveStepResult r = bfeopt::adaptive_bfe_gradient_change_step(
                *inst.problem, inst.batch, theta_impl, state_impl, inst.cfg);
            const oracle::AdaptiveStep o =
                oracle::adaptive_step(*inst.problem, inst.batch, theta_orc, state_orc.eta,
                                      state_orc.eps_comp, state_orc.eps_val, inst.cfg);
            const char* field = nullptr;
            if (r.theta != o.theta) field = "theta";
            else if (r.state.eta != o.eta) field = "state eta";
            else if (r.state.eps_comp != o.eps_comp) field = "state eps_comp";
            else if (r.state.eps_val != o.eps_val) field = "state eps_val";
            else if (r.report.inner_loops != o.inner_loops) field = "inner_loops";
            else if (r.report.branch != o.branch) field = "branch";
            else if (r.report.safeguard_hit != o.safeguard) field = "safeguard";
            else if (r.report.loss_accepted != o.loss_accepted) field = "loss_accepted";
            else if (r.report.eta_in != o.eta_in) field = "eta_in";
            else if (r.report.eta_out != o.eta_out) field = "eta_out";
            if (field != nullptr) {
                ++st.mismatches;
                if (st.first_mismatch.empty()) st.first_mismatch = where(i, t, field);
                break;
            }
            tally(st, r.report.branch, r.report.safeguard_hit);
            theta_impl = r.theta;
            state_impl = r.state;
            theta_orc = o.theta;
            state_orc = o;
        }
    }
    return st;
}

}  // namespace testsupport
