#pragma once

// The forward-exploration optimizer family.
//
// Each step probes the loss landscape *ahead* of the current point: it
// compares one full step at rate eta against a chain of sub-steps covering
// the same span (loss variants), or the angle between the gradient here and
// the gradient after a candidate step (gradient-change variants).  The rate
// is then halved ("zoom-in") or doubled ("zoom-out") until the probe
// agreement crosses a tolerance.
//
// All step operations are pure functions: optimizer state (rate, carried
// tolerance values, per-coordinate state) is passed in and returned.

#include <cstddef>
#include <numbers>
#include <optional>
#include <vector>

#include "bfeopt/core.hpp"
#include "bfeopt/tolerance.hpp"

namespace bfeopt {

// How per-coordinate gradient angles collapse to one scalar in the
// (non-adaptive) gradient-change variant.
enum class AngleAggregate { Max, Mean };

struct BfeConfig {
    double eta0 = 0.001;                      // initial learning rate
    ToleranceRule tolerance = ToleranceRule::mean_scaled(0.001);
    double eta_min = 1e-12;                   // rate floor (safeguard)
    double eta_max = 1e6;                     // rate ceiling (safeguard)
    std::size_t max_inner = 60;               // inner-loop probe cap (safeguard)
    double angle_threshold = std::numbers::pi / 180.0;  // radians; gradient-change variants
    AngleAggregate angle_aggregate = AngleAggregate::Max;
    std::size_t factor = 2;                   // sub-step multiple (2 = binary)

    // Throws std::invalid_argument on inconsistent settings.
    void validate() const;
};

enum class Branch { ZoomIn, ZoomOut, None };

const char* to_string(Branch branch);

// Per-step telemetry.
struct StepReport {
    std::size_t inner_loops = 0;  // probes performed inside the branch loop
    Branch branch = Branch::None;
    double eta_in = 0.0;
    double eta_out = 0.0;
    double loss_accepted = 0.0;   // batch loss at the accepted point
    bool safeguard_hit = false;

    bool operator==(const StepReport&) const = default;
};

// One forward probe at base rate eta.
//
// Zoom-in shape: theta_star jumps the full rate in one step while the chain
// covers the same span in `m` sub-steps of eta/m (gradient re-evaluated at
// each link); loss1 = f(theta_star), loss2 = f(chain end).
// Zoom-out shape: the chain applies m sub-steps of eta each while theta_star
// jumps m*eta at once; loss1 = f(chain end), loss2 = f(theta_star).
struct ProbeResult {
    double eta = 0.0;
    ParamVector theta_star;
    std::vector<ParamVector> chain;  // m points: first sub-step ... chain end
    double loss1 = 0.0;
    double loss2 = 0.0;
    double eps_comp = 0.0;           // |loss2 - loss1|
    double eps_val = 0.0;            // tolerance for this probe
    bool ok = false;                 // every evaluation finite

    const ParamVector& theta_plus() const { return chain.front(); }
    const ParamVector& chain_end() const { return chain.back(); }
};

ProbeResult zoom_in_probe(const Problem& problem, const Batch& batch, const ParamVector& theta,
                          double eta, std::size_t m, const ToleranceRule& rule, std::size_t t);

ProbeResult zoom_out_probe(const Problem& problem, const Batch& batch, const ParamVector& theta,
                           double eta, std::size_t m, const ToleranceRule& rule, std::size_t t);

// Angle between the lines of slope g and g_star, in [0, pi/2]; returns
// exactly pi/2 when the slopes are perpendicular (1 + g*g_star == 0).
double gradient_angle(double g, double g_star);

// Probe agreement carried from one step into the next step's branch choice.
struct CarriedTolerance {
    double eps_comp = 0.0;
    double eps_val = 0.0;

    bool operator==(const CarriedTolerance&) const = default;
};

struct ScalarStepResult {
    ParamVector theta;
    double eta = 0.0;
    CarriedTolerance carried;
    StepReport report;
};

// One step of the binary loss-comparison scheduler (zoom-in + zoom-out).
// `carried` holds the previous step's refreshed eps values; pass nullopt on
// the first step to prime them with one probe at the entry rate.
// Requires cfg.factor == 2.
ScalarStepResult improved_bfe_step(const Problem& problem, const Batch& batch,
                                   const ParamVector& theta, double eta, std::size_t t,
                                   const BfeConfig& cfg,
                                   const std::optional<CarriedTolerance>& carried);

// Generalization of improved_bfe_step scaling the rate by cfg.factor (m >= 2)
// with m-link probe chains.  improved_bfe_step is this with factor pinned to 2.
ScalarStepResult mfe_step(const Problem& problem, const Batch& batch, const ParamVector& theta,
                          double eta, std::size_t t, const BfeConfig& cfg,
                          const std::optional<CarriedTolerance>& carried);

// Zoom-in-only variant: the rate resets to cfg.eta0 every step, one probe
// runs before the loop (counted in inner_loops), and the loop only shrinks.
// Requires cfg.factor == 2.
ScalarStepResult bfe_zoom_in_only_step(const Problem& problem, const Batch& batch,
                                       const ParamVector& theta, std::size_t t,
                                       const BfeConfig& cfg);

// Gradient-change variant: probes compare gradient angles instead of losses,
// the rate is rescaled at the head of each inner iteration, and the zoom-out
// branch backs off one halving on exit.
ScalarStepResult bfe_gradient_change_step(const Problem& problem, const Batch& batch,
                                          const ParamVector& theta, double eta,
                                          const BfeConfig& cfg,
                                          const std::optional<CarriedTolerance>& carried);

// Per-coordinate state of the adaptive gradient-change variant.
struct AdaptiveState {
    std::vector<double> eta;       // one rate per coordinate
    std::vector<double> eps_comp;  // carried per-coordinate angles
    std::vector<double> eps_val;   // per-coordinate thresholds

    // Primes the state with one single-axis probe per coordinate at cfg.eta0.
    static AdaptiveState init(const Problem& problem, const Batch& batch,
                              const ParamVector& theta, const BfeConfig& cfg);

    bool operator==(const AdaptiveState&) const = default;
};

struct AdaptiveStepResult {
    ParamVector theta;
    AdaptiveState state;
    StepReport report;
};

// Adaptive gradient-change step: every coordinate runs its own zoom-in /
// zoom-out angle search on its own rate (probes move only that coordinate),
// updates are applied jointly, and the carried angles are refreshed per
// coordinate at the updated point.  A safeguard in one coordinate does not
// abort the others.
AdaptiveStepResult adaptive_bfe_gradient_change_step(const Problem& problem, const Batch& batch,
                                                     const ParamVector& theta,
                                                     const AdaptiveState& state,
                                                     const BfeConfig& cfg);

}  // namespace bfeopt
