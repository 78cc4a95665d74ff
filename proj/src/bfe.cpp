#include "bfeopt/bfe.hpp"

#include <cfloat>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace bfeopt {

namespace {

// Carried values installed when a probe (or refresh) fails: infinity versus
// the smallest normal forces the next branch decision into zoom-in, shrinking
// the rate until probes become evaluable again.
constexpr double kFailedEpsComp = std::numeric_limits<double>::infinity();
constexpr double kFailedEpsVal = DBL_MIN;

CarriedTolerance carried_from(const ProbeResult& probe) {
    if (probe.ok) return {probe.eps_comp, probe.eps_val};
    return {kFailedEpsComp, kFailedEpsVal};
}

void check_theta(const ParamVector& theta) {
    if (theta.empty()) throw std::invalid_argument("step: theta must be nonempty");
    if (!all_finite(theta)) throw std::invalid_argument("step: theta must be finite");
}

void check_eta_range(double eta, const BfeConfig& cfg) {
    if (!(eta >= cfg.eta_min && eta <= cfg.eta_max)) {
        throw std::invalid_argument("step: eta must lie in [eta_min, eta_max]");
    }
}

}  // namespace

void BfeConfig::validate() const {
    if (!(eta_min > 0.0)) throw std::invalid_argument("BfeConfig: eta_min must be positive");
    if (!(eta_min <= eta0 && eta0 <= eta_max)) {
        throw std::invalid_argument("BfeConfig: need eta_min <= eta0 <= eta_max");
    }
    if (max_inner < 1) throw std::invalid_argument("BfeConfig: max_inner must be >= 1");
    if (!(angle_threshold > 0.0 && angle_threshold < std::numbers::pi / 2.0)) {
        throw std::invalid_argument("BfeConfig: angle_threshold must lie in (0, pi/2)");
    }
    if (factor < 2) throw std::invalid_argument("BfeConfig: factor must be >= 2");
}

const char* to_string(Branch branch) {
    switch (branch) {
        case Branch::ZoomIn: return "zoom_in";
        case Branch::ZoomOut: return "zoom_out";
        case Branch::None: return "none";
    }
    return "none";
}

ProbeResult zoom_in_probe(const Problem& problem, const Batch& batch, const ParamVector& theta,
                          double eta, std::size_t m, const ToleranceRule& rule, std::size_t t) {
    if (!(eta > 0.0)) throw std::invalid_argument("zoom_in_probe: eta must be positive");
    if (m < 2) throw std::invalid_argument("zoom_in_probe: m must be >= 2");
    ProbeResult r;
    r.eta = eta;
    const GradVector g = problem.gradient(theta, batch);
    bool ok = all_finite(g);
    r.theta_star = gradient_step(theta, eta, g);
    ok = ok && all_finite(r.theta_star);
    const double sub = eta / static_cast<double>(m);
    ParamVector cur = theta;
    r.chain.reserve(m);
    for (std::size_t k = 0; k < m; ++k) {
        const GradVector gc = (k == 0) ? g : problem.gradient(cur, batch);
        ok = ok && all_finite(gc);
        cur = gradient_step(cur, sub, gc);
        ok = ok && all_finite(cur);
        r.chain.push_back(cur);
    }
    r.loss1 = problem.loss(r.theta_star, batch);
    r.loss2 = problem.loss(r.chain.back(), batch);
    ok = ok && std::isfinite(r.loss1) && std::isfinite(r.loss2);
    if (ok) {
        r.eps_comp = std::abs(r.loss2 - r.loss1);
        r.eps_val = rule.evaluate(r.loss1, r.loss2, t);
        r.ok = true;
    } else {
        r.eps_comp = kFailedEpsComp;
        r.eps_val = kFailedEpsVal;
        r.ok = false;
    }
    return r;
}

ProbeResult zoom_out_probe(const Problem& problem, const Batch& batch, const ParamVector& theta,
                           double eta, std::size_t m, const ToleranceRule& rule, std::size_t t) {
    if (!(eta > 0.0)) throw std::invalid_argument("zoom_out_probe: eta must be positive");
    if (m < 2) throw std::invalid_argument("zoom_out_probe: m must be >= 2");
    ProbeResult r;
    r.eta = eta;
    const GradVector g = problem.gradient(theta, batch);
    bool ok = all_finite(g);
    ParamVector cur = theta;
    r.chain.reserve(m);
    for (std::size_t k = 0; k < m; ++k) {
        const GradVector gc = (k == 0) ? g : problem.gradient(cur, batch);
        ok = ok && all_finite(gc);
        cur = gradient_step(cur, eta, gc);
        ok = ok && all_finite(cur);
        r.chain.push_back(cur);
    }
    r.theta_star = gradient_step(theta, static_cast<double>(m) * eta, g);
    ok = ok && all_finite(r.theta_star);
    r.loss1 = problem.loss(r.chain.back(), batch);
    r.loss2 = problem.loss(r.theta_star, batch);
    ok = ok && std::isfinite(r.loss1) && std::isfinite(r.loss2);
    if (ok) {
        r.eps_comp = std::abs(r.loss2 - r.loss1);
        r.eps_val = rule.evaluate(r.loss1, r.loss2, t);
        r.ok = true;
    } else {
        r.eps_comp = kFailedEpsComp;
        r.eps_val = kFailedEpsVal;
        r.ok = false;
    }
    return r;
}

double gradient_angle(double g, double g_star) {
    const double denom = 1.0 + g_star * g;
    if (denom == 0.0) return std::numbers::pi / 2.0;
    return std::atan(std::abs((g_star - g) / denom));
}

namespace {

// Shared zoom-in/zoom-out loss search; improved_bfe_step pins cfg.factor to 2.
ScalarStepResult loss_exploration_step(const Problem& problem, const Batch& batch,
                                       const ParamVector& theta, double eta, std::size_t t,
                                       const BfeConfig& cfg,
                                       const std::optional<CarriedTolerance>& carried) {
    const std::size_t m = cfg.factor;
    const double md = static_cast<double>(m);
    const ToleranceRule& rule = cfg.tolerance;

    double eps_c = 0.0;
    double eps_v = 0.0;
    if (carried.has_value()) {
        eps_c = carried->eps_comp;
        eps_v = carried->eps_val;
    } else {
        // First step: prime the comparison with one probe at the entry rate
        // (not counted in inner_loops).
        const CarriedTolerance boot =
            carried_from(zoom_in_probe(problem, batch, theta, eta, m, rule, t));
        eps_c = boot.eps_comp;
        eps_v = boot.eps_val;
    }

    ScalarStepResult out;
    StepReport& rep = out.report;
    rep.eta_in = eta;
    rep.branch = (eps_c >= eps_v) ? Branch::ZoomIn : Branch::ZoomOut;

    double cur = eta;
    std::size_t inner = 0;
    bool safeguard = false;
    std::vector<ProbeResult> probes;  // successful probes, oldest first

    if (rep.branch == Branch::ZoomIn) {
        while (eps_c >= eps_v) {
            if (inner >= cfg.max_inner) {
                safeguard = true;
                break;
            }
            ProbeResult p = zoom_in_probe(problem, batch, theta, cur, m, rule, t);
            ++inner;
            if (p.ok) {
                eps_c = p.eps_comp;
                eps_v = p.eps_val;
                probes.push_back(std::move(p));
            }
            // A failed probe leaves eps_c/eps_v untouched, forcing a shrink.
            if (eps_c >= eps_v) {
                if (cur / md < cfg.eta_min) {
                    safeguard = true;
                    break;
                }
                cur = cur / md;
            }
        }
    } else {
        while (eps_c < eps_v) {
            if (inner >= cfg.max_inner) {
                safeguard = true;
                break;
            }
            ProbeResult p = zoom_out_probe(problem, batch, theta, cur, m, rule, t);
            ++inner;
            if (!p.ok) {
                // Growing the rate into non-evaluable territory: stop here.
                safeguard = true;
                break;
            }
            eps_c = p.eps_comp;
            eps_v = p.eps_val;
            probes.push_back(std::move(p));
            if (eps_c < eps_v) {
                if (cur * md > cfg.eta_max) {
                    safeguard = true;
                    break;
                }
                cur = cur * md;
            }
        }
    }

    rep.inner_loops = inner;
    rep.safeguard_hit = safeguard;

    if (!safeguard) {
        // Normal exit: the rate lands on the last probed value exactly.
        const ProbeResult& last = probes.back();
        out.eta = last.eta;
        if (rep.branch == Branch::ZoomIn) {
            out.theta = last.theta_star;
            rep.loss_accepted = last.loss1;
        } else {
            out.theta = last.theta_plus();  // one rate-sized sub-step
            rep.loss_accepted = problem.loss(out.theta, batch);
        }
    } else if (!probes.empty()) {
        // Safeguard: accept the best (lowest loss1) probed jump, earliest on ties.
        std::size_t best = 0;
        for (std::size_t i = 1; i < probes.size(); ++i) {
            if (probes[i].loss1 < probes[best].loss1) best = i;
        }
        const ProbeResult& sel = probes[best];
        out.theta = sel.theta_star;
        out.eta = sel.eta;
        rep.loss_accepted = (rep.branch == Branch::ZoomIn) ? sel.loss1 : sel.loss2;
    } else {
        // No usable probe at all: stay put.
        out.theta = theta;
        out.eta = eta;
        rep.loss_accepted = problem.loss(theta, batch);
    }
    rep.eta_out = out.eta;

    // Refresh the carried comparison with one branch-shaped probe at the
    // accepted point and rate (not counted in inner_loops).
    const ProbeResult refresh =
        (rep.branch == Branch::ZoomIn)
            ? zoom_in_probe(problem, batch, out.theta, out.eta, m, rule, t)
            : zoom_out_probe(problem, batch, out.theta, out.eta, m, rule, t);
    out.carried = carried_from(refresh);
    return out;
}

}  // namespace

ScalarStepResult mfe_step(const Problem& problem, const Batch& batch, const ParamVector& theta,
                          double eta, std::size_t t, const BfeConfig& cfg,
                          const std::optional<CarriedTolerance>& carried) {
    cfg.validate();
    check_theta(theta);
    check_eta_range(eta, cfg);
    if (t < 1) throw std::invalid_argument("mfe_step: t must be >= 1");
    return loss_exploration_step(problem, batch, theta, eta, t, cfg, carried);
}

ScalarStepResult improved_bfe_step(const Problem& problem, const Batch& batch,
                                   const ParamVector& theta, double eta, std::size_t t,
                                   const BfeConfig& cfg,
                                   const std::optional<CarriedTolerance>& carried) {
    if (cfg.factor != 2) {
        throw std::invalid_argument("improved_bfe_step: factor must be 2 (use mfe_step)");
    }
    return mfe_step(problem, batch, theta, eta, t, cfg, carried);
}

ScalarStepResult bfe_zoom_in_only_step(const Problem& problem, const Batch& batch,
                                       const ParamVector& theta, std::size_t t,
                                       const BfeConfig& cfg) {
    cfg.validate();
    if (cfg.factor != 2) throw std::invalid_argument("bfe_zoom_in_only_step: factor must be 2");
    check_theta(theta);
    if (t < 1) throw std::invalid_argument("bfe_zoom_in_only_step: t must be >= 1");
    const ToleranceRule& rule = cfg.tolerance;

    double cur = cfg.eta0;  // the rate resets every step
    std::size_t inner = 0;
    bool safeguard = false;
    std::vector<ProbeResult> probes;

    double eps_c = 0.0;
    double eps_v = 0.0;
    {
        ProbeResult p0 = zoom_in_probe(problem, batch, theta, cur, 2, rule, t);
        ++inner;  // the pre-loop probe counts
        if (p0.ok) {
            eps_c = p0.eps_comp;
            eps_v = p0.eps_val;
            probes.push_back(std::move(p0));
        } else {
            eps_c = kFailedEpsComp;
            eps_v = kFailedEpsVal;
        }
    }
    const bool entered = (eps_c >= eps_v);
    while (eps_c >= eps_v) {
        if (inner >= cfg.max_inner) {
            safeguard = true;
            break;
        }
        // The first loop iteration re-probes the entry rate, exactly as the
        // shrink-at-the-end loop shape implies.
        ProbeResult p = zoom_in_probe(problem, batch, theta, cur, 2, rule, t);
        ++inner;
        if (p.ok) {
            eps_c = p.eps_comp;
            eps_v = p.eps_val;
            probes.push_back(std::move(p));
        }
        if (eps_c >= eps_v) {
            if (cur / 2.0 < cfg.eta_min) {
                safeguard = true;
                break;
            }
            cur = cur / 2.0;
        }
    }

    ScalarStepResult out;
    StepReport& rep = out.report;
    rep.branch = Branch::ZoomIn;
    rep.eta_in = cfg.eta0;
    rep.inner_loops = inner;
    rep.safeguard_hit = safeguard;

    if (!safeguard) {
        const ProbeResult& last = probes.back();
        out.theta = last.theta_star;
        // The exit doubling is literal: when the pre-loop probe already
        // passed, the reported rate is twice the probed one; after any shrink
        // iterations it lands back on the last probed rate.
        out.eta = entered ? last.eta : 2.0 * last.eta;
        rep.loss_accepted = last.loss1;
    } else if (!probes.empty()) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < probes.size(); ++i) {
            if (probes[i].loss1 < probes[best].loss1) best = i;
        }
        const ProbeResult& sel = probes[best];
        out.theta = sel.theta_star;
        out.eta = sel.eta;
        rep.loss_accepted = sel.loss1;
    } else {
        out.theta = theta;
        out.eta = cfg.eta0;
        rep.loss_accepted = problem.loss(theta, batch);
    }
    rep.eta_out = out.eta;
    out.carried = {eps_c, eps_v};  // informational; nothing carries across steps
    return out;
}

namespace {

// One gradient-angle probe: full step at the candidate rate, angles between
// the gradients before and after, aggregated to a scalar.
struct AngleProbe {
    double eta = 0.0;
    ParamVector theta_star;
    GradVector g;
    GradVector g_star;
    double eps_c = 0.0;
    bool ok = false;
};

double aggregate_angles(const GradVector& g, const GradVector& g_star, AngleAggregate how) {
    double mx = 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double a = gradient_angle(g[i], g_star[i]);
        if (a > mx) mx = a;
        sum += a;
    }
    if (how == AngleAggregate::Max) return mx;
    return sum / static_cast<double>(g.size());
}

AngleProbe angle_probe(const Problem& problem, const Batch& batch, const ParamVector& theta,
                       double eta, const BfeConfig& cfg) {
    AngleProbe p;
    p.eta = eta;
    p.g = problem.gradient(theta, batch);
    bool ok = all_finite(p.g);
    p.theta_star = gradient_step(theta, eta, p.g);
    ok = ok && all_finite(p.theta_star);
    p.g_star = problem.gradient(p.theta_star, batch);
    ok = ok && all_finite(p.g_star);
    if (ok) p.eps_c = aggregate_angles(p.g, p.g_star, cfg.angle_aggregate);
    p.ok = ok;
    return p;
}

}  // namespace

ScalarStepResult bfe_gradient_change_step(const Problem& problem, const Batch& batch,
                                          const ParamVector& theta, double eta,
                                          const BfeConfig& cfg,
                                          const std::optional<CarriedTolerance>& carried) {
    cfg.validate();
    check_theta(theta);
    check_eta_range(eta, cfg);
    const double threshold = cfg.angle_threshold;

    double eps_c = 0.0;
    double eps_v = threshold;
    if (carried.has_value()) {
        eps_c = carried->eps_comp;
        eps_v = carried->eps_val;
    } else {
        const AngleProbe boot = angle_probe(problem, batch, theta, eta, cfg);
        eps_c = boot.ok ? boot.eps_c : kFailedEpsComp;
    }

    ScalarStepResult out;
    StepReport& rep = out.report;
    rep.eta_in = eta;
    rep.branch = (eps_c >= eps_v) ? Branch::ZoomIn : Branch::ZoomOut;

    double cur = eta;
    std::size_t inner = 0;
    bool safeguard = false;
    std::vector<AngleProbe> probes;

    if (rep.branch == Branch::ZoomIn) {
        while (eps_c >= eps_v) {
            if (inner >= cfg.max_inner) {
                safeguard = true;
                break;
            }
            if (cur / 2.0 < cfg.eta_min) {
                safeguard = true;
                break;
            }
            cur = cur / 2.0;  // the rate rescales at the head of the iteration
            AngleProbe p = angle_probe(problem, batch, theta, cur, cfg);
            ++inner;
            if (p.ok) {
                eps_c = p.eps_c;
                eps_v = threshold;
                probes.push_back(std::move(p));
            }
        }
        if (!safeguard) {
            const AngleProbe& last = probes.back();
            out.theta = last.theta_star;
            out.eta = last.eta;
        } else if (!probes.empty()) {
            // Accept the probe with the smallest angle, earliest on ties.
            std::size_t best = 0;
            for (std::size_t i = 1; i < probes.size(); ++i) {
                if (probes[i].eps_c < probes[best].eps_c) best = i;
            }
            out.theta = probes[best].theta_star;
            out.eta = probes[best].eta;
        } else {
            out.theta = theta;
            out.eta = eta;
        }
    } else {
        while (eps_c < eps_v) {
            if (inner >= cfg.max_inner) {
                safeguard = true;
                break;
            }
            if (cur * 2.0 > cfg.eta_max) {
                safeguard = true;
                break;
            }
            cur = cur * 2.0;
            AngleProbe p = angle_probe(problem, batch, theta, cur, cfg);
            ++inner;
            if (!p.ok) {
                safeguard = true;
                break;
            }
            eps_c = p.eps_c;
            eps_v = threshold;
            probes.push_back(std::move(p));
        }
        if (!safeguard) {
            // The last probe broke the agreement: back off one halving and take
            // a single step at that rate with the gradient at theta.
            const AngleProbe& last = probes.back();
            out.eta = cur / 2.0;
            out.theta = gradient_step(theta, out.eta, last.g);
        } else if (!probes.empty()) {
            const AngleProbe& last = probes.back();  // largest validated step
            out.theta = last.theta_star;
            out.eta = last.eta;
        } else {
            // Zero validated probes: plain step at the entry rate if evaluable.
            const GradVector g = problem.gradient(theta, batch);
            out.eta = eta;
            if (all_finite(g)) {
                out.theta = gradient_step(theta, eta, g);
                if (!all_finite(out.theta)) out.theta = theta;
            } else {
                out.theta = theta;
            }
        }
    }

    rep.inner_loops = inner;
    rep.safeguard_hit = safeguard;
    rep.eta_out = out.eta;
    rep.loss_accepted = problem.loss(out.theta, batch);

    const AngleProbe refresh = angle_probe(problem, batch, out.theta, out.eta, cfg);
    out.carried = refresh.ok ? CarriedTolerance{refresh.eps_c, threshold}
                             : CarriedTolerance{kFailedEpsComp, threshold};
    return out;
}

namespace {

// Single-axis probe for the adaptive variant: only coordinate i moves; the
// angle compares the i-th gradient component before and after.
struct AxisProbe {
    double eta = 0.0;
    double star_coord = 0.0;
    double g_i = 0.0;
    double g_star_i = 0.0;
    double angle = 0.0;
    bool ok = false;
};

AxisProbe axis_probe(const Problem& problem, const Batch& batch, const ParamVector& theta,
                     std::size_t i, double eta) {
    AxisProbe p;
    p.eta = eta;
    const GradVector g = problem.gradient(theta, batch);
    p.g_i = g[i];
    bool ok = std::isfinite(p.g_i);
    ParamVector moved = theta;
    moved[i] = theta[i] - eta * g[i];
    p.star_coord = moved[i];
    ok = ok && std::isfinite(p.star_coord);
    const GradVector gs = problem.gradient(moved, batch);
    p.g_star_i = gs[i];
    ok = ok && std::isfinite(p.g_star_i);
    if (ok) p.angle = gradient_angle(p.g_i, p.g_star_i);
    p.ok = ok;
    return p;
}

}  // namespace

AdaptiveState AdaptiveState::init(const Problem& problem, const Batch& batch,
                                  const ParamVector& theta, const BfeConfig& cfg) {
    cfg.validate();
    check_theta(theta);
    AdaptiveState s;
    const std::size_t n = theta.size();
    s.eta.assign(n, cfg.eta0);
    s.eps_comp.resize(n);
    s.eps_val.assign(n, cfg.angle_threshold);
    for (std::size_t i = 0; i < n; ++i) {
        const AxisProbe p = axis_probe(problem, batch, theta, i, cfg.eta0);
        s.eps_comp[i] = p.ok ? p.angle : kFailedEpsComp;
    }
    return s;
}

AdaptiveStepResult adaptive_bfe_gradient_change_step(const Problem& problem, const Batch& batch,
                                                     const ParamVector& theta,
                                                     const AdaptiveState& state,
                                                     const BfeConfig& cfg) {
    cfg.validate();
    check_theta(theta);
    const std::size_t n = theta.size();
    if (state.eta.size() != n || state.eps_comp.size() != n || state.eps_val.size() != n) {
        throw std::invalid_argument("adaptive step: state dimensions must match theta");
    }
    for (double e : state.eta) check_eta_range(e, cfg);
    const double threshold = cfg.angle_threshold;

    AdaptiveStepResult out;
    out.theta = theta;
    out.state.eta.resize(n);
    out.state.eps_comp.resize(n);
    out.state.eps_val.assign(n, threshold);

    std::size_t inner_max = 0;
    bool any_safeguard = false;
    bool branches_agree = true;
    Branch first_branch = Branch::None;
    double eta_in_sum = 0.0;
    double eta_out_sum = 0.0;

    for (std::size_t i = 0; i < n; ++i) {
        double eps_c = state.eps_comp[i];
        double eps_v = state.eps_val[i];
        double cur = state.eta[i];
        eta_in_sum += cur;
        const Branch br = (eps_c >= eps_v) ? Branch::ZoomIn : Branch::ZoomOut;
        if (i == 0) {
            first_branch = br;
        } else if (br != first_branch) {
            branches_agree = false;
        }

        std::size_t inner = 0;
        bool safeguard = false;
        std::vector<AxisProbe> probes;
        double new_coord = theta[i];
        double eta_out = state.eta[i];

        if (br == Branch::ZoomIn) {
            while (eps_c >= eps_v) {
                if (inner >= cfg.max_inner) {
                    safeguard = true;
                    break;
                }
                if (cur / 2.0 < cfg.eta_min) {
                    safeguard = true;
                    break;
                }
                cur = cur / 2.0;
                const AxisProbe p = axis_probe(problem, batch, theta, i, cur);
                ++inner;
                if (p.ok) {
                    eps_c = p.angle;
                    eps_v = threshold;
                    probes.push_back(p);
                }
            }
            if (!safeguard) {
                new_coord = probes.back().star_coord;
                eta_out = probes.back().eta;
            } else if (!probes.empty()) {
                std::size_t best = 0;
                for (std::size_t k = 1; k < probes.size(); ++k) {
                    if (probes[k].angle < probes[best].angle) best = k;
                }
                new_coord = probes[best].star_coord;
                eta_out = probes[best].eta;
            }
            // else: stay put on this coordinate.
        } else {
            while (eps_c < eps_v) {
                if (inner >= cfg.max_inner) {
                    safeguard = true;
                    break;
                }
                if (cur * 2.0 > cfg.eta_max) {
                    safeguard = true;
                    break;
                }
                cur = cur * 2.0;
                const AxisProbe p = axis_probe(problem, batch, theta, i, cur);
                ++inner;
                if (!p.ok) {
                    safeguard = true;
                    break;
                }
                eps_c = p.angle;
                eps_v = threshold;
                probes.push_back(p);
            }
            if (!safeguard) {
                eta_out = cur / 2.0;
                new_coord = theta[i] - eta_out * probes.back().g_i;
            } else if (!probes.empty()) {
                new_coord = probes.back().star_coord;  // largest validated step
                eta_out = probes.back().eta;
            } else {
                const GradVector g = problem.gradient(theta, batch);
                if (std::isfinite(g[i])) {
                    new_coord = theta[i] - eta_out * g[i];
                    if (!std::isfinite(new_coord)) new_coord = theta[i];
                }
            }
        }

        out.theta[i] = new_coord;
        out.state.eta[i] = eta_out;
        eta_out_sum += eta_out;
        if (inner > inner_max) inner_max = inner;
        any_safeguard = any_safeguard || safeguard;
    }

    // Refresh the carried angles per coordinate at the jointly updated point.
    for (std::size_t i = 0; i < n; ++i) {
        const AxisProbe r = axis_probe(problem, batch, out.theta, i, out.state.eta[i]);
        out.state.eps_comp[i] = r.ok ? r.angle : kFailedEpsComp;
    }

    StepReport& rep = out.report;
    rep.inner_loops = inner_max;
    rep.branch = branches_agree ? first_branch : Branch::None;
    rep.safeguard_hit = any_safeguard;
    rep.eta_in = eta_in_sum / static_cast<double>(n);
    rep.eta_out = eta_out_sum / static_cast<double>(n);
    rep.loss_accepted = problem.loss(out.theta, batch);
    return out;
}

}  // namespace bfeopt
