#include "bfeopt/tolerance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bfeopt {

ToleranceRule ToleranceRule::mean_scaled(double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("ToleranceRule: eps must be positive");
    return ToleranceRule(Kind::MeanScaled, eps, 0.0);
}

ToleranceRule ToleranceRule::min_scaled(double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("ToleranceRule: eps must be positive");
    return ToleranceRule(Kind::MinScaled, eps, 0.0);
}

ToleranceRule ToleranceRule::constant(double value) {
    if (!(value > 0.0)) throw std::invalid_argument("ToleranceRule: constant must be positive");
    return ToleranceRule(Kind::Constant, value, 0.0);
}

ToleranceRule ToleranceRule::decay_mean_scaled(double eps, double t_decay) {
    if (!(eps > 0.0)) throw std::invalid_argument("ToleranceRule: eps must be positive");
    if (!(t_decay >= 0.0)) throw std::invalid_argument("ToleranceRule: t_decay must be >= 0");
    return ToleranceRule(Kind::DecayMeanScaled, eps, t_decay);
}

double ToleranceRule::evaluate(double l1, double l2, std::size_t t) const {
    switch (kind_) {
        case Kind::MeanScaled:
            return 0.5 * (std::abs(l2) + std::abs(l1)) * eps_;
        case Kind::MinScaled:
            return std::min(std::abs(l2) * eps_, std::abs(l1) * eps_);
        case Kind::Constant:
            return eps_;
        case Kind::DecayMeanScaled:
            return 0.5 * (std::abs(l2) + std::abs(l1)) * eps_ /
                   (static_cast<double>(t) + t_decay_);
    }
    return eps_;  // unreachable
}

}  // namespace bfeopt
