#pragma once

// Tolerance rules: how large a loss difference between two probe points is
// still considered "in agreement".  The exploration loops compare a measured
// loss difference against a tolerance computed by one of these rules.

#include <cstddef>

namespace bfeopt {

class ToleranceRule {
  public:
    enum class Kind {
        MeanScaled,       // 0.5 * (|l2| + |l1|) * eps
        MinScaled,        // min(|l2| * eps, |l1| * eps)
        Constant,         // fixed value
        DecayMeanScaled,  // 0.5 * (|l2| + |l1|) * eps / (t + t_decay)
    };

    static ToleranceRule mean_scaled(double eps = 0.001);
    static ToleranceRule min_scaled(double eps = 0.001);
    static ToleranceRule constant(double value);
    static ToleranceRule decay_mean_scaled(double eps, double t_decay);

    // Tolerance for probe losses l1/l2 at optimizer step t (t is only used by
    // the decaying rule).
    double evaluate(double l1, double l2, std::size_t t) const;

    Kind kind() const { return kind_; }
    double eps() const { return eps_; }
    double t_decay() const { return t_decay_; }

  private:
    ToleranceRule(Kind kind, double eps, double t_decay)
        : kind_(kind), eps_(eps), t_decay_(t_decay) {}

    Kind kind_;
    double eps_;
    double t_decay_;
};

}  // namespace bfeopt
