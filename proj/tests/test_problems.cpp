#include <cmath>
#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "bfeopt/core.hpp"
#include "bfeopt/problems.hpp"
#include "bfeopt/rng.hpp"
#include "support.hpp"

using namespace bfeopt;

TEST_CASE("regression dataset generation is deterministic and sized per spec") {
    RegressionSpec spec;
    spec.n_samples = 100;
    const RegressionData a = make_regression(spec);
    const RegressionData b = make_regression(spec);
    CHECK(a.dataset == b.dataset);
    CHECK(a.dataset.features.size() == 100);
    CHECK(a.dataset.targets.size() == 100);
    REQUIRE_FALSE(a.dataset.features.empty());
    CHECK(a.dataset.features[0].size() == spec.true_weights.size() - 1);
    for (const auto& row : a.dataset.features) {
        for (double x : row) {
            CHECK(x >= spec.feature_min);
            CHECK(x <= spec.feature_max);
        }
    }

    RegressionSpec other = spec;
    other.seed = 43;
    const RegressionData c = make_regression(other);
    CHECK_FALSE(a.dataset == c.dataset);
}

TEST_CASE("a noiseless dataset has exactly zero loss at the true parameters") {
    RegressionSpec spec;
    spec.true_weights = {1.5, -2.0, 0.25};
    spec.noise_std = 0.0;
    spec.n_samples = 64;
    const RegressionData data = make_regression(spec);
    CHECK(data.problem.loss(spec.true_weights, data.dataset) == 0.0);
    const GradVector g = data.problem.gradient(spec.true_weights, data.dataset);
    for (double gi : g) CHECK(gi == 0.0);
}

TEST_CASE("noise only perturbs targets, never features") {
    RegressionSpec a;
    a.n_samples = 32;
    a.noise_std = 0.0;
    RegressionSpec b = a;
    b.noise_std = 0.5;
    const RegressionData da = make_regression(a);
    const RegressionData db = make_regression(b);
    CHECK(da.dataset.features == db.dataset.features);
    CHECK_FALSE(da.dataset.targets == db.dataset.targets);
}

TEST_CASE("regression loss and gradient match a hand computation") {
    LinearRegressionProblem p(2);  // one feature plus intercept
    Batch batch;
    batch.features = {{1.0}, {2.0}};
    batch.targets = {0.0, 1.0};
    const ParamVector theta{1.0, 1.0};  // w = 1, b = 1 -> preds 2, 3
    // MSE = ((2-0)^2 + (3-1)^2) / 2 = 4.
    CHECK(p.loss(theta, batch) == 4.0);
    // d/dw = (2/N) sum (pred - y) x = (2*1 + 2*2) * 2/2 = 6
    // d/db = (2/N) sum (pred - y)   = (2 + 2) * 2/2   = 4
    const GradVector g = p.gradient(theta, batch);
    CHECK(g[0] == doctest::Approx(6.0).epsilon(1e-15));
    CHECK(g[1] == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(p.predict({2.0, -1.0}, {0.5}) == 2.0 * 0.5 + -1.0);
}

TEST_CASE("regression evaluation rejects mismatched shapes") {
    LinearRegressionProblem p(2);
    Batch batch;
    batch.features = {{1.0}};
    batch.targets = {0.0};
    CHECK_THROWS_AS(p.loss({1.0}, batch), std::invalid_argument);        // theta too short
    CHECK_THROWS_AS(p.loss({1.0, 1.0, 1.0}, batch), std::invalid_argument);
    Batch empty;
    CHECK_THROWS_AS(p.loss({1.0, 1.0}, empty), std::invalid_argument);
    Batch wide;
    wide.features = {{1.0, 2.0}};
    wide.targets = {0.0};
    CHECK_THROWS_AS(p.loss({1.0, 1.0}, wide), std::invalid_argument);
}

TEST_CASE("quadratic bowls evaluate exactly") {
    QuadraticSpec spec;
    spec.curvature = {{1.0, 0.0}, {0.0, 1.0}};
    spec.theta_opt = {0.0, 0.0};
    const QuadraticProblem p = make_quadratic(spec);
    const Batch b = placeholder_dataset();
    CHECK(p.loss({0.0, 0.0}, b) == 0.0);
    CHECK(p.loss({3.0, 4.0}, b) == 12.5);
    CHECK(p.gradient({3.0, 4.0}, b) == GradVector{3.0, 4.0});
    CHECK(p.gradient({0.0, 0.0}, b) == GradVector{0.0, 0.0});

    QuadraticSpec off;
    off.curvature = {{2.0, 0.5}, {0.5, 1.0}};
    off.theta_opt = {1.0, -1.0};
    const QuadraticProblem q = make_quadratic(off);
    CHECK(q.loss({1.0, -1.0}, b) == 0.0);
    // d = (1, 1): f = 0.5 * (2 + 0.5 + 0.5 + 1) = 2, grad = (2.5, 1.5).
    CHECK(q.loss({2.0, 0.0}, b) == doctest::Approx(2.0).epsilon(1e-15));
    const GradVector g = q.gradient({2.0, 0.0}, b);
    CHECK(g[0] == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(g[1] == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("quadratic specs reject bad curvature matrices") {
    QuadraticSpec indefinite;
    indefinite.curvature = {{1.0, 2.0}, {2.0, 1.0}};  // eigenvalues 3 and -1
    indefinite.theta_opt = {0.0, 0.0};
    CHECK_THROWS_AS(indefinite.validate(), std::invalid_argument);

    QuadraticSpec asymmetric;
    asymmetric.curvature = {{1.0, 0.5}, {0.2, 1.0}};
    asymmetric.theta_opt = {0.0, 0.0};
    CHECK_THROWS_AS(asymmetric.validate(), std::invalid_argument);

    QuadraticSpec ragged;
    ragged.curvature = {{1.0, 0.0}, {0.0}};
    ragged.theta_opt = {0.0, 0.0};
    CHECK_THROWS_AS(ragged.validate(), std::invalid_argument);

    QuadraticSpec mismatched;
    mismatched.curvature = {{1.0, 0.0}, {0.0, 1.0}};
    mismatched.theta_opt = {0.0, 0.0, 0.0};
    CHECK_THROWS_AS(mismatched.validate(), std::invalid_argument);

    QuadraticSpec empty;
    CHECK_THROWS_AS(empty.validate(), std::invalid_argument);
}

TEST_CASE("quadratic losses are midpoint convex") {
    Rng rng(31);
    for (int inst = 0; inst < 5; ++inst) {
        const QuadraticSpec spec = testsupport::random_spd_spec(rng, 3);
        const QuadraticProblem p = make_quadratic(spec);
        const Batch b = placeholder_dataset();
        for (int k = 0; k < 10; ++k) {
            ParamVector a(3), c(3), mid(3);
            for (std::size_t i = 0; i < 3; ++i) {
                a[i] = rng.gaussian() * 3.0;
                c[i] = rng.gaussian() * 3.0;
                mid[i] = 0.5 * (a[i] + c[i]);
            }
            CHECK(p.loss(mid, b) <= 0.5 * (p.loss(a, b) + p.loss(c, b)) + 1e-12);
        }
    }
}

TEST_CASE("landscape grids sample the loss on a lattice") {
    const testsupport::FnProblem p = testsupport::half_square(2);
    const Batch b = testsupport::unit_batch();
    LandscapeBounds bounds;  // [-1, 1]^2
    const LandscapeGrid grid = landscape_grid(p, b, bounds, 3);
    REQUIRE(grid.values.size() == 9);
    CHECK(grid.x_at(0) == -1.0);
    CHECK(grid.x_at(1) == 0.0);
    CHECK(grid.x_at(2) == 1.0);
    CHECK(grid.value_at(0, 0) == 1.0);  // corner (-1, -1)
    CHECK(grid.value_at(2, 0) == 1.0);
    CHECK(grid.value_at(0, 2) == 1.0);
    CHECK(grid.value_at(2, 2) == 1.0);
    CHECK(grid.value_at(1, 1) == 0.0);  // center
    CHECK(grid.value_at(1, 0) == 0.5);  // edge midpoints
    CHECK(grid.value_at(0, 1) == 0.5);
    // Symmetric loss -> symmetric grid.
    CHECK(grid.value_at(2, 1) == grid.value_at(0, 1));
    CHECK(grid.value_at(1, 2) == grid.value_at(1, 0));
}

TEST_CASE("landscape grids reject non-2D problems and tiny resolutions") {
    const Batch b = testsupport::unit_batch();
    const testsupport::FnProblem p3 = testsupport::half_square(3);
    CHECK_THROWS_AS(landscape_grid(p3, b, LandscapeBounds{}, 3), std::invalid_argument);
    const testsupport::FnProblem p2 = testsupport::half_square(2);
    CHECK_THROWS_AS(landscape_grid(p2, b, LandscapeBounds{}, 1), std::invalid_argument);
    LandscapeBounds inverted;
    inverted.x_min = 1.0;
    inverted.x_max = -1.0;
    CHECK_THROWS_AS(landscape_grid(p2, b, inverted, 3), std::invalid_argument);
}

TEST_CASE("datasets round-trip through CSV bitwise") {
    RegressionSpec spec;
    spec.n_samples = 20;
    const RegressionData data = make_regression(spec);
    const auto path =
        (std::filesystem::temp_directory_path() / "bfeopt_test_dataset.csv").string();
    write_dataset_csv(path, data.dataset);
    const Batch loaded = read_dataset_csv(path);
    CHECK(loaded == data.dataset);
    std::filesystem::remove(path);

    CHECK_THROWS_AS(read_dataset_csv("/nonexistent/bfeopt/nope.csv"), std::runtime_error);
}

TEST_CASE("analytic gradients agree with central differences") {
    Rng rng(77);
    RegressionSpec spec;
    spec.n_samples = 50;
    const RegressionData data = make_regression(spec);
    const QuadraticSpec qs = testsupport::random_spd_spec(rng, 3);
    const QuadraticProblem quad = make_quadratic(qs);
    const Batch qb = placeholder_dataset();

    const double h = 1e-6;
    const double tiny = 1e-12;
    for (int k = 0; k < 10; ++k) {
        ParamVector tr(data.problem.dimension()), tq(quad.dimension());
        for (double& v : tr) v = rng.gaussian();
        for (double& v : tq) v = rng.gaussian();
        const GradVector ar = data.problem.gradient(tr, data.dataset);
        const GradVector fr = finite_difference_gradient(data.problem, tr, data.dataset, h);
        const GradVector aq = quad.gradient(tq, qb);
        const GradVector fq = finite_difference_gradient(quad, tq, qb, h);
        for (std::size_t i = 0; i < tr.size(); ++i) {
            const double rel_r =
                std::abs(ar[i] - fr[i]) / std::max({std::abs(ar[i]), std::abs(fr[i]), tiny});
            CHECK(rel_r <= 1e-5);
        }
        for (std::size_t i = 0; i < tq.size(); ++i) {
            const double rel_q =
                std::abs(aq[i] - fq[i]) / std::max({std::abs(aq[i]), std::abs(fq[i]), tiny});
            CHECK(rel_q <= 1e-5);
        }
    }
}

TEST_CASE("the placeholder dataset is a single consistent row") {
    const Batch b = placeholder_dataset();
    CHECK(b.features.size() == 1);
    CHECK(b.targets.size() == 1);
    const auto batches = mini_batches(b, 8, 1);
    REQUIRE(batches.size() == 1);
    CHECK(batches[0] == b);
}
